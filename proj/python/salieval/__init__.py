"""Saliency-map localization metrics (AUC-Judd, AUPRC) and image preprocessing."""

import json as _json

from ._salieval import *  # noqa: F401,F403
from ._salieval import SalievalError, __version__
from ._salieval import run_eval as _run_eval


def run_eval(manifest, out_dir, sources=("annotation_box", "external_mask"),
             bins=20, workers=0, write_svg=False):
    """Runs the evaluation harness and returns records, summary and failures."""
    result = _run_eval(str(manifest), str(out_dir), list(sources), bins,
                       workers, write_svg)
    return {
        "records": result["records"],
        "summary": _json.loads(result["summary_json"]),
        "failures": result["failures"],
    }


__all__ = ["SalievalError", "__version__", "run_eval"]
