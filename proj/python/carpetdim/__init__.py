"""Dimension bounds and estimators for self-affine carpets.

A carpet argument is either a preset name (see ``preset_names()``) or a carpet
JSON string.
"""

import json

from . import _carpetdim
from ._carpetdim import (
    CarpetdimError,
    assouad_bounds,
    assouad_two_scale,
    bin_projected_measure,
    box_count,
    convolution_lower_bound,
    equivalence_classes,
    h_lower_bound,
    hu_s_multinacci,
    preset_names,
)

__all__ = [
    "CarpetdimError",
    "assouad_bounds",
    "assouad_two_scale",
    "bin_projected_measure",
    "box_count",
    "carpet",
    "convolution_lower_bound",
    "equivalence_classes",
    "error_kind",
    "h_lower_bound",
    "hu_s_multinacci",
    "preset_names",
    "report",
    "run",
]


def error_kind(err):
    """Kind name of a CarpetdimError, e.g. "OrderViolation"."""
    return str(err).split(":", 1)[0]


def carpet(spec):
    """Carpet JSON as a dict; spec is a preset name, a dict or a JSON string."""
    if isinstance(spec, dict):
        spec = json.dumps(spec)
    return json.loads(_carpetdim.carpet_json(spec))


def report(spec, s=None, wsp=None, ad_pif=None, estimate_s=True):
    """Dimension report as a dict."""
    if isinstance(spec, dict):
        spec = json.dumps(spec)
    return json.loads(_carpetdim.report_json(spec, s=s, wsp=wsp, ad_pif=ad_pif, estimate_s=estimate_s))


def run(tasks, out_dir, **options):
    """Runs tasks like the command line tool. Returns (exit_code, manifest dict or None, summary)."""
    config = dict(options, tasks=list(tasks), out_dir=str(out_dir))
    code, complete, files, error, summary = _carpetdim.run_json(json.dumps(config))
    manifest = None
    try:
        with open(f"{out_dir}/manifest.json", encoding="utf-8") as fh:
            manifest = json.load(fh)
    except OSError:
        pass
    if code != 0 and not error:
        error = "run failed"
    return code, manifest, summary if code == 0 else error
