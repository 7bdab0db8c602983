"""Input documents, JSON reports and CSV plot data."""

import csv
import json
import math
from pathlib import Path

import numpy as np

from mrentropy.errors import IoError, ParseError, UseMonteCarloError
from mrentropy.model import CountSample, MomentConstraint, OutcomeModel
from mrentropy.solver import beta_curve
from mrentropy.updaters import marginal_density_grid

DATA_DIR = Path(__file__).parent / "data"


def resolve_input(path):
    """Path as given, or a bundled example of that file name."""
    path = Path(path)
    if not path.exists() and (DATA_DIR / path.name).exists():
        return DATA_DIR / path.name
    return path


def _load_json(path):
    path = resolve_input(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from None


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"expected a number, got {value!r}", where)
    return value


def parse_document(doc, source="<input>"):
    """Validate a decoded input document.

    Accepts ``{"types": [{"label": ..., "f": ...}, ...], "counts": [...],
    "moment": F}`` with ``counts`` and ``moment`` optional, or a report
    written by :func:`write_report` (its ``"input"`` block is used).

    Returns
    -------
    (OutcomeModel, CountSample or None, MomentConstraint or None)
    """
    if isinstance(doc, dict) and "input" in doc and "types" not in doc:
        doc = doc["input"]
        source = f"{source}#input"
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", source)
    types = doc.get("types")
    if not isinstance(types, list):
        raise ParseError("'types' must be a list", f"{source}:types")
    labels, names = [], []
    for idx, entry in enumerate(types):
        where = f"{source}:types[{idx}]"
        if not isinstance(entry, dict) or "f" not in entry:
            raise ParseError("each type needs an 'f' value", where)
        labels.append(_number(entry["f"], f"{where}.f"))
        names.append(str(entry.get("label", idx + 1)))
    model = OutcomeModel(tuple(labels), tuple(names))

    counts = None
    if doc.get("counts") is not None:
        raw = doc["counts"]
        if not isinstance(raw, list):
            raise ParseError("'counts' must be a list", f"{source}:counts")
        for idx, v in enumerate(raw):
            _number(v, f"{source}:counts[{idx}]")
        counts = CountSample(tuple(raw)).check_against(model)

    moment = None
    if doc.get("moment") is not None:
        moment = MomentConstraint(_number(doc["moment"], f"{source}:moment"))
    return model, counts, moment


def parse_input(path):
    """Read and validate an input (or report) JSON file."""
    return parse_document(_load_json(path), str(path))


def input_document(model, counts, moment):
    doc = {"types": [{"label": n, "f": f} for n, f in zip(model.names, model.f)]}
    if counts is not None:
        doc["counts"] = list(counts.m)
    if moment is not None:
        doc["moment"] = moment.F
    return doc


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def dumps_report(report):
    return json.dumps(_clean(report), indent=2)


def write_report(report, path):
    try:
        Path(path).write_text(dumps_report(report) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write report {path}: {exc.strerror or exc}") from None


def write_csv(path, header, rows):
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow([repr(float(v)) for v in row])
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror or exc}") from None


def moment_grid(model, points=39):
    """Evenly spaced interior moments, ``(max f - min f) / (points + 1)`` apart.

    For labels 1, 2, 3 this is 1.05, 1.10, ..., 2.95.
    """
    lo, hi = min(model.f), max(model.f)
    step = (hi - lo) / (points + 1)
    return [lo + step * (j + 1) for j in range(points)]


def emit_plot_data(out_dir, spec=None, curve_counts=None, model=None, grid=200, tol=1e-10,
                   method="series", warn=None):
    """Write ``beta_vs_F.csv`` and ``marginal_<i>.csv`` files into ``out_dir``.

    Parameters
    ----------
    spec : PosteriorSpec, optional
        Posterior whose marginals are written (one file per type).
    curve_counts : CountSample, optional
        Counts for the multiplier curve; no curve is written without them.
    grid : int
        Points per marginal; zero skips the marginal files with a warning.

    Returns
    -------
    list of written paths
    """
    warn = warn or (lambda msg: None)
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {out}: {exc.strerror or exc}") from None
    written = []
    model = model or (spec.model if spec is not None else None)
    if curve_counts is not None and model is not None:
        pairs = sorted(beta_curve(model, curve_counts, moment_grid(model), tol, method))
        path = out / "beta_vs_F.csv"
        write_csv(path, ["F", "beta"], pairs)
        written.append(str(path))
    if spec is not None:
        if grid <= 0:
            warn("empty marginal grid requested; no marginal files written")
        else:
            try:
                for i in range(1, spec.model.k + 1):
                    rows = marginal_density_grid(spec, i, int(grid))
                    path = out / f"marginal_{i}.csv"
                    write_csv(path, ["theta", "density"], rows)
                    written.append(str(path))
            except UseMonteCarloError as exc:
                warn(f"marginal grids skipped: {exc}")
    return written

