"""File formats: matrices, tuples, operators, polynomial maps, reports.

Matrix literals are ``{"rows": r, "cols": c, "entries": [[re, im], ...]}``
row-major, where re/im are strings like "3/4" in exact mode and plain
numbers in float mode.  Tuple files carry their mode; operator files are
always exact.  Reports are emitted with sorted keys and floats rounded
to 12 significant digits, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .ell2 import BandedOperator, Diagonal, TruncationWindow
from .errors import FormatError
from .koszul import CommutingTuple, validate_tuple
from .linalg import Mat
from .polymap import Polynomial, PolyMap
from .scalars import EXACT, FLOAT, GaussianRational


# -- scalars ------------------------------------------------------------


def _parse_part_exact(v) -> Fraction:
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, bool):
        raise FormatError(f"bad scalar part {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(str(v))
    raise FormatError(f"bad scalar part {v!r}")


def parse_scalar(value, mode: str):
    """[re, im] pair, or a bare number/string for a real value."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise FormatError(f"scalar entry must be [re, im], got {value!r}")
        re, im = value
    else:
        re, im = value, 0
    if mode == EXACT:
        return GaussianRational(_parse_part_exact(re), _parse_part_exact(im))
    try:
        return complex(float(re), float(im))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"bad float scalar {value!r}") from exc


def _frac_str(f: Fraction) -> str:
    return str(f)


def scalar_to_json(value):
    if isinstance(value, GaussianRational):
        return [_frac_str(value.re), _frac_str(value.im)]
    c = complex(value)
    return [c.real, c.imag]


# -- matrices -----------------------------------------------------------


def mat_from_json(obj, mode: str = EXACT) -> Mat:
    try:
        rows = int(obj["rows"])
        cols = int(obj["cols"])
        entries = obj["entries"]
    except (KeyError, TypeError) as exc:
        raise FormatError("matrix literal needs rows, cols, entries") from exc
    if len(entries) != rows * cols:
        raise FormatError(
            f"matrix literal has {len(entries)} entries for {rows}x{cols}"
        )
    vals = [parse_scalar(e, mode) for e in entries]
    if mode == EXACT:
        return Mat(rows, cols, vals, EXACT)
    arr = np.array(vals, dtype=complex).reshape(rows, cols) if vals else np.zeros((rows, cols), dtype=complex)
    return Mat(rows, cols, arr, FLOAT)


def mat_to_json(M: Mat) -> dict:
    entries = [scalar_to_json(M.at(i, j)) for i in range(M.rows) for j in range(M.cols)]
    return {"rows": M.rows, "cols": M.cols, "entries": entries}


def mat_from_numpy_json(A: np.ndarray) -> dict:
    return mat_to_json(Mat.from_numpy(np.atleast_2d(A)))


# -- tuples -------------------------------------------------------------


def tuple_from_json(obj) -> CommutingTuple:
    mode = obj.get("mode", EXACT)
    if mode not in (EXACT, FLOAT):
        raise FormatError(f"unknown mode {mode!r}")
    mats = [mat_from_json(m, mode) for m in obj.get("matrices", [])]
    if not mats:
        raise FormatError("tuple file has no matrices")
    return validate_tuple(mats)


def tuple_to_json(T: CommutingTuple) -> dict:
    return {"mode": T.mode, "matrices": [mat_to_json(M) for M in T.matrices]}


# -- banded operators ----------------------------------------------------


def operator_from_json(obj) -> BandedOperator:
    diags = []
    for d in obj.get("diagonals", []):
        try:
            offset = int(d["offset"])
        except (KeyError, TypeError) as exc:
            raise FormatError("diagonal needs an integer offset") from exc
        prefix = tuple(parse_scalar(v, EXACT) for v in d.get("prefix", []))
        period = tuple(parse_scalar(v, EXACT) for v in d.get("period", [0]))
        diags.append(Diagonal(offset, prefix, period))
    declared = obj.get("bandwidth")
    if declared is not None:
        actual = max((abs(d.offset) for d in diags), default=0)
        if actual > int(declared):
            raise FormatError(
                f"declared bandwidth {declared} below largest offset {actual}"
            )
    patch = None
    if obj.get("patch") is not None:
        patch = mat_from_json(obj["patch"], EXACT)
    return BandedOperator.build(diags, patch=patch, fredholm=obj.get("fredholm"))


def operator_to_json(op: BandedOperator) -> dict:
    out = {
        "bandwidth": op.bandwidth,
        "diagonals": [
            {
                "offset": d.offset,
                "prefix": [scalar_to_json(v) for v in d.prefix],
                "period": [scalar_to_json(v) for v in d.period],
            }
            for d in op.diagonals
        ],
    }
    out["patch"] = mat_to_json(op.patch) if op.patch is not None else None
    out["fredholm"] = op.fredholm
    return out


# -- polynomial maps ------------------------------------------------------


def polymap_from_json(obj, mode: str = EXACT) -> PolyMap:
    if not isinstance(obj, list) or not obj:
        raise FormatError("polynomial map must be a nonempty list of polynomials")
    comps = []
    nvars = None
    for poly in obj:
        terms = []
        for term in poly:
            try:
                coeff = parse_scalar(term["coeff"], mode)
                mono = tuple(int(k) for k in term["monomial"])
            except (KeyError, TypeError) as exc:
                raise FormatError("polynomial term needs coeff and monomial") from exc
            terms.append((mono, coeff))
        if nvars is None:
            nvars = len(terms[0][0]) if terms else 1
        if not terms:
            terms = [((0,) * nvars, 0)]
        comps.append(Polynomial.from_terms(nvars, terms, mode))
    return PolyMap.from_components(comps)


def polymap_to_json(f: PolyMap) -> list:
    return [
        [
            {"coeff": scalar_to_json(c), "monomial": list(e)}
            for e, c in comp.terms
        ]
        for comp in f.components
    ]


def window_from_json(obj) -> TruncationWindow:
    return TruncationWindow(int(obj.get("N", 64)), int(obj.get("G", 16)))


# -- deterministic report emission ----------------------------------------


def _round_floats(x):
    if isinstance(x, float):
        return float(f"{x:.12g}")
    if isinstance(x, complex):
        return [_round_floats(x.real), _round_floats(x.imag)]
    if isinstance(x, dict):
        return {k: _round_floats(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round_floats(v) for v in x]
    if isinstance(x, np.floating):
        return _round_floats(float(x))
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def report_to_json_bytes(report: dict) -> bytes:
    body = json.dumps(_round_floats(report), sort_keys=True, indent=2)
    return (body + "\n").encode("utf-8")


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def report_to_csv_bytes(report: dict) -> bytes:
    """CSV rendering: tables keep their column contract, everything else
    flattens to key,value rows with sorted keys."""
    if report.get("command") == "growth" or "rows" in report:
        lines = ["m,dim_ker,dim_coker,index,exceeds"]
        for row in report["rows"]:
            lines.append(
                ",".join(
                    _csv_cell(row[k])
                    for k in ("m", "dim_ker", "dim_coker", "index", "exceeds")
                )
            )
        return ("\n".join(lines) + "\n").encode("utf-8")
    flat = _flatten(_round_floats(report))
    lines = ["key,value"] + [f"{k},{_csv_cell(v)}" for k, v in sorted(flat.items())]
    return ("\n".join(lines) + "\n").encode("utf-8")


def _flatten(obj, prefix=""):
    out = {}
    if isinstance(obj, dict):
        for k, v in obj.items():
            out.update(_flatten(v, f"{prefix}{k}."))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            out.update(_flatten(v, f"{prefix}{i}."))
    else:
        out[prefix[:-1] if prefix.endswith(".") else prefix] = obj
    return out


def emit_report(report: dict, fmt: str = "json", path=None) -> bytes:
    """Serialize a report; write it to ``path`` when given."""
    if fmt == "json":
        data = report_to_json_bytes(report)
    elif fmt == "csv":
        data = report_to_csv_bytes(report)
    else:
        raise FormatError(f"unknown report format {fmt!r}")
    if path is not None:
        with open(path, "wb") as fh:
            fh.write(data)
    return data
