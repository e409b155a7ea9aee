"""JSON and CSV formats used by the command line tool.

Complex numbers are ``[re, im]`` pairs; every float written is rounded to 12
significant digits so that output is byte-stable across runs.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .convexroof import RoofResult
from .errors import InvariantViolation
from .ghzw import CurveSample, GhzwFamily, SurfaceSample
from .localops import LocalOperator, sl_normalize
from .qstate import MixedState, PureState

SIG_DIGITS = 12


def fmt(x: float) -> str:
    return f"{x:.{SIG_DIGITS}g}"


def _round(x: float) -> float:
    v = float(fmt(float(x)))
    return 0.0 if v == 0 else v  # drop negative zero


def _cplx(z: complex) -> list[float]:
    return [_round(z.real), _round(z.imag)]


def _parse_cplx(v: Any, what: str) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    raise InvariantViolation(f"{what}: expected [re, im], got {v!r}")


def _parse_dims(obj: dict) -> tuple[int, ...]:
    dims = obj.get("dims")
    if not isinstance(dims, list) or not all(isinstance(d, int) for d in dims):
        raise InvariantViolation("'dims' must be a list of integers")
    return tuple(dims)


def dumps(obj: Any) -> str:
    """Serialize with floats already rounded, compact separators, trailing newline."""
    return json.dumps(_rounded(obj), sort_keys=False) + "\n"


def _rounded(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, (float, np.floating)):
        return _round(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def pure_to_json(psi: PureState) -> dict:
    return {"dims": list(psi.dims), "amplitudes": [_cplx(z) for z in psi.amplitudes]}


def mixed_to_json(rho: MixedState) -> dict:
    return {"dims": list(rho.dims), "matrix": [[_cplx(z) for z in row] for row in rho.matrix]}


def state_from_json(obj: dict) -> PureState | MixedState:
    """Parse either state format; the presence of ``amplitudes`` or ``matrix`` decides which."""
    if not isinstance(obj, dict):
        raise InvariantViolation("state file must contain a JSON object")
    dims = _parse_dims(obj)
    if "amplitudes" in obj:
        amps = [_parse_cplx(v, "amplitudes") for v in obj["amplitudes"]]
        return PureState(dims, np.array(amps, complex))
    if "matrix" in obj:
        rows = obj["matrix"]
        if not isinstance(rows, list):
            raise InvariantViolation("'matrix' must be a list of rows")
        mat = np.array([[_parse_cplx(v, "matrix") for v in row] for row in rows], complex)
        return MixedState(dims, mat)
    raise InvariantViolation("state file needs 'amplitudes' or 'matrix'")


def operator_from_json(obj: dict) -> LocalOperator:
    fs = obj.get("factors") if isinstance(obj, dict) else None
    if not isinstance(fs, list) or not fs:
        raise InvariantViolation("operator file needs a non-empty 'factors' list")
    return sl_normalize([np.array([[_parse_cplx(v, "factors") for v in row] for row in f], complex) for f in fs])


def operator_to_json(A: LocalOperator) -> dict:
    return {"factors": [[[_cplx(z) for z in row] for row in f] for f in A.factors]}


def family_from_json(obj: dict) -> GhzwFamily:
    if not isinstance(obj, dict):
        raise InvariantViolation("family file must contain a JSON object")
    missing = [k for k in "abcdf" if k not in obj]
    if missing:
        raise InvariantViolation(f"family file lacks coefficients {missing}")
    return GhzwFamily(*(_parse_cplx(obj[k], k) for k in "abcdf"))


def family_to_json(fam: GhzwFamily) -> dict:
    return {k: _cplx(getattr(fam, k)) for k in "abcdf"}


def roof_result_to_json(res: RoofResult) -> dict:
    return {
        "value": res.value,
        "weights": [float(w) for w in res.decomposition.weights],
        "states": [[_cplx(z) for z in s.amplitudes] for s in res.decomposition.states],
        "restarts_used": int(res.restarts_used),
        "converged": bool(res.converged),
    }


def load_json(path: str | Path) -> Any:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvariantViolation(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def curve_csv(samples: Iterable[CurveSample]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "char", "convex"])
    for s in samples:
        w.writerow([fmt(s.p), fmt(s.char_value), fmt(s.convex_value)])
    return buf.getvalue()


def surface_csv(samples: Iterable[SurfaceSample]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "q", "char", "convex"])
    for s in samples:
        w.writerow([fmt(s.p), fmt(s.q), fmt(s.char_value), fmt(s.convex_value)])
    return buf.getvalue()


def read_curve_csv(text: str) -> list[CurveSample]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["p", "char", "convex"]:
        raise InvariantViolation("curve CSV must start with header p,char,convex")
    return [CurveSample(float(p), float(c), float(v)) for p, c, v in rows[1:]]


def read_surface_csv(text: str) -> list[SurfaceSample]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["p", "q", "char", "convex"]:
        raise InvariantViolation("surface CSV must start with header p,q,char,convex")
    out = []
    for p, q, c, v in rows[1:]:
        p, q = float(p), float(q)
        out.append(SurfaceSample(p, q, 1.0 - p - q, float(c), float(v)))
    return out
