"""JSON problem, gain and report files.

Matrices are row-major nested lists. Floats are written with Python's
shortest round-trip representation, so reading a file back reproduces every
value bit for bit; non-finite values are written as the strings ``"inf"``,
``"-inf"`` and ``"nan"``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .lift import DynamicProblem
from .model import BlockGain, GammaFormProblem, InvalidProblemError, Partition, SolveReport, TeamProblem

__all__ = [
    "ProblemFileError",
    "load_problem",
    "parse_problem",
    "problem_to_dict",
    "dump_json",
    "load_gain",
    "parse_gain",
    "gain_to_list",
    "report_to_dict",
    "encode_float",
    "decode_float",
]


class ProblemFileError(InvalidProblemError):
    pass


def encode_float(x: float):
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def decode_float(x) -> float:
    if isinstance(x, str):
        return float(x)
    return float(x)


def _matrix(a: np.ndarray) -> list:
    return [[encode_float(v) for v in row] for row in np.asarray(a)]


def _field(doc: dict, name: str, where: str):
    if name not in doc:
        raise ProblemFileError(f"{where}: missing field '{name}'")
    return doc[name]


def _as_matrix(value, name: str, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    if not isinstance(value, list) or any(not isinstance(r, list) for r in value):
        raise ProblemFileError(f"field '{name}': expected a list of rows")
    lengths = {len(r) for r in value}
    if len(lengths) > 1:
        raise ProblemFileError(f"field '{name}': rows have unequal lengths {sorted(lengths)}")
    try:
        arr = np.array([[decode_float(v) for v in r] for r in value], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ProblemFileError(f"field '{name}': non-numeric entry ({exc})") from None
    if arr.size == 0:
        arr = arr.reshape(rows or 0, cols or 0)
    if not np.all(np.isfinite(arr)):
        raise ProblemFileError(f"field '{name}': entries must be finite")
    if rows is not None and arr.shape[0] != rows:
        raise ProblemFileError(f"field '{name}': expected {rows} rows, got {arr.shape[0]}")
    if cols is not None and arr.shape[1] != cols:
        raise ProblemFileError(f"field '{name}': expected {cols} columns, got {arr.shape[1]}")
    return arr


def _partition(doc: dict, where: str) -> Partition:
    part = _field(doc, "partition", where)
    try:
        return Partition(tuple(part["m"]), tuple(part["p"]))
    except (KeyError, TypeError) as exc:
        raise ProblemFileError(f"{where}: partition needs integer lists 'm' and 'p' ({exc})") from None


def parse_problem(doc: dict[str, Any]):
    """Build a problem object from a decoded JSON document."""
    if not isinstance(doc, dict):
        raise ProblemFileError("problem file must hold a JSON object")
    kind = _field(doc, "kind", "problem")
    if kind == "team":
        part = _partition(doc, "team")
        m, p = part.m, part.p
        E = _as_matrix(_field(doc, "E", "team"), "E", rows=p)
        q = E.shape[1]
        return TeamProblem(
            Qww=_as_matrix(_field(doc, "Qww", "team"), "Qww", q, q),
            Qwu=_as_matrix(_field(doc, "Qwu", "team"), "Qwu", q, m),
            Quu=_as_matrix(_field(doc, "Quu", "team"), "Quu", m, m),
            D=_as_matrix(_field(doc, "D", "team"), "D", p, m),
            E=E,
            partition=part,
        )
    if kind == "gamma_form":
        part = _partition(doc, "gamma_form")
        q = int(_field(doc, "q", "gamma_form"))
        if "p" in doc and int(doc["p"]) != part.p:
            raise ProblemFileError(f"gamma_form: p={doc['p']} disagrees with partition sum {part.p}")
        size = q + part.p + part.m
        return GammaFormProblem(
            Q=_as_matrix(_field(doc, "Q", "gamma_form"), "Q", size, size),
            R=_as_matrix(_field(doc, "R", "gamma_form"), "R", size, size),
            q=q,
            partition=part,
        )
    if kind == "dynamic":
        A = _as_matrix(_field(doc, "A", "dynamic"), "A")
        nx = A.shape[0]
        B = _as_matrix(_field(doc, "B", "dynamic"), "B", rows=nx)
        Cs = _field(doc, "C", "dynamic")
        if not isinstance(Cs, list) or not Cs:
            raise ProblemFileError("field 'C': expected a non-empty list of per-player matrices")
        Cmeas = tuple(_as_matrix(c, f"C[{i}]", cols=nx) for i, c in enumerate(Cs))
        sc = _field(doc, "stage_cost", "dynamic")
        mu = B.shape[1]
        if isinstance(sc, dict):
            Qxx = _as_matrix(_field(sc, "Qxx", "stage_cost"), "stage_cost.Qxx", nx, nx)
            Quu = _as_matrix(_field(sc, "Quu", "stage_cost"), "stage_cost.Quu", mu, mu)
            Qxu = _as_matrix(sc["Qxu"], "stage_cost.Qxu", nx, mu) if "Qxu" in sc else np.zeros((nx, mu))
            S = np.block([[Qxx, Qxu], [Qxu.T, Quu]])
        else:
            S = _as_matrix(sc, "stage_cost", nx + mu, nx + mu)
        if "partition" in doc:
            m_sizes = tuple(int(s) for s in doc["partition"]["m"])
        elif len(Cmeas) == 1:
            m_sizes = (mu,)
        else:
            raise ProblemFileError("dynamic: 'partition': {'m': [...]} is required with several players")
        dyn = DynamicProblem(
            A=A,
            B=B,
            Cmeas=Cmeas,
            stage_cost=S,
            horizon=int(_field(doc, "horizon", "dynamic")),
            m_sizes=m_sizes,
            include_initial_state=bool(doc.get("include_initial_state", True)),
        )
        bad = dyn.validate()
        if bad:
            raise ProblemFileError("dynamic: " + "; ".join(bad))
        return dyn
    raise ProblemFileError(f"unknown problem kind {kind!r}; expected team, gamma_form or dynamic")


def _read_json(path) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def load_problem(path):
    return parse_problem(_read_json(path))


def problem_to_dict(prob) -> dict[str, Any]:
    if isinstance(prob, TeamProblem):
        part = prob.partition
        return {
            "kind": "team",
            "partition": {"m": list(part.m_sizes), "p": list(part.p_sizes)},
            "Qww": _matrix(prob.Qww),
            "Qwu": _matrix(prob.Qwu),
            "Quu": _matrix(prob.Quu),
            "D": _matrix(prob.D),
            "E": _matrix(prob.E),
        }
    if isinstance(prob, GammaFormProblem):
        part = prob.partition
        return {
            "kind": "gamma_form",
            "partition": {"m": list(part.m_sizes), "p": list(part.p_sizes)},
            "q": prob.q,
            "p": prob.p,
            "Q": _matrix(prob.Q),
            "R": _matrix(prob.R),
        }
    if isinstance(prob, DynamicProblem):
        return {
            "kind": "dynamic",
            "A": _matrix(prob.A),
            "B": _matrix(prob.B),
            "C": [_matrix(c) for c in prob.Cmeas],
            "stage_cost": _matrix(prob.stage_cost),
            "horizon": prob.horizon,
            "partition": {"m": list(prob.m_sizes)},
            "include_initial_state": prob.include_initial_state,
        }
    raise TypeError(f"cannot serialize {type(prob).__name__}")


def dump_json(doc, path=None) -> str:
    text = json.dumps(doc, indent=2, allow_nan=False) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def gain_to_list(K: BlockGain) -> list:
    return [_matrix(b) for b in K.blocks]


def parse_gain(doc) -> BlockGain:
    blocks = doc.get("blocks", doc.get("gain")) if isinstance(doc, dict) else doc
    if not isinstance(blocks, list) or not blocks:
        raise ProblemFileError("gain file: expected a list of blocks or {'blocks': [...]}")
    return BlockGain(tuple(_as_matrix(b, f"blocks[{i}]") for i, b in enumerate(blocks)))


def load_gain(path) -> BlockGain:
    return parse_gain(_read_json(path))


def report_to_dict(report: SolveReport, wall_time: float | None = None) -> dict[str, Any]:
    return {
        "status": "ok",
        "gamma_star": encode_float(report.gamma_star),
        "gamma_bar": encode_float(report.gamma_bar),
        "gain": gain_to_list(report.gain),
        "lmi_margin": encode_float(report.lmi_margin),
        "oracle_gamma": encode_float(report.oracle_gamma),
        "well_posed": True,
        "bisection_trace": [[encode_float(g), bool(f)] for g, f in report.bisection_trace],
        "solver": {
            "gamma_upper": encode_float(report.gamma_upper),
            "gamma_lower": encode_float(report.gamma_lower),
            "gain_norm": encode_float(report.gain_norm),
            "converged": report.converged,
            "iterations": report.iterations,
            "seed": report.seed,
            "gamma_tol": encode_float(report.gamma_tol),
            "feas_tol": encode_float(report.feas_tol),
            "witness_w_degenerate": report.witness_w_degenerate,
            "wall_time": None if wall_time is None else encode_float(wall_time),
        },
    }
