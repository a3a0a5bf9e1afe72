"""JSON interchange for every value the command line reads or writes.

Complex scalars travel as ``[re, im]`` pairs (bare numbers are accepted on
input), matrices as row lists.  Floats are emitted with Python's shortest
round-trip repr, so ``decode(encode(x))`` is exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .classical import ClassicalExchSeq, FinDist
from .cpmaps import ChoiMap
from .cstar import Algebra, StateVec
from .definetti import AtomSet, Cone, MediatingMap, Mixture, UniquenessReport
from .exchange import ExchSeq, ExchangeReport


class SchemaError(ValueError):
    """Input parsed as JSON but does not match the expected document shape."""


def _fail(path: str, msg: str):
    raise SchemaError(f"{path}: {msg}")


# --- scalars and matrices ----------------------------------------------------

def encode_complex(z: complex):
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(v, path: str = "value") -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    _fail(path, f"expected number or [re, im] pair, got {v!r}")


def encode_matrix(m: np.ndarray):
    m = np.asarray(m)
    return [[encode_complex(x) for x in row] for row in m.tolist()]


def decode_matrix(rows, path: str = "matrix") -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        _fail(path, "expected a non-empty list of rows")
    width = len(rows[0])
    out = np.zeros((len(rows), width), dtype=complex)
    for i, row in enumerate(rows):
        if len(row) != width:
            _fail(path, f"row {i} has length {len(row)}, expected {width}")
        for j, v in enumerate(row):
            out[i, j] = decode_complex(v, f"{path}[{i}][{j}]")
    return out


def _decode_blocks(doc, key: str, path: str) -> Algebra:
    blocks = doc.get(key)
    if not isinstance(blocks, list) or not all(isinstance(b, int) and b >= 1 for b in blocks):
        _fail(path, f"field {key!r} must be a list of positive integers")
    return Algebra(tuple(blocks))


def _require(doc, key: str, path: str):
    if not isinstance(doc, dict) or key not in doc:
        _fail(path, f"missing field {key!r}")
    return doc[key]


# --- states and maps -----------------------------------------------------------

def encode_state(s: StateVec) -> dict:
    return {"blocks": list(s.algebra.blocks), "dens": [encode_matrix(m) for m in s.dens]}


def decode_state(doc, path: str = "state") -> StateVec:
    alg = _decode_blocks(doc, "blocks", path)
    mats = _require(doc, "dens", path)
    if not isinstance(mats, list) or len(mats) != alg.n_blocks:
        _fail(path, f"'dens' must list {alg.n_blocks} blocks")
    return StateVec(alg, [decode_matrix(m, f"{path}.dens[{i}]") for i, m in enumerate(mats)])


def encode_choi(f: ChoiMap) -> dict:
    return {
        "source": list(f.source.blocks),
        "target": list(f.target.blocks),
        "direction": f.direction,
        "choi": encode_matrix(f.choi),
    }


def decode_choi(doc, path: str = "map") -> ChoiMap:
    source = _decode_blocks(doc, "source", path)
    target = _decode_blocks(doc, "target", path)
    direction = _require(doc, "direction", path)
    if direction not in ("H", "S"):
        _fail(path, f"direction must be 'H' or 'S', got {direction!r}")
    choi = decode_matrix(_require(doc, "choi", path), f"{path}.choi")
    try:
        return ChoiMap(source, target, direction, choi)
    except ValueError as e:
        _fail(path, str(e))


# --- sequences ------------------------------------------------------------------

def encode_exch_seq(seq: ExchSeq) -> dict:
    if seq.base.n_blocks != 1:
        raise ValueError("only single-block bases have a quantum sequence format")
    return {
        "base_dim": seq.base.blocks[0],
        "depth": seq.depth,
        "states": [encode_matrix(seq.level(n).dens[0]) for n in range(1, seq.depth + 1)],
        "tol": seq.tolerance,
    }


def decode_exch_seq(doc, path: str = "sequence") -> ExchSeq:
    d = _require(doc, "base_dim", path)
    if not isinstance(d, int) or d < 2:
        _fail(path, f"base_dim must be an integer >= 2, got {d!r}")
    depth = _require(doc, "depth", path)
    mats = _require(doc, "states", path)
    if not isinstance(mats, list) or len(mats) != depth:
        _fail(path, f"'states' must list {depth} matrices")
    tol = doc.get("tol", 1e-9)
    base = Algebra((d,))
    states = []
    for n, m in enumerate(mats, start=1):
        mat = decode_matrix(m, f"{path}.states[{n - 1}]")
        if mat.shape != (d**n, d**n):
            _fail(path, f"level {n} matrix is {mat.shape}, expected {(d**n, d**n)}")
        states.append(StateVec(Algebra((d**n,)), [mat]))
    try:
        return ExchSeq(base, depth, states, float(tol))
    except ValueError as e:
        _fail(path, str(e))


def encode_classical_seq(seq: ClassicalExchSeq) -> dict:
    return {
        "space": list(seq.space),
        "depth": seq.depth,
        "measures": [list(map(float, seq.level(n).probs)) for n in range(1, seq.depth + 1)],
        "tol": seq.tolerance,
    }


def decode_classical_seq(doc, path: str = "sequence") -> ClassicalExchSeq:
    space = _require(doc, "space", path)
    if not isinstance(space, list) or len(space) < 2:
        _fail(path, "'space' must list at least two labels")
    depth = _require(doc, "depth", path)
    rows = _require(doc, "measures", path)
    if not isinstance(rows, list) or len(rows) != depth:
        _fail(path, f"'measures' must list {depth} probability vectors")
    tol = float(doc.get("tol", 1e-9))
    from .classical import tuple_space

    measures = []
    for n, row in enumerate(rows, start=1):
        if not isinstance(row, list) or len(row) != len(space) ** n:
            _fail(path, f"level {n} must have {len(space) ** n} probabilities")
        try:
            measures.append(FinDist(tuple_space(space, n), np.asarray(row, dtype=float)))
        except ValueError as e:
            _fail(f"{path}.measures[{n - 1}]", str(e))
    try:
        return ClassicalExchSeq(space, depth, measures, tol)
    except ValueError as e:
        _fail(path, str(e))


# --- atoms, mixtures, cones ------------------------------------------------------

def encode_atoms(atoms: AtomSet) -> dict:
    if atoms.base.n_blocks != 1:
        return {
            "space": list(range(atoms.base.n_blocks)),
            "grid": [[float(m[0, 0].real) for m in s.dens] for s in atoms.atoms],
        }
    return {"atoms": [encode_matrix(s.dens[0]) for s in atoms.atoms]}


def decode_atoms(doc, path: str = "atoms") -> AtomSet:
    from .definetti import explicit_atoms

    if isinstance(doc, dict) and "grid" in doc:
        space = _require(doc, "space", path)
        k = len(space)
        states = []
        for i, row in enumerate(doc["grid"]):
            if not isinstance(row, list) or len(row) != k:
                _fail(path, f"grid row {i} must have {k} probabilities")
            states.append(
                StateVec(Algebra((1,) * k), [np.array([[float(p)]]) for p in row])
            )
        try:
            return explicit_atoms(states)
        except ValueError as e:
            _fail(path, str(e))
    mats = _require(doc, "atoms", path)
    if not isinstance(mats, list) or not mats:
        _fail(path, "'atoms' must be a non-empty list of matrices")
    states = []
    for i, m in enumerate(mats):
        mat = decode_matrix(m, f"{path}.atoms[{i}]")
        if mat.shape[0] != mat.shape[1]:
            _fail(path, f"atom {i} is not square")
        states.append(StateVec(Algebra((mat.shape[0],)), [mat]))
    try:
        return explicit_atoms(states)
    except ValueError as e:
        _fail(path, str(e))


def encode_mixture(mix: Mixture) -> dict:
    doc = encode_atoms(mix.atomset)
    doc["weights"] = [float(w) for w in mix.weights]
    return doc


def decode_mixture(doc, path: str = "mixture") -> Mixture:
    atoms = decode_atoms(doc, path)
    weights = _require(doc, "weights", path)
    try:
        return Mixture(atoms, np.asarray(weights, dtype=float))
    except ValueError as e:
        _fail(path, str(e))


def encode_cone(cone: Cone) -> dict:
    return {
        "apex": list(cone.apex.blocks),
        "depth": cone.depth,
        "channels": [encode_choi(ch) for ch in cone.channels],
        "tol": cone.tolerance,
    }


def decode_cone(doc, path: str = "cone") -> Cone:
    apex = _decode_blocks(doc, "apex", path)
    depth = _require(doc, "depth", path)
    chans = _require(doc, "channels", path)
    if not isinstance(chans, list) or len(chans) != depth:
        _fail(path, f"'channels' must list {depth} maps")
    tol = float(doc.get("tol", 1e-9))
    channels = [decode_choi(c, f"{path}.channels[{i}]") for i, c in enumerate(chans)]
    try:
        return Cone(apex, depth, channels, tol)
    except ValueError as e:
        _fail(path, str(e))


def encode_mediating(med: MediatingMap) -> dict:
    return {
        "apex": list(med.apex.blocks),
        "atoms": encode_atoms(med.atomset),
        "probes": [encode_state(p) for p in med.probes],
        "weights": [[float(w) for w in row] for row in med.weights],
        "residuals": [float(r) for r in med.residuals],
    }


# --- reports ---------------------------------------------------------------------

def encode_report(report: ExchangeReport, kind: str) -> dict:
    return {
        "kind": kind,
        "ok": report.ok,
        "tolerance": report.tolerance,
        "max_violation": report.max_violation,
        "levels": [
            {
                "level": lv.level,
                "symmetry": lv.symmetry,
                "worst_permutation": list(lv.worst_permutation)
                if lv.worst_permutation is not None
                else None,
                "consistency": lv.consistency,
                "worst_source": lv.worst_source,
            }
            for lv in report.levels
        ],
    }


def encode_uniqueness(rep: UniquenessReport) -> dict:
    return {
        "n_atoms": rep.n_atoms,
        "moment_rank": rep.moment_rank,
        "independent": rep.independent,
        "trials": rep.trials,
        "seed": rep.seed,
        "max_weight_spread": rep.max_weight_spread,
        "max_moment_spread": rep.max_moment_spread,
    }


# --- top-level I/O ----------------------------------------------------------------

def detect_sequence(doc, path: str = "input"):
    """Dispatch a parsed document to the quantum or classical decoder."""
    if not isinstance(doc, dict):
        _fail(path, "expected a JSON object")
    if "base_dim" in doc:
        return decode_exch_seq(doc, path)
    if "space" in doc:
        return decode_classical_seq(doc, path)
    _fail(path, "cannot tell the sequence kind: need 'base_dim' or 'space'")


def load_document(filename: str):
    with open(filename, "r", encoding="utf-8") as fh:
        return json.load(fh)


def dump_document(doc, filename: str | None) -> str:
    text = json.dumps(doc, indent=2)
    if filename:
        with open(filename, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text
