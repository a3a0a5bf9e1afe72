"""Command-line front end.

Four commands: ``check`` (exchangeability report), ``reconstruct`` (mixture
recovery), ``factor`` (cone factorization through an atom set), and ``demo``
(canned end-to-end scenarios).

Exit codes: 0 success, 1 invariant failure, 2 unreadable/invalid input,
3 not representable over the given atoms (residual above ``--max-residual``).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import classical, definetti, fixtures, serialize
from .classical import ClassicalExchSeq
from .cstar import state_distance
from .definetti import (
    AtomSet,
    ConeLawViolation,
    NotExchangeable,
    NotRepresentable,
    default_atoms,
    factorization_error,
    mediating_map,
    moment_rank,
    reconstruct,
    uniqueness_check,
)
from .exchange import ExchSeq, check_exchangeable
from .serialize import SchemaError

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_PARSE = 2
EXIT_NOT_REPRESENTABLE = 3


def _emit(args, text_lines, doc) -> None:
    if args.format == "json":
        out = serialize.dump_document(doc, args.output)
        if not args.output:
            print(out)
    else:
        body = "\n".join(text_lines)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(body + "\n")
        else:
            print(body)


def _report_lines(report, kind: str) -> list[str]:
    lines = [f"kind: {kind}", f"tolerance: {report.tolerance:g}"]
    for lv in report.levels:
        line = f"level {lv.level}: symmetry {lv.symmetry:.3e}"
        if lv.worst_permutation is not None:
            line += f" (worst permutation {lv.worst_permutation})"
        line += f", consistency {lv.consistency:.3e}"
        if lv.worst_source is not None:
            line += f" (vs level {lv.worst_source})"
        lines.append(line)
    lines.append("verdict: " + ("exchangeable" if report.ok else "NOT exchangeable"))
    return lines


def _load_sequence(args):
    doc = serialize.load_document(args.input)
    seq = serialize.detect_sequence(doc, args.input)
    if args.tol is not None:
        seq.tolerance = args.tol
    if args.depth is not None:
        if isinstance(seq, ExchSeq):
            seq = seq.truncate(args.depth)
        else:
            if not 1 <= args.depth <= seq.depth:
                raise SchemaError(f"--depth {args.depth} outside 1..{seq.depth}")
            seq = ClassicalExchSeq(
                seq.space, args.depth, seq.measures[: args.depth], seq.tolerance
            )
    return seq


def _load_atoms(args, seq) -> AtomSet | list:
    if args.atoms:
        doc = serialize.load_document(args.atoms)
        atoms = serialize.decode_atoms(doc, args.atoms)
        if isinstance(seq, ClassicalExchSeq):
            # classical grids ride along as FinDists
            k = len(seq.space)
            if atoms.base.n_blocks != k:
                raise SchemaError(
                    f"grid over {atoms.base.n_blocks} points, sequence space has {k}"
                )
            return [
                classical.FinDist(list(seq.space), np.array([m[0, 0].real for m in s.dens]))
                for s in atoms.atoms
            ]
        if atoms.base != seq.base:
            raise SchemaError(f"atoms on {atoms.base} do not match base {seq.base}")
        return atoms
    if isinstance(seq, ClassicalExchSeq):
        if len(seq.space) != 2:
            raise SchemaError("no default grid beyond two-point spaces; pass --atoms")
        count = args.atom_count
        return [
            classical.bernoulli(list(seq.space), j / (count - 1)) for j in range(count)
        ]
    return default_atoms(seq.base.blocks[0], args.atom_count, args.seed)


def cmd_check(args) -> int:
    seq = _load_sequence(args)
    if isinstance(seq, ClassicalExchSeq):
        kind, report = "classical", classical.check_exchangeable_measures(seq)
    else:
        kind, report = "quantum", check_exchangeable(seq)
    _emit(args, _report_lines(report, kind), serialize.encode_report(report, kind))
    return EXIT_OK if report.ok else EXIT_INVARIANT


def _weight_lines(weights, names=None) -> list[str]:
    order = np.argsort(weights)[::-1]
    shown = [i for i in order if weights[i] > 1e-12][:12]
    lines = []
    for i in shown:
        label = names[i] if names else f"atom {i}"
        lines.append(f"  {label}: {weights[i]:.8f}")
    if len(shown) < int(np.count_nonzero(weights > 1e-12)):
        lines.append(f"  ... ({np.count_nonzero(weights > 1e-12)} atoms carry weight)")
    return lines


def cmd_reconstruct(args) -> int:
    seq = _load_sequence(args)
    atoms = _load_atoms(args, seq)
    if isinstance(seq, ClassicalExchSeq):
        weights, residual = classical.hs_reconstruct(seq, atoms)
        rank = classical.classical_moment_rank(atoms, seq.depth)
        n_atoms = len(atoms)
        doc = {
            "space": list(seq.space),
            "grid": [list(map(float, g.probs)) for g in atoms],
            "weights": [float(w) for w in weights],
        }
    else:
        mixture, residual = reconstruct(seq, atoms)
        weights = mixture.weights
        rank = moment_rank(atoms, seq.depth)
        n_atoms = len(atoms)
        doc = serialize.encode_mixture(mixture)
    degenerate = rank < n_atoms
    doc.update(
        {
            "residual": residual,
            "moment_rank": rank,
            "degenerate": degenerate,
        }
    )
    lines = [f"atoms: {n_atoms}", f"residual: {residual:.6e}"]
    lines += _weight_lines(weights)
    lines.append(
        f"moment rank: {rank}/{n_atoms}"
        + (" (degenerate: weights not unique at this depth)" if degenerate else "")
    )
    if args.max_residual is not None and residual > args.max_residual:
        lines.append(
            f"NOT REPRESENTABLE: residual {residual:.6e} > bound {args.max_residual:g}"
        )
        _emit(args, lines, doc)
        return EXIT_NOT_REPRESENTABLE
    _emit(args, lines, doc)
    return EXIT_OK


def cmd_factor(args) -> int:
    doc = serialize.load_document(args.input)
    cone = serialize.decode_cone(doc, args.input)
    if args.tol is not None:
        cone.tolerance = args.tol
    if args.atoms:
        atoms = serialize.decode_atoms(serialize.load_document(args.atoms), args.atoms)
    else:
        atoms = default_atoms(cone.base.blocks[0], args.atom_count, args.seed)
    med = mediating_map(cone, atoms, max_residual=args.max_residual)
    err = factorization_error(cone, med)
    unique = uniqueness_check(cone, atoms, trials=args.trials, seed=args.seed)
    out = serialize.encode_mediating(med)
    out["factorization_error"] = err
    out["uniqueness"] = serialize.encode_uniqueness(unique)
    lines = [
        f"probes: {len(med.probes)}",
        f"max reconstruction residual: {med.residuals.max():.6e}",
        f"factorization error: {err:.6e}",
        f"moment rank: {unique.moment_rank}/{unique.n_atoms}"
        + ("" if unique.independent else " (degenerate)"),
        f"weight spread over {unique.trials} restarts: {unique.max_weight_spread:.3e}",
    ]
    _emit(args, lines, out)
    return EXIT_OK


def cmd_demo(args) -> int:
    name = args.name
    rows: list[str] = [f"demo: {name}"]
    doc: dict = {"demo": name}
    if name == "coin":
        depth = args.depth or 5
        seq = fixtures.coin_sequence(depth)
        report = classical.check_exchangeable_measures(seq)
        grid = fixtures.coin_grid()
        weights, residual = classical.hs_reconstruct(seq, grid)
        rows += _report_lines(report, "classical")
        rows.append(f"residual: {residual:.3e}")
        rows += _weight_lines(weights, names=[f"bias {g.probs[0]:.2f}" for g in grid])
        doc.update(
            {
                "report": serialize.encode_report(report, "classical"),
                "weights": [float(w) for w in weights],
                "residual": residual,
            }
        )
        _emit(args, rows, doc)
        return EXIT_OK

    if name == "circuit1":
        depth = args.depth or 3
        seq, atoms = fixtures.circuit1_sequence(depth), fixtures.circuit1_atoms()
    elif name == "circuit2":
        depth = args.depth or 3
        seq, atoms = fixtures.circuit2_sequence(depth), fixtures.circuit2_atoms()
    elif name == "equator":
        depth = args.depth or 4
        seq, atoms = fixtures.equator_sequence(depth), fixtures.equator_atoms()
    elif name == "unknown-qubit":
        depth = args.depth or 4
        seq, atoms = fixtures.unknown_qubit_sequence(depth), fixtures.bloch_grid_atoms()
    else:
        raise SchemaError(f"unknown demo {name!r}")

    report = check_exchangeable(seq)
    mixture, residual = reconstruct(seq, atoms)
    rank = moment_rank(atoms, seq.depth)
    rows += _report_lines(report, "quantum")
    rows.append(f"residual: {residual:.3e}")
    rows += _weight_lines(mixture.weights)
    rows.append(
        f"moment rank: {rank}/{len(atoms)}"
        + ("" if rank == len(atoms) else " (degenerate: weights not unique at this depth)")
    )
    bary_gap = state_distance(mixture.barycenter(), seq.level(1))
    rows.append(f"level-1 barycenter gap: {bary_gap:.3e}")
    doc.update(
        {
            "report": serialize.encode_report(report, "quantum"),
            "mixture": serialize.encode_mixture(mixture),
            "residual": residual,
            "moment_rank": rank,
            "barycenter_gap": bary_gap,
        }
    )
    _emit(args, rows, doc)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="finetti",
        description="Exchangeable state sequences: check, reconstruct, factor, demo.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_input=True):
        if needs_input:
            sp.add_argument("--input", required=True, help="input JSON file")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--output", help="write the report here instead of stdout")
        sp.add_argument("--tol", type=float, default=None, help="override tolerance")

    sp = sub.add_parser("check", help="verify symmetry and consistency")
    common(sp)
    sp.add_argument("--depth", type=int, default=None, help="truncate to this depth")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("reconstruct", help="recover a mixture over atoms")
    common(sp)
    sp.add_argument("--atoms", help="atom dictionary JSON file")
    sp.add_argument("--atom-count", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--depth", type=int, default=None)
    sp.add_argument("--max-residual", type=float, default=None)
    sp.set_defaults(func=cmd_reconstruct)

    sp = sub.add_parser("factor", help="factor a cone through an atom set")
    common(sp)
    sp.add_argument("--atoms", help="atom dictionary JSON file")
    sp.add_argument("--atom-count", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-residual", type=float, default=1e-6)
    sp.add_argument("--trials", type=int, default=10)
    sp.set_defaults(func=cmd_factor)

    sp = sub.add_parser("demo", help="run a canned scenario end to end")
    sp.add_argument(
        "name", choices=("circuit1", "circuit2", "equator", "unknown-qubit", "coin")
    )
    common(sp, needs_input=False)
    sp.add_argument("--depth", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except json.JSONDecodeError as e:
        print(f"parse error: {e.msg} at line {e.lineno} column {e.colno}", file=sys.stderr)
        return EXIT_PARSE
    except SchemaError as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as e:
        print(f"cannot read input: {e}", file=sys.stderr)
        return EXIT_PARSE
    except NotExchangeable as e:
        print(f"invariant failure: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except ConeLawViolation as e:
        print(f"invariant failure: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except NotRepresentable as e:
        print(f"{e}", file=sys.stderr)
        return EXIT_NOT_REPRESENTABLE


if __name__ == "__main__":
    sys.exit(main())
