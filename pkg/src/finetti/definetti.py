"""Mixtures of iid towers and their recovery from exchangeable sequences.

The pieces:

* :class:`AtomSet` -- a finite dictionary of candidate level-1 states;
* :func:`synthesize` -- turn a weighted atom set into the exchangeable
  sequence ``rho_n = sum_k w_k sigma_k^(x n)``;
* :func:`reconstruct` -- invert that: simplex-constrained least squares on
  the stacked level data, returning the mixture and the attained residual;
* :class:`Cone` -- a parameterized family of channels ``Phi_n`` from an apex
  algebra into the tower, compatible with all injection actions;
* :func:`mediating_map` -- factor a cone through an atom set by
  reconstructing at a spanning family of apex states and extending linearly.

A strictly positive reconstruction residual that persists as atom sets grow
is the finite-depth witness that a sequence is not a mixture of iid towers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cpmaps import SCHRODINGER, ChoiMap, apply
from .cstar import Algebra, StateVec, blocks_to_dense, state_distance, state_to_dense
from .exchange import (
    ExchSeq,
    ExchangeReport,
    check_exchangeable,
    injection_probes,
    level_of,
    power_algebra,
    pullback_state,
    _pack,
    _unpack,
)
from .solvers import LAMBDA_EQ, realify, simplex_lstsq

DISTINCT_TOL = 1e-6
WEIGHT_TOL = 1e-9
SYNTH_TOL = 1e-10


class NotExchangeable(ValueError):
    """Input sequence failed the symmetry/consistency check."""

    def __init__(self, report: ExchangeReport):
        self.report = report
        super().__init__(
            f"sequence is not exchangeable: worst violation {report.max_violation:.3e} "
            f"exceeds tolerance {report.tolerance:.1e}"
        )


class ConeLawViolation(ValueError):
    """A cone failed compatibility with some injection action."""

    def __init__(self, report: "ConeReport"):
        self.report = report
        worst = report.violations[0] if report.violations else None
        super().__init__(f"cone laws violated, worst case {worst}")


class NotRepresentable(ValueError):
    """Reconstruction residual stayed above threshold at some probe state."""

    def __init__(self, probe_index: int, residual: float, threshold: float):
        self.probe_index = probe_index
        self.residual = residual
        self.threshold = threshold
        super().__init__(
            f"no mixture over the given atoms: probe {probe_index} leaves "
            f"residual {residual:.3e} > {threshold:.1e}"
        )


# --- atom sets and mixtures ---------------------------------------------------

def random_pure_state(d: int, rng: np.random.Generator) -> StateVec:
    """A pure state drawn from the unitarily invariant measure."""
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    v /= np.linalg.norm(v)
    return StateVec(Algebra((d,)), [np.outer(v, v.conj())])


def random_mixed_state(d: int, rng: np.random.Generator) -> StateVec:
    """A density matrix from the Hilbert-Schmidt-induced measure."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return StateVec(Algebra((d,)), [rho / np.trace(rho).real])


@dataclass
class AtomSet:
    """Pairwise-distinct candidate states on a common base algebra."""

    base: Algebra
    atoms: list[StateVec] = field(repr=False)
    seed: int | None = None
    method: str = "explicit"

    def __post_init__(self) -> None:
        if not self.atoms:
            raise ValueError("need at least one atom")
        for s in self.atoms:
            if s.algebra != self.base:
                raise ValueError(f"atom on {s.algebra} does not live on base {self.base}")
        self._check_distinct()

    def _check_distinct(self) -> None:
        # Frobenius distance lower-bounds trace distance, so a vectorized
        # Frobenius screen settles almost every pair cheaply.
        vecs = np.stack([state_to_dense(s).ravel() for s in self.atoms])
        sq = np.abs(vecs[:, None, :] - vecs[None, :, :]) ** 2
        fro = np.sqrt(sq.sum(axis=2))
        k = len(self.atoms)
        for i in range(k):
            for j in range(i + 1, k):
                if fro[i, j] > DISTINCT_TOL:
                    continue
                if state_distance(self.atoms[i], self.atoms[j]) <= DISTINCT_TOL:
                    raise ValueError(f"atoms {i} and {j} are not distinct")

    def __len__(self) -> int:
        return len(self.atoms)


def explicit_atoms(states) -> AtomSet:
    states = list(states)
    return AtomSet(states[0].algebra, states, method="explicit")


def default_atoms(d: int, count: int, seed: int) -> AtomSet:
    """Seeded default dictionary: 70% pure (unitarily invariant) and 30%
    mixed (Hilbert-Schmidt) states, in that order."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    n_pure = int(round(0.7 * count))
    atoms = [random_pure_state(d, rng) for _ in range(n_pure)]
    atoms += [random_mixed_state(d, rng) for _ in range(count - n_pure)]
    return AtomSet(Algebra((d,)), atoms, seed=seed, method="default-70-30")


@dataclass
class Mixture:
    """A weight vector over an atom set (a finitely supported measure)."""

    atomset: AtomSet
    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(self.atomset),):
            raise ValueError(f"{w.shape} weights for {len(self.atomset)} atoms")
        if w.min() < -WEIGHT_TOL or abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise ValueError("weights must lie on the probability simplex")
        w.setflags(write=False)
        self.weights = w

    def barycenter(self) -> StateVec:
        """Level-1 state of the mixture, ``sum_k w_k sigma_k``."""
        base = self.atomset.base
        acc = sum(
            w * _pack(base, s) for w, s in zip(self.weights, self.atomset.atoms)
        )
        return _unpack(base, 1, acc, StateVec)


def synthesize(mix: Mixture, depth: int, tolerance: float = SYNTH_TOL) -> ExchSeq:
    """The exchangeable sequence of a mixture: ``rho_n = sum_k w_k sigma_k^(x n)``."""
    base = mix.atomset.base
    packed = [_pack(base, s) for s in mix.atomset.atoms]
    states = []
    powers = [p.copy() for p in packed]
    for n in range(1, depth + 1):
        acc = sum(w * p for w, p in zip(mix.weights, powers))
        states.append(_unpack(base, n, acc, StateVec))
        if n < depth:
            powers = [np.kron(p, q) for p, q in zip(powers, packed)]
    return ExchSeq(base, depth, states, tolerance)


# --- moment systems -----------------------------------------------------------

def moment_matrix(atoms: AtomSet, depth: int) -> np.ndarray:
    """Complex design matrix: column k stacks ``vec(sigma_k^(x n))`` for n <= depth."""
    base = atoms.base
    cols = []
    for s in atoms.atoms:
        p = _pack(base, s)
        chunks, cur = [], p
        for n in range(1, depth + 1):
            chunks.append(cur.ravel())
            if n < depth:
                cur = np.kron(cur, p)
        cols.append(np.concatenate(chunks))
    return np.stack(cols, axis=1)


def sequence_vector(seq: ExchSeq, depth: int | None = None) -> np.ndarray:
    depth = seq.depth if depth is None else depth
    return np.concatenate(
        [_pack(seq.base, seq.level(n)).ravel() for n in range(1, depth + 1)]
    )


def moment_rank(atoms: AtomSet, depth: int) -> int:
    """Numerical rank of the stacked moment columns."""
    return int(np.linalg.matrix_rank(realify(moment_matrix(atoms, depth))))


def moment_independent(atoms: AtomSet, depth: int) -> bool:
    return moment_rank(atoms, depth) == len(atoms)


def reconstruct(
    seq: ExchSeq,
    atoms: AtomSet,
    *,
    depth: int | None = None,
    lambda_eq: float = LAMBDA_EQ,
    check: bool = True,
    start: np.ndarray | None = None,
) -> tuple[Mixture, float]:
    """Best mixture of iid towers over ``atoms`` matching the sequence.

    Minimizes ``sum_n ||rho_n - sum_k w_k sigma_k^(x n)||_F^2`` over the
    probability simplex (levels weighted equally).  The input is rejected
    with :class:`NotExchangeable` unless it passes
    :func:`~finetti.exchange.check_exchangeable` at the sequence tolerance;
    pass ``check=False`` to skip that gate.

    Returns the mixture and the residual (square root of the attained
    objective).  The residual is the non-representability witness: it stays
    above a strictly positive bound for sequences that are not mixtures.
    """
    if seq.base != atoms.base:
        raise ValueError(f"sequence base {seq.base} != atom base {atoms.base}")
    if depth is not None:
        seq = seq.truncate(depth)
    if check:
        report = check_exchangeable(seq)
        if not report.ok:
            raise NotExchangeable(report)
    design = realify(moment_matrix(atoms, seq.depth))
    target = realify(sequence_vector(seq))
    w, residual = simplex_lstsq(design, target, lambda_eq=lambda_eq, start=start)
    return Mixture(atoms, w), residual


# --- cones and mediating maps -------------------------------------------------

@dataclass
class Cone:
    """Channels ``Phi_n`` from an apex algebra into the tower, one per level."""

    apex: Algebra
    depth: int
    channels: list[ChoiMap] = field(repr=False)
    tolerance: float = 1e-9

    def __post_init__(self) -> None:
        if self.depth != len(self.channels):
            raise ValueError(f"depth {self.depth} != {len(self.channels)} channels")
        if self.depth < 1:
            raise ValueError("need at least one level")
        base = self.channels[0].target
        for n, ch in enumerate(self.channels, start=1):
            if ch.direction != SCHRODINGER:
                raise ValueError("cone channels must be Schrodinger maps")
            if ch.source != self.apex:
                raise ValueError(f"channel {n} has source {ch.source}, apex is {self.apex}")
            if ch.target != power_algebra(base, n):
                raise ValueError(
                    f"channel {n} has target {ch.target}, expected {power_algebra(base, n)}"
                )

    @property
    def base(self) -> Algebra:
        return self.channels[0].target

    def at(self, kappa: StateVec, n: int) -> StateVec:
        return apply(self.channels[n - 1], kappa)

    def sequence(self, kappa: StateVec, tolerance: float | None = None) -> ExchSeq:
        tol = self.tolerance if tolerance is None else tolerance
        states = [self.at(kappa, n) for n in range(1, self.depth + 1)]
        return ExchSeq(self.base, self.depth, states, tol)


def probe_states(algebra: Algebra) -> tuple[list[StateVec], np.ndarray]:
    """A spanning family of states built from the Hermitian matrix-unit basis.

    Each basis observable ``H`` (diagonal unit, or symmetrized off-diagonal
    pair scaled by 1/sqrt(2)) is mixed with the unit to land inside the state
    space: ``s = (H + 1) / (tr H + rep_dim)``.  Returns the states and the
    matrix whose columns are their dense vectorizations (full column rank).
    """
    rep = algebra.rep_dim
    hermitians: list[np.ndarray] = []
    off = 0
    for d in algebra.blocks:
        for j in range(d):
            h = np.zeros((rep, rep), dtype=complex)
            h[off + j, off + j] = 1.0
            hermitians.append(h)
            for k in range(j + 1, d):
                h = np.zeros((rep, rep), dtype=complex)
                h[off + j, off + k] = h[off + k, off + j] = 1 / np.sqrt(2)
                hermitians.append(h)
                h = np.zeros((rep, rep), dtype=complex)
                h[off + j, off + k] = -1j / np.sqrt(2)
                h[off + k, off + j] = 1j / np.sqrt(2)
                hermitians.append(h)
        off += d
    eye = np.eye(rep, dtype=complex)
    states, cols = [], []
    from .cstar import dense_to_blocks  # local import to avoid cycle noise

    for h in hermitians:
        dense = (h + eye) / (np.trace(h).real + rep)
        states.append(StateVec(algebra, dense_to_blocks(algebra, dense)))
        cols.append(dense.ravel())
    basis = np.stack(cols, axis=1)
    if np.linalg.matrix_rank(realify(basis)) != len(states):
        raise RuntimeError("probe family unexpectedly rank-deficient")
    return states, basis


@dataclass
class ConeViolation:
    tau: tuple[int, ...]
    level_from: int
    level_to: int
    gap: float


@dataclass
class ConeReport:
    ok: bool
    tolerance: float
    max_violation: float
    violations: list[ConeViolation]


def check_cone(cone: Cone, probes: list[StateVec] | None = None) -> ConeReport:
    """Verify ``pullback along eta_tau of Phi_m = Phi_n`` for all injections.

    Probing at a spanning family of apex states certifies the identity for
    every apex state, by linearity of the channels.
    """
    if probes is None:
        probes, _ = probe_states(cone.apex)
    base = cone.base
    violations: list[ConeViolation] = []
    worst = 0.0
    for n in range(1, cone.depth + 1):
        for m in range(n, cone.depth + 1):
            for tau in injection_probes(n, m):
                gap = 0.0
                for kappa in probes:
                    got = pullback_state(cone.at(kappa, m), base, tau, n)
                    gap = max(gap, state_distance(got, cone.at(kappa, n)))
                worst = max(worst, gap)
                if gap > cone.tolerance:
                    violations.append(ConeViolation(tau, n, m, gap))
    violations.sort(key=lambda v: -v.gap)
    return ConeReport(not violations, cone.tolerance, worst, violations)


@dataclass
class MediatingMap:
    """Linear factorization of a cone through mixtures over an atom set.

    ``weights[b]`` is the reconstructed weight vector at probe state ``b``;
    arbitrary apex states are handled by expanding them over the probe family
    and extending linearly.
    """

    apex: Algebra
    atomset: AtomSet
    probes: list[StateVec] = field(repr=False)
    probe_basis: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    residuals: np.ndarray = field(repr=False)

    def expansion(self, kappa: StateVec) -> np.ndarray:
        if kappa.algebra != self.apex:
            raise ValueError(f"state on {kappa.algebra}, apex is {self.apex}")
        target = realify(state_to_dense(kappa).ravel())
        coeff, *_ = np.linalg.lstsq(realify(self.probe_basis), target, rcond=None)
        recon = self.probe_basis @ coeff
        if np.abs(recon - state_to_dense(kappa).ravel()).max() > 1e-9:
            raise ValueError("state outside the probe span")
        return coeff

    def weights_for(self, kappa: StateVec) -> np.ndarray:
        """Linear extension of the probe weights (may carry tiny negatives)."""
        return self.weights.T @ self.expansion(kappa)

    def mixture_for(self, kappa: StateVec, clip_tol: float = 1e-8) -> Mixture:
        w = self.weights_for(kappa)
        if w.min() < -clip_tol or abs(w.sum() - 1.0) > clip_tol:
            raise ValueError(
                f"extension left the simplex (min {w.min():.3e}, sum {w.sum():.6f})"
            )
        w = np.clip(w, 0.0, None)
        return Mixture(self.atomset, w / w.sum())


def mediating_map(
    cone: Cone,
    atoms: AtomSet,
    *,
    max_residual: float = 1e-6,
    lambda_eq: float = LAMBDA_EQ,
) -> MediatingMap:
    """Factor a cone through an atom set.

    Checks the cone laws first (raising :class:`ConeLawViolation`), then
    reconstructs the induced sequence at each probe state; a residual above
    ``max_residual`` raises :class:`NotRepresentable`.
    """
    report = check_cone(cone)
    if not report.ok:
        raise ConeLawViolation(report)
    if cone.base != atoms.base:
        raise ValueError(f"cone base {cone.base} != atom base {atoms.base}")
    probes, basis = probe_states(cone.apex)
    rows, residuals = [], []
    for idx, kappa in enumerate(probes):
        # Cone laws already certify exchangeability of the probe sequences.
        mix, res = reconstruct(
            cone.sequence(kappa), atoms, lambda_eq=lambda_eq, check=False
        )
        if res > max_residual:
            raise NotRepresentable(idx, res, max_residual)
        rows.append(mix.weights)
        residuals.append(res)
    return MediatingMap(
        cone.apex, atoms, probes, basis, np.stack(rows), np.array(residuals)
    )


def factorization_error(cone: Cone, med: MediatingMap) -> float:
    """Largest trace-norm gap ``||Phi_n(kappa) - sum_k w_k sigma_k^(x n)||``
    over the probe states and all levels."""
    worst = 0.0
    for kappa, w in zip(med.probes, med.weights):
        synth = synthesize(Mixture(med.atomset, w), cone.depth)
        for n in range(1, cone.depth + 1):
            worst = max(worst, state_distance(cone.at(kappa, n), synth.level(n)))
    return worst


@dataclass
class UniquenessReport:
    n_atoms: int
    moment_rank: int
    independent: bool
    trials: int
    seed: int
    max_weight_spread: float
    max_moment_spread: float


def uniqueness_check(
    cone: Cone,
    atoms: AtomSet,
    trials: int = 10,
    seed: int = 0,
    *,
    lambda_eq: float = LAMBDA_EQ,
) -> UniquenessReport:
    """Re-solve the reconstruction from random feasible starts.

    With moment-independent atoms every start must land on the same weight
    vector; with degenerate atoms (rank below the atom count) the weight
    spread is reported but only the moment image is expected to agree.
    """
    rng = np.random.default_rng(seed)
    rank = moment_rank(atoms, cone.depth)
    probes, _ = probe_states(cone.apex)
    design_c = moment_matrix(atoms, cone.depth)
    design = realify(design_c)
    k = len(atoms)
    weight_spread = 0.0
    moment_spread = 0.0
    for kappa in probes:
        target = realify(sequence_vector(cone.sequence(kappa)))
        sols = []
        for _ in range(trials):
            start = rng.dirichlet(np.ones(k))
            w, _ = simplex_lstsq(design, target, lambda_eq=lambda_eq, start=start)
            sols.append(w)
        for i in range(len(sols)):
            for j in range(i + 1, len(sols)):
                weight_spread = max(weight_spread, float(np.abs(sols[i] - sols[j]).max()))
                gap = design_c @ (sols[i] - sols[j])
                moment_spread = max(moment_spread, float(np.abs(gap).max()))
    return UniquenessReport(
        k, rank, rank == k, trials, seed, weight_spread, moment_spread
    )
