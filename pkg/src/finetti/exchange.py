"""Tensor powers, index actions, and exchangeable state sequences.

Levels of the tower over a base algebra hold states ``rho_n`` on the n-fold
tensor power.  Two index actions generate everything here:

* ``eta_sigma`` permutes tensor slots (slot ``i`` moves to ``sigma[i]``);
* ``eta_tau`` places an ``n``-slot element into ``m`` slots along an
  injection ``tau``, padding the unhit slots with units.

``iota_embed`` is ``eta_tau`` along the standard inclusion, i.e. padding on
the right, and ``restrict_state`` is its dual on states (partial trace over
the trailing slots).

Bases may be single-block (full matrix algebra) or commutative (all-ones
blocks); commutative levels are handled as probability/value vectors over
tuples in lexicographic order, which matches the kron convention used on the
quantum side.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .cstar import Algebra, Element, StateVec, state_distance

DEFAULT_SEQ_TOL = 1e-9


# --- tower structure --------------------------------------------------------

def _base_kind(base: Algebra) -> str:
    if base.n_blocks == 1 and base.blocks[0] > 1:
        return "quantum"
    if base.is_commutative and base.n_blocks > 1:
        return "classical"
    raise ValueError(
        f"base {base} is not supported: need a single matrix block of size >= 2 "
        "or a commutative algebra on >= 2 points"
    )


def power_algebra(base: Algebra, n: int) -> Algebra:
    """Algebra of the n-th tensor power of the base."""
    if n < 0:
        raise ValueError("level must be >= 0")
    if n == 0:
        return Algebra((1,))
    if _base_kind(base) == "quantum":
        return Algebra((base.blocks[0] ** n,))
    return Algebra((1,) * (base.n_blocks ** n))


def level_of(base: Algebra, algebra: Algebra) -> int:
    """Recover the level of a tower algebra over the base."""
    if algebra == Algebra((1,)):
        return 0
    if _base_kind(base) == "quantum":
        d, size = base.blocks[0], algebra.blocks[0]
    else:
        d, size = base.n_blocks, algebra.n_blocks
    n = round(np.log(size) / np.log(d))
    if power_algebra(base, n) != algebra:
        raise ValueError(f"{algebra} is not a tensor power of {base}")
    return n


def _pack(base: Algebra, x) -> np.ndarray:
    # Quantum levels pack to the full matrix; classical levels pack to the
    # vector of block values (every block is 1x1).
    mats = x.mats if isinstance(x, Element) else x.dens
    if _base_kind(base) == "quantum":
        return mats[0]
    return np.array([m[0, 0] for m in mats])


def _unpack(base: Algebra, n: int, arr: np.ndarray, kind: type):
    alg = power_algebra(base, n)
    if _base_kind(base) == "quantum":
        blocks = [arr]
    else:
        blocks = [np.array([[v]]) for v in arr]
    if kind is Element:
        return Element(alg, blocks)
    return StateVec(alg, blocks)


def _slot_count(base: Algebra) -> int:
    return base.blocks[0] if _base_kind(base) == "quantum" else base.n_blocks


# --- index actions ----------------------------------------------------------

def _permute_axes(base: Algebra, arr: np.ndarray, sigma) -> np.ndarray:
    n = len(sigma)
    d = _slot_count(base)
    inv = [0] * n
    for i, img in enumerate(sigma):
        inv[img] = i
    if arr.ndim == 2:  # quantum: row and column slot groups move together
        t = arr.reshape((d,) * (2 * n))
        t = t.transpose(tuple(inv) + tuple(n + j for j in inv))
        return t.reshape(d**n, d**n)
    t = arr.reshape((d,) * n)
    return t.transpose(tuple(inv)).reshape(d**n)


def _check_sigma(sigma, n: int) -> tuple[int, ...]:
    sigma = tuple(int(i) for i in sigma)
    if sorted(sigma) != list(range(n)):
        raise ValueError(f"{sigma} is not a permutation of 0..{n - 1}")
    return sigma


def eta_sigma(x, base: Algebra, sigma):
    """Permute tensor slots: the factor in slot ``i`` moves to slot ``sigma[i]``."""
    n = level_of(base, x.algebra)
    sigma = _check_sigma(sigma, n)
    out = _permute_axes(base, _pack(base, x), sigma)
    return _unpack(base, n, out, type(x))


def iota_embed(a: Element, base: Algebra, m: int) -> Element:
    """Pad an element on the right with units up to level ``m``."""
    n = level_of(base, a.algebra)
    if m < n:
        raise ValueError(f"cannot embed level {n} into lower level {m}")
    if m == n:
        return a
    arr = _pack(base, a)
    d = _slot_count(base)
    if arr.ndim == 2:
        out = np.kron(arr, np.eye(d ** (m - n), dtype=complex))
    else:
        out = np.kron(arr, np.ones(d ** (m - n), dtype=complex))
    return _unpack(base, m, out, Element)


def restrict_state(s: StateVec, base: Algebra, n: int) -> StateVec:
    """Partial trace (marginalization) over the trailing slots down to level ``n``."""
    m = level_of(base, s.algebra)
    if n > m or n < 0:
        raise ValueError(f"cannot restrict level {m} to level {n}")
    if n == m:
        return s
    arr = _pack(base, s)
    d = _slot_count(base)
    keep, drop = d**n, d ** (m - n)
    if arr.ndim == 2:
        out = np.einsum("abcb->ac", arr.reshape(keep, drop, keep, drop))
    else:
        out = arr.reshape(keep, drop).sum(axis=1)
    return _unpack(base, n, out, StateVec)


def _completion(tau, m: int) -> tuple[int, ...]:
    # Extend an injection on n slots to a permutation of m slots, sending the
    # padding slots to the unhit targets in increasing order.
    rest = [j for j in range(m) if j not in set(tau)]
    return tuple(tau) + tuple(rest)


def eta_tau(a: Element, base: Algebra, tau, m: int) -> Element:
    """Place slot ``i`` of ``a`` at slot ``tau[i]`` of level ``m``, units elsewhere.

    Reduces exactly to ``iota_embed`` when ``tau`` is the standard inclusion
    and to ``eta_sigma`` when ``tau`` is a bijection.
    """
    n = level_of(base, a.algebra)
    tau = tuple(int(i) for i in tau)
    if len(tau) != n or len(set(tau)) != n or any(j < 0 or j >= m for j in tau):
        raise ValueError(f"{tau} is not an injection of {n} slots into {m}")
    pi = _completion(tau, m)
    if pi == tuple(range(m)):
        return iota_embed(a, base, m)
    return eta_sigma(iota_embed(a, base, m), base, pi)


def pullback_state(s: StateVec, base: Algebra, tau, n: int) -> StateVec:
    """Dual of ``eta_tau`` on states: eval(pullback(s), a) = eval(s, eta_tau(a))."""
    m = level_of(base, s.algebra)
    pi = _completion(tau, m)
    inv = [0] * m
    for i, img in enumerate(pi):
        inv[img] = i
    return restrict_state(eta_sigma(s, base, inv), base, n)


# --- permutation probe sets -------------------------------------------------

EXHAUSTIVE_LIMIT = 6


def symmetry_probes(n: int) -> list[tuple[int, ...]]:
    """Permutations to test at level n: all of S_n for n <= 6, else the
    adjacent transpositions (which generate S_n)."""
    if n <= 1:
        return []
    if n <= EXHAUSTIVE_LIMIT:
        return [p for p in itertools.permutations(range(n)) if p != tuple(range(n))]
    probes = []
    for i in range(n - 1):
        t = list(range(n))
        t[i], t[i + 1] = t[i + 1], t[i]
        probes.append(tuple(t))
    return probes


def injections(n: int, m: int):
    """All injections of n slots into m slots (as image tuples)."""
    return itertools.permutations(range(m), n)


def injection_probes(n: int, m: int) -> list[tuple[int, ...]]:
    """Injections to test: exhaustive for m <= 6, else inclusion plus the
    injections obtained by one adjacent swap of the inclusion's image."""
    if m <= EXHAUSTIVE_LIMIT:
        return list(injections(n, m))
    inclusion = tuple(range(n))
    probes = [inclusion]
    for i in range(m - 1):
        img = [j for j in inclusion]
        swapped = {i: i + 1, i + 1: i}
        probes.append(tuple(swapped.get(j, j) for j in img))
    return list(dict.fromkeys(probes))


# --- exchangeable sequences --------------------------------------------------

@dataclass
class ExchSeq:
    """States ``rho_1 .. rho_N`` on the tensor-power tower over ``base``."""

    base: Algebra
    depth: int
    states: list[StateVec] = field(repr=False)
    tolerance: float = DEFAULT_SEQ_TOL

    def __post_init__(self) -> None:
        if self.depth != len(self.states):
            raise ValueError(f"depth {self.depth} != {len(self.states)} states")
        if self.depth < 1:
            raise ValueError("need at least one level")
        for n, s in enumerate(self.states, start=1):
            expect = power_algebra(self.base, n)
            if s.algebra != expect:
                raise ValueError(f"level {n} lives on {s.algebra}, expected {expect}")

    def level(self, n: int) -> StateVec:
        if not 1 <= n <= self.depth:
            raise ValueError(f"level {n} outside 1..{self.depth}")
        return self.states[n - 1]

    def truncate(self, depth: int) -> "ExchSeq":
        if not 1 <= depth <= self.depth:
            raise ValueError(f"cannot truncate depth {self.depth} to {depth}")
        return ExchSeq(self.base, depth, self.states[:depth], self.tolerance)


def make_exch_seq(base: Algebra, states, tolerance: float = DEFAULT_SEQ_TOL) -> ExchSeq:
    states = list(states)
    return ExchSeq(base, len(states), states, tolerance)


def iid_extend(sigma: StateVec, depth: int, tolerance: float = DEFAULT_SEQ_TOL) -> ExchSeq:
    """The iid tower of a level-1 state: level n is the n-fold tensor power."""
    base = sigma.algebra
    _base_kind(base)
    arr = _pack(base, sigma)
    states, cur = [], arr
    for n in range(1, depth + 1):
        states.append(_unpack(base, n, cur, StateVec))
        if n < depth:
            cur = np.kron(cur, arr)
    return make_exch_seq(base, states, tolerance)


@dataclass
class LevelReport:
    level: int
    symmetry: float
    worst_permutation: tuple[int, ...] | None
    consistency: float
    worst_source: int | None


@dataclass
class ExchangeReport:
    ok: bool
    tolerance: float
    levels: list[LevelReport]

    @property
    def max_violation(self) -> float:
        worst = 0.0
        for lv in self.levels:
            worst = max(worst, lv.symmetry, lv.consistency)
        return worst


def check_exchangeable(seq: ExchSeq) -> ExchangeReport:
    """Verify symmetry and marginal consistency of a sequence.

    Per level ``n`` the report carries the largest trace-norm symmetry
    violation ``max_sigma ||rho_n - eta_sigma(rho_n)||`` (with the witnessing
    permutation) and the largest consistency violation
    ``max_{m >= n} ||rho_n - restrict(rho_m, n)||`` (with the witnessing
    source level).  Permutations are enumerated exhaustively up to level 6
    and through adjacent transpositions beyond.
    """
    levels = []
    for n in range(1, seq.depth + 1):
        rho = seq.level(n)
        sym, worst_sigma = 0.0, None
        for sigma in symmetry_probes(n):
            gap = state_distance(rho, eta_sigma(rho, seq.base, sigma))
            if gap > sym:
                sym, worst_sigma = gap, sigma
        cons, worst_m = 0.0, None
        for m in range(n + 1, seq.depth + 1):
            gap = state_distance(rho, restrict_state(seq.level(m), seq.base, n))
            if gap > cons:
                cons, worst_m = gap, m
        levels.append(LevelReport(n, sym, worst_sigma, cons, worst_m))
    ok = all(lv.symmetry <= seq.tolerance and lv.consistency <= seq.tolerance for lv in levels)
    return ExchangeReport(ok, seq.tolerance, levels)
