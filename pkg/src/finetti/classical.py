"""Finitely supported probability: the distribution monad and iid mixtures.

Measures on a finite set are plain probability vectors over an ordered label
list.  Measures on ``X^n`` use lexicographic tuple order, which makes the
product measure a Kronecker power and keeps every index manipulation a
reshape/transpose, mirroring the quantum tower.

``hs_reconstruct`` recovers a mixing measure over a grid of candidate biases
from an exchangeable family of tuple measures; ``encode_*`` helpers re-express
the same data over all-ones block algebras so the operator-algebra route can
be run on it unchanged.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .cstar import Algebra, StateVec
from .exchange import (
    ExchSeq,
    ExchangeReport,
    LevelReport,
    symmetry_probes,
)
from .solvers import LAMBDA_EQ, simplex_lstsq

PROB_TOL = 1e-9


@dataclass
class FinDist:
    """A probability vector over an ordered finite label list."""

    space: list
    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=float)
        if p.shape != (len(self.space),):
            raise ValueError(f"{p.shape} probabilities for {len(self.space)} labels")
        if p.min() < -PROB_TOL or abs(p.sum() - 1.0) > PROB_TOL:
            raise ValueError("probabilities must be nonnegative and sum to 1")
        p.setflags(write=False)
        self.probs = p


def dirac(x, space) -> FinDist:
    space = list(space)
    p = np.zeros(len(space))
    p[space.index(x)] = 1.0
    return FinDist(space, p)


def pushforward(f, dist: FinDist, space=None) -> FinDist:
    """Image measure along ``f`` (callable or mapping on labels)."""
    get = f.__getitem__ if hasattr(f, "__getitem__") else f
    images = [get(x) for x in dist.space]
    if space is None:
        space = list(dict.fromkeys(images))
    else:
        space = list(space)
    p = np.zeros(len(space))
    for img, w in zip(images, dist.probs):
        p[space.index(img)] += w
    return FinDist(space, p)


def flatten(outer: FinDist) -> FinDist:
    """Average a distribution over distributions (labels must be FinDists on
    one common space)."""
    inner = outer.space
    if not inner or not all(isinstance(d, FinDist) for d in inner):
        raise ValueError("flatten needs a distribution over FinDists")
    space = inner[0].space
    for d in inner[1:]:
        if d.space != space:
            raise ValueError("inner distributions live on different spaces")
    p = sum(w * d.probs for w, d in zip(outer.probs, inner))
    return FinDist(space, p)


@dataclass
class Kernel:
    """A row-stochastic matrix from one finite space to another."""

    source: list
    target: list
    rows: np.ndarray

    def __post_init__(self) -> None:
        r = np.asarray(self.rows, dtype=float)
        if r.shape != (len(self.source), len(self.target)):
            raise ValueError(
                f"rows {r.shape} do not match {len(self.source)}x{len(self.target)}"
            )
        if r.min() < -PROB_TOL or np.abs(r.sum(axis=1) - 1.0).max() > PROB_TOL:
            raise ValueError("each row must be a probability vector")
        r.setflags(write=False)
        self.rows = r

    def __call__(self, dist: FinDist) -> FinDist:
        if dist.space != self.source:
            raise ValueError("distribution space does not match kernel source")
        return FinDist(self.target, dist.probs @ self.rows)


def kleisli_compose(k1: Kernel, k2: Kernel) -> Kernel:
    """Chain kernels: first ``k1``, then ``k2`` (a row-stochastic product)."""
    if k1.target != k2.source:
        raise ValueError("kernels do not chain: target != source")
    return Kernel(k1.source, k2.target, k1.rows @ k2.rows)


# --- tuple spaces -------------------------------------------------------------

def tuple_space(space, n: int) -> list:
    return [tuple(t) for t in itertools.product(space, repeat=n)]


def product_measure(mu: FinDist, n: int) -> FinDist:
    """The iid n-fold product, in lexicographic tuple order."""
    if n < 1:
        raise ValueError("need n >= 1")
    p = mu.probs
    for _ in range(n - 1):
        p = np.kron(p, mu.probs)
    return FinDist(tuple_space(mu.space, n), p)


def permute_tuples(dist: FinDist, k: int, sigma) -> FinDist:
    """Pushforward along coordinate permutation (slot i moves to sigma[i])."""
    n = len(sigma)
    inv = [0] * n
    for i, img in enumerate(sigma):
        inv[img] = i
    # The value at new slot sigma[i] came from old slot i, so the new prob
    # tensor reads old axis sigma[j] at axis j.
    p = dist.probs.reshape((k,) * n).transpose(tuple(inv)).ravel()
    return FinDist(dist.space, p)


def select_coordinates(dist: FinDist, k: int, tau, m: int) -> FinDist:
    """Pushforward of a measure on X^m along ``(x_1..x_m) -> (x_tau(1)..x_tau(n))``."""
    tau = tuple(int(i) for i in tau)
    n = len(tau)
    drop = tuple(j for j in range(m) if j not in set(tau))
    t = dist.probs.reshape((k,) * m).transpose(tau + drop)
    p = t.reshape(k**n, -1).sum(axis=1)
    # Recover the single-coordinate label list from the level-m tuple space
    # (lexicographic order lists first coordinates slowest, so order survives).
    labels = list(dict.fromkeys(x[0] for x in dist.space))
    return FinDist(tuple_space(labels, n), p)


# --- exchangeable families ----------------------------------------------------

@dataclass
class ClassicalExchSeq:
    """Measures ``mu_1 .. mu_N`` on the tuple powers of a finite space."""

    space: list
    depth: int
    measures: list[FinDist] = field(repr=False)
    tolerance: float = PROB_TOL

    def __post_init__(self) -> None:
        if self.depth != len(self.measures):
            raise ValueError(f"depth {self.depth} != {len(self.measures)} measures")
        k = len(self.space)
        for n, mu in enumerate(self.measures, start=1):
            if len(mu.space) != k**n:
                raise ValueError(f"level {n} has {len(mu.space)} labels, expected {k**n}")

    def level(self, n: int) -> FinDist:
        return self.measures[n - 1]


def iid_measures(mu: FinDist, depth: int, tolerance: float = PROB_TOL) -> ClassicalExchSeq:
    return ClassicalExchSeq(
        mu.space, depth, [product_measure(mu, n) for n in range(1, depth + 1)], tolerance
    )


def synthesize_measures(
    grid: list[FinDist], weights, depth: int, tolerance: float = PROB_TOL
) -> ClassicalExchSeq:
    """Mixture of iid products over a grid of biases."""
    w = np.asarray(weights, dtype=float)
    space = grid[0].space
    measures = []
    for n in range(1, depth + 1):
        p = sum(wk * product_measure(mu, n).probs for wk, mu in zip(w, grid))
        measures.append(FinDist(tuple_space(space, n), p))
    return ClassicalExchSeq(space, depth, measures, tolerance)


def check_exchangeable_measures(seq: ClassicalExchSeq) -> ExchangeReport:
    """Symmetry and marginal consistency in total variation (l1) norm."""
    k = len(seq.space)
    levels = []
    for n in range(1, seq.depth + 1):
        mu = seq.level(n)
        sym, worst_sigma = 0.0, None
        for sigma in symmetry_probes(n):
            gap = float(np.abs(mu.probs - permute_tuples(mu, k, sigma).probs).sum())
            if gap > sym:
                sym, worst_sigma = gap, sigma
        cons, worst_m = 0.0, None
        for m in range(n + 1, seq.depth + 1):
            marg = seq.level(m).probs.reshape(k**n, -1).sum(axis=1)
            gap = float(np.abs(mu.probs - marg).sum())
            if gap > cons:
                cons, worst_m = gap, m
        levels.append(LevelReport(n, sym, worst_sigma, cons, worst_m))
    ok = all(lv.symmetry <= seq.tolerance and lv.consistency <= seq.tolerance for lv in levels)
    return ExchangeReport(ok, seq.tolerance, levels)


def classical_moment_matrix(grid: list[FinDist], depth: int) -> np.ndarray:
    cols = []
    for mu in grid:
        cols.append(
            np.concatenate([product_measure(mu, n).probs for n in range(1, depth + 1)])
        )
    return np.stack(cols, axis=1)


def classical_moment_rank(grid: list[FinDist], depth: int) -> int:
    return int(np.linalg.matrix_rank(classical_moment_matrix(grid, depth)))


def hs_reconstruct(
    seq: ClassicalExchSeq,
    grid: list[FinDist],
    *,
    lambda_eq: float = LAMBDA_EQ,
    check: bool = True,
    start: np.ndarray | None = None,
) -> tuple[np.ndarray, float]:
    """Recover a mixing measure over ``grid`` from an exchangeable family.

    Same objective and solver as the operator-algebra route: least squares on
    the stacked level data over the probability simplex.
    """
    if check:
        report = check_exchangeable_measures(seq)
        if not report.ok:
            from .definetti import NotExchangeable

            raise NotExchangeable(report)
    design = classical_moment_matrix(grid, seq.depth)
    target = np.concatenate([seq.level(n).probs for n in range(1, seq.depth + 1)])
    return simplex_lstsq(design, target, lambda_eq=lambda_eq, start=start)


# --- commutative encoding bridge ----------------------------------------------

def encode_space(space) -> Algebra:
    """The all-ones block algebra of functions on a finite set."""
    return Algebra((1,) * len(space))


def encode_dist(dist: FinDist) -> StateVec:
    return StateVec(encode_space(dist.space), [np.array([[p]]) for p in dist.probs])


def encode_seq(seq: ClassicalExchSeq) -> ExchSeq:
    """Re-express a classical family as states on tensor powers of the
    all-ones block algebra (lexicographic order matches slot order)."""
    base = encode_space(seq.space)
    states = [encode_dist(seq.level(n)) for n in range(1, seq.depth + 1)]
    # The level-n tuple space encodes to the n-th tensor power of the base.
    for n, s in enumerate(states, start=1):
        assert s.algebra.n_blocks == base.n_blocks**n
    return ExchSeq(base, seq.depth, states, seq.tolerance)


def bernoulli(space, p_first: float) -> FinDist:
    """A two-point measure: probability ``p_first`` on the first label."""
    if len(space) != 2:
        raise ValueError("bernoulli needs a two-point space")
    return FinDist(list(space), np.array([p_first, 1.0 - p_first]))
