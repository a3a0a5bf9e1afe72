"""Finite-dimensional operator algebras as direct sums of full matrix blocks.

An algebra is described by its block sizes ``(d_1, ..., d_k)``: the algebra
``M_{d_1} + ... + M_{d_k}`` acting block-diagonally on ``C^(d_1+...+d_k)``.
Commutative algebras are exactly the all-ones block lists (functions on a
finite set); single-block algebras are full matrix algebras.

Elements carry one complex matrix per block.  States are trace-like
functionals represented by density matrices, evaluated through
``eval_state(s, a) = sum_i Tr(dens_i @ mats_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Default tolerances for positivity (eigenvalue floor) and trace normalization.
PSD_TOL = 1e-9
TRACE_TOL = 1e-9


def _as_locked_complex(mat: np.ndarray) -> np.ndarray:
    out = np.array(mat, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Algebra:
    """A finite direct sum of full matrix algebras, given by block sizes."""

    blocks: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.blocks) == 0:
            raise ValueError("an algebra needs at least one block")
        if any((not isinstance(d, (int, np.integer))) or d < 1 for d in self.blocks):
            raise ValueError(f"block sizes must be positive integers, got {self.blocks}")
        object.__setattr__(self, "blocks", tuple(int(d) for d in self.blocks))

    @property
    def dim(self) -> int:
        """Vector-space dimension, sum of squared block sizes."""
        return int(sum(d * d for d in self.blocks))

    @property
    def rep_dim(self) -> int:
        """Dimension of the block-diagonal representation space."""
        return int(sum(self.blocks))

    @property
    def is_commutative(self) -> bool:
        return all(d == 1 for d in self.blocks)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def unit(self) -> "Element":
        return Element(self, [np.eye(d, dtype=complex) for d in self.blocks])

    def __str__(self) -> str:
        return "A(" + "+".join(str(d) for d in self.blocks) + ")"


def make_algebra(blocks) -> Algebra:
    """Build an :class:`Algebra` from an iterable of block sizes."""
    return Algebra(tuple(blocks))


def _check_block_shapes(algebra: Algebra, mats, what: str) -> list[np.ndarray]:
    mats = list(mats)
    if len(mats) != algebra.n_blocks:
        raise ValueError(
            f"{what}: expected {algebra.n_blocks} blocks, got {len(mats)}"
        )
    out = []
    for d, m in zip(algebra.blocks, mats):
        m = np.asarray(m, dtype=complex)
        if m.shape != (d, d):
            raise ValueError(f"{what}: block of size {m.shape} does not match ({d}, {d})")
        out.append(m)
    return out


@dataclass
class Element:
    """An algebra element: one complex matrix per block.

    Treat as immutable; the block matrices are locked against writes.
    """

    algebra: Algebra
    mats: list[np.ndarray] = field(repr=False)

    def __post_init__(self) -> None:
        checked = _check_block_shapes(self.algebra, self.mats, "Element")
        self.mats = [_as_locked_complex(m) for m in checked]

    def adjoint(self) -> "Element":
        return Element(self.algebra, [m.conj().T for m in self.mats])


@dataclass
class StateVec:
    """A state on an algebra, stored as one density block per algebra block."""

    algebra: Algebra
    dens: list[np.ndarray] = field(repr=False)

    def __post_init__(self) -> None:
        checked = _check_block_shapes(self.algebra, self.dens, "StateVec")
        self.dens = [_as_locked_complex(m) for m in checked]


def hermiticity_defect(mats) -> float:
    """Largest entrywise deviation ``max |M - M^dagger|`` over the blocks."""
    if isinstance(mats, (Element, StateVec)):
        mats = mats.mats if isinstance(mats, Element) else mats.dens
    defect = 0.0
    for m in mats:
        defect = max(defect, float(np.abs(m - m.conj().T).max()))
    return defect


def _min_eig_symmetrized(m: np.ndarray) -> float:
    # Symmetrize before the eigensolve; callers report the defect separately.
    h = (m + m.conj().T) / 2.0
    return float(np.linalg.eigvalsh(h).min())


def is_positive_element(a: Element, tol: float = PSD_TOL) -> bool:
    """True iff every block is Hermitian (within ``tol``) with spectrum >= -tol."""
    if hermiticity_defect(a) > tol:
        return False
    return all(_min_eig_symmetrized(m) >= -tol for m in a.mats)


def make_state(
    algebra: Algebra,
    dens,
    *,
    psd_tol: float = PSD_TOL,
    tr_tol: float = TRACE_TOL,
    validate: bool = True,
) -> StateVec:
    """Build a :class:`StateVec`, checking positivity and unit total trace.

    Raises
    ------
    ValueError
        If a density block is non-Hermitian beyond ``psd_tol``, has an
        eigenvalue below ``-psd_tol``, or the traces do not sum to 1 within
        ``tr_tol``.  The message includes the measured defect.
    """
    s = StateVec(algebra, dens)
    if validate:
        defect = hermiticity_defect(s)
        if defect > psd_tol:
            raise ValueError(f"density blocks not Hermitian: defect {defect:.3e}")
        for i, m in enumerate(s.dens):
            lo = _min_eig_symmetrized(m)
            if lo < -psd_tol:
                raise ValueError(f"density block {i} not positive: min eigenvalue {lo:.3e}")
        total = sum(float(np.trace(m).real) for m in s.dens)
        if abs(total - 1.0) > tr_tol:
            raise ValueError(f"total trace {total!r} differs from 1 beyond {tr_tol}")
    return s


def eval_state(s: StateVec, a: Element) -> complex:
    """Pair a state with an element: ``sum_i Tr(dens_i @ mats_i)``."""
    if s.algebra != a.algebra:
        raise ValueError(f"algebra mismatch: {s.algebra} vs {a.algebra}")
    return complex(sum(np.trace(d @ m) for d, m in zip(s.dens, a.mats)))


# --- dense (block-diagonal) representation helpers -------------------------

def blocks_to_dense(algebra: Algebra, mats) -> np.ndarray:
    """Assemble per-block matrices into one block-diagonal rep-space matrix."""
    n = algebra.rep_dim
    out = np.zeros((n, n), dtype=complex)
    off = 0
    for d, m in zip(algebra.blocks, mats):
        out[off : off + d, off : off + d] = m
        off += d
    return out


def dense_to_blocks(algebra: Algebra, mat: np.ndarray) -> list[np.ndarray]:
    """Cut the diagonal blocks of a rep-space matrix (off-block parts dropped)."""
    mat = np.asarray(mat, dtype=complex)
    n = algebra.rep_dim
    if mat.shape != (n, n):
        raise ValueError(f"expected ({n}, {n}) matrix, got {mat.shape}")
    out = []
    off = 0
    for d in algebra.blocks:
        out.append(mat[off : off + d, off : off + d].copy())
        off += d
    return out


def element_to_dense(a: Element) -> np.ndarray:
    return blocks_to_dense(a.algebra, a.mats)


def state_to_dense(s: StateVec) -> np.ndarray:
    return blocks_to_dense(s.algebra, s.dens)


# --- norms ------------------------------------------------------------------

def trace_norm(mat: np.ndarray) -> float:
    """Sum of singular values (eigensolve shortcut for Hermitian inputs)."""
    mat = np.asarray(mat, dtype=complex)
    if np.abs(mat - mat.conj().T).max() <= 1e-12 * max(1.0, np.abs(mat).max()):
        h = (mat + mat.conj().T) / 2.0
        return float(np.abs(np.linalg.eigvalsh(h)).sum())
    return float(np.linalg.svd(mat, compute_uv=False).sum())


def state_distance(s1: StateVec, s2: StateVec) -> float:
    """Trace-norm distance between two states on the same algebra."""
    if s1.algebra != s2.algebra:
        raise ValueError(f"algebra mismatch: {s1.algebra} vs {s2.algebra}")
    return sum(trace_norm(a - b) for a, b in zip(s1.dens, s2.dens))
