"""Nonnegative and simplex-constrained least squares.

``nnls`` is the classic active-set method (Lawson-Hanson) with one addition:
an optional feasible starting point, used to study whether independent
restarts land on the same optimum.  ``simplex_lstsq`` reduces
``min ||A w - b||  s.t.  w >= 0, sum w = 1`` to plain NNLS by appending a
heavily weighted equality row and renormalizing the result exactly.
"""

from __future__ import annotations

import numpy as np

LAMBDA_EQ = 1e4


def realify(mat: np.ndarray) -> np.ndarray:
    """Stack real and imaginary parts so complex least squares becomes real."""
    mat = np.asarray(mat)
    return np.concatenate([mat.real, mat.imag], axis=0).astype(float)


def nnls(
    a: np.ndarray,
    b: np.ndarray,
    *,
    start: np.ndarray | None = None,
    grad_tol: float | None = None,
    max_iter: int | None = None,
) -> np.ndarray:
    """Solve ``min ||a x - b||_2`` subject to ``x >= 0``.

    Parameters
    ----------
    start : optional feasible vector (nonnegative); its support seeds the
        passive set.  Without it the usual empty-support cold start is used.
    grad_tol : optability threshold on the dual vector ``a.T (b - a x)``;
        defaults to a machine-precision multiple of the problem scale.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float).ravel()
    m, n = a.shape
    if b.shape != (m,):
        raise ValueError(f"shape mismatch: a {a.shape}, b {b.shape}")
    if grad_tol is None:
        scale = float(np.abs(a.T @ b).max()) if n else 1.0
        grad_tol = np.finfo(float).eps * max(m, n) * max(1.0, scale)
    if max_iter is None:
        max_iter = max(3 * n, 30)

    passive = np.zeros(n, dtype=bool)
    x = np.zeros(n)
    if start is not None:
        start = np.asarray(start, dtype=float)
        if start.shape != (n,) or (start < 0).any():
            raise ValueError("start must be a nonnegative vector of length n")
        passive = start > 0
        x = start.copy()

    def _settle() -> None:
        # Inner loop: pull x to the least-squares solution on the passive set,
        # backtracking and shrinking the set while negatives appear.
        nonlocal x
        for _ in range(max_iter):
            if not passive.any():
                x = np.zeros(n)
                return
            z = np.zeros(n)
            z[passive] = np.linalg.lstsq(a[:, passive], b, rcond=None)[0]
            if z[passive].min() > 0:
                x = z
                return
            mask = passive & (z <= 0)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(mask, x / (x - z), np.inf)
            alpha = float(ratios[mask].min())
            x = x + alpha * (z - x)
            passive[passive & (x <= 1e-14)] = False
            x[~passive] = 0.0
        raise RuntimeError("nnls inner loop failed to settle")

    if start is not None:
        _settle()

    for _ in range(max_iter):
        grad = a.T @ (b - a @ x)
        grad[passive] = -np.inf
        best = int(np.argmax(grad))
        if grad[best] <= grad_tol:
            break
        passive[best] = True
        _settle()
    return x


def simplex_lstsq(
    a: np.ndarray,
    b: np.ndarray,
    *,
    lambda_eq: float = LAMBDA_EQ,
    start: np.ndarray | None = None,
    grad_tol: float | None = None,
) -> tuple[np.ndarray, float]:
    """Least squares over the probability simplex.

    The equality constraint rides along as the extra row
    ``lambda_eq * sum(w) = lambda_eq``; the NNLS answer is then renormalized
    to unit sum exactly.  Returns ``(w, residual)`` where the residual is
    measured on the original rows at the renormalized ``w``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float).ravel()
    n = a.shape[1]
    a_aug = np.vstack([a, lambda_eq * np.ones((1, n))])
    b_aug = np.concatenate([b, [lambda_eq]])
    x = nnls(a_aug, b_aug, start=start, grad_tol=grad_tol)
    total = float(x.sum())
    if total <= 0:
        raise RuntimeError("degenerate solve: zero total weight")
    w = x / total
    residual = float(np.linalg.norm(a @ w - b))
    return w, residual
