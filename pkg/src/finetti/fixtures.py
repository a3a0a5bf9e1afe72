"""Ready-made scenario data: belief sequences, atom grids, and example cones.

The circuit scenarios encode measurement beliefs about a qubit directly as
their output state sequences; nothing is simulated gate by gate.
"""

from __future__ import annotations

import numpy as np

from .classical import FinDist, bernoulli, synthesize_measures
from .cpmaps import SCHRODINGER, ChoiMap, choi_from_function
from .cstar import Algebra, StateVec
from .definetti import AtomSet, Cone, Mixture, explicit_atoms, synthesize
from .exchange import ExchSeq, make_exch_seq

QUBIT = Algebra((2,))

KET0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
KET1 = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)
MAXMIX = np.eye(2, dtype=complex) / 2.0


def qubit_state(mat) -> StateVec:
    return StateVec(QUBIT, [np.asarray(mat, dtype=complex)])


def bloch_state(x: float, y: float, z: float) -> StateVec:
    dens = 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]], dtype=complex)
    return qubit_state(dens)


# --- circuit beliefs ------------------------------------------------------------

def circuit1_atoms() -> AtomSet:
    """The two computational-basis states, the support of the first belief."""
    return explicit_atoms([qubit_state(KET0), qubit_state(KET1)])


def circuit1_mixture() -> Mixture:
    """Fifty-fifty belief between the all-zero and all-one preparations."""
    return Mixture(circuit1_atoms(), np.array([0.5, 0.5]))


def circuit1_sequence(depth: int = 3) -> ExchSeq:
    return synthesize(circuit1_mixture(), depth)


def circuit2_atoms() -> AtomSet:
    return explicit_atoms([qubit_state(MAXMIX)])


def circuit2_mixture() -> Mixture:
    """Point belief on the maximally mixed qubit."""
    return Mixture(circuit2_atoms(), np.array([1.0]))


def circuit2_sequence(depth: int = 3) -> ExchSeq:
    return synthesize(circuit2_mixture(), depth)


# --- equator and Bloch-ball beliefs ---------------------------------------------

def equator_atoms(count: int = 64) -> AtomSet:
    """Pure states (|0> + e^{i phi}|1>)/sqrt(2) at evenly spaced phases."""
    states = []
    for j in range(count):
        phi = 2.0 * np.pi * j / count
        states.append(bloch_state(np.cos(phi), np.sin(phi), 0.0))
    return explicit_atoms(states)


def equator_mixture(count: int = 64) -> Mixture:
    return Mixture(equator_atoms(count), np.full(count, 1.0 / count))


def equator_sequence(depth: int = 4, count: int = 64) -> ExchSeq:
    return synthesize(equator_mixture(count), depth)


def bloch_grid_atoms(shape: tuple[int, int, int] = (8, 8, 8)) -> AtomSet:
    """Midpoint grid over the Bloch-ball parameters (r, z, theta).

    The radius is ``r**(1/3)`` with r uniform on [0, 1], which makes the
    continuum version the uniform measure over the ball; midpoints keep the
    discretized atoms pairwise distinct (no r = 0 collapse, no seam overlap).
    """
    nr, nz, nt = shape
    states = []
    for i in range(nr):
        r = (i + 0.5) / nr
        s = r ** (1.0 / 3.0)
        for j in range(nz):
            z = -1.0 + 2.0 * (j + 0.5) / nz
            for l in range(nt):
                theta = 2.0 * np.pi * (l + 0.5) / nt
                rho = np.sqrt(1.0 - z * z)
                states.append(bloch_state(s * rho * np.cos(theta), s * rho * np.sin(theta), s * z))
    return explicit_atoms(states)


def unknown_qubit_mixture(shape: tuple[int, int, int] = (8, 8, 8)) -> Mixture:
    """Complete ignorance about a qubit: uniform over the Bloch-ball grid."""
    atoms = bloch_grid_atoms(shape)
    return Mixture(atoms, np.full(len(atoms), 1.0 / len(atoms)))


def unknown_qubit_sequence(depth: int = 4, shape: tuple[int, int, int] = (8, 8, 8)) -> ExchSeq:
    return synthesize(unknown_qubit_mixture(shape), depth)


# --- the depth-2 singlet family --------------------------------------------------

def singlet_sequence() -> ExchSeq:
    """Maximally mixed level 1 and the singlet projector at level 2.

    Symmetric and consistent, yet no mixture of iid towers reproduces it:
    the canonical strictly-positive-residual example.
    """
    psi = np.zeros(4, dtype=complex)
    psi[1] = 1.0 / np.sqrt(2.0)
    psi[2] = -1.0 / np.sqrt(2.0)
    level2 = StateVec(Algebra((4,)), [np.outer(psi, psi.conj())])
    return make_exch_seq(QUBIT, [qubit_state(MAXMIX), level2])


# --- cones -----------------------------------------------------------------------

def _repeat_preparation(n: int):
    # kappa -> <0|kappa|0> |0..0><0..0| + <1|kappa|1> |1..1><1..1|
    dim = 2**n

    def fn(x: np.ndarray) -> np.ndarray:
        out = np.zeros((dim, dim), dtype=complex)
        out[0, 0] = x[0, 0]
        out[dim - 1, dim - 1] = x[1, 1]
        return out

    return fn


def measure_prepare_cone(depth: int = 3, tolerance: float = 1e-9) -> Cone:
    """Measure a qubit apex in the standard basis, then prepare that many
    copies of the observed basis state."""
    channels = []
    for n in range(1, depth + 1):
        target = Algebra((2**n,))
        channels.append(choi_from_function(QUBIT, target, _repeat_preparation(n), SCHRODINGER))
    return Cone(QUBIT, depth, channels, tolerance)


def constant_cone(
    sigma: StateVec, depth: int = 3, apex: Algebra = QUBIT, tolerance: float = 1e-9
) -> Cone:
    """Ignore the apex completely and emit the iid tower of ``sigma``."""
    base = sigma.algebra
    d = base.blocks[0]
    channels = []
    power = sigma.dens[0].copy()
    for n in range(1, depth + 1):
        target = Algebra((d**n,))
        out = power.copy()
        channels.append(
            choi_from_function(
                apex, target, lambda x, out=out: np.trace(x) * out, SCHRODINGER
            )
        )
        if n < depth:
            power = np.kron(power, sigma.dens[0])
    return Cone(apex, depth, channels, tolerance)


def broken_cone(depth: int = 2) -> Cone:
    """Deliberately inconsistent levels: the level-1 output is biased while
    every higher level is maximally mixed, so restriction cannot match."""
    channels = []
    for n in range(1, depth + 1):
        if n == 1:
            out = np.diag([0.9, 0.1]).astype(complex)
        else:
            out = np.eye(2**n, dtype=complex) / 2**n
        target = Algebra((2**n,))
        channels.append(
            choi_from_function(
                QUBIT, target, lambda x, out=out: np.trace(x) * out, SCHRODINGER
            )
        )
    return Cone(QUBIT, depth, channels)


# --- classical coin ---------------------------------------------------------------

COIN_SPACE = ["H", "T"]


def coin_grid(biases=(0.0, 0.5, 1.0)) -> list[FinDist]:
    return [bernoulli(COIN_SPACE, b) for b in biases]


def coin_sequence(depth: int = 5, biases=(0.0, 0.5, 1.0), weights=None):
    grid = coin_grid(biases)
    if weights is None:
        weights = np.full(len(grid), 1.0 / len(grid))
    return synthesize_measures(grid, weights, depth)
