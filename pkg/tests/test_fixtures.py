import numpy as np

from finetti.cpmaps import is_completely_positive, is_trace_preserving
from finetti.definetti import check_cone
from finetti.exchange import check_exchangeable
from finetti.fixtures import (
    bloch_grid_atoms,
    broken_cone,
    circuit1_sequence,
    circuit2_sequence,
    coin_grid,
    equator_atoms,
    measure_prepare_cone,
    singlet_sequence,
    unknown_qubit_sequence,
)


def test_circuit_sequences_are_exchangeable():
    assert check_exchangeable(circuit1_sequence(3)).ok
    assert check_exchangeable(circuit2_sequence(3)).ok


def test_singlet_sequence_levels():
    seq = singlet_sequence()
    assert seq.depth == 2
    assert np.allclose(seq.level(1).dens[0], np.eye(2) / 2)
    lvl2 = seq.level(2).dens[0]
    assert np.isclose(np.trace(lvl2).real, 1.0)
    # Antisymmetric pair state: eigenvalue 1 on the singlet vector.
    v = np.array([0, 1, -1, 0]) / np.sqrt(2)
    assert np.isclose((v @ lvl2 @ v).real, 1.0)


def test_unknown_qubit_sequence_is_exchangeable():
    seq = unknown_qubit_sequence()
    assert seq.depth == 4
    report = check_exchangeable(seq)
    assert report.ok


def test_equator_atoms_are_distinct_and_on_the_circle():
    atoms = equator_atoms(64)
    assert len(atoms.atoms) == 64
    for s in atoms.atoms:
        m = s.dens[0]
        assert np.isclose(np.trace(m).real, 1.0)
        assert np.isclose(m[0, 0].real, 0.5)  # z = 0 on the equator
        assert np.isclose(abs(m[0, 1]), 0.5)  # unit transverse radius


def test_bloch_grid_atoms_cover_the_ball():
    atoms = bloch_grid_atoms((8, 8, 8))
    assert len(atoms.atoms) == 512
    purities = [np.trace(s.dens[0] @ s.dens[0]).real for s in atoms.atoms]
    assert min(purities) > 0.5 - 1e-9
    assert max(purities) < 1.0
    assert max(purities) > 0.95  # near-pure shell is present


def test_measure_prepare_cone_channels_are_channels():
    cone = measure_prepare_cone(3)
    assert cone.depth == 3
    for ch in cone.channels:
        assert is_completely_positive(ch)
        assert is_trace_preserving(ch)
    assert check_cone(cone).ok


def test_broken_cone_channels_are_channels_but_cone_fails():
    cone = broken_cone()
    for ch in cone.channels:
        assert is_completely_positive(ch)
        assert is_trace_preserving(ch)
    assert not check_cone(cone).ok


def test_coin_grid_biases():
    grid = coin_grid((0.0, 0.5, 1.0))
    assert [d.probs[0] for d in grid] == [0.0, 0.5, 1.0]
