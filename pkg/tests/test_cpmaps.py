import numpy as np
import pytest

from finetti.cstar import Algebra, Element, eval_state, make_state, state_to_dense
from finetti.cpmaps import (
    HEISENBERG,
    SCHRODINGER,
    ChoiMap,
    apply,
    choi_from_function,
    compose,
    dephasing_map,
    depolarizing_map,
    dualize,
    identity_map,
    is_completely_positive,
    is_trace_preserving,
    is_unital,
    maps_close,
    tensor,
)

from oracles import apply_via_choi_loops, cp_probe

M2 = Algebra((2,))
M3 = Algebra((3,))


def random_channel(source_d, target_d, rng, kraus=3):
    """Random CP trace-preserving map built from normalized Kraus operators."""
    ks = [
        rng.standard_normal((target_d, source_d))
        + 1j * rng.standard_normal((target_d, source_d))
        for _ in range(kraus)
    ]
    norm = sum(k.conj().T @ k for k in ks)
    w = np.linalg.cholesky(np.linalg.inv(norm))
    ks = [k @ w for k in ks]

    def fn(x):
        return sum(k @ x @ k.conj().T for k in ks)

    return choi_from_function(Algebra((source_d,)), Algebra((target_d,)), fn, SCHRODINGER)


def random_state(alg, rng):
    dens = []
    for d in alg.blocks:
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        dens.append(g @ g.conj().T)
    total = sum(np.trace(m).real for m in dens)
    return make_state(alg, tuple(m / total for m in dens))


def random_element(alg, rng):
    return Element(
        alg,
        tuple(
            (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))).astype(complex)
            for d in alg.blocks
        ),
    )


def test_identity_map_choi_is_maximally_entangled():
    ident = identity_map(M2)
    # J = sum_ij E_ij (x) E_ij, i.e. 2 * |omega><omega|.
    expected = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2))
            e[i, j] = 1
            expected += np.kron(e, e)
    assert np.allclose(ident.choi, expected)


def test_identity_map_fixes_states_and_elements():
    rng = np.random.default_rng(0)
    ident_s = identity_map(M2, direction=SCHRODINGER)
    s = random_state(M2, rng)
    assert np.allclose(apply(ident_s, s).dens[0], s.dens[0])
    ident_h = identity_map(M2, direction=HEISENBERG)
    a = random_element(M2, rng)
    assert np.allclose(apply(ident_h, a).mats[0], a.mats[0])


def test_apply_matches_explicit_choi_contraction():
    rng = np.random.default_rng(1)
    ch = random_channel(2, 3, rng)
    s = random_state(M2, rng)
    out = apply(ch, s)
    ref = apply_via_choi_loops(ch.choi, s.dens[0], 2, 3)
    assert np.allclose(out.dens[0], ref, atol=1e-12)


def test_depolarizing_map_sends_everything_to_maximally_mixed():
    dep = depolarizing_map(2)
    rng = np.random.default_rng(2)
    for _ in range(5):
        out = apply(dep, random_state(M2, rng))
        assert np.allclose(out.dens[0], np.eye(2) / 2, atol=1e-12)
    # Choi of x -> Tr(x) I/2 is I (x) I / 2.
    assert np.allclose(dep.choi, np.eye(4) / 2)


def test_dephasing_map_keeps_diagonal():
    deph = dephasing_map(2)
    plus = make_state(M2, (np.full((2, 2), 0.5),))
    out = apply(deph, plus)
    assert np.allclose(out.dens[0], np.diag([0.5, 0.5]), atol=1e-14)


def test_channel_properties():
    rng = np.random.default_rng(3)
    ch = random_channel(2, 3, rng)
    assert is_completely_positive(ch)
    assert is_trace_preserving(ch)
    dual = dualize(ch)
    assert dual.direction == HEISENBERG
    assert is_unital(dual)


def test_direction_guards():
    dep_s = depolarizing_map(2, direction=SCHRODINGER)
    with pytest.raises(ValueError):
        is_unital(dep_s)
    with pytest.raises(ValueError):
        is_trace_preserving(dualize(dep_s))


def test_transpose_map_choi_is_swap_and_not_cp():
    transpose = choi_from_function(M2, M2, lambda x: x.T, SCHRODINGER)
    swap = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            swap[i * 2 + j, j * 2 + i] = 1
    assert np.allclose(transpose.choi, swap)
    # SWAP has eigenvalue -1 on the antisymmetric vector, so the map is
    # positive but not completely positive.
    assert np.linalg.eigvalsh(transpose.choi).min() == pytest.approx(-1.0)
    assert not is_completely_positive(transpose)
    assert not cp_probe(transpose.choi, 2, 2, trials=20, seed=0)


def test_cp_detection_matches_direct_probe():
    rng = np.random.default_rng(4)
    for k in range(6):
        ch = random_channel(2, 2, rng)
        # Mix the Choi matrix with the non-CP transpose witness to sweep
        # across the CP boundary.
        swap = choi_from_function(M2, M2, lambda x: x.T, SCHRODINGER).choi
        t = k / 5.0
        blend = ChoiMap(M2, M2, SCHRODINGER, (1 - t) * ch.choi + t * swap)
        assert is_completely_positive(blend) == cp_probe(blend.choi, 2, 2, 25, seed=k)


def test_apply_rejects_mismatched_inputs():
    dep = depolarizing_map(2, direction=SCHRODINGER)
    rng = np.random.default_rng(5)
    with pytest.raises(ValueError):
        apply(dep, random_state(M3, rng))  # wrong algebra
    with pytest.raises(TypeError):
        apply(dep, random_element(M2, rng))  # Schrodinger maps act on states
    with pytest.raises(TypeError):
        apply(dualize(dep), random_state(M2, rng))


def test_dualize_is_the_trace_pairing_adjoint():
    rng = np.random.default_rng(6)
    for _ in range(10):
        ch = random_channel(2, 3, rng)
        dual = dualize(ch)
        s = random_state(M2, rng)
        a = random_element(M3, rng)
        lhs = eval_state(apply(ch, s), a)
        rhs = eval_state(s, apply(dual, a))
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_dualize_is_an_involution():
    rng = np.random.default_rng(7)
    ch = random_channel(3, 2, rng)
    assert maps_close(dualize(dualize(ch)), ch, tol=1e-12)


def test_compose_identity_neutral():
    rng = np.random.default_rng(8)
    ch = random_channel(2, 3, rng)
    assert maps_close(compose(identity_map(M2), ch), ch, tol=1e-12)
    assert maps_close(compose(ch, identity_map(M3)), ch, tol=1e-12)


def test_compose_agrees_with_sequential_application():
    rng = np.random.default_rng(9)
    f = random_channel(2, 3, rng)
    g = random_channel(3, 2, rng)
    fg = compose(f, g)  # f then g
    s = random_state(M2, rng)
    assert np.allclose(apply(fg, s).dens[0], apply(g, apply(f, s)).dens[0], atol=1e-12)


def test_dualize_antihomomorphism():
    rng = np.random.default_rng(10)
    f = random_channel(2, 3, rng)
    g = random_channel(3, 2, rng)
    lhs = dualize(compose(f, g))
    rhs = compose(dualize(g), dualize(f))
    assert maps_close(lhs, rhs, tol=1e-10)


def test_compose_rejects_mismatched_endpoints():
    rng = np.random.default_rng(11)
    f = random_channel(2, 3, rng)
    with pytest.raises(ValueError):
        compose(f, f)


def test_tensor_of_identities_is_identity():
    lhs = tensor(identity_map(M2), identity_map(M2))
    rhs = identity_map(Algebra((4,)))
    assert maps_close(lhs, rhs, tol=1e-12)


def test_tensor_acts_blockwise_on_product_states():
    rng = np.random.default_rng(12)
    f = random_channel(2, 2, rng)
    g = random_channel(2, 2, rng)
    fg = tensor(f, g)
    s1 = random_state(M2, rng)
    s2 = random_state(M2, rng)
    prod = make_state(Algebra((4,)), (np.kron(s1.dens[0], s2.dens[0]),))
    out = apply(fg, prod)
    expected = np.kron(apply(f, s1).dens[0], apply(g, s2).dens[0])
    assert np.allclose(out.dens[0], expected, atol=1e-12)


def test_tensor_depolarizing_flattens_entangled_input():
    dep2 = tensor(depolarizing_map(2), depolarizing_map(2))
    bell = np.zeros((4, 4), dtype=complex)
    v = np.array([1, 0, 0, 1]) / np.sqrt(2)
    bell[:, :] = np.outer(v, v)
    out = apply(dep2, make_state(Algebra((4,)), (bell,)))
    assert np.allclose(out.dens[0], np.eye(4) / 4, atol=1e-12)


def test_measurement_and_preparation_maps():
    # Measure in the computational basis: M_2 -> C^2 (Schrodinger picture:
    # density -> outcome probabilities).
    c2 = Algebra((1, 1))

    def measure(x):
        return np.diag([x[0, 0], x[1, 1]])

    def measure_blocks(x):
        d = measure(x)
        return d

    meas = choi_from_function(M2, c2, measure_blocks, SCHRODINGER)
    assert is_completely_positive(meas)
    assert is_trace_preserving(meas)

    plus = make_state(M2, (np.full((2, 2), 0.5),))
    out = apply(meas, plus)
    assert out.dens[0][0, 0] == pytest.approx(0.5)
    assert out.dens[1][0, 0] == pytest.approx(0.5)

    # Prepare |0><0| or |1><1| according to a classical bit: C^2 -> M_2.
    def prepare(x):
        return x[0, 0] * np.diag([1.0, 0.0]) + x[1, 1] * np.diag([0.0, 1.0])

    prep = choi_from_function(c2, M2, prepare, SCHRODINGER)
    assert is_completely_positive(prep)
    assert is_trace_preserving(prep)
    roundtrip = compose(meas, prep)  # measure then prepare = dephasing
    assert maps_close(roundtrip, dephasing_map(2), tol=1e-12)


def test_maps_close_detects_differences():
    a = depolarizing_map(2)
    b = identity_map(M2)
    assert not maps_close(a, b, tol=1e-6)
    assert maps_close(a, a, tol=0.0)
