import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import sqrtm

from chronoglass._validation import DimensionError
from chronoglass.channel import (
    KrausMap,
    amplitude_damping,
    choi_from_kraus,
    is_cptp,
    random_channel,
    random_cp_map,
    supertrace,
    unitary_channel,
)
from chronoglass.estimators import FractionalTransposer, GeneralizedTransposer, UBBSearch
from chronoglass.gentrans import (
    GenTransposition,
    PartialGenTransposition,
    fractional_transpose,
    gen_transpose,
    gen_transpose_channel,
    gen_transpose_channel_choi,
    is_compatible_channel,
    is_unital_gt,
    partial_gen_transpose,
    prep_compat,
    preserves_me,
    ubb_search,
    unitalize,
)
from chronoglass.matcore import (
    cnot,
    cz,
    dagger,
    fractional_swap,
    hadamard,
    is_unitary,
    max_mixed,
    partial_transpose,
    pauli,
    random_matrix,
    random_state,
    random_unitary,
    swap,
)

from conftest import assert_close

seeds = st.integers(0, 2**32 - 1)
X, Z, H = pauli("X"), pauli("Z"), hadamard()


def test_swap_gives_transpose(rng):
    m = random_matrix(3, rng)
    assert_close(gen_transpose(m, swap(3)), m.T, 1e-14)


def test_identity_wiring(rng):
    m = random_matrix(3, rng)
    assert_close(gen_transpose(m, np.eye(9)), m, 1e-14)


def test_hadamard_cnot_example():
    # target-first CNOT (control on the second leg) reproduces XH
    assert_close(gen_transpose(H, cnot(control=1)), X @ H, 1e-12)
    # control-first CNOT gives HX under the same vectorization
    assert_close(gen_transpose(H, cnot(control=0)), H @ X, 1e-12)


@given(seeds)
def test_product_wiring(seed):
    rng = np.random.default_rng(seed)
    w1, w2, m = random_matrix(3, rng), random_matrix(3, rng), random_matrix(3, rng)
    assert_close(gen_transpose(m, np.kron(w1, w2.T)), w1 @ m @ w2, 1e-10)


def test_defining_sum_matches_vectorized_form(rng):
    d = 3
    w = random_unitary(d * d, rng)
    m = random_matrix(d, rng)
    e = np.eye(d)
    total = np.zeros((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            ket = np.kron(m @ e[:, [i]], e[:, [i]])
            total += np.kron(np.eye(d), e[[j], :]) @ w @ ket @ e[[j], :]
    assert_close(total, gen_transpose(m, w), 1e-12)


def test_fractional_examples(rng):
    m = random_matrix(2, rng)
    assert_close(fractional_transpose(m, 0.0), m, 1e-14)
    assert_close(fractional_transpose(m, np.pi), m.T, 1e-12)
    xz, zx = X @ Z, Z @ X
    want = (np.exp(-0.25j * np.pi) * xz + np.exp(0.25j * np.pi) * zx) / np.sqrt(2)
    assert_close(fractional_transpose(xz, np.pi / 2), want, 1e-12)


@given(seeds, st.floats(-7, 7), st.sampled_from([2, 3]))
def test_fractional_closed_form_matches_swap_power(seed, theta, d):
    m = random_matrix(d, np.random.default_rng(seed))
    assert_close(fractional_transpose(m, theta), gen_transpose(m, fractional_swap(theta, d)), 1e-10)


@given(seeds, st.floats(-4, 4), st.floats(-4, 4))
def test_fractional_group_law(seed, a, b):
    m = random_matrix(3, np.random.default_rng(seed))
    lhs = fractional_transpose(fractional_transpose(m, a), b)
    assert_close(lhs, fractional_transpose(m, a + b), 1e-10)


@given(seeds, st.sampled_from([2, 3, 4]))
def test_unitary_transpositions_preserve_inner_product(seed, d):
    rng = np.random.default_rng(seed)
    w = random_unitary(d * d, rng)
    a, b = random_matrix(d, rng), random_matrix(d, rng)
    ta, tb = gen_transpose(a, w), gen_transpose(b, w)
    assert abs(np.vdot(ta, tb) - np.vdot(a, b)) <= 1e-10 * (1 + abs(np.vdot(a, b)))


@given(seeds)
def test_adjoint_inverts(seed):
    rng = np.random.default_rng(seed)
    t = GenTransposition(random_unitary(9, rng))
    m = random_matrix(3, rng)
    assert_close(gen_transpose(gen_transpose(m, t), t.adjoint), m, 1e-10)


def test_partial_examples(rng):
    a, b = random_matrix(2, rng), random_matrix(3, rng)
    m = random_matrix(6, rng)
    p = PartialGenTransposition(GenTransposition(swap(3)), (2, 3), 1)
    assert_close(partial_gen_transpose(m, p), partial_transpose(m, (2, 3), 1), 1e-14)
    w = random_unitary(9, rng)
    p = PartialGenTransposition(GenTransposition(w), (2, 3), 1)
    assert_close(partial_gen_transpose(np.kron(a, b), p), np.kron(a, gen_transpose(b, w)), 1e-12)
    p = PartialGenTransposition(GenTransposition(swap(2)), (2, 2), 1)
    assert_close(gen_transpose(cz(), p), cz(), 1e-14)


def test_partial_on_first_factor(rng):
    a, b = random_matrix(3, rng), random_matrix(2, rng)
    w = random_unitary(9, rng)
    p = PartialGenTransposition(GenTransposition(w), (3, 2), 0)
    assert_close(gen_transpose(np.kron(a, b), p), np.kron(gen_transpose(a, w), b), 1e-12)


def test_partial_dimension_mismatch():
    with pytest.raises(DimensionError):
        PartialGenTransposition(GenTransposition(swap(2)), (2, 3), 1)


def test_channel_transposition_examples(rng):
    m = random_matrix(2, rng)
    w = random_unitary(4, rng)
    got = gen_transpose_channel(KrausMap.from_kraus([m]), w)
    want = KrausMap.from_kraus([gen_transpose(m, w)])
    assert_close(choi_from_kraus(got).matrix, choi_from_kraus(want).matrix)
    n = random_cp_map(2, rng=rng)
    assert_close(choi_from_kraus(gen_transpose_channel(n, np.eye(4))).matrix, choi_from_kraus(n).matrix)
    # swap wiring: Kraus K ↦ K^T, so ρ ↦ Σ K^T ρ K^*
    u = random_unitary(2, rng)
    rho = random_state(2, rng)
    out = gen_transpose_channel(unitary_channel(u), swap(2))(rho)
    assert_close(out, u.T @ rho @ u.conj())


@given(seeds, st.sampled_from([2, 3]))
def test_channel_routes_agree(seed, d):
    rng = np.random.default_rng(seed)
    n = random_cp_map(d, rng=rng)
    w = random_unitary(d * d, rng)
    a = choi_from_kraus(gen_transpose_channel(n, w)).matrix
    b = choi_from_kraus(gen_transpose_channel_choi(n, w)).matrix
    assert_close(a, b, 1e-10)


@given(seeds)
def test_supertrace_invariance(seed):
    rng = np.random.default_rng(seed)
    n = random_cp_map(3, rng=rng)
    w = random_unitary(9, rng)
    assert abs(supertrace(gen_transpose_channel(n, w)) - supertrace(n)) < 1e-10


def test_unitality_examples():
    assert is_unital_gt(swap(2))
    assert not is_unital_gt(cnot(0))
    assert_close(gen_transpose(np.eye(2), cnot(0)), np.array([[1, 0], [1, 0]]))


def test_literal_unitalized_cnot_is_not_unital():
    # the substitution W(1 ⊗ X^{1/2}H) does not fix vec(1) under either CNOT
    loc = np.kron(np.eye(2), sqrtm(X) @ H)
    for c in (0, 1):
        assert not is_unital_gt(cnot(c) @ loc)


@pytest.mark.parametrize("c", [0, 1])
def test_unitalize_cnot(c):
    wp = unitalize(cnot(c), rng=0)
    assert wp is not None
    assert is_unitary(wp, 1e-9)
    assert_close(gen_transpose(np.eye(2), wp), np.eye(2), 1e-8)


def test_unitalize_already_unital_and_product(rng):
    assert_close(unitalize(swap(2)), swap(2))
    w1, w2 = random_unitary(2, rng), random_unitary(2, rng)
    wp = unitalize(np.kron(w1, w2.T), rng=1)
    assert wp is not None and is_unital_gt(wp, 1e-8)


def test_ubb_cnot_and_known_pair():
    res = ubb_search(cnot(1), rng=0)
    assert res.success
    assert np.linalg.norm(gen_transpose(res.u, cnot(1)) - res.v) <= 1e-8
    assert is_unitary(gen_transpose(H, cnot(1)))


def test_ubb_product_form(rng):
    w1, w2 = random_unitary(2, rng), random_unitary(2, rng)
    res = ubb_search(np.kron(w1, w2.T), rng=0)
    assert res.success and res.iterations <= 2
    assert_close(res.v, gen_transpose(res.u, np.kron(w1, w2.T)), 1e-8)


@given(seeds)
def test_ubb_random_two_qubit(seed):
    rng = np.random.default_rng(seed)
    w = random_unitary(4, rng)
    res = ubb_search(w, rng=rng)
    assert res.success
    assert is_unitary(res.u, 1e-10) and is_unitary(res.v, 1e-10)
    assert np.linalg.norm(gen_transpose(res.u, w) - res.v) <= 1e-8


def test_ubb_rejects_non_unitary():
    with pytest.raises(ValueError):
        ubb_search(np.ones((4, 4)))


def test_preserves_me_examples(rng):
    assert preserves_me(swap(2))
    assert preserves_me(random_unitary(4, rng), rng=0)


def test_compatibility_examples(rng):
    u = random_unitary(3, rng)
    assert is_compatible_channel(unitary_channel(u), swap(3))
    assert is_compatible_channel(unitary_channel(H), cnot(1))
    img = gen_transpose_channel(unitary_channel(H), cnot(1))
    assert_close(choi_from_kraus(img).matrix, choi_from_kraus(unitary_channel(X @ H)).matrix)
    assert not is_compatible_channel(amplitude_damping(0.5), swap(2))
    p = PartialGenTransposition(GenTransposition(swap(2)), (2, 2), 1)
    assert is_compatible_channel(unitary_channel(cz()), p)
    assert not is_compatible_channel(unitary_channel(swap(2)), p)


def test_compatibility_rejects_non_unitary_w(rng):
    assert not is_compatible_channel(random_channel(2, rng=rng), np.eye(4) * 0.5)


def test_prep_compat_examples(rng):
    assert_close(prep_compat(swap(2), max_mixed(2)), max_mixed(2))
    assert prep_compat(swap(2), np.diag([1.0, 0.0])) is None
    w1, w2 = random_unitary(2, rng), random_unitary(2, rng)
    sigma = random_state(2, rng)
    tau = prep_compat(np.kron(w1, w2.T), sigma)
    want = (w2.T @ sigma.T @ dagger(w2.T)).T
    assert_close(tau, want, 1e-10)


@given(seeds, st.sampled_from([2, 3]))
def test_maximally_mixed_always_compatible(seed, d):
    w = random_unitary(d * d, np.random.default_rng(seed))
    assert_close(prep_compat(w, max_mixed(d)), max_mixed(d), 1e-10)


def test_prep_compat_validation():
    with pytest.raises(DimensionError):
        prep_compat(swap(2), max_mixed(3))
    with pytest.raises(ValueError):
        prep_compat(swap(2), np.eye(2))


def test_generalized_transposer_round_trip(rng):
    w = random_unitary(4, rng)
    est = GeneralizedTransposer(w).fit()
    stack = np.array([random_matrix(2, rng) for _ in range(5)])
    out = est.transform(stack)
    assert out.shape == stack.shape
    assert_close(est.inverse_transform(out), stack, 1e-10)
    assert est.is_unitary_ and not est.is_unital_
    uni = est.unitalized(rng=0)
    assert uni is not None and uni.is_unital_


def test_fractional_transposer(rng):
    m = random_matrix(2, rng)
    est = FractionalTransposer(np.pi / 3).fit()
    assert_close(est.transform(m), fractional_transpose(m, np.pi / 3))
    assert_close(est.inverse_transform(est.transform(m)), m, 1e-12)
    assert_close(est.as_generalized(2).transform(m), est.transform(m), 1e-12)


def test_estimator_errors(rng):
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        GeneralizedTransposer(swap(2)).transform(np.eye(2))
    with pytest.raises(DimensionError):
        GeneralizedTransposer(swap(2)).fit().transform(np.eye(3))
    with pytest.raises(ValueError):
        GeneralizedTransposer().fit()


def test_ubb_estimator(rng):
    est = UBBSearch(random_state=0).fit(random_unitary(4, rng))
    assert est.success_
    u, v = est.pair_
    assert is_unitary(u, 1e-10) and is_unitary(v, 1e-10)
    assert est.get_params()["restarts"] == 32
