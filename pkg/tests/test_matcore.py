import numpy as np
import pytest
from hypothesis import given, strategies as st

from chronoglass._validation import DimensionError
from chronoglass.matcore import (
    cnot,
    dagger,
    fidelity,
    fractional_swap,
    hadamard,
    is_psd,
    is_state,
    is_unitary,
    max_mixed,
    nearest_max_entangled,
    partial_trace,
    partial_transpose,
    pauli,
    phi_plus,
    polar_unitary,
    random_matrix,
    random_state,
    random_unitary,
    schatten_norm,
    sine_metric,
    swap,
    tensor_product,
    unvectorize,
    vectorize,
)

from conftest import assert_close

seeds = st.integers(0, 2**32 - 1)
ket0 = np.diag([1.0, 0.0])
ket1 = np.diag([0.0, 1.0])


def test_tensor_product_examples():
    assert_close(tensor_product(np.eye(2), np.eye(2)), np.eye(4))
    want = np.zeros((4, 4))
    want[1, 1] = 1
    assert_close(tensor_product(ket0, ket1), want)
    xz = tensor_product(pauli("X"), pauli("Z"))
    assert_close(xz[:2, :2], np.zeros((2, 2)))
    assert_close(xz[:2, 2:], pauli("Z"))


def test_partial_trace_examples(rng):
    phi = phi_plus(2)
    assert_close(partial_trace(np.outer(phi, phi.conj()), (2, 2), [0]), max_mixed(2))
    r, s = random_state(2, rng), random_state(3, rng)
    assert_close(partial_trace(np.kron(r, s), (2, 3), [0]), r)
    assert_close(partial_trace(np.kron(r, s), (2, 3), [1]), s)
    # Tr_A of the two-qubit swap is the identity
    assert_close(partial_trace(swap(2), (2, 2), [1]), np.eye(2))


def test_partial_transpose_examples(rng):
    r, s = random_state(2, rng), random_state(3, rng)
    assert_close(partial_transpose(np.kron(r, s), (2, 3), 1), np.kron(r, s.T))
    phi = phi_plus(2)
    assert_close(partial_transpose(swap(2), (2, 2), 1), 2 * np.outer(phi, phi.conj()))


@given(seeds, st.sampled_from([(2, 2), (2, 3), (3, 2), (2, 2, 2)]))
def test_partial_transpose_involution(seed, dims):
    rng = np.random.default_rng(seed)
    m = random_matrix(int(np.prod(dims)), rng)
    for k in range(len(dims)):
        assert_close(partial_transpose(partial_transpose(m, dims, k), dims, k), m, 1e-12)


@given(seeds)
def test_partial_traces_compose_to_full_trace(seed):
    rng = np.random.default_rng(seed)
    m = random_matrix(12, rng)
    red = partial_trace(m, (2, 3, 2), [0, 2])
    assert abs(np.trace(red) - np.trace(m)) < 1e-10


def test_vectorize_convention(rng):
    assert_close(vectorize(np.eye(2)).ravel(), [1, 0, 0, 1])
    assert_close(vectorize(pauli("X")).ravel(), [0, 1, 1, 0])
    m = random_matrix(3, rng)
    assert vectorize(m).shape == (9, 1)
    assert_close(unvectorize(vectorize(m)), m)


@pytest.mark.parametrize(
    "m, p, want",
    [
        (np.eye(3), 2, np.sqrt(3)),
        (hadamard(), 2, np.sqrt(2)),
        (np.diag([3.0, 4.0]), 1, 7.0),
        (np.diag([3.0, 4.0]), np.inf, 4.0),
        (np.diag([3.0, 4.0]), 2, 5.0),
    ],
)
def test_schatten_norm(m, p, want):
    assert abs(schatten_norm(m, p) - want) < 1e-12


def test_schatten_rejects_p_below_one():
    with pytest.raises(ValueError):
        schatten_norm(np.eye(2), 0.5)


def test_fidelity_and_sine_metric(rng):
    r = random_state(3, rng)
    assert abs(fidelity(r, r) - 1) < 1e-8
    assert abs(fidelity(ket0, ket1)) < 1e-12
    assert abs(fidelity(ket0, max_mixed(2)) - 0.5) < 1e-12
    assert abs(sine_metric(r, r)) < 1e-4
    assert abs(sine_metric(ket0, ket1) - 1) < 1e-12
    assert abs(sine_metric(ket0, max_mixed(2)) - np.sqrt(0.5)) < 1e-12


def test_fidelity_rejects_non_state():
    with pytest.raises(ValueError):
        fidelity(np.diag([1.0, 1.0]), max_mixed(2))


@given(seeds)
def test_fidelity_symmetric_and_bounded(seed):
    rng = np.random.default_rng(seed)
    r, s = random_state(3, rng), random_state(3, rng)
    f = fidelity(r, s)
    assert -1e-12 <= f <= 1 + 1e-12
    assert abs(f - fidelity(s, r)) < 1e-8


def test_polar_examples(rng):
    u = random_unitary(3, rng)
    assert_close(polar_unitary(u), u)
    assert_close(polar_unitary(np.diag([2.0, 1.0])), np.eye(2))
    m = np.diag([2.0, 0.0])
    p = polar_unitary(m)
    assert_close(p, np.eye(2))
    assert is_psd(dagger(p) @ m)


@given(seeds)
def test_polar_is_unitary_factor(seed):
    rng = np.random.default_rng(seed)
    m = random_matrix(3, rng)
    u = polar_unitary(m)
    assert is_unitary(u, 1e-10)
    p = dagger(u) @ m
    assert_close(p, dagger(p), 1e-10)
    assert is_psd(p, 1e-10)


def _me_overlap(psi, d, u):
    return abs(np.vdot(psi, np.kron(u, np.eye(d)) @ phi_plus(d)))


def test_nearest_max_entangled_examples():
    phi = phi_plus(2)
    assert_close(nearest_max_entangled(phi, 2), phi)
    psi = np.array([2, 0, 0, 1]) / np.sqrt(5)
    assert_close(nearest_max_entangled(psi, 2), phi)
    e00 = np.array([1.0, 0, 0, 0])
    out = nearest_max_entangled(e00, 2)
    assert_close(out, phi)
    # no grid point does better
    best = abs(np.vdot(e00, out))
    for a in np.linspace(0, np.pi, 9):
        for b in np.linspace(0, 2 * np.pi, 9):
            u = np.array([[np.cos(a), -np.exp(-1j * b) * np.sin(a)], [np.exp(1j * b) * np.sin(a), np.cos(a)]])
            assert _me_overlap(e00, 2, u) <= best + 1e-12


@given(seeds)
def test_nearest_max_entangled_beats_random_candidates(seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=9) + 1j * rng.normal(size=9)
    psi /= np.linalg.norm(psi)
    out = nearest_max_entangled(psi, 3)
    best = abs(np.vdot(psi, out))
    red = partial_trace(np.outer(out, out.conj()), (3, 3), [0])
    assert_close(red, max_mixed(3), 1e-10)
    for _ in range(20):
        assert _me_overlap(psi, 3, random_unitary(3, rng)) <= best + 1e-10


def test_predicates():
    assert is_unitary(hadamard())
    assert not is_unitary(np.diag([1.0, 0.0]))
    assert is_state(max_mixed(3))
    assert not is_state(np.eye(2))
    assert not is_psd(pauli("Z"))


@pytest.mark.parametrize("theta", [0.3, 1.7, np.pi])
def test_fractional_swap_unitary(theta):
    f = fractional_swap(theta)
    assert is_unitary(f, 1e-12)
    want = np.exp(-0.5j * theta) * (np.cos(theta / 2) * np.eye(4) + 1j * np.sin(theta / 2) * swap(2))
    assert_close(f, want, 1e-12)


def test_fractional_swap_endpoints():
    assert_close(fractional_swap(0.0), np.eye(4), 1e-12)
    assert_close(fractional_swap(np.pi), swap(2), 1e-12)


def test_gate_relations():
    x, z = pauli("X"), pauli("Z")
    assert_close(hadamard() @ z @ hadamard(), x, 1e-12)
    assert_close(cnot(0) @ cnot(0), np.eye(4))
    assert_close(swap(2) @ cnot(0) @ swap(2), cnot(1))


@pytest.mark.parametrize("bad", [np.zeros((2, 3, 4)), np.zeros((0, 0))])
def test_dimension_errors(bad):
    with pytest.raises(DimensionError):
        partial_trace(bad, (2, 2), [0])


def test_partial_trace_dims_mismatch():
    with pytest.raises(DimensionError):
        partial_trace(np.eye(4), (2, 3), [0])
