"""Dense complex linear algebra on small matrices.

Vectorization convention (used everywhere in the package)::

    vec(M) = (M ⊗ 1)|Γ⟩ = Σ_i M|i⟩ ⊗ |i⟩,   |Γ⟩ = Σ_i |ii⟩

which is the row-major flattening ``M.reshape(-1)``: the first tensor
factor carries the row index and the second one the column index.
"""

import numpy as np

from ._validation import (
    DEFAULT_TOL,
    MAX_DIM,
    DimensionError,
    check_dims,
    check_matrix,
    check_random_state,
    check_tol,
    check_vector,
    square_root_dim,
)

__all__ = [
    "tensor_product",
    "partial_trace",
    "partial_transpose",
    "vectorize",
    "unvectorize",
    "schatten_norm",
    "fidelity",
    "sine_metric",
    "polar_unitary",
    "nearest_max_entangled",
    "is_unitary",
    "is_psd",
    "is_state",
    "is_hermitian",
    "dagger",
    "psd_sqrt",
    "gamma_vector",
    "phi_plus",
    "max_mixed",
    "swap",
    "pauli",
    "hadamard",
    "cnot",
    "cz",
    "shift",
    "clock",
    "fractional_swap",
    "random_unitary",
    "random_state",
    "random_pure_state",
    "random_matrix",
]


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def tensor_product(a, *rest):
    """Kronecker product with the indices of ``a`` outermost."""
    out = check_matrix(a, "a")
    for i, b in enumerate(rest):
        out = np.kron(out, check_matrix(b, f"operand {i + 1}"))
    return out


def _as_tensor(m, dims):
    n = len(dims)
    return m.reshape(dims + dims), n


def partial_trace(m, dims, keep):
    """Trace out every subsystem not listed in ``keep``.

    >>> partial_trace(np.kron(np.eye(2), np.diag([1.0, 0.0])), (2, 2), [0]).real
    array([[1., 0.],
           [0., 1.]])
    """
    m = check_matrix(m, "m", square=True)
    dims = check_dims(dims, m.shape[0])
    keep = sorted(set(int(k) for k in np.atleast_1d(keep)))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionError(f"keep={keep} out of range for {len(dims)} subsystems")
    t, n = _as_tensor(m, dims)
    traced = [k for k in range(n) if k not in keep]
    letters = "abcdefghijklmnopqrstuvwxyz"
    if 2 * n > 24:
        raise DimensionError("too many subsystems")
    rows = list(letters[:n])
    cols = list(letters[n : 2 * n])
    for k in traced:
        cols[k] = rows[k]
    out = "".join(rows[k] for k in keep) + "".join(cols[k] for k in keep)
    res = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    kd = int(np.prod([dims[k] for k in keep])) if keep else 1
    return res.reshape(kd, kd)


def partial_transpose(m, dims, subsystem):
    """Transpose only the indices of ``subsystem`` (a single index or a list)."""
    m = check_matrix(m, "m", square=True)
    dims = check_dims(dims, m.shape[0])
    subs = np.atleast_1d(subsystem).astype(int)
    n = len(dims)
    if any(s < 0 or s >= n for s in subs):
        raise DimensionError(f"subsystem {subsystem} out of range for {n} subsystems")
    t, _ = _as_tensor(m, dims)
    axes = list(range(2 * n))
    for s in subs:
        axes[s], axes[n + s] = axes[n + s], axes[s]
    return t.transpose(axes).reshape(m.shape)


def vectorize(m):
    """Column vector ``(M ⊗ 1)|Γ⟩`` of a square matrix."""
    m = check_matrix(m, "m", square=True)
    return m.reshape(-1, 1).copy()


def unvectorize(v, rows=None):
    """Inverse of :func:`vectorize`; ``rows`` defaults to ``sqrt(len(v))``."""
    v = check_vector(v, "v")
    if rows is None:
        rows = square_root_dim(v.size, "vector")
    if v.size % rows:
        raise DimensionError(f"vector of length {v.size} cannot have {rows} rows")
    return v.reshape(rows, v.size // rows).copy()


def _singular_values(m):
    if max(m.shape) > MAX_DIM:
        raise DimensionError(f"decompositions limited to dimension {MAX_DIM}")
    return np.linalg.svd(m, compute_uv=False)


def schatten_norm(m, p=2):
    """Schatten ``p``-norm from singular values; ``p=np.inf`` gives the operator norm."""
    m = check_matrix(m, "m")
    if p < 1:
        raise ValueError(f"Schatten norm requires p >= 1, got {p}")
    s = _singular_values(m)
    if np.isinf(p):
        return float(s.max())
    return float(np.sum(s ** p) ** (1.0 / p))


def is_hermitian(m, tol=DEFAULT_TOL):
    m = np.asarray(m, dtype=complex)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.abs(m - dagger(m)).max() <= tol


def is_unitary(m, tol=DEFAULT_TOL):
    """``‖m†m − 1‖_∞ <= tol``."""
    m = check_matrix(m, "m", square=True)
    return schatten_norm(dagger(m) @ m - np.eye(m.shape[0]), np.inf) <= check_tol(tol)


def is_psd(m, tol=DEFAULT_TOL):
    m = check_matrix(m, "m", square=True, max_dim=MAX_DIM)
    if not is_hermitian(m, max(tol, 1e-12)):
        return False
    return np.linalg.eigvalsh((m + dagger(m)) / 2).min() >= -check_tol(tol)


def is_state(m, tol=DEFAULT_TOL):
    return is_psd(m, tol) and abs(np.trace(m) - 1) <= tol


def psd_sqrt(m):
    """Square root of a Hermitian PSD matrix (negative eigenvalues clipped)."""
    h = (m + dagger(m)) / 2
    w, v = np.linalg.eigh(h)
    return (v * np.sqrt(np.clip(w, 0, None))) @ dagger(v)


def _check_state(rho, name, tol):
    rho = check_matrix(rho, name, square=True, max_dim=MAX_DIM)
    if not is_state(rho, tol):
        raise ValueError(f"{name} is not a density matrix within tol={tol}")
    return rho


def fidelity(rho, sigma, tol=DEFAULT_TOL):
    """Uhlmann fidelity ``‖√ρ √σ‖₁²``."""
    rho = _check_state(rho, "rho", tol)
    sigma = _check_state(sigma, "sigma", tol)
    if rho.shape != sigma.shape:
        raise DimensionError(f"states have shapes {rho.shape} and {sigma.shape}")
    f = np.sum(_singular_values(psd_sqrt(rho) @ psd_sqrt(sigma))) ** 2
    return float(min(max(f, 0.0), 1.0))


def sine_metric(rho, sigma, tol=DEFAULT_TOL):
    """``√(1 − F(ρ, σ))``."""
    return float(np.sqrt(max(0.0, 1.0 - fidelity(rho, sigma, tol))))


def _fix_phase(v):
    """Rotate the phase of ``v`` so its largest-magnitude entry is real positive."""
    k = np.argmax(np.abs(v) - 1e-12 * np.arange(v.size))
    return v * np.exp(-1j * np.angle(v[k]))


def _null_basis(proj_range, n_null):
    """Deterministic orthonormal basis of the complement of ``proj_range``."""
    n = proj_range.shape[0]
    basis = []
    comp = np.eye(n) - proj_range
    for j in range(n):
        if len(basis) == n_null:
            break
        v = comp[:, j].copy()
        for b in basis:
            v -= b * np.vdot(b, v)
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            basis.append(_fix_phase(v / nv))
    return basis


def polar_unitary(m, rank_tol=1e-12):
    """Unitary factor ``U`` of ``m = U P`` with ``P`` PSD.

    On the support of ``m`` the factor is unique.  Null directions of a
    rank-deficient ``m`` are paired deterministically: Gram-Schmidt over the
    computational basis of each null space, each vector phased so that its
    largest-magnitude entry is real positive.
    """
    m = check_matrix(m, "m", square=True, max_dim=MAX_DIM)
    n = m.shape[0]
    a, s, bh = np.linalg.svd(m)
    cutoff = rank_tol * max(1.0, s[0] if s.size else 0.0)
    r = int(np.sum(s > cutoff))
    ar, br = a[:, :r], dagger(bh)[:, :r]
    u = ar @ dagger(br)
    if r < n:
        left = _null_basis(ar @ dagger(ar), n - r)
        right = _null_basis(br @ dagger(br), n - r)
        for x, y in zip(left, right):
            u = u + np.outer(x, np.conj(y))
    return u


def gamma_vector(d):
    """Unnormalized ``|Γ⟩ = Σ_i |ii⟩``."""
    return np.eye(d, dtype=complex).reshape(-1)


def phi_plus(d):
    """Normalized maximally entangled vector ``|φ+⟩``."""
    return gamma_vector(d) / np.sqrt(d)


def max_mixed(d):
    return np.eye(d, dtype=complex) / d


def nearest_max_entangled(psi, d):
    """Closest maximally entangled vector ``vec(U)/√d`` to ``psi``.

    ``U`` is the polar factor of ``unvec(psi)``, which maximizes
    ``|⟨ψ|vec(U)⟩|`` over unitaries when ``unvec(psi)`` is nonsingular.
    """
    psi = check_vector(psi, "psi")
    if psi.size != d * d:
        raise DimensionError(f"psi has length {psi.size}, expected {d * d}")
    return polar_unitary(psi.reshape(d, d)).reshape(-1) / np.sqrt(d)


def swap(d):
    """Swap operator ``F = Σ |i⟩⟨j| ⊗ |j⟩⟨i|`` on ``C^d ⊗ C^d``."""
    f = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            f[i * d + j, j * d + i] = 1.0
    return f


def fractional_swap(theta, d=2):
    """``F(θ) = F^{θ/π} = e^{−iθ/2}(cos(θ/2) 1 + i sin(θ/2) F)``."""
    return np.exp(-0.5j * theta) * (
        np.cos(theta / 2) * np.eye(d * d) + 1j * np.sin(theta / 2) * swap(d)
    )


_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(label):
    """Tensor product of single-qubit Paulis, e.g. ``pauli("XZ")``."""
    out = np.eye(1, dtype=complex)
    for c in label.upper():
        out = np.kron(out, _PAULI[c])
    return out


def hadamard():
    return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def cnot(control=0):
    """Two-qubit CNOT with the control on tensor leg ``control`` (0 or 1)."""
    p0, p1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    x = _PAULI["X"]
    if control == 0:
        return np.kron(p0, np.eye(2)) + np.kron(p1, x)
    if control == 1:
        return np.kron(np.eye(2), p0) + np.kron(x, p1)
    raise ValueError("control must be 0 or 1")


def cz():
    return np.diag([1, 1, 1, -1]).astype(complex)


def shift(d):
    """Generalized Pauli X: ``|n⟩ ↦ |n ⊕ 1⟩``."""
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def clock(d):
    """Generalized Pauli Z."""
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


def random_matrix(d, rng=None, cols=None):
    rng = check_random_state(rng)
    cols = d if cols is None else cols
    return rng.normal(size=(d, cols)) + 1j * rng.normal(size=(d, cols))


def random_unitary(d, rng=None):
    """Haar-random unitary via QR with phase correction."""
    q, r = np.linalg.qr(random_matrix(d, rng))
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_pure_state(d, rng=None):
    v = random_matrix(d, rng, cols=1).reshape(-1)
    return v / np.linalg.norm(v)


def random_state(d, rng=None, rank=None):
    """Random density matrix (Hilbert-Schmidt measure for full rank)."""
    g = random_matrix(d, rng, cols=d if rank is None else rank)
    rho = g @ dagger(g)
    return rho / np.trace(rho).real
