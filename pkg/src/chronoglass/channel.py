"""Quantum channels, Choi calculus, supermaps and factorizable maps.

A :class:`KrausMap` stores ``ρ ↦ Σ_n c_n K_n ρ K_n†`` with complex weights
``c_n``, which covers every linear map (Hermiticity-preserving maps with
real weights).  Choi matrices use the trace-one convention
``J = (N ⊗ id)(φ+)`` with the output factor first.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import (
    DEFAULT_TOL,
    MAX_DIM,
    DimensionError,
    check_dims,
    check_matrix,
    check_random_state,
    check_tol,
)
from .matcore import (
    dagger,
    is_psd,
    is_hermitian,
    is_unitary,
    max_mixed,
    partial_trace,
    partial_transpose,
    polar_unitary,
    random_unitary,
)

__all__ = [
    "KrausMap",
    "ChoiMatrix",
    "Superchannel",
    "FactorizableMap",
    "choi_from_kraus",
    "kraus_from_choi",
    "is_cptp",
    "is_cp",
    "is_trace_preserving",
    "is_unital",
    "choi_of_supermap",
    "apply_choi_map",
    "supertrace",
    "supertrace_partial",
    "marginal_channel",
    "apply_superchannel",
    "preparation_superchannel",
    "factorizable_apply",
    "factorizable_channel",
    "hjw_transposition_solver",
    "is_catalytic",
    "unitary_channel",
    "identity_channel",
    "depolarizing",
    "dephasing",
    "amplitude_damping",
    "replacer",
    "random_channel",
    "random_cp_map",
]


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class KrausMap:
    """Weighted Kraus representation of a linear map ``C^in_dim → C^out_dim``."""

    in_dim: int
    out_dim: int
    terms: tuple = field(default=())

    def __post_init__(self):
        terms = []
        for c, k in self.terms:
            k = check_matrix(k, "Kraus operator")
            if k.shape != (self.out_dim, self.in_dim):
                raise DimensionError(
                    f"Kraus operator has shape {k.shape}, expected "
                    f"{(self.out_dim, self.in_dim)}"
                )
            c = complex(c)
            if not np.isfinite(c):
                raise ValueError("Kraus weight must be finite")
            terms.append((c, _frozen(k)))
        object.__setattr__(self, "terms", tuple(terms))

    @classmethod
    def from_kraus(cls, operators, weights=None):
        operators = [check_matrix(k, "Kraus operator") for k in operators]
        if not operators:
            raise ValueError("need at least one Kraus operator")
        if weights is None:
            weights = [1.0] * len(operators)
        out_dim, in_dim = operators[0].shape
        return cls(in_dim, out_dim, tuple(zip(weights, operators)))

    @classmethod
    def from_unitary(cls, u):
        u = check_matrix(u, "u", square=True)
        return cls(u.shape[1], u.shape[0], ((1.0, u),))

    @property
    def kraus(self):
        return [k for _, k in self.terms]

    @property
    def weights(self):
        return np.array([c for c, _ in self.terms])

    def __call__(self, rho):
        rho = check_matrix(rho, "rho")
        if rho.shape != (self.in_dim, self.in_dim):
            raise DimensionError(
                f"input has shape {rho.shape}, map expects {(self.in_dim, self.in_dim)}"
            )
        out = np.zeros((self.out_dim, self.out_dim), dtype=complex)
        for c, k in self.terms:
            out += c * (k @ rho @ dagger(k))
        return out

    def compose(self, other):
        """``self ∘ other``."""
        if other.out_dim != self.in_dim:
            raise DimensionError(
                f"cannot compose: inner output {other.out_dim} != outer input {self.in_dim}"
            )
        terms = [(c * d, k @ l) for c, k in self.terms for d, l in other.terms]
        return KrausMap(other.in_dim, self.out_dim, tuple(terms))

    def tensor(self, other):
        terms = [(c * d, np.kron(k, l)) for c, k in self.terms for d, l in other.terms]
        return KrausMap(
            self.in_dim * other.in_dim, self.out_dim * other.out_dim, tuple(terms)
        )

    def scaled(self, alpha):
        return KrausMap(
            self.in_dim, self.out_dim, tuple((alpha * c, k) for c, k in self.terms)
        )

    def __add__(self, other):
        if (self.in_dim, self.out_dim) != (other.in_dim, other.out_dim):
            raise DimensionError("cannot add maps with different dimensions")
        return KrausMap(self.in_dim, self.out_dim, self.terms + other.terms)

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def choi(self):
        return choi_from_kraus(self)

    def is_unitary_channel(self, tol=DEFAULT_TOL):
        """True when the map is ``Ad_U`` for a single unitary ``U``."""
        if self.in_dim != self.out_dim:
            return False
        kr = kraus_from_choi(self.choi())
        if len(kr.terms) != 1:
            return False
        c, k = kr.terms[0]
        return abs(c - 1) <= tol and is_unitary(k, tol)


@dataclass(frozen=True)
class ChoiMatrix:
    """Trace-normalized Choi matrix on ``out ⊗ in``."""

    matrix: np.ndarray
    in_dim: int
    out_dim: int

    def __post_init__(self):
        m = check_matrix(self.matrix, "choi", square=True)
        n = self.in_dim * self.out_dim
        if m.shape != (n, n):
            raise DimensionError(
                f"Choi matrix has shape {m.shape}, expected {(n, n)} for "
                f"in_dim={self.in_dim}, out_dim={self.out_dim}"
            )
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def unnormalized(self):
        """``Σ_ij N(|i⟩⟨j|) ⊗ |i⟩⟨j|``."""
        return self.in_dim * np.asarray(self.matrix)


def choi_from_kraus(n):
    """``J = (N ⊗ id)(φ+)``, output factor first."""
    dim = n.out_dim * n.in_dim
    j = np.zeros((dim, dim), dtype=complex)
    for c, k in n.terms:
        v = k.reshape(-1)
        j += c * np.outer(v, np.conj(v))
    return ChoiMatrix(j / n.in_dim, n.in_dim, n.out_dim)


def kraus_from_choi(j, cutoff=1e-14):
    """Eigendecomposition-based Kraus form; weights are ±1.

    Positive eigenvalues give weight ``+1`` (so CP maps come out with
    positive weights) and negative ones weight ``-1``.
    """
    m = np.asarray(j.matrix)
    if max(m.shape) > MAX_DIM:
        raise DimensionError(f"decompositions limited to dimension {MAX_DIM}")
    if not is_hermitian(m, 1e-10 * max(1.0, np.abs(m).max())):
        raise ValueError("Choi matrix is not Hermitian; use a complex-weight map")
    w, v = np.linalg.eigh((m + dagger(m)) / 2)
    scale = max(1.0, np.abs(w).max())
    terms = []
    for lam, vec in zip(w[::-1], v.T[::-1]):
        if abs(lam) <= cutoff * scale:
            continue
        k = np.sqrt(j.in_dim * abs(lam)) * vec.reshape(j.out_dim, j.in_dim)
        terms.append((1.0 if lam > 0 else -1.0, k))
    if not terms:
        terms.append((1.0, np.zeros((j.out_dim, j.in_dim))))
    return KrausMap(j.in_dim, j.out_dim, tuple(terms))


def is_cp(n, tol=DEFAULT_TOL):
    return is_psd(choi_from_kraus(n).matrix, tol)


def is_trace_preserving(n, tol=DEFAULT_TOL):
    s = sum(c * dagger(k) @ k for c, k in n.terms)
    return np.abs(s - np.eye(n.in_dim)).max() <= tol


def is_unital(n, tol=DEFAULT_TOL):
    if n.in_dim != n.out_dim:
        return False
    return np.abs(n(np.eye(n.in_dim)) - np.eye(n.out_dim)).max() <= tol


def is_cptp(n, tol=DEFAULT_TOL):
    """Choi PSD and ``Σ c_n K_n† K_n = 1``, both within ``tol``."""
    tol = check_tol(tol)
    return is_cp(n, tol) and is_trace_preserving(n, tol)


def _map_from_hermitian_choi(h, in_dim, out_dim):
    return kraus_from_choi(ChoiMatrix(h, in_dim, out_dim), cutoff=0.0)


def choi_of_supermap(theta, in_dim, out_dim=None):
    """Matrix of ``J ∘ Θ ∘ J⁻¹`` acting on ``vec(J)``.

    ``theta`` is any complex-linear callable ``KrausMap -> KrausMap`` (for
    instance ``lambda n: apply_superchannel(f, n)``).  Matrix units of the
    Choi space are split into Hermitian parts so every basis map has a
    real-weight Kraus form.
    """
    out_dim = in_dim if out_dim is None else out_dim
    dim = in_dim * out_dim
    columns = []
    for a in range(dim):
        for b in range(dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[a, b] = 1.0
            h1 = (e + e.T) / 2
            h2 = (e - e.T) / 2j
            j1 = theta(_map_from_hermitian_choi(h1, in_dim, out_dim)).choi()
            j2 = theta(_map_from_hermitian_choi(h2, in_dim, out_dim)).choi()
            img = np.asarray(j1.matrix) + 1j * np.asarray(j2.matrix)
            columns.append(img.reshape(-1))
    return np.array(columns).T


def apply_choi_map(jmap, choi):
    """Apply a matrix returned by :func:`choi_of_supermap` to a Choi matrix."""
    m = np.asarray(choi.matrix if isinstance(choi, ChoiMatrix) else choi)
    out = jmap @ m.reshape(-1)
    n = int(round(np.sqrt(out.size)))
    return out.reshape(n, n)


def supertrace(m):
    """``Tr[J^M] = Tr[M(π)]`` for a square map."""
    if m.in_dim != m.out_dim:
        raise DimensionError("supertrace needs in_dim == out_dim")
    return complex(np.trace(m(max_mixed(m.in_dim))))


def supertrace_partial(m, dims, traced=1):
    """Supertrace over one factor of a map on ``A ⊗ B``.

    With ``traced=1`` the result is ``ρ_A ↦ Tr_B[m(ρ_A ⊗ π_B)]``; with
    ``traced=0`` the roles of ``A`` and ``B`` are exchanged.
    """
    da, db = check_dims(dims, m.in_dim, "dims")
    if m.in_dim != m.out_dim:
        raise DimensionError("supertrace_partial needs a map on A⊗B → A⊗B")
    terms = []
    if traced == 1:
        for c, k in m.terms:
            k4 = k.reshape(da, db, da, db)
            for x in range(db):
                for y in range(db):
                    terms.append((c / db, k4[:, x, :, y]))
        return KrausMap(da, da, tuple(terms))
    if traced == 0:
        for c, k in m.terms:
            k4 = k.reshape(da, db, da, db)
            for x in range(da):
                for y in range(da):
                    terms.append((c / da, k4[x, :, y, :]))
        return KrausMap(db, db, tuple(terms))
    raise ValueError("traced must be 0 or 1")


def marginal_channel(m, dims, sigma):
    """The ``A → B`` map ``ρ ↦ Tr_A[m(ρ ⊗ σ)]`` of a bipartite map."""
    da, db = check_dims(dims, m.in_dim, "dims")
    sigma = check_matrix(sigma, "sigma", square=True, max_dim=MAX_DIM)
    if sigma.shape != (db, db):
        raise DimensionError(f"sigma has shape {sigma.shape}, expected {(db, db)}")
    if not is_psd(sigma, 1e-9) or abs(np.trace(sigma) - 1) > 1e-9:
        raise ValueError("sigma is not a density matrix")
    w, v = np.linalg.eigh((sigma + dagger(sigma)) / 2)
    terms = []
    for c, k in m.terms:
        k4 = k.reshape(da, db, da, db)
        for lam, e in zip(w, v.T):
            if lam <= 1e-15:
                continue
            # column vector |e⟩ attached on B, K4[a, :, :, :] contracted with it
            ke = np.einsum("abcd,d->abc", k4, e) * np.sqrt(lam)
            for a in range(da):
                terms.append((c, ke[a]))
    return KrausMap(da, db, tuple(terms))


@dataclass(frozen=True)
class Superchannel:
    """Pre/post realization ``N ↦ post ∘ (N ⊗ id_mem) ∘ pre``."""

    pre: KrausMap
    post: KrausMap
    memory_dim: int = 1


def apply_superchannel(f, n):
    mem = int(f.memory_dim)
    if f.pre.out_dim != n.in_dim * mem:
        raise DimensionError(
            f"pre outputs dimension {f.pre.out_dim}, expected {n.in_dim}×{mem}"
        )
    if f.post.in_dim != n.out_dim * mem:
        raise DimensionError(
            f"post takes dimension {f.post.in_dim}, expected {n.out_dim}×{mem}"
        )
    return f.post.compose(n.tensor(identity_channel(mem))).compose(f.pre)


def preparation_superchannel(sigma, in_dim=None):
    """``P^σ(N) = N(σ)`` realized with a replacer as pre-processing.

    The result of applying it is the constant map ``ρ ↦ Tr[ρ] N(σ)`` on an
    input of dimension ``in_dim`` (default: that of ``σ``).
    """
    sigma = check_matrix(sigma, "sigma", square=True)
    d = sigma.shape[0]
    pre = replacer(sigma, d if in_dim is None else in_dim)
    return Superchannel(pre=pre, post=identity_channel(d), memory_dim=1)


@dataclass(frozen=True)
class FactorizableMap:
    """Sectored purification ``N(ρ) = Σ_i p_i Tr_{Y_i}[U_i (ρ ⊗ π_{Y_i}) U_i†]``."""

    in_dim: int
    sectors: tuple

    def __post_init__(self):
        checked = []
        for p, u in self.sectors:
            u = check_matrix(u, "sector unitary", square=True)
            if u.shape[0] % self.in_dim:
                raise DimensionError(
                    f"sector unitary of size {u.shape[0]} does not factor as "
                    f"{self.in_dim}×|Y|"
                )
            if not is_unitary(u, 1e-9):
                raise ValueError("sector operator is not unitary")
            checked.append((float(p), _frozen(u)))
        probs = np.array([p for p, _ in checked])
        if probs.size == 0 or np.any(probs < 0) or abs(probs.sum() - 1) > 1e-9:
            raise ValueError(f"sector weights must be a probability vector, got {probs}")
        object.__setattr__(self, "sectors", tuple(checked))

    @property
    def ancilla_dims(self):
        return tuple(u.shape[0] // self.in_dim for _, u in self.sectors)

    @property
    def ancilla_dim(self):
        return sum(self.ancilla_dims)


def factorizable_apply(f, rho):
    """Evaluate the sectored dilation directly with partial traces."""
    rho = check_matrix(rho, "rho", square=True)
    dx = f.in_dim
    out = np.zeros((dx, dx), dtype=complex)
    for p, u in f.sectors:
        dy = u.shape[0] // dx
        big = u @ np.kron(rho, max_mixed(dy)) @ dagger(u)
        out += p * partial_trace(big, (dx, dy), [0])
    return out


def factorizable_channel(f):
    """Kraus form of a factorizable map."""
    dx = f.in_dim
    terms = []
    for p, u in f.sectors:
        dy = u.shape[0] // dx
        u4 = u.reshape(dx, dy, dx, dy)
        for a in range(dy):
            for b in range(dy):
                terms.append((p / dy, u4[:, a, :, b]))
    return KrausMap(dx, dx, tuple(terms))


def is_catalytic(u, dims, tol=DEFAULT_TOL):
    """True when the partial transpose of ``u`` on the second factor is unitary."""
    u = check_matrix(u, "u", square=True)
    return is_unitary(partial_transpose(u, dims, 1), tol)


def _blocks_as_columns(m, da, db):
    """Columns ``vec(m_ab)`` of the ``B``-blocks of an operator on ``A ⊗ B``."""
    m4 = m.reshape(da, db, da, db)
    return np.array([m4[a, :, b, :].reshape(-1) for a in range(da) for b in range(da)]).T


def hjw_transposition_solver(u, v, dims, tol=1e-8, channel_tol=1e-9):
    """Find ``W`` on ``B ⊗ B'`` with ``u = v^{T_B[W]}``, or ``None``.

    ``u`` and ``v`` must purify the same map (equal supertrace over ``B``).
    The relation is linear in ``W``: ``W vec(v_ab) = vec(u_ab)`` for every
    ``A``-block ``(a, b)``.  The unitary least-squares solution is the polar
    factor of ``Σ vec(u_ab) vec(v_ab)†``; the global phase is then fixed by
    the overlap and the relation is re-verified at ``tol`` (Frobenius norm).
    """
    from .gentrans import PartialGenTransposition, GenTransposition, partial_gen_transpose

    u = check_matrix(u, "u", square=True)
    v = check_matrix(v, "v", square=True)
    da, db = check_dims(dims, u.shape[0])
    if v.shape != u.shape:
        raise DimensionError("u and v must have the same shape")
    if not (is_unitary(u, 1e-9) and is_unitary(v, 1e-9)):
        raise ValueError("u and v must be unitary")
    cu = choi_from_kraus(supertrace_partial(KrausMap.from_unitary(u), (da, db))).matrix
    cv = choi_from_kraus(supertrace_partial(KrausMap.from_unitary(v), (da, db))).matrix
    if np.abs(cu - cv).max() > channel_tol:
        raise ValueError("u and v do not purify the same channel")
    umat = _blocks_as_columns(u, da, db)
    vmat = _blocks_as_columns(v, da, db)
    w = polar_unitary(umat @ dagger(vmat))
    p = PartialGenTransposition(GenTransposition(w, db), (da, db), 1)
    cand = partial_gen_transpose(v, p)
    phase = np.vdot(cand.reshape(-1), u.reshape(-1))
    phase = phase / abs(phase) if abs(phase) > 0 else 1.0
    w = phase * w
    residual = np.linalg.norm(u - phase * cand)
    if residual > tol:
        return None
    return w


def unitary_channel(u):
    return KrausMap.from_unitary(u)


def identity_channel(d):
    return KrausMap.from_unitary(np.eye(d))


def depolarizing(d=2):
    """Completely depolarizing channel ``ρ ↦ Tr[ρ] π``."""
    ops = []
    for i in range(d):
        for j in range(d):
            k = np.zeros((d, d), dtype=complex)
            k[i, j] = 1 / np.sqrt(d)
            ops.append(k)
    return KrausMap.from_kraus(ops)


def dephasing(d=2):
    ops = []
    for i in range(d):
        k = np.zeros((d, d), dtype=complex)
        k[i, i] = 1.0
        ops.append(k)
    return KrausMap.from_kraus(ops)


def amplitude_damping(gamma):
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausMap.from_kraus([k0, k1])


def replacer(tau, in_dim=None):
    """Initialization map ``E_τ(ρ) = τ Tr[ρ]``."""
    tau = check_matrix(tau, "tau", square=True, max_dim=MAX_DIM)
    dout = tau.shape[0]
    din = dout if in_dim is None else int(in_dim)
    w, v = np.linalg.eigh((tau + dagger(tau)) / 2)
    ops = []
    for lam, e in zip(w, v.T):
        if lam <= 1e-15:
            continue
        for j in range(din):
            k = np.zeros((dout, din), dtype=complex)
            k[:, j] = np.sqrt(lam) * e
            ops.append(k)
    return KrausMap(din, dout, tuple((1.0, k) for k in ops))


def random_channel(d_in, d_out=None, rank=None, rng=None):
    """Random CPTP map from a Haar-random Stinespring isometry."""
    rng = check_random_state(rng)
    d_out = d_in if d_out is None else d_out
    rank = d_in * d_out if rank is None else rank
    big = random_unitary(max(d_out * rank, d_in), rng)
    iso = big[: d_out * rank, :d_in]
    if d_out * rank < d_in:
        raise DimensionError("rank too small for an isometry")
    ops = iso.reshape(d_out, rank, d_in).transpose(1, 0, 2)
    return KrausMap.from_kraus(list(ops))


def random_cp_map(d_in, d_out=None, n_terms=3, rng=None):
    """Random completely positive (not trace-preserving) map."""
    rng = check_random_state(rng)
    d_out = d_in if d_out is None else d_out
    ops = [
        rng.normal(size=(d_out, d_in)) + 1j * rng.normal(size=(d_out, d_in))
        for _ in range(n_terms)
    ]
    return KrausMap.from_kraus(ops, weights=rng.uniform(0.1, 1.0, n_terms))
