"""Dynamics-tensor witnesses and the perfect-tensor hierarchy.

A square ``X`` is (proportional to) a dynamics tensor when some generalized
transposition turns it into a unitary.  The constructions below produce
the transposing ``W`` explicitly and verify the image.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ._validation import DEFAULT_TOL, DimensionError, check_dims, check_matrix
from .gentrans import GenTransposition, fractional_transpose, gen_transpose, is_unital_gt
from .matcore import dagger, is_unitary, phi_plus, shift

__all__ = [
    "TensorNode",
    "dynamics_tensor_witness",
    "proper_dynamics_witness",
    "totally_perfect_falsifier",
    "properly_perfect_falsifier",
    "is_perfect_tensor",
    "is_rotationally_perfect",
    "chebyshev_grid",
    "ame_4_3",
]


@dataclass(frozen=True)
class TensorNode:
    """An ``n``-leg tensor stored densely with its leg dimensions."""

    data: np.ndarray
    leg_dims: tuple

    def __post_init__(self):
        dims = check_dims(self.leg_dims)
        data = np.asarray(self.data, dtype=complex)
        if data.size != int(np.prod(dims)):
            raise DimensionError(
                f"tensor has {data.size} entries, leg dims {dims} need {int(np.prod(dims))}"
            )
        if not np.all(np.isfinite(data)):
            raise ValueError("tensor contains NaN or Inf entries")
        object.__setattr__(self, "data", data.reshape(dims))
        object.__setattr__(self, "leg_dims", dims)

    @classmethod
    def from_operator(cls, m, leg_dims):
        """Tensor of an operator whose row legs come first."""
        return cls(check_matrix(m, "m"), leg_dims)

    def matricize(self, rows):
        """Matrix with the legs in ``rows`` as row index (in the given order)."""
        rows = list(rows)
        cols = [k for k in range(len(self.leg_dims)) if k not in rows]
        r = int(np.prod([self.leg_dims[k] for k in rows]))
        return self.data.transpose(rows + cols).reshape(r, -1)


def _reflection(u, v):
    """Unitary ``R = P H`` with ``R u = v`` for unit vectors ``u, v``.

    ``H`` is a complex Householder reflection sending ``u`` to ``e^{iα} v``
    and ``P`` rotates the phase of the ``v`` direction back.  Vectors
    orthogonal to both ``u`` and ``v`` are left untouched.
    """
    n = u.size
    ov = np.vdot(v, u)
    ph = ov / abs(ov) if abs(ov) > 1e-15 else 1.0
    diff = u - ph * v
    nd = np.linalg.norm(diff)
    if nd < 1e-14:
        h = np.eye(n, dtype=complex)
    else:
        w = diff / nd
        h = np.eye(n) - 2 * np.outer(w, np.conj(w))
    p = np.eye(n, dtype=complex) + (np.conj(ph) - 1) * np.outer(v, np.conj(v))
    return p @ h


def dynamics_tensor_witness(x, tol=1e-9):
    """Unitary ``W`` with ``x^{T[W]} = (‖x‖₂/√d) 1``."""
    x = check_matrix(x, "x", square=True)
    nrm = np.linalg.norm(x)
    if nrm == 0:
        raise ValueError("x must be nonzero")
    d = x.shape[0]
    w = _reflection(x.reshape(-1) / nrm, phi_plus(d))
    img = gen_transpose(x, w)
    if np.abs(img - nrm / np.sqrt(d) * np.eye(d)).max() > tol * max(1.0, nrm):
        raise RuntimeError("witness construction failed verification")
    return w


def _isigma_y_sum(d):
    """``⊕ iσ_Y`` on ``C^d`` for even ``d``."""
    j = np.zeros((d, d), dtype=complex)
    for k in range(0, d, 2):
        j[k, k + 1] = 1.0
        j[k + 1, k] = -1.0
    return j


def proper_dynamics_witness(x, tol=1e-9, return_phase=False):
    """Unital ``W`` with ``x^{T[W]}`` proportional to a unitary (even ``d``).

    ``x`` is rephased as ``e^{−iφ} x = a 1 + J`` with ``a`` real and ``J``
    traceless; ``W`` fixes ``|Γ⟩`` and maps ``vec(J)`` onto the direction of
    ``vec(⊕ iσ_Y)`` with a real positive amplitude ``s``, so that the
    image ``e^{iφ}(a 1 + s J')`` satisfies ``N†N = (a² + s²) 1``.  With
    ``return_phase`` the pair ``(W, φ)`` is returned.
    """
    x = check_matrix(x, "x", square=True)
    d = x.shape[0]
    if d % 2:
        raise DimensionError(f"proper witness needs even dimension, got {d}")
    if np.linalg.norm(x) == 0:
        raise ValueError("x must be nonzero")
    tr = np.trace(x)
    phase = float(np.angle(tr)) if abs(tr) > 1e-14 else 0.0
    xp = np.exp(-1j * phase) * x
    a = (np.trace(xp) / d).real
    jm = xp - a * np.eye(d)
    s = np.linalg.norm(jm) / np.sqrt(d)
    if s < 1e-14:
        w = np.eye(d * d, dtype=complex)
    else:
        target = _isigma_y_sum(d).reshape(-1) / np.sqrt(d)
        w = _reflection(jm.reshape(-1) / np.linalg.norm(jm), target)
    t = GenTransposition(w, d)
    img = gen_transpose(x, t)
    scale = max(1.0, np.linalg.norm(x) ** 2 / d)
    if not is_unital_gt(t, 1e-9):
        raise RuntimeError("witness is not unital")
    if np.abs(dagger(img) @ img - (a * a + s * s) * np.eye(d)).max() > tol * scale:
        raise RuntimeError("witness construction failed verification")
    return (w, phase) if return_phase else w


def totally_perfect_falsifier(m, tol=1e-9):
    """``W = V (m† ⊗ 1)`` with ``V = Σ_i S^{−i} ⊗ |i⟩⟨i|``.

    The image ``m^{T[W]} = |0⟩ Σ_i ⟨i|`` has rank one.
    """
    m = check_matrix(m, "m", square=True)
    if not is_unitary(m, tol):
        raise ValueError("m must be unitary")
    d = m.shape[0]
    s = shift(d)
    v = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        e = np.zeros((d, d))
        e[i, i] = 1.0
        v += np.kron(np.linalg.matrix_power(dagger(s), i), e)
    return v @ np.kron(dagger(m), np.eye(d))


def properly_perfect_falsifier(m, tol=1e-9):
    """Unital ``W`` making the non-scalar unitary ``m`` non-unitary, else ``None``.

    Writing ``m = c 1 + s S`` with ``S`` traceless and ``‖S‖₂ = √d``, the
    constructed ``W`` fixes ``|Γ⟩`` and rotates ``vec(S)`` onto
    ``e^{i arg c} vec(X)`` (generalized shift), so
    ``N†N = (|c|² + s²) 1 + |c| s (X + X†)``.  For traceless ``m`` that
    target gives a unitary image, and ``√d |0⟩⟨1|`` is used instead, which
    leaves ``N`` upper triangular with a nonzero off-diagonal entry.
    """
    m = check_matrix(m, "m", square=True)
    if not is_unitary(m, 1e-9):
        raise ValueError("m must be unitary")
    d = m.shape[0]
    c = np.trace(m) / d
    rest = m - c * np.eye(d)
    if np.linalg.norm(rest) <= tol * np.sqrt(d):
        return None
    if abs(c) > 1e-8:
        target = np.exp(1j * np.angle(c)) * shift(d)
    else:
        target = np.zeros((d, d), dtype=complex)
        target[0, 1] = np.sqrt(d)
    w = _reflection(rest.reshape(-1) / np.linalg.norm(rest), target.reshape(-1) / np.sqrt(d))
    t = GenTransposition(w, d)
    if not is_unital_gt(t, 1e-9) or is_unitary(gen_transpose(m, t), 1e-6):
        raise RuntimeError("falsifier construction failed verification")
    return w


def is_perfect_tensor(t, tol=DEFAULT_TOL):
    """Unitarity (after normalization) across every balanced bipartition."""
    n = len(t.leg_dims)
    if n % 2:
        raise DimensionError(f"perfect tensors need an even leg count, got {n}")
    if len(set(t.leg_dims)) != 1:
        raise DimensionError(f"perfect tensors need equal leg dims, got {t.leg_dims}")
    nrm = np.linalg.norm(t.data)
    if nrm == 0:
        return False
    side = t.leg_dims[0] ** (n // 2)
    for rest in combinations(range(1, n), n // 2 - 1):
        mat = t.matricize((0,) + rest) * (np.sqrt(side) / nrm)
        if not is_unitary(mat, tol):
            return False
    return True


def chebyshev_grid(n=64):
    """``n`` Chebyshev-spaced angles in the open interval ``(0, 2π)``."""
    k = np.arange(n)
    return np.pi * (1 - np.cos((2 * k + 1) * np.pi / (2 * n)))


def is_rotationally_perfect(m, grid=None, tol=DEFAULT_TOL):
    """Unitarity of ``m^{T(θ)}`` at every angle of ``grid``."""
    m = check_matrix(m, "m", square=True)
    grid = chebyshev_grid() if grid is None else np.atleast_1d(grid)
    return all(is_unitary(fractional_transpose(m, th), tol) for th in grid)


def ame_4_3():
    """``Σ_ij |i, j, i+j, i+2j⟩`` (mod 3), normalized: a 4-leg perfect tensor."""
    data = np.zeros((3, 3, 3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            data[i, j, (i + j) % 3, (i + 2 * j) % 3] = 1 / 3
    return TensorNode(data, (3, 3, 3, 3))

