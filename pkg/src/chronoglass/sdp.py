"""Dense primal-dual interior-point solver for small complex SDPs.

Standard form over a block-diagonal Hermitian variable ``X = ⊕_b X_b``::

    minimize    Σ_b ⟨C_b, X_b⟩
    subject to  Σ_b ⟨A_ib, X_b⟩ = b_i,   X ⪰ 0

with dual ``maximize bᵀy  s.t.  S_b = C_b − Σ_i y_i A_ib ⪰ 0``.  ``A_ib`` and
``C_b`` are Hermitian, so all inner products are real.  The iteration is
the infeasible-start HKM direction with Mehrotra predictor-corrector steps.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .matcore import dagger

__all__ = ["BlockSDP", "SDPResult", "hermitian_basis"]

log = logging.getLogger(__name__)


def hermitian_basis(n):
    """Orthonormal basis of ``n × n`` Hermitian matrices (real span), shape ``(n², n, n)``."""
    out = np.zeros((n * n, n, n), dtype=complex)
    k = 0
    for i in range(n):
        out[k, i, i] = 1.0
        k += 1
    s = 1 / np.sqrt(2)
    for i in range(n):
        for j in range(i + 1, n):
            out[k, i, j] = out[k, j, i] = s
            k += 1
            out[k, i, j], out[k, j, i] = 1j * s, -1j * s
            k += 1
    return out


@dataclass(frozen=True)
class SDPResult:
    """Solution record; ``primal``/``dual`` are objective values of the two programs."""

    x: tuple
    y: np.ndarray
    s: tuple
    primal: float
    dual: float
    status: str
    iterations: int
    primal_residual: float
    dual_residual: float

    @property
    def gap(self):
        return abs(self.primal - self.dual)


@dataclass
class BlockSDP:
    """Builder for a problem in the standard form above.

    Constraints are added with :meth:`add_constraint` (a single scalar
    equation) or :meth:`add_matrix_constraint` (a Hermitian matrix equation,
    expanded in an orthonormal Hermitian basis).
    """

    block_dims: tuple
    objective: list = field(default=None)
    _rows: list = field(default_factory=list)
    _rhs: list = field(default_factory=list)

    def __post_init__(self):
        self.block_dims = tuple(int(n) for n in self.block_dims)
        if self.objective is None:
            self.objective = [np.zeros((n, n), dtype=complex) for n in self.block_dims]

    def set_objective(self, block, c):
        self.objective[block] = np.asarray(c, dtype=complex)

    def add_constraint(self, terms, rhs):
        """``Σ_(b, A) ⟨A, X_b⟩ = rhs`` for ``terms = {b: A}``."""
        self._rows.append({b: np.asarray(a, dtype=complex) for b, a in terms.items()})
        self._rhs.append(float(rhs))

    def add_matrix_constraint(self, maps, rhs):
        """Hermitian equation ``Σ_b L_b(X_b) = R`` with linear ``L_b``.

        ``maps`` is ``{b: adjoint}`` where ``adjoint(H)`` returns ``L_b†(H)``,
        the matrix whose inner product with ``X_b`` equals ``⟨H, L_b(X_b)⟩``.
        """
        rhs = np.asarray(rhs, dtype=complex)
        n = rhs.shape[0]
        for h in hermitian_basis(n):
            self.add_constraint(
                {b: adj(h) for b, adj in maps.items()}, np.real(np.vdot(h, rhs))
            )

    @property
    def n_constraints(self):
        return len(self._rows)

    def _assemble(self):
        m = len(self._rows)
        mats = []
        for b, n in enumerate(self.block_dims):
            a = np.zeros((m, n, n), dtype=complex)
            for i, row in enumerate(self._rows):
                if b in row:
                    a[i] = row[b]
            mats.append(a)
        return mats, np.array(self._rhs)

    def solve(self, tol=1e-9, max_iter=100):
        mats, b = self._assemble()
        c = [np.asarray(ci, dtype=complex) for ci in self.objective]
        return _solve(mats, b, c, self.block_dims, tol, max_iter)


def _herm(m):
    return (m + dagger(m)) / 2


def _op(mats, blocks):
    """``A(X)_i = Σ_b ⟨A_ib, X_b⟩``."""
    m = mats[0].shape[0]
    return sum((np.conj(a.reshape(m, -1)) @ x.reshape(-1)).real for a, x in zip(mats, blocks))


def _adj(mats, y):
    """``A*(y)_b = Σ_i y_i A_ib``."""
    m = mats[0].shape[0]
    return [(y @ a.reshape(m, -1)).reshape(a.shape[1:]) for a in mats]


def _ip(u, v):
    return sum(np.vdot(a, b).real for a, b in zip(u, v))


def _max_step(x, dx):
    """Largest ``α ≤ 1``-scaled step keeping ``x + α dx ⪰ 0`` (``inf`` if unbounded)."""
    try:
        l = np.linalg.cholesky(x)
    except np.linalg.LinAlgError:
        return 0.0
    li = np.linalg.inv(l)
    ev = np.linalg.eigvalsh(_herm(li @ dx @ dagger(li)))
    lo = ev.min()
    return np.inf if lo >= 0 else -1.0 / lo


def _solve(mats, b, c, dims, tol, max_iter):
    m = b.size
    ntot = sum(dims)
    anorm = max(1.0, max(np.linalg.norm(a.reshape(m, -1), axis=1).max() for a in mats))
    cnorm = max(1.0, max(np.linalg.norm(ci) for ci in c))
    bnorm = max(1.0, np.linalg.norm(b))
    rowsn = sum(np.linalg.norm(a.reshape(m, -1), axis=1) ** 2 for a in mats) ** 0.5
    xi = max(10.0, np.sqrt(ntot), np.sqrt(ntot) * np.max((1 + np.abs(b)) / (1 + rowsn)))
    eta = max(10.0, np.sqrt(ntot), anorm, cnorm)
    x = [xi * np.eye(n, dtype=complex) for n in dims]
    s = [eta * np.eye(n, dtype=complex) for n in dims]
    y = np.zeros(m)
    conj_flat = [np.conj(a.reshape(m, -1)) for a in mats]
    status = "max_iter"
    best = None
    it = 0
    for it in range(1, max_iter + 1):
        aty = _adj(mats, y)
        rp = b - _op(mats, x)
        rd = [ci - a - si for ci, a, si in zip(c, aty, s)]
        pobj = _ip(c, x)
        dobj = float(b @ y)
        mu = _ip(x, s) / ntot
        relgap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        pres = np.linalg.norm(rp) / bnorm
        dres = np.sqrt(sum(np.linalg.norm(r) ** 2 for r in rd)) / cnorm
        score = max(relgap, pres, dres)
        if best is None or score < best[0]:
            best = (score, x, y, s)
        if score < tol:
            status = "optimal"
            break
        if score > 100 * best[0] and best[0] < 1e-5:
            status = "stalled"
            break
        try:
            sinv = [np.linalg.inv(si) for si in s]
        except np.linalg.LinAlgError:
            status = "numerical_error"
            break
        # Schur complement M_ij = Σ_b Re Tr[A_ib X_b A_jb S_b^{-1}]
        sch = np.zeros((m, m))
        for a, ac, xb, si in zip(mats, conj_flat, x, sinv):
            nb = xb.shape[0]
            xas = np.matmul(np.matmul(xb, a), si).reshape(m, nb * nb)
            sch += (ac @ xas.T).real
        sch = (sch + sch.T) / 2
        try:
            chol = np.linalg.cholesky(sch + 1e-14 * np.trace(sch) / m * np.eye(m))

            def schur_solve(r):
                z = np.linalg.solve(chol.T.conj(), np.linalg.solve(chol, r))
                # one step of iterative refinement against the unregularized system
                return z + np.linalg.solve(chol.T.conj(), np.linalg.solve(chol, r - sch @ z))
        except np.linalg.LinAlgError:
            pinv = np.linalg.pinv(sch)

            def schur_solve(r):
                return pinv @ r

        def direction(rc):
            # rc: target for X + dX + sym(X dS S^{-1}) per block
            rhs = rp - _op(mats, [r - xb @ d @ si for r, xb, d, si in zip(rc, x, rd, sinv)])
            dy = schur_solve(rhs)
            ady = _adj(mats, dy)
            ds = [d - a for d, a in zip(rd, ady)]
            dx = [_herm(r - xb @ d_ @ si) for r, xb, d_, si in zip(rc, x, ds, sinv)]
            return dx, dy, ds

        # predictor
        rc_aff = [-xb for xb in x]
        dxa, dya, dsa = direction(rc_aff)
        ap = min(1.0, min(_max_step(xb, d) for xb, d in zip(x, dxa)))
        ad = min(1.0, min(_max_step(sb, d) for sb, d in zip(s, dsa)))
        mu_aff = _ip([xb + ap * d for xb, d in zip(x, dxa)], [sb + ad * d for sb, d in zip(s, dsa)]) / ntot
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3)) if mu > 0 else 0.0
        # corrector
        rc = [
            (sigma * mu * np.eye(n) - dx_ @ ds_) @ si - xb
            for n, dx_, ds_, si, xb in zip(dims, dxa, dsa, sinv, x)
        ]
        dx, dy, ds = direction(rc)
        gamma = 0.9 + 0.09 * min(1.0, 1 - sigma)
        ap = min(1.0, gamma * min(_max_step(xb, d) for xb, d in zip(x, dx)))
        ad = min(1.0, gamma * min(_max_step(sb, d) for sb, d in zip(s, ds)))
        if ap < 1e-8 and best[0] < 1e-5:
            status = "stalled"
            break
        log.debug(
            "it=%d pobj=%.10g dobj=%.10g pres=%.1e dres=%.1e mu=%.1e ap=%.3f ad=%.3f",
            it, pobj, dobj, pres, dres, mu, ap, ad,
        )
        x = [_herm(xb + ap * d) for xb, d in zip(x, dx)]
        y = y + ad * dy
        s = [_herm(sb + ad * d) for sb, d in zip(s, ds)]
    if status != "optimal" and best is not None:
        score, x, y, s = best
        if score < np.sqrt(tol):
            status = "inaccurate"
    aty = _adj(mats, y)
    rp = b - _op(mats, x)
    rd = [ci - a - si for ci, a, si in zip(c, aty, s)]
    return SDPResult(
        x=tuple(x),
        y=y,
        s=tuple(s),
        primal=_ip(c, x),
        dual=float(b @ y),
        status=status,
        iterations=it,
        primal_residual=float(np.linalg.norm(rp) / bnorm),
        dual_residual=float(np.sqrt(sum(np.linalg.norm(r) ** 2 for r in rd)) / cnorm),
    )
