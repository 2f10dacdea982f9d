"""Diamond norms and the information measures built on them.

Every measure returns an immutable record with the estimate, the side it
bounds (optimizers over unitaries only ever certify one side) and, where
available, a bound on the other side.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ._validation import DimensionError, check_dims, check_matrix, check_random_state
from .channel import (
    ChoiMatrix,
    KrausMap,
    choi_from_kraus,
    is_cptp,
    kraus_from_choi,
    marginal_channel,
    replacer,
)
from .gentrans import (
    GenTransposition,
    PartialGenTransposition,
    gen_transpose_channel,
    prep_compat,
)
from .matcore import (
    dagger,
    fidelity,
    is_hermitian,
    is_unitary,
    phi_plus,
    swap,
)
from .optim import UnitaryOptimizer, expm_skew
from .sdp import BlockSDP

__all__ = [
    "DiamondProgram",
    "DiamondResult",
    "MeasureResult",
    "CaulocReport",
    "HypothesisError",
    "UnitaryOptimizer",
    "diamond_norm",
    "solve_diamond",
    "unitary_diamond_distance",
    "diamond_lower_bound",
    "xi_nonswappability",
    "geometric_capacity",
    "leakage",
    "info_destruction",
    "non_leakage",
    "non_catalyticity",
    "noncatalytic_state",
    "verify_cauloc",
    "verify_cauloc2",
]

DIAMOND_MAX_DIM = 16


@dataclass(frozen=True)
class DiamondProgram:
    """A Hermiticity-preserving map given by its (trace-normalized) Choi matrix."""

    choi: ChoiMatrix

    def __post_init__(self):
        m = np.asarray(self.choi.matrix)
        if not is_hermitian(m, 1e-10 * max(1.0, np.abs(m).max())):
            raise ValueError("diamond norm needs a Hermitian Choi matrix")
        if max(self.choi.in_dim, self.choi.out_dim) > DIAMOND_MAX_DIM:
            raise DimensionError(
                f"diamond norm limited to in/out dimension {DIAMOND_MAX_DIM}"
            )

    @classmethod
    def from_map(cls, theta):
        return cls(choi_from_kraus(theta))

    @classmethod
    def difference(cls, a, b):
        """Program for ``a − b``."""
        return cls.from_map(a - b)

    @property
    def in_dim(self):
        return self.choi.in_dim

    @property
    def out_dim(self):
        return self.choi.out_dim

    @property
    def unnormalized(self):
        return self.choi.unnormalized


def _as_program(theta):
    if isinstance(theta, DiamondProgram):
        return theta
    if isinstance(theta, ChoiMatrix):
        return DiamondProgram(theta)
    if isinstance(theta, KrausMap):
        return DiamondProgram.from_map(theta)
    raise TypeError("expected DiamondProgram, ChoiMatrix or KrausMap")


@dataclass(frozen=True)
class DiamondResult:
    """``value`` lies in ``[lower, upper]``; ``witness`` is ``P0 − P1``."""

    value: float
    lower: float
    upper: float
    witness: np.ndarray
    input_state: np.ndarray
    status: str
    iterations: int


def _keep_in(h, dout, din):
    """``Tr_out`` of an operator on ``out ⊗ in``."""
    return np.einsum("aiaj->ij", h.reshape(dout, din, dout, din))


def _keep_out(h, dout, din):
    return np.einsum("iaja->ij", h.reshape(dout, din, dout, din))


def solve_diamond(theta, tol=1e-9, max_iter=100):
    """Diamond norm by the primal/dual pair

    ``max ⟨J, P0 − P1⟩  s.t.  P0 + P1 = 1 ⊗ ρ,  Tr ρ = 1``  and
    ``min ‖Tr_out(A + B)‖_∞  s.t.  A − B = J``,

    with ``J`` the unnormalized Choi matrix.  The interior-point solver
    returns both objectives; their mean is reported.
    """
    prog = _as_program(theta)
    dout, din = prog.out_dim, prog.in_dim
    ju = prog.unnormalized
    n = dout * din
    if np.abs(ju).max() == 0:
        z = np.zeros((n, n), dtype=complex)
        return DiamondResult(0.0, 0.0, 0.0, z, np.eye(din) / din, "trivial", 0)
    sdp = BlockSDP((n, n, din))
    sdp.set_objective(0, -ju)
    sdp.set_objective(1, ju)
    sdp.add_matrix_constraint(
        {0: lambda h: h, 1: lambda h: h, 2: lambda h: -_keep_in(h, dout, din)},
        np.zeros((n, n)),
    )
    sdp.add_constraint({2: np.eye(din)}, 1.0)
    res = sdp.solve(tol=tol, max_iter=max_iter)
    lower, upper = -res.primal, -res.dual
    lo, hi = min(lower, upper), max(lower, upper)
    value = 0.5 * (lo + hi)
    return DiamondResult(
        float(value),
        float(lo),
        float(hi),
        res.x[0] - res.x[1],
        res.x[2],
        res.status,
        res.iterations,
    )


def diamond_norm(theta, tol=1e-9):
    """``‖Θ‖_⋄`` for a Hermiticity-preserving map."""
    return solve_diamond(theta, tol).value


def unitary_diamond_distance(u, v):
    """``‖Ad_U − Ad_V‖_⋄ = 2√(1 − ν²)`` with ``ν`` the distance from 0 to
    the convex hull of the spectrum of ``U†V``."""
    u = check_matrix(u, "u", square=True)
    v = check_matrix(v, "v", square=True)
    ev = np.linalg.eigvals(dagger(u) @ v)
    ang = np.sort(np.mod(np.angle(ev), 2 * np.pi))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
    gmax = gaps.max()
    if gmax <= np.pi:
        nu = 0.0
    else:
        nu = np.cos((2 * np.pi - gmax) / 2)
    return float(2 * np.sqrt(max(0.0, 1 - nu * nu)))


def _trace_norm_herm(h):
    return float(np.abs(np.linalg.eigvalsh((h + dagger(h)) / 2)).sum())


def diamond_lower_bound(theta, samples=64, refine=25, rng=None):
    """Largest ``‖(Θ ⊗ id)(ψψ†)‖₁`` over sampled inputs with a full ancilla.

    Each random input ``vec(R)`` is improved by alternating between the
    sign of the output and the best ``R`` for that sign (a top eigenvector),
    which never decreases the trace norm.
    """
    prog = _as_program(theta)
    rng = check_random_state(rng)
    dout, din = prog.out_dim, prog.in_dim
    ju = prog.unnormalized
    j4 = ju.reshape(dout, din, dout, din)

    def output(r):
        left = np.kron(np.eye(dout), r.T)
        return left @ ju @ dagger(left)

    best = 0.0
    for k in range(samples):
        if k == 0:
            r = np.eye(din, dtype=complex) / np.sqrt(din)
        else:
            r = rng.normal(size=(din, din)) + 1j * rng.normal(size=(din, din))
            r /= np.linalg.norm(r)
        val = _trace_norm_herm(output(r))
        for _ in range(refine):
            h = output(r)
            w, vv = np.linalg.eigh((h + dagger(h)) / 2)
            s4 = ((vv * np.sign(w)) @ dagger(vv)).reshape(dout, din, dout, din)
            q = np.einsum("plok,oipj->jlik", s4, j4).reshape(din * din, din * din)
            q = (q + dagger(q)) / 2
            _, qv = np.linalg.eigh(q)
            r = qv[:, -1].reshape(din, din)
            new = _trace_norm_herm(output(r))
            if new <= val + 1e-13:
                val = max(val, new)
                break
            val = new
        best = max(best, val)
    return best


@dataclass(frozen=True)
class MeasureResult:
    """Estimate of a measure.

    ``side`` is ``"upper"`` when ``value`` is certified from above (an
    explicit feasible point of a minimization) and ``"lower"`` otherwise;
    ``bound`` is the best available bound on the opposite side.
    """

    value: float
    side: str
    bound: float
    argument: tuple = ()
    seed: object = None
    details: dict = field(default_factory=dict)

    @property
    def certificate(self):
        out = {"side": self.side, "bound": self.bound}
        out.update(self.details)
        return out


def _swap_target(u, v):
    return np.kron(u, v) @ swap(u.shape[0])


def _local_grads(gv, u, v):
    """Euclidean gradients of ``V = (u ⊗ v)F`` pulled back to ``u`` and ``v``."""
    d = u.shape[0]
    x4 = (gv @ swap(d)).reshape(d, d, d, d)
    gu = np.einsum("abce,be->ac", x4, np.conj(v))
    gvv = np.einsum("abce,ac->be", x4, np.conj(u))
    return gu, gvv


def _local_params(x, d):
    """Two Hermitian ``d × d`` matrices from a real vector of length ``2d²``."""
    out = []
    for k in range(2):
        p = x[k * d * d : (k + 1) * d * d].reshape(d, d)
        h = np.triu(p) + np.triu(p, 1).T + 1j * (np.tril(p, -1) - np.tril(p, -1).T)
        out.append(h)
    return out


def xi_nonswappability(n, opt=None, dims=None, inner_max_iter=40):
    """``Ξ(N) = ½ min_{u,v} ‖N − Ad_{(u ⊗ v)F}‖_⋄`` (an upper estimate).

    Stage one maximizes the smooth overlap ``vec(V)† J vec(V)`` of the
    candidate swap orbit with the Choi matrix from ``opt.restarts`` starts.
    Stage two minimizes the true objective from the best start: with the
    closed-form distance (Nelder-Mead) when ``N`` is a unitary channel,
    otherwise by Armijo descent with the diamond-norm SDP witness as
    gradient.  The returned value is evaluated at an explicit ``(u, v)``.
    """
    opt = UnitaryOptimizer() if opt is None else opt
    if n.in_dim != n.out_dim:
        raise DimensionError("Ξ needs a map on A⊗B → A⊗B")
    da, db = check_dims(dims, n.in_dim) if dims is not None else (None, None)
    if dims is None:
        d = int(round(np.sqrt(n.in_dim)))
        if d * d != n.in_dim:
            raise DimensionError("Ξ needs |A| = |B|")
    else:
        if da != db:
            raise DimensionError(f"Ξ needs |A| = |B|, got {dims}")
        d = da
    ju = choi_from_kraus(n).unnormalized

    def surrogate(us):
        u, v = us
        vv = _swap_target(u, v).reshape(-1)
        jv = ju @ vv
        val = float(np.vdot(vv, jv).real)
        gu, gvv = _local_grads(2 * jv.reshape(d * d, d * d), u, v)
        return val, [gu, gvv]

    stage1 = opt.maximize(surrogate, (d, d))
    u0, v0 = stage1.unitaries
    unitary_n = n.is_unitary_channel(1e-9)
    if unitary_n:
        nu = np.asarray(kraus_from_choi(n.choi()).terms[0][1])

        def obj(x):
            h1, h2 = _local_params(x, d)
            u = expm_skew(1j * h1) @ u0
            v = expm_skew(1j * h2) @ v0
            return 0.5 * unitary_diamond_distance(nu, _swap_target(u, v))

        x0 = np.zeros(2 * d * d)
        best_val = obj(x0)
        best_x = x0
        for _ in range(2):
            res = minimize(
                obj,
                best_x,
                method="Nelder-Mead",
                options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000 * d},
            )
            if res.fun < best_val:
                best_val, best_x = float(res.fun), res.x
        h1, h2 = _local_params(best_x, d)
        u = expm_skew(1j * h1) @ u0
        v = expm_skew(1j * h2) @ v0
        value = best_val
        method = "closed-form"
    else:

        def true_obj(us):
            u, v = us
            target = KrausMap.from_unitary(_swap_target(u, v))
            r = solve_diamond(n - target, max_iter=inner_max_iter)
            vv = _swap_target(u, v).reshape(-1)
            gv = -2 * (r.witness @ vv).reshape(d * d, d * d)
            gu, gvv = _local_grads(gv, u, v)
            return 0.5 * r.value, [0.5 * gu, 0.5 * gvv]

        desc = UnitaryOptimizer(
            restarts=1, step=opt.step, tol=1e-8, max_iter=min(opt.max_iter, 30), seed=opt.seed
        )
        res2 = desc.minimize(true_obj, (d, d), init=(u0, v0))
        u, v = res2.unitaries
        value = res2.value
        method = "sdp-descent"
    target = KrausMap.from_unitary(_swap_target(u, v))
    mc = diamond_lower_bound(n - target, samples=8, rng=opt.seed)
    return MeasureResult(
        value=float(min(1.0 + 1e-9, max(0.0, value))),
        side="upper",
        bound=0.0,
        argument=(u, v),
        seed=opt.seed,
        details={
            "method": method,
            "restarts": stage1.restarts,
            "surrogate_overlap": stage1.value / (d**4),
            "lower_at_optimum": 0.5 * mc,
        },
    )


def geometric_capacity(n, tol=1e-9, max_iter=100):
    """``C_G(N) = ½ min_τ ‖N − E_τ‖_⋄`` as one joint SDP.

    ``min t  s.t.  A − B + τ ⊗ 1 = J,  Tr_out(A + B) ⪯ t 1,  Tr τ = 1``
    with ``A, B, τ ⪰ 0``; the minimization over the replacer state is convex
    because ``J(E_τ) = τ ⊗ 1`` is linear in ``τ``.
    """
    dout, din = n.out_dim, n.in_dim
    if max(dout, din) > DIAMOND_MAX_DIM:
        raise DimensionError(f"limited to dimension {DIAMOND_MAX_DIM}")
    ju = choi_from_kraus(n).unnormalized
    nn = dout * din
    sdp = BlockSDP((nn, nn, dout, din, 1))
    sdp.set_objective(4, np.eye(1))
    sdp.add_matrix_constraint(
        {0: lambda h: h, 1: lambda h: -h, 2: lambda h: _keep_out(h, dout, din)}, ju
    )
    sdp.add_matrix_constraint(
        {
            3: lambda h: h,
            0: lambda h: np.kron(np.eye(dout), h),
            1: lambda h: np.kron(np.eye(dout), h),
            4: lambda h: -np.trace(h).reshape(1, 1),
        },
        np.zeros((din, din)),
    )
    sdp.add_constraint({2: np.eye(dout)}, 1.0)
    res = sdp.solve(tol=tol, max_iter=max_iter)
    tau = res.x[2]
    tau = (tau + dagger(tau)) / 2
    tau = tau / np.trace(tau).real
    # re-evaluate the distance at the returned τ as an explicit upper bound
    upper = 0.5 * solve_diamond(n - replacer(tau, din), tol=tol).upper
    lower = 0.5 * res.dual
    return MeasureResult(
        value=float(min(upper, 0.5 * res.primal + 1e-12) if res.status == "optimal" else upper),
        side="upper",
        bound=float(lower),
        argument=(tau,),
        details={"status": res.status, "sdp_iterations": res.iterations},
    )


def _check_state_on(sigma, d, name="sigma"):
    sigma = check_matrix(sigma, name, square=True)
    if sigma.shape != (d, d):
        raise DimensionError(f"{name} has shape {sigma.shape}, expected {(d, d)}")
    return sigma


def _bipartite_dims(m, dims):
    if dims is None:
        d = int(round(np.sqrt(m.in_dim)))
        if d * d != m.in_dim:
            raise DimensionError("pass dims for a map on unequal factors")
        return d, d
    return check_dims(dims, m.in_dim)


def leakage(m, sigma, dims=None):
    """``L(M | σ) = C_G(ρ ↦ Tr_A[M(ρ ⊗ σ)])``."""
    da, db = _bipartite_dims(m, dims)
    sigma = _check_state_on(sigma, db)
    return geometric_capacity(marginal_channel(m, (da, db), sigma))


def info_destruction(n, opt=None):
    """``D_S(N) = √(1 − d⁻² max_Y Σ_i |Tr[Y N_i]|²)`` (an upper estimate).

    The maximum over unitaries ``Y`` is approached by Riemannian ascent;
    ``d λ_max(J)`` bounds it from above, giving the lower bound on ``D_S``.
    """
    opt = UnitaryOptimizer() if opt is None else opt
    if n.in_dim != n.out_dim:
        raise DimensionError("D_S needs a square channel")
    d = n.in_dim
    terms = [(c.real, np.asarray(k)) for c, k in n.terms if abs(c) > 0]
    if any(c < 0 for c, _ in terms):
        raise ValueError("D_S needs a completely positive Kraus form")
    ks = np.array([k for _, k in terms])
    cs = np.array([c for c, _ in terms])

    def fun(us):
        (y,) = us
        t = np.einsum("ab,nba->n", y, ks)
        val = float(np.sum(cs * np.abs(t) ** 2))
        g = 2 * np.einsum("n,nab->ab", cs * t, np.conj(np.swapaxes(ks, 1, 2)))
        return val, [g]

    res = opt.maximize(fun, (d,))
    ju = choi_from_kraus(n).unnormalized
    cap = d * np.linalg.eigvalsh((ju + dagger(ju)) / 2).max()
    val = float(np.sqrt(max(0.0, 1 - res.value / d**2)))
    lower = float(np.sqrt(max(0.0, 1 - min(cap, d * d) / d**2)))
    return MeasureResult(
        value=val,
        side="upper",
        bound=lower,
        argument=(res.unitaries[0],),
        seed=opt.seed,
        details={"objective": res.value, "objective_cap": float(cap)},
    )


def non_leakage(m, sigma, dims=None, opt=None):
    """``K(M | σ) = D_S(ρ ↦ Tr_A[M(ρ ⊗ σ)])``."""
    da, db = _bipartite_dims(m, dims)
    if da != db:
        raise DimensionError("non-leakage needs |A| = |B|")
    sigma = _check_state_on(sigma, db)
    return info_destruction(marginal_channel(m, (da, db), sigma), opt)


def noncatalytic_state(m, sigma, dims=None):
    """``Tr_A[M(φ+_{AA'} ⊗ σ^T_B)]`` ordered as ``A' ⊗ B``."""
    da, db = _bipartite_dims(m, dims)
    sigma = _check_state_on(sigma, db)
    phi = phi_plus(da)
    # input on A ⊗ B ⊗ A' assembled from φ+ on A ⊗ A' and σ^T on B
    p = np.outer(phi, np.conj(phi)).reshape(da, da, da, da)
    s = sigma.T
    inp = np.einsum("acbd,ef->aecbfd", p, s).reshape(da * db * da, da * db * da)
    out = np.zeros_like(inp)
    for c, k in m.terms:
        kk = np.kron(k, np.eye(da))
        out += c * (kk @ inp @ dagger(kk))
    t = out.reshape(da, db, da, da, db, da)
    rho = np.einsum("abcaef->cbfe", t).reshape(da * db, da * db)
    return rho


def non_catalyticity(m, sigma, dims=None, tol=1e-9):
    """``D(M | σ) = min_ξ d_S(Tr_A[M(φ+ ⊗ σ^T)], π_{A'} ⊗ ξ_B)``.

    The fidelity maximization over ``ξ`` is an SDP (``√F = max Re Tr Z``
    over ``[[ρ, Z], [Z†, π ⊗ ξ]] ⪰ 0``); the fidelity is then recomputed
    exactly at the returned ``ξ``, so ``value`` is attained (upper side).
    """
    da, db = _bipartite_dims(m, dims)
    rho = noncatalytic_state(m, sigma, (da, db))
    rho = (rho + dagger(rho)) / 2
    n = da * db
    sdp = BlockSDP((2 * n, db))
    off = np.zeros((2 * n, 2 * n))
    off[:n, n:] = np.eye(n)
    off[n:, :n] = np.eye(n)
    sdp.set_objective(0, -0.5 * off)

    def top(h):
        z = np.zeros((2 * n, 2 * n), dtype=complex)
        z[:n, :n] = h
        return z

    def bottom(h):
        z = np.zeros((2 * n, 2 * n), dtype=complex)
        z[n:, n:] = h
        return z

    sdp.add_matrix_constraint({0: top}, rho)
    sdp.add_matrix_constraint(
        {0: bottom, 1: lambda h: -np.einsum("aiaj->ij", h.reshape(da, db, da, db)) / da},
        np.zeros((n, n)),
    )
    sdp.add_constraint({1: np.eye(db)}, 1.0)
    res = sdp.solve(tol=tol)
    xi = (res.x[1] + dagger(res.x[1])) / 2
    w, v = np.linalg.eigh(xi)
    xi = (v * np.clip(w, 0, None)) @ dagger(v)
    xi /= np.trace(xi).real
    target = np.kron(np.eye(da) / da, xi)
    f = fidelity(rho, target, tol=1e-8)
    f_upper = min(1.0, max(0.0, -res.dual) ** 2)
    return MeasureResult(
        value=float(np.sqrt(max(0.0, 1 - f))),
        side="upper",
        bound=float(np.sqrt(max(0.0, 1 - f_upper))),
        argument=(xi,),
        details={"fidelity": f, "status": res.status},
    )


class HypothesisError(ValueError):
    """A validator's hypotheses do not hold; ``reason`` names which one."""

    def __init__(self, reason, message):
        super().__init__(message)
        self.reason = reason


@dataclass(frozen=True)
class CaulocReport:
    lhs: float
    rhs: float
    holds: bool
    slack: float
    details: dict = field(default_factory=dict)


def _as_unitary_map(u):
    if isinstance(u, KrausMap):
        if not u.is_unitary_channel(1e-9):
            raise HypothesisError("not_unitary", "u is not a unitary channel")
        return u
    u = check_matrix(u, "u", square=True)
    if not is_unitary(u, 1e-9):
        raise HypothesisError("not_unitary", "u is not unitary")
    return KrausMap.from_unitary(u)


def _check_hypotheses(u, w, sigma, dims):
    um = _as_unitary_map(u)
    da, db = _bipartite_dims(um, dims)
    w = check_matrix(w, "w", square=True)
    if w.shape[0] != db * db:
        raise DimensionError(f"w must act on B⊗B' of size {db * db}, got {w.shape[0]}")
    if not is_unitary(w, 1e-9):
        raise HypothesisError("not_unitary", "w is not unitary")
    sigma = _check_state_on(sigma, db)
    p = PartialGenTransposition(GenTransposition(dagger(w), db), (da, db), 1)
    if not is_cptp(gen_transpose_channel(um, p), 1e-8):
        raise HypothesisError(
            "incompatible_channel", "u transformed by T_B[w†] is not a channel"
        )
    if prep_compat(w, sigma, 1e-8) is None:
        raise HypothesisError(
            "incompatible_state", "sigma is not a compatible state preparation for w"
        )
    return um, (da, db), w, sigma


def verify_cauloc(u, w, sigma, dims=None, opt=None, slack=1e-4):
    """Check ``L_{B<A}(U | σ) ≤ Ξ(Ad_W)`` on one instance."""
    um, dims, w, sigma = _check_hypotheses(u, w, sigma, dims)
    lhs = leakage(um, sigma, dims)
    rhs = xi_nonswappability(KrausMap.from_unitary(w), opt)
    return CaulocReport(
        lhs=lhs.value,
        rhs=rhs.value,
        holds=bool(lhs.value <= rhs.value + slack),
        slack=slack,
        details={"lhs_bound": lhs.bound, "rhs_method": rhs.details["method"]},
    )


def verify_cauloc2(u, w, sigma, dims=None, opt=None, slack=1e-4):
    """Check ``D(Ad_W | σ) ≤ 2 K_{B<A}(U | σ)`` on one instance."""
    um, dims, w, sigma = _check_hypotheses(u, w, sigma, dims)
    db = dims[1]
    lhs = non_catalyticity(KrausMap.from_unitary(w), sigma, (db, db))
    rhs = non_leakage(um, sigma, dims, opt)
    return CaulocReport(
        lhs=lhs.value,
        rhs=2 * rhs.value,
        holds=bool(lhs.value <= 2 * rhs.value + slack),
        slack=slack,
        details={"lhs_bound": lhs.bound, "rhs_bound": 2 * rhs.bound},
    )

