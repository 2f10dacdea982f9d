"""Release-gate checks, shared by the test suite and ``chronoglass selftest``.

Each ``criterion_N`` returns a :class:`CriterionResult`; the worst numeric
deviation seen is kept in ``detail`` so a failing run shows how far off it
was.  All randomness is drawn from a seeded generator.
"""

from dataclasses import dataclass

import numpy as np

from .channel import (
    depolarizing,
    dephasing,
    hjw_transposition_solver,
    identity_channel,
    is_catalytic,
    random_channel,
    random_cp_map,
    supertrace,
    unitary_channel,
)
from .gentrans import (
    GenTransposition,
    PartialGenTransposition,
    fractional_transpose,
    gen_transpose,
    gen_transpose_channel,
    is_unital_gt,
    prep_compat,
    ubb_search,
)
from .matcore import (
    cnot,
    cz,
    dagger,
    fractional_swap,
    hadamard,
    is_unitary,
    max_mixed,
    pauli,
    random_matrix,
    random_state,
    random_unitary,
    swap,
)
from .measures import (
    DiamondProgram,
    diamond_lower_bound,
    info_destruction,
    solve_diamond,
    unitary_diamond_distance,
    verify_cauloc,
    verify_cauloc2,
)
from .optim import UnitaryOptimizer
from .tensors import (
    dynamics_tensor_witness,
    is_rotationally_perfect,
    proper_dynamics_witness,
    totally_perfect_falsifier,
)

__all__ = ["CriterionResult", "CRITERIA", "run_all", "cauloc_instances"]


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] criterion {self.number:2d}: {self.name} ({self.detail})"


def _result(number, name, passed, detail):
    return CriterionResult(number, name, bool(passed), detail)


def criterion_1(seed=0):
    x = pauli("X")
    h = hadamard()
    err = np.abs(gen_transpose(h, cnot(control=1)) - x @ h).max()
    return _result(1, "H^{T[CNOT]} = XH", err <= 1e-12, f"max entry error {err:.1e}")


def criterion_2(seed=0):
    xz = pauli("X") @ pauli("Z")
    zx = pauli("Z") @ pauli("X")
    want = (np.exp(-0.25j * np.pi) * xz + np.exp(0.25j * np.pi) * zx) / np.sqrt(2)
    e1 = np.abs(fractional_transpose(xz, np.pi / 2) - want).max()
    e2 = np.abs(gen_transpose(xz, fractional_swap(np.pi / 2)) - want).max()
    err = max(e1, e2)
    return _result(2, "(XZ)^{T(pi/2)} closed form", err <= 1e-12, f"max entry error {err:.1e}")


def criterion_3(seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    ranks_ok = True
    for k in range(100):
        d = (2, 3, 4)[k % 3]
        m = random_unitary(d, rng)
        img = gen_transpose(m, totally_perfect_falsifier(m))
        want = np.zeros((d, d))
        want[0, :] = 1.0
        worst = max(worst, np.abs(img - want).max())
        ranks_ok &= np.linalg.matrix_rank(img, tol=1e-8) == 1
    ok = worst <= 1e-10 and ranks_ok
    return _result(3, "falsifier image |0><sum i|, rank 1", ok, f"worst error {worst:.1e}")


def criterion_4(seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(1000):
        d = (2, 3, 4)[k % 3]
        w = random_unitary(d * d, rng)
        a, b = random_matrix(d, rng), random_matrix(d, rng)
        ta, tb = gen_transpose(a, w), gen_transpose(b, w)
        ip, ip2 = np.vdot(a, b), np.vdot(ta, tb)
        worst = max(worst, abs(ip2 - ip) / max(abs(ip), 1e-300))
        n1, n2 = np.linalg.norm(a), np.linalg.norm(ta)
        worst = max(worst, abs(n2 - n1) / n1)
    return _result(
        4, "Hilbert-Schmidt and 2-norm preservation", worst <= 1e-10, f"max relative error {worst:.1e}"
    )


def criterion_5(seed=0):
    rng = np.random.default_rng(seed)
    grid = np.linspace(0, 2 * np.pi, 12)
    worst = 0.0
    for _ in range(100):
        m = random_matrix(3, rng)
        for th in grid:
            mt = fractional_transpose(m, th)
            for ph in grid:
                lhs = fractional_transpose(m, th + ph)
                rhs = fractional_transpose(mt, ph)
                worst = max(worst, np.abs(lhs - rhs).max())
    return _result(5, "fractional group law on 12x12 grid", worst <= 1e-10, f"worst error {worst:.1e}")


def criterion_6(seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(100):
        d = (2, 3)[k % 2]
        worst = max(worst, abs(supertrace(random_channel(d, rng=rng)) - 1))
    for k in range(100):
        d = (2, 3)[k % 2]
        n = random_cp_map(d, rng=rng)
        w = random_unitary(d * d, rng)
        worst = max(worst, abs(supertrace(gen_transpose_channel(n, w)) - supertrace(n)))
    return _result(6, "supertrace normalization and invariance", worst <= 1e-10, f"worst error {worst:.1e}")


def criterion_7(seed=0):
    rng = np.random.default_rng(seed)
    bad = []
    count = 0
    for d in (2, 3):
        f = swap(d)
        states = [max_mixed(d)]
        for _ in range(49):
            states.append(random_state(d, rng))
        for _ in range(50):
            g = random_matrix(d, rng)
            h = g + dagger(g)
            h -= np.trace(h) / d * np.eye(d)
            h /= np.abs(np.linalg.eigvalsh(h)).sum()
            states.append(max_mixed(d) + 1e-3 * h)
        for k, s in enumerate(states):
            count += 1
            tau = prep_compat(f, s)
            expect = k == 0
            if (tau is not None) != expect:
                bad.append((d, k))
            if tau is not None and np.abs(tau - max_mixed(d)).max() > 1e-9:
                bad.append((d, k, "tau"))
    return _result(7, "prep_compat(F, sigma) iff sigma = pi", not bad, f"{count} states, {len(bad)} wrong")


def criterion_8(seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for d in (2, 3, 4):
        for _ in range(200):
            x = random_matrix(d, rng)
            x *= np.sqrt(d) / np.linalg.norm(x)
            w = dynamics_tensor_witness(x)
            worst = max(worst, _unitarity_defect(w), _unitarity_defect(gen_transpose(x, w)))
    unital_ok = True
    for d in (2, 4):
        for _ in range(200):
            x = random_matrix(d, rng)
            x *= np.sqrt(d) / np.linalg.norm(x)
            w = proper_dynamics_witness(x)
            unital_ok &= is_unital_gt(w, 1e-9)
            worst = max(worst, _unitarity_defect(w), _unitarity_defect(gen_transpose(x, w)))
    ok = worst <= 1e-9 and unital_ok
    return _result(8, "dynamics-tensor witnesses", ok, f"worst unitarity defect {worst:.1e}")


def _unitarity_defect(m):
    return float(np.abs(dagger(m) @ m - np.eye(m.shape[0])).max())


def criterion_9(seed=0):
    rng = np.random.default_rng(seed)
    fails = 0
    worst = 0.0
    for _ in range(100):
        w = random_unitary(4, rng)
        res = ubb_search(w, rng=rng)
        resid = np.linalg.norm(gen_transpose(res.u, w) - res.v)
        ok = res.success and resid <= 1e-8 and is_unitary(res.u) and is_unitary(res.v)
        fails += not ok
        worst = max(worst, resid)
    return _result(9, "UBB search on random two-qubit W", fails == 0, f"{fails} failures, worst residual {worst:.1e}")


def criterion_10(seed=0):
    zdiff = DiamondProgram.difference(identity_channel(2), unitary_channel(pauli("Z")))
    ddiff = DiamondProgram.difference(identity_channel(2), depolarizing(2))
    v1 = solve_diamond(zdiff).value
    v2 = solve_diamond(ddiff).value
    lb1 = diamond_lower_bound(zdiff, rng=seed)
    lb2 = diamond_lower_bound(ddiff, rng=seed)
    oracle = unitary_diamond_distance(np.eye(2), pauli("Z"))
    ok = (
        abs(v1 - 2) <= 1e-4
        and abs(v2 - 1.5) <= 1e-4
        and abs(oracle - v1) <= 1e-4
        and v1 >= lb1 - 1e-6
        and v2 >= lb2 - 1e-6
        and abs(v1 - lb1) <= 1e-4
        and abs(v2 - lb2) <= 1e-4
    )
    return _result(
        10,
        "diamond norms 2 and 1.5 with oracles",
        ok,
        f"sdp {v1:.6f}, {v2:.6f}; lower bounds {lb1:.6f}, {lb2:.6f}",
    )


def criterion_11(seed=0):
    rng = np.random.default_rng(seed)
    opt = UnitaryOptimizer(seed=seed)
    unit = max(
        info_destruction(unitary_channel(random_unitary(d, rng)), opt).value for d in (2, 2, 3)
    )
    dep = info_destruction(depolarizing(2), opt).value
    deph = info_destruction(dephasing(2), opt).value
    ok = unit <= 1e-5 and abs(dep - np.sqrt(3) / 2) <= 1e-5 and abs(deph - np.sqrt(0.5)) <= 1e-5
    return _result(11, "D_S values", ok, f"unitary {unit:.1e}, depolarizing {dep:.6f}, dephasing {deph:.6f}")


def _symmetric_unitary(rng, d=2):
    q = random_unitary(d, rng)
    return q @ q.T


def _catalytic_unitary(rng):
    """Controlled unitary dressed with random locals; its B-partial transpose is unitary."""
    p0, p1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    a, b = random_unitary(2, rng), random_unitary(2, rng)
    if rng.random() < 0.5:
        core = np.kron(p0, a) + np.kron(p1, b)
    else:
        core = np.kron(a, p0) + np.kron(b, p1)
    left = np.kron(random_unitary(2, rng), random_unitary(2, rng))
    right = np.kron(random_unitary(2, rng), random_unitary(2, rng))
    return left @ core @ right


def cauloc_instances(n=50, seed=0):
    """Compatible ``(u, w, sigma, label)`` qubit instances for the two leakage bounds.

    The first entries are boundary cases; the rest cycle through three
    families whose compatibility holds by construction: product ``w`` with
    arbitrary ``u`` and ``sigma``; ``w`` in the local orbit of the swap with
    ``u`` the transposed image of a catalytic unitary; and fractional swaps
    with ``u`` invariant under partial transposition.  Every instance is
    re-checked by the validators.
    """
    rng = np.random.default_rng(seed)
    pi = max_mixed(2)
    loc = np.kron(random_unitary(2, rng), random_unitary(2, rng).T)
    out = [
        (cz(), swap(2), pi, "cz-swap"),
        (swap(2), loc, pi, "full-leakage"),
        (swap(2), loc, random_state(2, rng), "full-leakage-mixed"),
        (np.kron(random_unitary(2, rng), random_unitary(2, rng)), np.eye(4), pi, "local-identity"),
    ]
    k = 0
    while len(out) < n:
        fam = k % 3
        k += 1
        if fam == 0:
            w = np.kron(random_unitary(2, rng), random_unitary(2, rng).T)
            out.append((random_unitary(4, rng), w, random_state(2, rng), "product-w"))
        elif fam == 1:
            w = np.kron(random_unitary(2, rng), random_unitary(2, rng)) @ swap(2)
            w = w @ np.kron(random_unitary(2, rng), random_unitary(2, rng))
            v = _catalytic_unitary(rng)
            p = PartialGenTransposition(GenTransposition(w, 2), (2, 2), 1)
            u = gen_transpose(v, p)
            out.append((u, w, pi, "swap-orbit"))
        else:
            theta = rng.uniform(0, 2 * np.pi)
            basis = random_unitary(2, rng)
            u = sum(
                np.kron(np.outer(basis[:, j], np.conj(basis[:, j])), _symmetric_unitary(rng))
                for j in range(2)
            )
            out.append((u, fractional_swap(theta), pi, "fractional"))
    return out[:n]


def criterion_12(seed=0, n=50):
    opt = UnitaryOptimizer(restarts=4, seed=seed)
    failures = []
    worst1 = worst2 = -np.inf
    cases = cauloc_instances(n, seed)
    for u, w, s, label in cases:
        r1 = verify_cauloc(u, w, s, opt=opt)
        r2 = verify_cauloc2(u, w, s, opt=opt)
        worst1 = max(worst1, r1.lhs - r1.rhs)
        worst2 = max(worst2, r2.lhs - r2.rhs)
        if not r1.holds:
            failures.append(("cauloc", label))
        if not r2.holds:
            failures.append(("cauloc2", label))
    # boundary expectations: CZ leaks nothing, full leakage forces a catalytic w
    cz_case = verify_cauloc(cz(), swap(2), max_mixed(2), opt=opt)
    full = verify_cauloc2(*cases[1][:3], opt=opt)
    boundary_ok = cz_case.lhs <= 1e-6 and full.rhs <= 1e-4 and full.lhs <= 1e-4
    ok = not failures and boundary_ok
    return _result(
        12,
        "leakage bounds on compatible qubit instances",
        ok,
        f"{len(cases)} instances each, {len(failures)} violations, "
        f"max lhs-rhs {worst1:.2e} / {worst2:.2e}",
    )


def depolarizing_dilations():
    """Swap dilation padded to ``|B| = 4`` and the controlled-Pauli dilation."""
    swap_dil = np.kron(swap(2), np.eye(2))
    paulis = [pauli(c) for c in "IXYZ"]
    cp = np.zeros((8, 8), dtype=complex)
    for k, p in enumerate(paulis):
        e = np.zeros((4, 4))
        e[k, k] = 1.0
        cp += np.kron(p, e)
    return swap_dil, cp


def criterion_13(seed=0):
    swap_dil, cp = depolarizing_dilations()
    worst = 0.0
    found = True
    for u, v in ((swap_dil, cp), (cp, swap_dil)):
        w = hjw_transposition_solver(u, v, (2, 4), tol=1e-6)
        if w is None:
            found = False
            continue
        p = PartialGenTransposition(GenTransposition(w, 4), (2, 4), 1)
        worst = max(worst, np.linalg.norm(u - gen_transpose(v, p)))
        found &= is_unitary(w, 1e-9)
    flags = (is_catalytic(swap_dil, (2, 4)), is_catalytic(cp, (2, 4)))
    ok = found and worst <= 1e-6 and flags[0] != flags[1]
    return _result(
        13,
        "dilations related by a generalized transposition",
        ok,
        f"residual {worst:.1e}, catalytic flags {flags}",
    )


def criterion_14(seed=0):
    h_ok = is_rotationally_perfect(hadamard())
    m = (np.eye(2) + 1j * pauli("X") @ pauli("Z")) / np.sqrt(2)
    fails_at = not is_unitary(fractional_transpose(m, np.pi / 4), 1e-9)
    ok = h_ok and fails_at and not is_rotationally_perfect(m)
    return _result(14, "rotational perfection", ok, f"Hadamard {h_ok}, counterexample fails at pi/4 {fails_at}")


CRITERIA = tuple(globals()[f"criterion_{k}"] for k in range(1, 15))


def run_all(seed=0):
    return [c(seed=seed) for c in CRITERIA]
