import numpy as np
import pytest

from chronoglass.channel import (
    ChoiMatrix,
    KrausMap,
    dephasing,
    depolarizing,
    identity_channel,
    random_channel,
    replacer,
    unitary_channel,
)
from chronoglass.matcore import cz, max_mixed, pauli, random_state, random_unitary, swap
from chronoglass.measures import (
    DiamondProgram,
    HypothesisError,
    diamond_lower_bound,
    diamond_norm,
    geometric_capacity,
    info_destruction,
    leakage,
    non_catalyticity,
    non_leakage,
    solve_diamond,
    unitary_diamond_distance,
    verify_cauloc,
    verify_cauloc2,
    xi_nonswappability,
)
from chronoglass.optim import UnitaryOptimizer

RT3 = np.sqrt(3) / 2
PI2 = max_mixed(2)


def test_diamond_zero():
    zero = KrausMap.from_kraus([np.zeros((2, 2))])
    assert abs(diamond_norm(zero)) < 1e-7


def test_diamond_reference_values():
    z = DiamondProgram.difference(identity_channel(2), unitary_channel(pauli("Z")))
    d = DiamondProgram.difference(identity_channel(2), depolarizing(2))
    rz, rd = solve_diamond(z), solve_diamond(d)
    assert abs(rz.value - 2) < 1e-4 and abs(rd.value - 1.5) < 1e-4
    assert rz.lower <= rz.value <= rz.upper
    assert diamond_lower_bound(z, rng=0) <= rz.value + 1e-6
    assert abs(diamond_lower_bound(d, rng=0) - 1.5) < 1e-4


@pytest.mark.parametrize("d", [2, 3])
def test_diamond_against_unitary_oracle(d, rng):
    for _ in range(3):
        u, v = random_unitary(d, rng), random_unitary(d, rng)
        got = diamond_norm(unitary_channel(u) - unitary_channel(v))
        assert abs(got - unitary_diamond_distance(u, v)) < 1e-5


def test_diamond_of_channel_is_one(rng):
    assert abs(diamond_norm(random_channel(2, rng=rng)) - 1) < 1e-6


def test_diamond_lower_bound_is_below(rng):
    n = random_channel(2, rng=rng) - random_channel(2, rng=rng)
    assert diamond_lower_bound(n, rng=1) <= diamond_norm(n) + 1e-6


def test_diamond_rejects_non_hermitian(rng):
    with pytest.raises(ValueError):
        DiamondProgram(ChoiMatrix(np.triu(np.ones((4, 4))), 2, 2))


def test_geometric_capacity_examples(rng):
    assert abs(geometric_capacity(replacer(random_state(2, rng))).value) < 1e-6
    ident = geometric_capacity(identity_channel(2))
    assert abs(ident.value - 0.75) < 1e-4
    u = geometric_capacity(unitary_channel(random_unitary(2, rng)))
    assert abs(u.value - ident.value) < 1e-4


def test_info_destruction_examples(rng):
    opt = UnitaryOptimizer(seed=0)
    assert info_destruction(unitary_channel(random_unitary(3, rng)), opt).value < 1e-5
    dep = info_destruction(depolarizing(2), opt)
    assert abs(dep.value - RT3) < 1e-5
    assert dep.bound <= dep.value + 1e-9
    assert abs(info_destruction(dephasing(2), opt).value - np.sqrt(0.5)) < 1e-5


def test_leakage_examples(rng):
    assert leakage(identity_channel(4), random_state(2, rng)).value < 1e-6
    assert abs(leakage(unitary_channel(swap(2)), PI2).value - 0.75) < 1e-4
    assert leakage(unitary_channel(cz()), PI2).value < 1e-6


def test_non_leakage_examples():
    opt = UnitaryOptimizer(seed=0)
    assert non_leakage(unitary_channel(swap(2)), PI2, opt=opt).value < 1e-5
    assert abs(non_leakage(identity_channel(4), PI2, opt=opt).value - RT3) < 1e-5
    # CZ into π gives the constant map ρ ↦ π on B
    assert abs(non_leakage(unitary_channel(cz()), PI2, opt=opt).value - RT3) < 1e-5


def test_non_catalyticity_examples(rng):
    assert non_catalyticity(unitary_channel(cz()), PI2).value < 1e-4
    assert abs(non_catalyticity(unitary_channel(swap(2)), PI2).value - RT3) < 1e-5
    prod = np.kron(random_unitary(2, rng), random_unitary(2, rng))
    assert non_catalyticity(unitary_channel(prod), PI2).value < 1e-4


def test_xi_examples(rng):
    opt = UnitaryOptimizer(restarts=4, seed=0)
    assert xi_nonswappability(unitary_channel(swap(2)), opt).value < 1e-6
    u, v = random_unitary(2, rng), random_unitary(2, rng)
    orbit = unitary_channel(np.kron(u, v) @ swap(2))
    assert xi_nonswappability(orbit, opt).value < 1e-6


def test_xi_identity_reproducible():
    a = xi_nonswappability(identity_channel(4), UnitaryOptimizer(restarts=16, seed=1))
    b = xi_nonswappability(identity_channel(4), UnitaryOptimizer(restarts=16, seed=2))
    assert a.value > 0.5
    assert abs(a.value - b.value) < 1e-4
    assert a.details["lower_at_optimum"] <= a.value + 1e-6


def test_xi_fractional_swap():
    from chronoglass.matcore import fractional_swap

    res = xi_nonswappability(unitary_channel(fractional_swap(1.0)), UnitaryOptimizer(restarts=4, seed=0))
    assert abs(res.value - abs(np.cos(0.5))) < 1e-4


def test_xi_non_unitary_channel(rng):
    res = xi_nonswappability(depolarizing(4), UnitaryOptimizer(restarts=2, seed=0))
    assert res.details["method"] == "sdp-descent"
    assert res.details["lower_at_optimum"] <= res.value + 1e-6
    assert 0 < res.value <= 1 + 1e-9


def test_cauloc_examples(rng):
    opt = UnitaryOptimizer(restarts=4, seed=0)
    r = verify_cauloc(cz(), swap(2), PI2, opt=opt)
    assert r.holds and r.lhs < 1e-6 and r.rhs < 1e-6
    prod = np.kron(random_unitary(2, rng), random_unitary(2, rng))
    r = verify_cauloc(prod, np.eye(4), PI2, opt=opt)
    assert r.holds and r.lhs < 1e-6


def test_cauloc2_examples(rng):
    opt = UnitaryOptimizer(restarts=4, seed=0)
    r = verify_cauloc2(cz(), swap(2), PI2, opt=opt)
    assert r.holds
    assert abs(r.lhs - RT3) < 1e-5
    w = np.kron(random_unitary(2, rng), random_unitary(2, rng).T)
    r = verify_cauloc2(swap(2), w, PI2, opt=opt)
    assert r.holds and r.lhs < 1e-4 and r.rhs < 1e-4


@pytest.mark.parametrize(
    "u, w, sigma, reason",
    [
        (np.diag([1, 1, 1, 0.5]), swap(2), PI2, "not_unitary"),
        (cz(), np.ones((4, 4)), PI2, "not_unitary"),
        (swap(2), swap(2), PI2, "incompatible_channel"),
        (cz(), swap(2), np.diag([1.0, 0.0]), "incompatible_state"),
    ],
)
def test_hypothesis_errors(u, w, sigma, reason):
    for fn in (verify_cauloc, verify_cauloc2):
        with pytest.raises(HypothesisError) as exc:
            fn(u, w, sigma)
        assert exc.value.reason == reason
