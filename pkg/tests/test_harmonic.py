import numpy as np
import pytest

from isospec import (
    BirthDeathSpec,
    Divergence,
    NonConvergence,
    PreconditionViolated,
    bd_harmonic_explicit,
    bd_to_qpair,
    harmonic_residual,
    is_supersolution,
    maximal_solution,
    minimal_harmonic,
    uniqueness_margin,
    validate_qpair,
)
from conftest import exact_harmonic_pair, make_conservative, make_reversible_killed


def test_explicit_constant_unit_killing_is_odd_fibonacci():
    # b = a = 1, c = -1: h_{n+1} = 3 h_n - h_{n-1}, h_0 = 1, h_1 = 2
    s = BirthDeathSpec(birth=1.0, death=1.0, killing=-1.0)
    expect = np.array([1.0, 2.0, 5.0, 13.0, 34.0, 89.0, 233.0, 610.0, 1597.0])
    for method in ("ftilde", "recurrence"):
        hv = bd_harmonic_explicit(s, 8, method=method)
        assert np.array_equal(hv.values, expect)
        assert hv.residual == 0.0
        assert hv.harmonic_set == tuple(range(8))
        assert hv.base_index == 0


def test_explicit_methods_agree_on_random_rates():
    rng = np.random.default_rng(314)
    for _ in range(10):
        s = BirthDeathSpec(
            birth=rng.uniform(0.5, 1.5, 80),
            death=rng.uniform(0.5, 1.5, 80),
            killing=-rng.uniform(0.05, 0.5, 80),
        )
        h1 = bd_harmonic_explicit(s, 60, method="ftilde").values
        h2 = bd_harmonic_explicit(s, 60, method="recurrence").values
        assert np.max(np.abs(h1 - h2) / h2) < 1e-10


def test_explicit_positive_and_nondecreasing_for_killing():
    rng = np.random.default_rng(99)
    s = BirthDeathSpec(
        birth=rng.uniform(0.5, 2.0, 120),
        death=rng.uniform(0.5, 2.0, 120),
        killing=-0.3,
    )
    hv = bd_harmonic_explicit(s, 100)
    assert np.all(hv.values > 0.0)
    assert np.all(np.diff(hv.values) >= 0.0)


def test_explicit_residual_on_truncated_chain():
    s = BirthDeathSpec(birth=1.3, death=0.7, killing=-0.2)
    N = 40
    hv = bd_harmonic_explicit(s, N)
    qp = bd_to_qpair(s, N)
    res = harmonic_residual(qp, hv.values, B=range(N))
    assert np.max(np.abs(res)) <= 1e-10 * np.max(hv.values)


def test_explicit_warns_on_positive_potential():
    s = BirthDeathSpec(birth=1.0, death=1.0, killing=0.5)
    with pytest.warns(UserWarning, match="positivity"):
        bd_harmonic_explicit(s, 5)


def test_minimal_iterate_matches_solve():
    rng = np.random.default_rng(2024)
    for _ in range(12):
        n = int(rng.integers(3, 25))
        qp, _ = make_reversible_killed(rng, n)
        h_it, tr = minimal_harmonic(qp, 0, tol=1e-14)
        h_sv, _ = minimal_harmonic(qp, 0, method="solve")
        assert tr.converged
        assert np.max(np.abs(h_it.values - h_sv.values)) < 1e-10
        assert h_it.values[0] == 1.0
        assert np.all(h_it.values > 0.0)


def test_minimal_harmonic_residual_off_anchor():
    rng = np.random.default_rng(5)
    qp, _ = make_reversible_killed(rng, 12)
    hv, _ = minimal_harmonic(qp, 3, method="solve")
    res = harmonic_residual(qp, hv, B=[i for i in range(12) if i != 3])
    assert np.max(np.abs(res)) < 1e-11
    assert hv.base_index == 3
    assert 3 not in hv.harmonic_set


def test_minimal_harmonic_rejects_bad_anchor():
    rng = np.random.default_rng(1)
    qp, _ = make_reversible_killed(rng, 5)
    with pytest.raises(PreconditionViolated):
        minimal_harmonic(qp, 7)


def test_minimal_harmonic_requires_subcritical_potential():
    # c = q at a non-anchor state leaves no mass to renormalise
    rates = np.array([[0.0, 1.0], [1.0, 0.0]])
    qp = validate_qpair(rates, None, np.array([0.0, 1.0]))
    with pytest.raises(PreconditionViolated):
        minimal_harmonic(qp, 0)


def test_minimal_harmonic_diverges_on_supercritical_potential():
    # c just below q feeds the iteration a kernel with row sum > 1
    rates = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
    qp = validate_qpair(rates, None, np.array([0.0, 1.5, 0.5]))
    with pytest.raises(Divergence):
        minimal_harmonic(qp, 0, ceiling=1e6)


def test_minimal_harmonic_nonconvergence_budget():
    rng = np.random.default_rng(8)
    qp, _ = make_reversible_killed(rng, 10, kill_lo=0.01, kill_hi=0.02)
    with pytest.raises(NonConvergence):
        minimal_harmonic(qp, 0, tol=1e-14, max_iter=3)


def test_minimal_harmonic_warns_when_anchor_unreachable():
    # state 2 has no outgoing jumps, so it never hits the anchor
    rates = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
    qp = validate_qpair(rates, None, np.array([-0.1, -0.1, -0.1]))
    with pytest.warns(UserWarning, match="cannot reach"):
        hv, _ = minimal_harmonic(qp, 0, method="solve")
    assert hv.values[2] == 0.0


def test_uniqueness_margin_positive_for_killed_chain():
    rng = np.random.default_rng(77)
    qp, _ = make_reversible_killed(rng, 9)
    assert uniqueness_margin(qp, 0) > 0.0


def test_supersolution_accepts_harmonic_and_constants():
    rng = np.random.default_rng(13)
    qp, h = exact_harmonic_pair(rng, 8)
    assert is_supersolution(qp, 0, h, tol=1e-8)
    killed, _ = make_reversible_killed(rng, 8)
    assert is_supersolution(killed, 0, np.ones(8))


def test_maximal_solution_conservative_stays_one():
    rng = np.random.default_rng(3)
    qp = make_conservative(rng, 7)
    z, tr = maximal_solution(qp)
    assert tr.converged
    assert np.allclose(z, 1.0, rtol=0, atol=1e-12)


def test_maximal_solution_vanishes_under_killing():
    rng = np.random.default_rng(4)
    qp, _ = make_reversible_killed(rng, 7, kill_lo=0.5, kill_hi=1.0)
    z, tr = maximal_solution(qp, tol=1e-13)
    assert tr.converged
    assert np.max(z) < 1e-10


def test_maximal_solution_rejects_positive_potential():
    rates = np.array([[0.0, 1.0], [1.0, 0.0]])
    qp = validate_qpair(rates, None, np.array([0.5, 0.0]))
    with pytest.raises(PreconditionViolated):
        maximal_solution(qp)
