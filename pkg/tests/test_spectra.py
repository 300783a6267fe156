import numpy as np
import pytest

from isospec import (
    BirthDeathSpec,
    NotReversible,
    PreconditionViolated,
    bd_measures,
    bd_to_qpair,
    eig_sym,
    eig_tridiag,
    isospectral_check,
    lowest_eigs_tridiag,
    quadratic_form,
    smallest_eig_tridiag,
    spectral_radius,
    sturm_count,
    symmetrize,
    validate_qpair,
)
from conftest import make_reversible_killed


def _random_symmetric(rng, n):
    A = rng.normal(size=(n, n))
    return (A + A.T) / 2.0


def test_symmetrize_shares_generator_spectrum():
    rng = np.random.default_rng(30)
    qp, mu = make_reversible_killed(rng, 12)
    S = symmetrize(qp, mu)
    assert np.max(np.abs(S - S.T)) == 0.0
    ref = np.sort(np.linalg.eigvals(qp.generator).real)
    ours = np.sort(np.linalg.eigvalsh(S))
    assert np.max(np.abs(ref - ours)) < 1e-8 * max(1.0, np.max(np.abs(ours)))


def test_symmetrize_rejects_wrong_measure():
    rng = np.random.default_rng(31)
    qp, mu = make_reversible_killed(rng, 8)
    with pytest.raises(NotReversible):
        symmetrize(qp, mu * rng.uniform(0.5, 2.0, 8))


def test_eig_sym_jacobi_matches_reference():
    rng = np.random.default_rng(32)
    for n in (2, 5, 17, 40):
        S = _random_symmetric(rng, n)
        ours = eig_sym(S, method="jacobi")
        ref = np.linalg.eigvalsh(S)
        assert np.max(np.abs(ours - ref)) < 1e-11 * max(1.0, np.max(np.abs(ref)))


def test_eig_sym_jacobi_vectors_diagonalise():
    rng = np.random.default_rng(33)
    S = _random_symmetric(rng, 12)
    w, V = eig_sym(S, vectors=True, method="jacobi")
    assert np.max(np.abs(S @ V - V * w[None, :])) < 1e-11
    assert np.max(np.abs(V.T @ V - np.eye(12))) < 1e-12


def test_eig_sym_dispatches_tridiagonal():
    rng = np.random.default_rng(34)
    d = rng.normal(size=25)
    e = rng.normal(size=24)
    S = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    ours = eig_sym(S)
    ref = np.linalg.eigvalsh(S)
    assert np.max(np.abs(ours - ref)) < 1e-12 * max(1.0, np.max(np.abs(ref)))


def test_eig_sym_rejects_asymmetric():
    with pytest.raises(PreconditionViolated):
        eig_sym(np.array([[0.0, 1.0], [2.0, 0.0]]))


def test_eig_tridiag_matches_reference():
    rng = np.random.default_rng(35)
    d = rng.uniform(0.5, 3.0, 60)
    e = rng.normal(size=59)
    S = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    ours = eig_tridiag(d, e)
    ref = np.linalg.eigvalsh(S)
    assert np.max(np.abs(ours - ref)) < 1e-12 * np.max(np.abs(ref))


def test_sturm_count_matches_reference_counts():
    rng = np.random.default_rng(36)
    d = rng.normal(size=30)
    e = rng.normal(size=29)
    S = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    w = np.linalg.eigvalsh(S)
    for x in (-2.0, -0.5, 0.0, 0.3, 1.7, w[3] + 1e-9):
        assert sturm_count(d, e, x) == int(np.sum(w < x))


def test_smallest_eig_graded_matrix_full_relative_accuracy():
    # Dirichlet form of b_i = 2^i, a_i = 2^(i-1), c = 0 truncated at N = 40.
    # Entries span twelve orders of magnitude; dense solvers lose the bottom
    # eigenvalue to eps * norm noise.  Reference value from a 50-digit solve.
    N = 40
    b = 2.0 ** np.arange(N + 1)
    a = np.concatenate(([0.0], 2.0 ** (np.arange(1, N + 1) - 1)))
    d = b + a
    e = -np.sqrt(b[:N]) * np.sqrt(a[1:])
    lam = smallest_eig_tridiag(d, e)
    ref = 0.34387045237988115
    assert abs(lam - ref) < 5e-14 * ref


def test_lowest_eigs_tridiag_matches_reference():
    rng = np.random.default_rng(37)
    d = rng.uniform(1.0, 4.0, 50)
    e = -rng.uniform(0.2, 1.0, 49)
    S = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    ref = np.sort(np.linalg.eigvalsh(S))[:6]
    ours = lowest_eigs_tridiag(d, e, 6)
    assert np.max(np.abs(ours - ref)) < 1e-11 * np.max(np.abs(ref))
    assert smallest_eig_tridiag(d, e) == pytest.approx(ref[0], rel=1e-12)


def test_lowest_eigs_bad_k():
    with pytest.raises(PreconditionViolated):
        lowest_eigs_tridiag(np.ones(4), -np.ones(3), 5)


def test_quadratic_form_hand_value():
    rates = np.array([[0.0, 2.0], [1.0, 0.0]])
    qp = validate_qpair(rates, None, np.array([-1.0, 0.0]))
    mu = np.array([1.0, 2.0])
    f = np.array([1.0, -1.0])
    # (Af)_0 = -2 - 3 = -5, (Af)_1 = 1 + 1 = 2
    # sum mu f (Af) = 1*1*(-5) + 2*(-1)*2 = -9
    assert quadratic_form(qp, mu, f) == -9.0


def test_quadratic_form_nonpositive_for_killed_reversible():
    rng = np.random.default_rng(38)
    for _ in range(10):
        qp, mu = make_reversible_killed(rng, 11)
        f = rng.normal(size=11)
        assert quadratic_form(qp, mu, f) <= 1e-12


def test_spectral_radius_matches_reference():
    rng = np.random.default_rng(39)
    qp, mu = make_reversible_killed(rng, 13)
    ref = np.max(np.abs(np.linalg.eigvalsh(symmetrize(qp, mu))))
    assert spectral_radius(qp, mu) == pytest.approx(ref, rel=1e-10)


def test_isospectral_check_default_tolerance_and_verdict():
    rng = np.random.default_rng(40)
    qp, mu = make_reversible_killed(rng, 9)
    rep = isospectral_check(qp, mu, qp, mu)
    assert rep.passed
    assert rep.max_pair_gap == 0.0
    assert rep.tolerance == pytest.approx(
        1e-9 * max(1.0, np.max(np.abs(rep.eigenvalues)))
    )
    # shift one potential entry: spectra must split
    c2 = qp.killing.copy()
    c2[4] -= 0.37
    qp2 = validate_qpair(qp.rates, qp.total, c2)
    rep2 = isospectral_check(qp, mu, qp2, mu)
    assert not rep2.passed


def test_isospectral_check_tridiagonal_path():
    s = BirthDeathSpec(birth=1.2, death=0.8, killing=-0.3)
    qp = bd_to_qpair(s, 30)
    mu = bd_measures(s, 30).mu
    rep = isospectral_check(qp, mu, qp, mu)
    assert rep.method == "tridiagonal_ql"
    assert rep.passed
