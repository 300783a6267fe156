"""Conjugation of jump generators by a positive function and its inverse.

For H = diag(h) with h > 0, the conjugated generator H^{-1} A H has
off-diagonal entries q_ij h_j / h_i and an unchanged diagonal.  Splitting the
diagonal into new conservative totals plus a remainder potential gives the
transform in q-pair form; when h solves A h = 0 the remainder vanishes and
the potential is removed entirely.
"""
from __future__ import annotations

import numpy as np

from .chains import BirthDeathSpec, MeasurePair, QPairSpec, bd_measures, validate_qpair
from .errors import (
    NonpositiveH,
    NotHarmonic,
    NotLocallyHarmonic,
    PreconditionViolated,
)
from .harmonic import HarmonicVector, _h_values, harmonic_residual


def _check_positive(h: np.ndarray):
    if np.any(~(h > 0.0)):
        i = int(np.argmin(h > 0.0))
        raise NonpositiveH(i, float(h[i]))


def conjugate(qp: QPairSpec, h) -> QPairSpec:
    """Exact similarity transform for any positive h, harmonic or not.

    Off-diagonals become q_ij h_j / h_i; totals are reset to the new row
    sums and the diagonal mismatch is carried as the potential
    c~_i = c_i - q_i + q~_i.  The spectrum is preserved exactly.
    """
    h = _h_values(h)
    _check_positive(h)
    rt = qp.rates * (h[None, :] / h[:, None])
    total = rt.sum(axis=1)
    c = qp.killing - qp.total + total
    return validate_qpair(rt, total, c)


def h_transform(qp: QPairSpec, h, tol: float = 1e-8) -> QPairSpec:
    """Remove the potential by conjugating with a global harmonic h.

    Requires A h = 0 at every state (within tol, measured relative to the
    local rate scale).  The output is conservative with zero potential.
    """
    hv = _h_values(h)
    _check_positive(hv)
    res = harmonic_residual(qp, hv)
    worst = float(np.max(np.abs(res)))
    if worst > tol:
        raise NotHarmonic(worst, tol)
    rt = qp.rates * (hv[None, :] / hv[:, None])
    total = rt.sum(axis=1)
    return validate_qpair(rt, total, np.zeros(qp.n_states))


def h_transform_local(
    qp: QPairSpec, h, harmonic_set=None, tol: float = 1e-8
) -> QPairSpec:
    """Conjugate with h harmonic only on a subset of states.

    The potential is set to zero exactly on the harmonic set; off the set it
    becomes c~_i = c_i - q_i + q~_i, absorbing the one-sided defect (for a
    truncated birth-death chain this is c_N + a_N (h_{N-1}/h_N - 1)).  The
    default harmonic set is taken from the HarmonicVector, else all states
    but the last.
    """
    hv = _h_values(h)
    _check_positive(hv)
    n = qp.n_states
    if harmonic_set is None:
        if isinstance(h, HarmonicVector) and h.harmonic_set:
            harmonic_set = h.harmonic_set
        else:
            harmonic_set = range(n - 1)
    B = np.zeros(n, dtype=bool)
    B[np.asarray(list(harmonic_set), dtype=int)] = True
    res = np.abs(harmonic_residual(qp, hv))
    if np.any(res[B] > tol):
        idx = np.flatnonzero(B)[int(np.argmax(res[B]))]
        raise NotLocallyHarmonic(int(idx), float(res[idx]), tol)
    rt = qp.rates * (hv[None, :] / hv[:, None])
    total = rt.sum(axis=1)
    c = np.where(B, 0.0, qp.killing - qp.total + total)
    return validate_qpair(rt, total, c)


def inverse_transform(qt: QPairSpec, h) -> QPairSpec:
    """Reintroduce a potential by conjugating a conservative chain with 1/h.

    Requires a conservative input with zero potential.  Off-diagonals become
    h_i q~_ij / h_j and the potential c_i = sum_j q~_ij (h_i/h_j - 1) is
    carried explicitly; c_i <= q_i holds automatically.  The symmetrising
    measure maps as mu = mu~ / h^2.
    """
    hv = _h_values(h)
    _check_positive(hv)
    if not qt.conservative:
        raise PreconditionViolated("input chain must be conservative")
    if np.any(np.abs(qt.killing) > 1e-12 * np.maximum(1.0, qt.total)):
        raise PreconditionViolated("input chain must have zero potential")
    rt = qt.rates * (hv[:, None] / hv[None, :])
    total = rt.sum(axis=1)
    c = total - qt.total
    return validate_qpair(rt, total, c)


def transform_measure(mu, h, inverse: bool = False) -> np.ndarray:
    """Forward: mu~ = h^2 mu; inverse: mu = mu~ / h^2."""
    hv = _h_values(h)
    _check_positive(hv)
    mu = np.asarray(mu, dtype=float)
    return mu / hv**2 if inverse else mu * hv**2


def bd_h_transform(spec: BirthDeathSpec, h, N: int):
    """Transformed birth-death rates and measures under a positive h.

    Needs h on 0..N+1.  Returns (BirthDeathSpec, MeasurePair) with
    b~_i = b_i h_{i+1}/h_i, a~_i = a_i h_{i-1}/h_i, mu~_i = h_i^2 mu_i and
    nu_hat~_i = nu_hat_i / (h_i h_{i+1}).  When c <= 0 and h is
    nondecreasing the births speed up and the deaths slow down; that
    comparison is checked and a violation raises, since it signals a bad h.
    """
    hv = _h_values(h)
    _check_positive(hv)
    if hv.shape[0] < N + 2:
        raise PreconditionViolated(f"need h on 0..{N + 1} (got {hv.shape[0]} values)")
    b, a, c = spec.rate_arrays(N)
    bt = b * hv[1 : N + 2] / hv[: N + 1]
    at = np.zeros(N + 1)
    at[1:] = a[1:] * hv[: N] / hv[1 : N + 1]
    if np.all(c <= 0.0) and np.all(np.diff(hv) >= 0.0):
        if np.any(at[1:] > a[1:] * (1 + 1e-12)) or np.any(bt < b * (1 - 1e-12)):
            raise PreconditionViolated(
                "transformed rates violate the monotone comparison; "
                "h is not harmonic for a killed chain"
            )
    base = bd_measures(spec, N)
    # group h with sqrt(mu): h^2 alone can overflow where mu h^2 cannot
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        g = hv[: N + 1] * np.sqrt(base.mu)
        mu_t = g * g
        nu_t = 1.0 / (g * (hv[1 : N + 2] * np.sqrt(base.mu)) * b)
    out = BirthDeathSpec(birth=bt, death=at, killing=0.0, truncation=N)
    return out, MeasurePair(mu=mu_t, nu_hat=nu_t)


def measure_dual(qp: QPairSpec, mu) -> QPairSpec:
    """Adjoint chain with respect to the weights mu.

    Off-diagonals become q-bar_ij = mu_j q_ji / mu_i (the transpose rescaled
    row-wise); the diagonal of the generator is unchanged, so the potential
    adjusts to c-bar_i = c_i - q_i + q-bar_i.  If mu symmetrises qp the
    chain is returned unchanged.
    """
    mu = np.asarray(mu, dtype=float)
    if np.any(mu <= 0.0):
        raise PreconditionViolated("mu must be strictly positive")
    rt = qp.rates.T * (mu[None, :] / mu[:, None])
    total = rt.sum(axis=1)
    c = qp.killing - qp.total + total
    return validate_qpair(rt, total, c)
