"""Measure symmetrisation, symmetric eigensolvers, and spectrum comparison."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chains import QPairSpec
from .errors import NoConvergence, NotReversible, PreconditionViolated

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    measure_used: np.ndarray
    max_pair_gap: float
    method: str
    passed: bool = True
    eigenvalues_other: np.ndarray | None = field(default=None, compare=False)
    tolerance: float = 0.0


def symmetrize(qp: QPairSpec, mu, rtol: float = 1e-10) -> np.ndarray:
    """Similarity D A D^{-1} with D = diag(sqrt(mu)).

    Requires mu to symmetrise the rates: mu_i q_ij = mu_j q_ji.  The result
    shares the generator's spectrum and is symmetric up to rounding.
    """
    mu = np.asarray(mu, dtype=float)
    if np.any(mu <= 0.0):
        raise PreconditionViolated("mu must be strictly positive")
    flow = mu[:, None] * qp.rates
    scale = np.maximum(np.abs(flow), np.abs(flow.T))
    viol = np.abs(flow - flow.T) / np.maximum(scale, 1e-300)
    viol[scale == 0.0] = 0.0
    if np.max(viol) > rtol:
        i, j = map(int, np.unravel_index(np.argmax(viol), viol.shape))
        raise NotReversible(i, j, float(viol[i, j]))
    d = np.sqrt(mu)
    s = qp.generator * (d[:, None] / d[None, :])
    return 0.5 * (s + s.T)


def _jacobi(S, tol_factor=1e-13, max_sweeps=60, vectors=False):
    a = np.array(S, dtype=float)
    n = a.shape[0]
    v = np.eye(n) if vectors else None
    norm0 = float(np.linalg.norm(S))
    if n == 1:
        return a.diagonal().copy(), v, 0.0, 0
    target = tol_factor * max(norm0, 1e-300)
    off = np.sqrt(max(0.0, norm0**2 - float(np.sum(a.diagonal() ** 2))))
    sweeps = 0
    while off > target and sweeps < max_sweeps:
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 0.25 * target / n:
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                a[p, q] = 0.0
                a[q, p] = 0.0
                if vectors:
                    vp = v[:, p].copy()
                    v[:, p] = c * vp - s * v[:, q]
                    v[:, q] = s * vp + c * v[:, q]
        mask = ~np.eye(n, dtype=bool)
        off = float(np.linalg.norm(a[mask]))
    return a.diagonal().copy(), v, off, sweeps


def _tql(d_in, e_in, max_iter=60):
    """Implicit-shift QL eigenvalues of a symmetric tridiagonal matrix.

    d_in is the diagonal (length n), e_in the subdiagonal (length n-1).
    Returns unsorted eigenvalues; raises NoConvergence if an eigenvalue
    fails to settle within max_iter sweeps.
    """
    n = d_in.shape[0]
    d = np.array(d_in, dtype=float)
    e = np.zeros(n)
    e[: n - 1] = e_in
    for l in range(n):
        it = 0
        while True:
            if l < n - 1:
                neg = np.flatnonzero(
                    np.abs(e[l : n - 1])
                    <= _EPS * (np.abs(d[l : n - 1]) + np.abs(d[l + 1 : n]))
                )
                m = l + int(neg[0]) if neg.size else n - 1
            else:
                m = l
            if m == l:
                break
            it += 1
            if it > max_iter:
                raise NoConvergence(float(abs(e[l])), max_iter)
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d


def sturm_count(d, e, x: float) -> int:
    """Number of eigenvalues of tridiag(d, e) strictly below x.

    Uses division-first pivots so heavily graded matrices do not overflow.
    """
    n = d.shape[0]
    count = 0
    q = d[0] - x
    if q < 0.0:
        count += 1
    for k in range(1, n):
        if q == 0.0:
            q = 1e-300
        q = d[k] - x - e[k - 1] * (e[k - 1] / q)
        if q < 0.0:
            count += 1
    return count


def smallest_eig_tridiag(d, e, rel_tol: float = 1e-14) -> float:
    """Smallest eigenvalue by Sturm bisection.

    Bisection on the inertia count keeps full relative accuracy even when
    the matrix entries span hundreds of orders of magnitude, where any
    backward-stable dense method loses the small eigenvalues entirely.
    """
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    span = float(np.max(np.abs(e))) if e.size else 0.0
    hi = float(np.max(d)) + 2.0 * span
    lo = min(0.0, float(np.min(d)) - 2.0 * span)
    while sturm_count(d, e, hi) < 1:
        hi = hi * 2.0 + 1.0
    for _ in range(4096):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if sturm_count(d, e, mid) >= 1:
            hi = mid
        else:
            lo = mid
        if hi - lo <= rel_tol * max(abs(lo), abs(hi)):
            break
    return 0.5 * (lo + hi)


def lowest_eigs_tridiag(d, e, k: int, rel_tol: float = 1e-13) -> np.ndarray:
    """The k smallest eigenvalues of tridiag(d, e) by inertia bisection."""
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    n = d.shape[0]
    if not 1 <= k <= n:
        raise PreconditionViolated(f"need 1 <= k <= {n}")
    span = float(np.max(np.abs(e))) if e.size else 0.0
    top = float(np.max(d)) + 2.0 * span
    bot = float(np.min(d)) - 2.0 * span
    out = np.empty(k)
    for i in range(k):
        lo, hi = bot, top
        for _ in range(4096):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if sturm_count(d, e, mid) >= i + 1:
                hi = mid
            else:
                lo = mid
            if hi - lo <= rel_tol * max(abs(lo), abs(hi), 1e-300):
                break
        out[i] = 0.5 * (lo + hi)
    return out


def _is_tridiagonal(S) -> bool:
    n = S.shape[0]
    if n <= 2:
        return True
    mask = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :]) > 1
    return bool(np.all(S[mask] == 0.0))


def eig_sym(S, vectors: bool = False, method: str | None = None):
    """All eigenvalues of a symmetric matrix, ascending.

    Dispatches on bandwidth: tridiagonal input goes to implicit-shift QL,
    dense input to cyclic Jacobi.  With vectors=True returns (w, V) with
    columns of V the eigenvectors (Jacobi path only).
    """
    S = np.asarray(S, dtype=float)
    scale = max(1.0, float(np.max(np.abs(S))))
    if np.max(np.abs(S - S.T)) > 1e-10 * scale:
        raise PreconditionViolated("matrix is not symmetric")
    if method is None:
        method = "tridiagonal_ql" if _is_tridiagonal(S) else "jacobi"
    if method == "tridiagonal_ql":
        if vectors:
            raise PreconditionViolated("eigenvectors require the jacobi method")
        w = _tql(S.diagonal().copy(), np.diagonal(S, 1).copy())
        return np.sort(w)
    if method == "jacobi":
        w, V, off, sweeps = _jacobi(S, vectors=vectors)
        if off > 1e-13 * max(float(np.linalg.norm(S)), 1e-300):
            raise NoConvergence(off, sweeps)
        order = np.argsort(w)
        if vectors:
            return w[order], V[:, order]
        return w[order]
    raise PreconditionViolated(f"unknown method {method!r}")


def eig_tridiag(d, e, method: str = "ql"):
    """Eigenvalues of tridiag(d, e) without forming the dense matrix."""
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    if method == "ql":
        return np.sort(_tql(d.copy(), e.copy()))
    raise PreconditionViolated(f"unknown method {method!r}")


def quadratic_form(qp: QPairSpec, mu, f) -> float:
    """(A f, f)_mu = sum_i mu_i f_i (A f)_i with the potential included."""
    mu = np.asarray(mu, dtype=float)
    f = np.asarray(f, dtype=float)
    if not (mu.shape == f.shape == (qp.n_states,)):
        raise PreconditionViolated("mu and f must match the number of states")
    return float(mu @ (f * qp.apply(f)))


def spectral_radius(qp: QPairSpec, mu) -> float:
    w = eig_sym(symmetrize(qp, mu))
    return float(np.max(np.abs(w)))


def isospectral_check(qpA, muA, qpB, muB, tol: float | None = None) -> SpectrumReport:
    """Compare the sorted spectra of two measure-symmetrised generators.

    Pairing is by sort order (the equality claim is as multisets).  Default
    tolerance is 1e-9 * max(1, spectral radius of the first operator).
    """
    if qpA.n_states != qpB.n_states:
        raise PreconditionViolated("chains must have the same number of states")
    SA = symmetrize(qpA, muA)
    SB = symmetrize(qpB, muB)
    dense = not (_is_tridiagonal(SA) and _is_tridiagonal(SB))
    method = "jacobi" if dense else "tridiagonal_ql"
    wA = eig_sym(SA, method=method)
    wB = eig_sym(SB, method=method)
    gap = float(np.max(np.abs(wA - wB)))
    if tol is None:
        tol = 1e-9 * max(1.0, float(np.max(np.abs(wA))))
    return SpectrumReport(
        eigenvalues=wA,
        measure_used=np.asarray(muA, dtype=float),
        max_pair_gap=gap,
        method=method,
        passed=bool(gap <= tol),
        eigenvalues_other=wB,
        tolerance=float(tol),
    )
