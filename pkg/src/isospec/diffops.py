"""Differential-operator conjugations, Riccati duals, and discretization.

One-dimensional operators L = a d2/dx2 + b d/dx + c.  A nonvanishing h with
L h = 0 turns L into the potential-free L~ = a d2/dx2 + b~ d/dx with
b~ = b + 2 a h'/h, and any positive h inverts the move, reintroducing a
potential.  The discretization is finite-volume in the (mu, nu-hat) weights
so the discrete matrix is symmetric in L2(mu) by construction.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import (
    BlowUp,
    GridTooCoarse,
    NotHarmonicAt,
    PreconditionViolated,
    ZeroH,
)
from .expressions import compile_expression

_H_FLOOR = 1e-300


def _as_fn(v) -> Callable:
    """Normalize a coefficient (constant, expression text, or callable)."""
    if isinstance(v, str):
        return compile_expression(v).fn
    if callable(v):
        def fn(x, _f=v):
            x = np.asarray(x, dtype=float)
            out = np.asarray(_f(x), dtype=float)
            if out.shape != x.shape:
                out = np.broadcast_to(out, x.shape).copy()
            return out if x.ndim else float(out)
        return fn
    val = float(v)
    def const(x, _v=val):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape, _v) if x.ndim else _v
    return const


_BC = ("dirichlet", "neumann")


@dataclass(frozen=True)
class Operator1D:
    """a d2/dx2 + b d/dx + c on a strictly increasing grid, with a > 0."""

    a: Callable
    b: Callable
    c: Callable
    grid: np.ndarray
    boundary: tuple = ("neumann", "neumann")

    def __post_init__(self):
        object.__setattr__(self, "a", _as_fn(self.a))
        object.__setattr__(self, "b", _as_fn(self.b))
        object.__setattr__(self, "c", _as_fn(self.c))
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 1 or g.shape[0] < 2 or np.any(np.diff(g) <= 0.0):
            raise PreconditionViolated("grid must be strictly increasing, length >= 2")
        g.setflags(write=False)
        object.__setattr__(self, "grid", g)
        if len(self.boundary) != 2 or any(t not in _BC for t in self.boundary):
            raise PreconditionViolated(f"boundary tags must be from {_BC}")
        av = self.a(g)
        if np.any(~(av > 0.0)):
            i = int(np.argmin(av))
            raise PreconditionViolated(f"a({g[i]:g}) = {av[i]:g} is not positive")

    @classmethod
    def on_interval(cls, a, b, c, lo, hi, M, boundary=("neumann", "neumann")):
        return cls(a=a, b=b, c=c, grid=np.linspace(lo, hi, M + 1), boundary=boundary)

    def coefficients(self, x=None):
        x = self.grid if x is None else np.asarray(x, dtype=float)
        return self.a(x), self.b(x), self.c(x)


@dataclass(frozen=True)
class SmoothFunction:
    """Point evaluations of (h, h', h'') with analytically supplied derivatives."""

    h: Callable
    h1: Callable
    h2: Callable

    def __post_init__(self):
        for name in ("h", "h1", "h2"):
            object.__setattr__(self, name, _as_fn(getattr(self, name)))

    def __call__(self, x):
        return self.h(x), self.h1(x), self.h2(x)

    @classmethod
    def from_expression(cls, text: str) -> "SmoothFunction":
        e = compile_expression(text)
        return cls(h=e.fn, h1=e.diff(1).fn, h2=e.diff(2).fn)

    @classmethod
    def from_values(cls, grid, values) -> "SmoothFunction":
        """Finite-difference fallback: central O(dx^2) derivatives of samples.

        Use only when analytic derivatives are unavailable; the differencing
        error enters every residual downstream.
        """
        x = np.asarray(grid, dtype=float)
        v = np.asarray(values, dtype=float)
        if x.shape != v.shape or x.ndim != 1 or x.shape[0] < 5:
            raise PreconditionViolated("need matching 1-d arrays, length >= 5")
        d1 = np.gradient(v, x, edge_order=2)
        d2 = np.gradient(d1, x, edge_order=2)
        def interp(arr):
            def fn(t, _a=arr):
                t = np.asarray(t, dtype=float)
                out = np.interp(t, x, _a)
                return out if t.ndim else float(out)
            return fn
        return cls(h=interp(v), h1=interp(d1), h2=interp(d2))


_S_TAGS = (Fraction(0), Fraction(1, 2), Fraction(1))


@dataclass(frozen=True)
class PolyGauss:
    """p(x) exp(-s x^2) with exact rational coefficients, s in {0, 1/2, 1}.

    Closed under differentiation, so derivative towers carry no rounding.
    """

    coeffs: tuple
    s: Fraction = Fraction(0)

    def __post_init__(self):
        cs = tuple(Fraction(c) for c in self.coeffs)
        while len(cs) > 1 and cs[-1] == 0:
            cs = cs[:-1]
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "s", Fraction(self.s))
        if self.s not in _S_TAGS:
            raise PreconditionViolated(f"Gaussian tag must be one of {_S_TAGS}")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def diff(self, order: int = 1) -> "PolyGauss":
        out = self
        for _ in range(order):
            p = out.coeffs
            dp = tuple(k * p[k] for k in range(1, len(p))) or (Fraction(0),)
            if out.s == 0:
                out = PolyGauss(dp, out.s)
            else:
                # (p e^{-s x^2})' = (p' - 2 s x p) e^{-s x^2}
                shifted = (Fraction(0),) + tuple(-2 * out.s * c for c in p)
                n = max(len(dp), len(shifted))
                comb = tuple(
                    (dp[k] if k < len(dp) else 0)
                    + (shifted[k] if k < len(shifted) else 0)
                    for k in range(n)
                )
                out = PolyGauss(comb, out.s)
        return out

    def scale(self, factor) -> "PolyGauss":
        f = Fraction(factor)
        return PolyGauss(tuple(f * c for c in self.coeffs), self.s)

    def add(self, other: "PolyGauss") -> "PolyGauss":
        if self.s != other.s:
            raise PreconditionViolated("Gaussian tags differ")
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyGauss(
            tuple(
                (self.coeffs[k] if k < len(self.coeffs) else 0)
                + (other.coeffs[k] if k < len(other.coeffs) else 0)
                for k in range(n)
            ),
            self.s,
        )

    def mul_x(self) -> "PolyGauss":
        return PolyGauss((Fraction(0),) + self.coeffs, self.s)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        p = np.zeros(x.shape)
        for c in reversed(self.coeffs):
            p = p * x + float(c)
        out = p if self.s == 0 else p * np.exp(-float(self.s) * x * x)
        return out if x.ndim else float(out)

    def to_smooth(self) -> SmoothFunction:
        d1, d2 = self.diff(1), self.diff(2)
        return SmoothFunction(h=self, h1=d1, h2=d2)


def hermite_polys(n_max: int) -> list:
    """Physicists' Hermite polynomials H_0..H_n as exact-integer PolyGauss.

    H_{n+1} = 2 x H_n - 2 n H_{n-1}.  Guarded at n_max <= 60; coefficients
    stay exact Python integers (as Fractions) at any admissible n.
    """
    if n_max < 0:
        raise PreconditionViolated("n_max must be nonnegative")
    if n_max > 60:
        raise PreconditionViolated("n_max > 60: coefficient growth guard")
    polys = [PolyGauss((Fraction(1),))]
    if n_max >= 1:
        polys.append(PolyGauss((Fraction(0), Fraction(2))))
    for n in range(1, n_max):
        nxt = polys[n].mul_x().scale(2).add(polys[n - 1].scale(-2 * n))
        polys.append(nxt)
    return polys


def hermite_defining_residual(n: int) -> tuple:
    """Exact coefficients of (1/2) H_n'' - x H_n' + n H_n (all zero)."""
    H = hermite_polys(n)[n]
    r = H.diff(2).scale(Fraction(1, 2)).add(H.diff(1).mul_x().scale(-1)).add(
        H.scale(n)
    )
    return r.coeffs


def _check_nonzero(hv, x):
    bad = np.flatnonzero(np.abs(np.atleast_1d(hv)) < _H_FLOOR)
    if bad.size:
        i = int(bad[0])
        raise ZeroH(float(np.atleast_1d(x)[i]))


def forward_transform(op: Operator1D, h: SmoothFunction, tol: float = 1e-8) -> Operator1D:
    """Remove the potential of op using an op-harmonic h.

    Checks |a h'' + b h' + c h| <= tol at every grid point, then returns the
    operator with the same diffusion, drift b + 2 a h'/h, and zero potential.
    """
    x = op.grid
    hv, h1, h2 = h(x)
    _check_nonzero(hv, x)
    av, bv, cv = op.coefficients()
    res = np.abs(av * h2 + bv * h1 + cv * hv)
    if np.any(res > tol):
        i = int(np.argmax(res))
        raise NotHarmonicAt(float(x[i]), float(res[i]), tol)

    def bt(t, _b=op.b, _a=op.a, _h=h):
        hv, h1, _ = _h(t)
        return _b(t) + 2.0 * _a(t) * h1 / hv

    return Operator1D(a=op.a, b=bt, c=0.0, grid=op.grid, boundary=op.boundary)


def forward_transform_points(a, b, c, h, grad, hess, tol: float = 1e-8):
    """Pointwise d-dimensional drift update b~ = b + 2 (a grad h)/h.

    Arrays: a is (P,d,d) or (d,d); b and grad are (P,d); c and h are (P,).
    hess (P,d,d) feeds the harmonicity check tr(a hess) + b.grad + c h = 0.
    Returns the (P,d) transformed drift.
    """
    b = np.asarray(b, dtype=float)
    grad = np.asarray(grad, dtype=float)
    h = np.asarray(h, dtype=float)
    c = np.asarray(c, dtype=float)
    hess = np.asarray(hess, dtype=float)
    P, d = b.shape
    a = np.asarray(a, dtype=float)
    if a.ndim == 2:
        a = np.broadcast_to(a, (P, d, d))
    _check_nonzero(h, np.arange(P))
    res = np.abs(
        np.einsum("pij,pij->p", a, hess) + np.einsum("pi,pi->p", b, grad) + c * h
    )
    if np.any(res > tol):
        i = int(np.argmax(res))
        raise NotHarmonicAt(float(i), float(res[i]), tol)
    return b + 2.0 * np.einsum("pij,pj->pi", a, grad) / h[:, None]


def inverse_transform(opt: Operator1D, h: SmoothFunction, path: str = "direct") -> Operator1D:
    """Reintroduce a potential: conjugate the potential-free opt by h.

    path "direct" uses c = 2 a (h'/h)^2 - (a h'' + b~ h')/h; path "psi" uses
    the logarithmic form c = a (psi'^2 - psi'') - b~ psi' with psi = log h.
    The two are algebraically identical and kept separate as a cross-check.
    """
    if path not in ("direct", "psi"):
        raise PreconditionViolated(f"unknown path {path!r}")
    x = opt.grid
    cv = opt.c(x)
    if np.any(np.abs(cv) > 1e-12):
        raise PreconditionViolated("input operator must have zero potential")
    hv, _, _ = h(x)
    _check_nonzero(hv, x)

    def b_new(t, _b=opt.b, _a=opt.a, _h=h):
        hv, h1, _ = _h(t)
        return _b(t) - 2.0 * _a(t) * h1 / hv

    if path == "direct":
        def c_new(t, _b=opt.b, _a=opt.a, _h=h):
            hv, h1, h2 = _h(t)
            r = h1 / hv
            return 2.0 * _a(t) * r * r - (_a(t) * h2 + _b(t) * h1) / hv
    else:
        def c_new(t, _b=opt.b, _a=opt.a, _h=h):
            hv, h1, h2 = _h(t)
            p1 = h1 / hv
            p2 = h2 / hv - p1 * p1
            return _a(t) * (p1 * p1 - p2) - _b(t) * p1

    return Operator1D(a=opt.a, b=b_new, c=c_new, grid=opt.grid, boundary=opt.boundary)


@dataclass(frozen=True)
class RiccatiResult:
    """phi, psi = int phi, and the dual drift on the integration grid."""

    grid: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    b_tilde: np.ndarray
    phi_prime: np.ndarray = field(repr=False, default=None)

    def smooth(self, mode: str = "ode") -> SmoothFunction:
        """h = e^psi as a SmoothFunction.

        mode "ode" propagates derivatives through the Riccati identities
        h' = phi h, h'' = (phi' + phi^2) h; mode "fd" differentiates the
        sampled h values and is the independent check.
        """
        hv = np.exp(self.psi - np.max(self.psi))
        if mode == "fd":
            return SmoothFunction.from_values(self.grid, hv)
        if mode != "ode":
            raise PreconditionViolated(f"unknown mode {mode!r}")
        x, phi, dphi = self.grid, self.phi, self.phi_prime
        h1 = phi * hv
        h2 = (dphi + phi * phi) * hv
        def interp(arr):
            def fn(t, _a=arr):
                t = np.asarray(t, dtype=float)
                out = np.interp(t, x, _a)
                return out if t.ndim else float(out)
            return fn
        return SmoothFunction(h=interp(hv), h1=interp(h1), h2=interp(h2))


def riccati_dual(
    opbar: Operator1D,
    phi0: float,
    grid=None,
    x0: float | None = None,
    guard: float = 1e6,
) -> RiccatiResult:
    """Construct the dual drift by solving a phi' + a phi^2 + b phi + c = 0.

    Fixed-step classical fourth-order integration from the anchor x0 (a grid
    point; defaults to the grid point nearest zero, else the left end),
    outward in both directions.  psi is the trapezoidal integral of phi with
    psi(x0) = 0, and b~ = 2 a phi + b.  Escapes of |phi| beyond the guard
    raise BlowUp: Riccati solutions reach infinity where h would vanish.
    """
    x = np.asarray(opbar.grid if grid is None else grid, dtype=float)
    if x.ndim != 1 or x.shape[0] < 2 or np.any(np.diff(x) <= 0.0):
        raise PreconditionViolated("grid must be strictly increasing, length >= 2")
    av = opbar.a(x)
    if np.any(~(av > 0.0)):
        raise PreconditionViolated("a must be positive on the grid")

    if x0 is None:
        i0 = int(np.argmin(np.abs(x))) if x[0] <= 0.0 <= x[-1] else 0
    else:
        i0 = int(np.argmin(np.abs(x - x0)))
        if abs(x[i0] - x0) > 1e-9 * max(1.0, x[-1] - x[0]):
            raise PreconditionViolated(f"x0 = {x0:g} is not a grid point")

    def F(t, p):
        a = opbar.a(t)
        return -p * p - (opbar.b(t) / a) * p - opbar.c(t) / a

    phi = np.empty_like(x)
    phi[i0] = float(phi0)

    def march(idx_from, idx_to, step_sign):
        rng = range(idx_from, idx_to, step_sign)
        for i in rng:
            j = i + step_sign
            dt = (x[j] - x[i])
            t, p = x[i], phi[i]
            k1 = F(t, p)
            k2 = F(t + dt / 2.0, p + dt * k1 / 2.0)
            k3 = F(t + dt / 2.0, p + dt * k2 / 2.0)
            k4 = F(t + dt, p + dt * k3)
            pn = p + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
            if not np.isfinite(pn) or abs(pn) > guard:
                raise BlowUp(float(x[j]), float(pn) if np.isfinite(pn) else math.inf)
            phi[j] = pn

    march(i0, x.shape[0] - 1, 1)
    march(i0, 0, -1)

    psi = np.empty_like(x)
    psi[i0] = 0.0
    seg = np.diff(x) * (phi[1:] + phi[:-1]) / 2.0
    psi[i0 + 1 :] = np.cumsum(seg[i0:])
    psi[:i0] = -np.cumsum(seg[:i0][::-1])[::-1]

    bt = 2.0 * av * phi + opbar.b(x)
    return RiccatiResult(grid=x, phi=phi, psi=psi, b_tilde=bt, phi_prime=F(x, phi))


@dataclass(frozen=True)
class Discretization:
    """mu-symmetric finite-volume matrix: tridiagonal of -L plus the weights."""

    x: np.ndarray
    d: np.ndarray
    e: np.ndarray
    mu: np.ndarray
    boundary: tuple

    @property
    def n_nodes(self) -> int:
        return self.x.shape[0]

    def lowest(self, k: int = 5):
        """Lowest k eigenvalues of the generator (0 >= l_0 >= l_1 >= ...)."""
        from .spectra import lowest_eigs_tridiag

        vals = lowest_eigs_tridiag(self.d, self.e, k)
        return -np.asarray(vals)

    def matrix(self) -> np.ndarray:
        """Dense generator matrix L; rows balance exactly up to c and loss."""
        n = self.n_nodes
        L = np.zeros((n, n))
        L[np.arange(n), np.arange(n)] = -self.d
        # unwind the mu-symmetrization: L_ij = -e_i sqrt(mu_j / mu_i)
        root = np.sqrt(self.mu)
        up = -self.e * root[1:] / root[:-1]
        dn = -self.e * root[:-1] / root[1:]
        L[np.arange(n - 1), np.arange(1, n)] = up
        L[np.arange(1, n), np.arange(n - 1)] = dn
        return L


def discretize(op: Operator1D, bc=None, quiet: bool = False) -> Discretization:
    """Finite-volume matrix of L = (d/dmu)(d/dnu-hat) + c on op.grid.

    Cell masses are (e^C / a) dx and face conductances e^C / dx with
    C = int b/a accumulated by Simpson's rule on quarter points, so the
    matrix is symmetric in L2(mu) exactly.  Dirichlet ends drop the boundary
    node; the severed coupling stays on the diagonal as loss.  Emits
    GridTooCoarse when the cell Peclet number |b| dx / a exceeds 2.
    """
    x = op.grid
    bc = tuple(op.boundary if bc is None else bc)
    if len(bc) != 2 or any(t not in _BC for t in bc):
        raise PreconditionViolated(f"boundary tags must be from {_BC}")
    M = x.shape[0] - 1
    dx = np.diff(x)
    av, bv, cv = op.coefficients()

    pe = np.abs(bv[:-1]) * dx / av[:-1]
    if not quiet and np.any(pe > 2.0):
        warnings.warn(
            f"cell Peclet number reaches {np.max(pe):.3g} > 2; "
            "refine the grid for trustworthy low modes",
            GridTooCoarse,
            stacklevel=2,
        )

    # C at nodes and faces: Simpson over each half-interval (quarter points)
    faces = (x[:-1] + x[1:]) / 2.0
    def slope(t):
        return op.b(t) / op.a(t)
    C = np.empty(2 * M + 1)
    C[0] = 0.0
    left_q = (x[:-1] + faces) / 2.0
    right_q = (faces + x[1:]) / 2.0
    g_nodes = slope(x)
    g_faces = slope(faces)
    g_lq = slope(left_q)
    g_rq = slope(right_q)
    half = dx / 2.0
    inc_left = half / 6.0 * (g_nodes[:-1] + 4.0 * g_lq + g_faces)
    inc_right = half / 6.0 * (g_faces + 4.0 * g_rq + g_nodes[1:])
    C[1::2] = inc_left
    C[2::2] = inc_right
    C = np.cumsum(C)
    C -= np.max(C)
    C_nodes = C[0::2]
    C_faces = C[1::2]

    w = np.exp(C_faces) / dx
    width = np.empty(M + 1)
    width[1:-1] = (x[2:] - x[:-2]) / 2.0
    width[0] = dx[0] / 2.0
    width[-1] = dx[-1] / 2.0
    mass = np.exp(C_nodes) / av * width

    keep = slice(1 if bc[0] == "dirichlet" else 0, M if bc[1] == "dirichlet" else None)
    idx = np.arange(M + 1)[keep]
    n = idx.shape[0]
    if n < 2:
        raise PreconditionViolated("fewer than two interior nodes remain")

    wl = np.zeros(M + 1)
    wr = np.zeros(M + 1)
    wl[1:] = w
    wr[:-1] = w
    if bc[0] == "neumann":
        wl[0] = 0.0
    if bc[1] == "neumann":
        wr[M] = 0.0
    d = ((wl[idx] + wr[idx]) / mass[idx]) - cv[idx]
    e = w[idx[:-1]] / np.sqrt(mass[idx[:-1]] * mass[idx[1:]])
    e = -e
    return Discretization(x=x[idx], d=d, e=e, mu=mass[idx], boundary=bc)


@dataclass(frozen=True)
class EigenCheck:
    n: int
    residual: float
    bound: float
    passed: bool


def verify_lh_eigen(h: SmoothFunction, n_max: int = 10, grid=None) -> list:
    """Residuals of the conjugated oscillator identity on h H_n.

    The operator (1/2) d2/dx2 - (x + h'/h) d/dx + [(h'/h)^2 + x h'/h
    - h''/(2h)] annihilates h H_n shifted by n: the residual r_n =
    L^h (h H_n) + n (h H_n) vanishes identically; each row reports its
    sup-norm over the grid and passes at 1e-8 (1 + sup|h H_n|).
    """
    x = np.linspace(-8.0, 8.0, 1601) if grid is None else np.asarray(grid, dtype=float)
    hv, h1, h2 = h(x)
    _check_nonzero(hv, x)
    phi = h1 / hv
    drift = -(x + phi)
    pot = phi * phi + x * phi - h2 / (2.0 * hv)
    rows = []
    for n, H in enumerate(hermite_polys(n_max)):
        Hv = H(x)
        H1 = H.diff(1)(x)
        H2 = H.diff(2)(x)
        g = hv * Hv
        g1 = h1 * Hv + hv * H1
        g2 = h2 * Hv + 2.0 * h1 * H1 + hv * H2
        r = 0.5 * g2 + drift * g1 + pot * g + n * g
        sup_r = float(np.max(np.abs(r)))
        bound = 1e-8 * (1.0 + float(np.max(np.abs(g))))
        rows.append(EigenCheck(n=n, residual=sup_r, bound=bound, passed=sup_r <= bound))
    return rows


def ou_multiplicity(n: int, d: int) -> int:
    """Number of d-tuples of nonnegative integers summing to n, exactly."""
    if n < 0 or d < 1:
        raise PreconditionViolated("need n >= 0 and d >= 1")
    return math.comb(n + d - 1, d - 1)
