"""Nonlocal magnetostatic energy of the extended trace and the stray potential.

The trace g = m1 - cos(alpha), extended by zero outside (-1,1), carries the
whole nonlocal part of the energy: E_mag = (1/4pi) int |xi| |g^(xi)|^2 dxi,
which equals half the Dirichlet energy of the harmonic extension of g. Three
independent routes to this number live here:

  * spectral: FFT multiplier |xi| on a padded periodic grid, plus the exact
    free-space image correction for the periodization (see SpectralOperator);
  * gagliardo: direct double-integral quadrature of the difference quotient;
  * extension: real-space quadrature of |grad v|^2 for the Poisson extension v.

The stray potential U itself (the harmonic conjugate construction) is
evaluated exactly for piecewise-linear traces, which is what the minimizer
produces; this powers the Pohozaev rings and the localized energy diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
from scipy.fft import next_fast_len, rfft, irfft

from .quadrature import gl_panel, halfplane_integral


def periodization_kernel(t, L: float = 8.0):
    """Closed-form kernel K_L(t) = (pi/2L)^2 / sin^2(pi t/2L) - 1/t^2.

    Summing the images of the free-space kernel -2/s^2 of |d/dx| over the
    2L-periodic lattice gives exactly this correction; it is smooth on
    (-2L, 2L) with K_L(0) = (pi/2L)^2 / 3.
    """
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    nz = t != 0
    out[nz] = (np.pi / (2 * L)) ** 2 / np.sin(np.pi * t[nz] / (2 * L)) ** 2 - 1.0 / t[nz] ** 2
    out[~nz] = (np.pi / (2 * L)) ** 2 / 3.0
    return out


class SpectralOperator:
    """|d/dx| and the magnetostatic energy on the padded uniform grid.

    The physical interval [-1,1] is padded to [-L, L] (g vanishes outside
    [-1,1] exactly). The raw periodic FFT energy carries an O((int g)^2/L^2)
    image error; with correct=True the exact correction
    (1/2pi) iint g(x) K_L(x-y) g(y) dx dy is added, making the result the
    free-space value up to trapezoid discretization only.
    """

    def __init__(self, M: int, L: float = 8.0, correct: bool = True):
        if L < 4:
            raise ValueError("padding L must be at least 4")
        self.M = M
        self.h = 2.0 / M
        self.L = L
        self.correct = correct
        self.n = int(round(2 * L / self.h))
        self.off = int(round((L - 1.0) / self.h))
        self.xi = 2 * np.pi * np.fft.rfftfreq(self.n, d=self.h)
        self.w = np.full_like(self.xi, 2.0)
        self.w[0] = 1.0
        if self.n % 2 == 0:
            self.w[-1] = 1.0
        m = M + 1
        t = self.h * np.arange(-(m - 1), m)
        self.nfft = next_fast_len(3 * m - 2)
        self._KLhat = rfft(periodization_kernel(t, L), self.nfft)
        self.m = m
        self.x = -1.0 + self.h * np.arange(m)

    def _corr_conv(self, g_phys):
        """Linear convolution (K_L * g) sampled on the physical nodes."""
        out = irfft(rfft(g_phys, self.nfft) * self._KLhat, self.nfft)
        return out[self.m - 1:2 * self.m - 1]

    def energy_grad(self, g_phys):
        """Magnetostatic energy and its gradient d E / d g_j (node-wise).

        The gradient carries the trapezoid weight h; the variational
        derivative as a function is grad/h.
        """
        g_phys = np.asarray(g_phys, dtype=float)
        if g_phys.shape != (self.m,):
            raise ValueError(f"trace must have {self.m} nodes")
        if not np.all(np.isfinite(g_phys)):
            raise ValueError("non-finite trace values")
        g = np.zeros(self.n)
        g[self.off:self.off + self.M + 1] = g_phys
        G = np.fft.rfft(g)
        E = (self.h ** 2 / (4 * self.L)) * np.sum(self.w * self.xi * np.abs(G) ** 2)
        absDg = np.fft.irfft(self.xi * G, n=self.n)[self.off:self.off + self.M + 1]
        if self.correct:
            conv = self._corr_conv(g_phys)
            E += (self.h ** 2 / (2 * np.pi)) * np.dot(g_phys, conv)
            grad = self.h * (absDg + (self.h / np.pi) * conv)
        else:
            grad = self.h * absDg
        return float(E), grad

    def energy(self, g_phys) -> float:
        return self.energy_grad(g_phys)[0]

    def apply_absD(self, g_phys):
        """|D| g on the physical nodes (no image correction)."""
        g = np.zeros(self.n)
        g[self.off:self.off + self.M + 1] = np.asarray(g_phys, dtype=float)
        G = np.fft.rfft(g)
        return np.fft.irfft(self.xi * G, n=self.n)[self.off:self.off + self.M + 1]

    def variational_derivative(self, g_phys):
        """delta E / delta g as a grid function; equals -du/dx1(.,0)."""
        _, grad = self.energy_grad(g_phys)
        return grad / self.h


@dataclass
class ExtendedTrace:
    """Trace values g = m1 - cos(alpha) on the physical nodes of a grid.

    band=False skips the saturation check (quadratic-model traces are not
    confined to [-1-cos a, 1-cos a]).
    """

    x: np.ndarray
    g: np.ndarray
    alpha: float
    band: bool = True

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.g = np.asarray(self.g, dtype=float)
        if self.x.shape != self.g.shape:
            raise ValueError("grid and values must match")
        if not np.all(np.isfinite(self.g)):
            raise ValueError("non-finite trace values")
        lo, hi = -1.0 - math.cos(self.alpha), 1.0 - math.cos(self.alpha)
        if self.band and (np.any(self.g < lo - 1e-9) or np.any(self.g > hi + 1e-9)):
            raise ValueError("trace leaves the admissible band [-1-cos a, 1-cos a]")
        if abs(self.g[0]) > 1e-12 or abs(self.g[-1]) > 1e-12:
            raise ValueError("trace must vanish at the interval endpoints")

    @classmethod
    def from_phase(cls, phase) -> "ExtendedTrace":
        g = np.cos(phase.phi) - math.cos(phase.alpha)
        g[0] = 0.0
        g[-1] = 0.0
        return cls(phase.x, g, phase.alpha)

    @property
    def M(self) -> int:
        return self.x.size - 1


def magnetostatic_energy(trace: ExtendedTrace, op: SpectralOperator | None = None) -> float:
    if op is None:
        op = SpectralOperator(trace.M)
    return op.energy(trace.g)


def magnetostatic_gradient(trace: ExtendedTrace, op: SpectralOperator | None = None):
    """Variational derivative |D|g (plus image correction) as a grid function."""
    if op is None:
        op = SpectralOperator(trace.M)
    return op.variational_derivative(trace.g)


def gagliardo_energy(gfun, B: float = 12.0, n: int = 400) -> float:
    """(1/4pi) iint (g(x)-g(y))^2/(x-y)^2 dx dy for a callable trace.

    Gauss-Legendre tensor quadrature on [-B,B]^2 with the diagonal replaced by
    its limit g'(x)^2, plus the exact tail integrals over |y| > B where g = 0.
    """
    xq, wq = gl_panel(-B, B, n)
    X, Y = np.meshgrid(xq, xq)
    F = (gfun(X) - gfun(Y)) ** 2
    D2 = (X - Y) ** 2
    np.fill_diagonal(D2, 1.0)
    fd = 1e-6
    dg = ((gfun(xq + fd) - gfun(xq - fd)) / (2 * fd)) ** 2
    np.fill_diagonal(F, dg)
    core = np.einsum("i,j,ij->", wq, wq, F / D2)
    tail = np.dot(wq, gfun(xq) ** 2 * (1.0 / (B - xq) + 1.0 / (B + xq)))
    return float((core + 2 * tail) / (4 * np.pi))


def _log1p_c(w):
    """Complex log1p: series for tiny arguments, plain log(1+w) otherwise."""
    out = np.log(1.0 + w)
    tiny = np.abs(w) < 1e-4
    if np.any(tiny):
        wt = w[tiny]
        out[tiny] = wt * (1.0 - wt * (0.5 - wt * (1.0 / 3.0 - 0.25 * wt)))
    return out


def _segment_moments(xk, gk, z):
    """Exact integrals of a piecewise-linear density against Cauchy kernels.

    Returns (I1, I2) with I1 = int g(t)/(t-z) dt and I2 = int g(t)/(t-z)^2 dt
    over the support of the grid xk, for an array of points z off the nodes.
    On each segment the density is written as c0(z) + c1 (t - z) so both
    antiderivatives are elementary in (t - z). The per-segment differences use
    the forms log1p(dx/T) and -dx/(T T') which stay accurate for |z| far from
    the support (the far-field substitution evaluates out to |z| ~ 1e14).
    """
    z = np.asarray(z, dtype=complex)
    zflat = z.reshape(-1)
    xk = np.asarray(xk, dtype=float)
    gk = np.asarray(gk, dtype=float)
    dx = np.diff(xk)
    slope = (np.diff(gk) / dx)[:, None]
    dxc = dx[:, None]
    I1 = np.empty(zflat.shape, dtype=complex)
    I2 = np.empty(zflat.shape, dtype=complex)
    lin = float(np.dot(slope[:, 0], dx))
    step = max(1, 4_000_000 // max(dx.size, 1))
    for i in range(0, zflat.size, step):
        zf = zflat[i:i + step].reshape(1, -1)
        T0 = xk[:-1, None] - zf
        T1 = xk[1:, None] - zf
        dlog = _log1p_c(dxc / T0)
        dinv = -dxc / (T0 * T1)
        c0 = gk[:-1, None] + slope * (zf - xk[:-1, None])
        I1[i:i + step] = np.sum(c0 * dlog, axis=0) + lin
        I2[i:i + step] = np.sum(-c0 * dinv + slope * dlog, axis=0)
    return I1.reshape(z.shape), I2.reshape(z.shape)


def poisson_derivative(gfun, z, support=(-1.0, 1.0), n_nodes: int = 1501):
    """V'(z) for the analytic completion V of the Poisson extension of g.

    v = Im V is the harmonic extension of g and |V'|^2 = |grad v|^2. The
    trace is sampled once on a uniform grid over its support and the Cauchy
    integral of the interpolant is evaluated exactly, so the result is
    uniformly accurate in z (error is the O(h^2) interpolation error only).
    """
    lo, hi = support
    xs = np.linspace(lo, hi, n_nodes)
    _, I2 = _segment_moments(xs, gfun(xs), z)
    return I2 / np.pi


def extension_energy(gfun, support=(-1.0, 1.0), R_far: float = 8.0,
                     n_nodes: int = 601) -> float:
    """Half the Dirichlet energy of the Poisson extension, by 2D quadrature.

    Independent of the spectral route: the extension gradient is evaluated in
    real space through the Cauchy kernel and integrated over the half-plane
    with endpoint patches. Returns (1/2) int |grad v|^2.

    The extension gradient of a trace with bounded slope is bounded, so the
    endpoint patches start at a small positive radius and the leftover
    half-disks are added back at one midpoint sample each.
    """
    lo, hi = support
    xs = np.linspace(lo, hi, n_nodes)
    gs = gfun(xs)

    def dens(Z):
        return np.abs(_segment_moments(xs, gs, Z)[1]) ** 2 / np.pi ** 2

    rc = 5e-4 * (hi - lo)
    sing = [(lo, rc), (hi, rc)]
    I = halfplane_integral(dens, sing, R_far=R_far, n_rad=10, n_ang=20, n_bulk=8)
    I += 0.5 * np.pi * rc * rc * (float(dens(np.complex128(lo + 0.5j * rc)))
                                  + float(dens(np.complex128(hi + 0.5j * rc))))
    return 0.5 * I


class StrayPotential:
    """Stray potential U for a piecewise-linear trace, by exact segment sums.

    U = Re V with V(z) = (1/pi) int g(t)/(t-z) dt; the Poisson extension
    v = Im V satisfies grad v = perp grad U, and U -> 0 at infinity. Both the
    value and the full gradient are exact for the piecewise-linear g, so the
    only error in downstream ring/ball integrals is the quadrature rule.
    """

    def __init__(self, trace: ExtendedTrace):
        nz = np.nonzero(np.abs(trace.g) > 0)[0]
        if nz.size == 0:
            j0, j1 = 0, trace.x.size - 1
        else:
            j0 = max(nz[0] - 1, 0)
            j1 = min(nz[-1] + 1, trace.x.size - 1)
        self.xk = trace.x[j0:j1 + 1]
        self.gk = trace.g[j0:j1 + 1]

    def value(self, z):
        if np.all(np.abs(self.gk) == 0.0):
            z = np.asarray(z, dtype=complex)
            out = np.zeros(z.shape)
            return out if out.ndim else 0.0
        I1, _ = _segment_moments(self.xk, self.gk, z)
        out = np.real(I1) / np.pi
        return out if out.ndim else float(out)

    def derivative(self, z):
        """V'(z); |V'| = |grad U| and grad U = (Re V', -Im V')."""
        if np.all(np.abs(self.gk) == 0.0):
            return np.zeros(np.asarray(z).shape, dtype=complex)
        _, I2 = _segment_moments(self.xk, self.gk, z)
        return I2 / np.pi

    def gradient(self, z):
        d = self.derivative(z)
        return np.stack([np.real(d), -np.imag(d)], axis=-1)

    def ring_integral(self, center: float, r: float, weight, n_ang: int = 64) -> float:
        """r-weighted integral over the upper half-circle of a gradient density.

        weight(dU, theta) maps the gradient samples (shape (n_ang, 2)) and
        angles to the density; returns int_{half circle} weight dsigma.
        """
        theta, wt = gl_panel(0.0, np.pi, n_ang)
        z = center + r * np.exp(1j * theta)
        dU = self.gradient(z)
        return float(np.dot(wt, weight(dU, theta)) * r)

    def halfball_energy(self, center: float, r: float, n_rad: int = 40,
                        n_ang: int = 48, log_panel: float = 0.5) -> float:
        """int over the half-ball B_r(center) of |grad U|^2, in polar-log coords."""
        # gradient of U is bounded near the axis for piecewise-linear g but
        # varies on the grid scale; start the log grading at a fraction of h
        h = np.min(np.diff(self.xk))
        lo = min(0.05 * h, 0.01 * r)
        s0, s1 = np.log(lo), np.log(r)
        n_pan = max(2, int(np.ceil((s1 - s0) / log_panel)))
        edges = np.linspace(s0, s1, n_pan + 1)
        st, wt = gl_panel(0.0, np.pi, n_ang)
        total = 0.0
        for e0, e1 in zip(edges[:-1], edges[1:]):
            ss, ws = gl_panel(e0, e1, n_rad)
            rr = np.exp(ss)
            Z = center + np.outer(rr, np.exp(1j * st))
            dens = np.abs(self.derivative(Z)) ** 2
            total += np.einsum("i,j,ij->", ws * rr * rr, wt, dens)
        # the innermost half-disk of radius lo: |grad U| is bounded there,
        # one midpoint sample suffices at this size
        d0 = np.abs(self.derivative(np.complex128(center + 0.5j * lo))) ** 2
        total += 0.5 * np.pi * lo * lo * float(d0)
        return float(total)

    def excised_energy(self, centers, r: float, R_far: float = 20.0) -> float:
        """int over the half-plane minus the balls B_r(centers) of |grad U|^2."""
        def dens(Z):
            return np.abs(self.derivative(Z)) ** 2

        sing = [(c, r) for c in centers]
        sing += [(float(self.xk[0]), 0.0), (float(self.xk[-1]), 0.0)]
        return halfplane_integral(dens, sing, R_far=R_far)


def trace_to_csv_rows(trace: ExtendedTrace):
    return zip(trace.x.tolist(), trace.g.tolist())
