"""Single-wall core energy on the half-disk, and its eps -> 0 extraction.

The rescaled single-wall problem lives on the upper half-disk of radius 1:
a harmonic field w with trace mu on the diameter, mu(0) = 1 at the wall
center, mu = 1 - gamma on the outer arc, and the energy

    E(mu) = (eps/2) int_{-1}^{1} (mu')^2 / (1 - mu^2) dx1 + (1/2) int |grad w|^2.

The trace is parametrized as mu = cos(psi) with psi(0) = 0 pinned, which
makes the exchange term a plain 1D Dirichlet energy of psi. The PDE part is
reduced once per (gamma, eps) to a dense boundary operator (Dirichlet-to-
Neumann Schur complement) on the diameter nodes of a log-polar Q1 grid, so
each minimization costs a few dense matvecs per iteration.

The quantity f(eps) = lam^2 inf E - (pi/2) gamma^2 lam with lam = log(1/delta)
converges to the single-wall core constant e(gamma); extract_core_energy runs
a ladder of eps values and extrapolates with one 1/lam correction term.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
import scipy.sparse as sparse
from scipy.sparse.linalg import splu
from scipy.optimize import minimize as scipy_minimize

from .minimizer import TAIL_COST_INTEGRAL


def q1_stiffness(ds: float, dt: float, n_s: int, n_t: int):
    """Q1 stiffness for -Laplace on the uniform (n_s+1) x (n_t+1) strip grid.

    Node index k = i*(n_t+1) + j for s_i = s_min + i*ds, theta_j = j*dt.
    w^T K w = int (w_s^2 + w_t^2) ds dtheta (no 1/2); in log-polar coordinates
    this is exactly the Dirichlet integral of w(r, theta).
    """
    kss = np.array([[2, -2, -1, 1], [-2, 2, 1, -1],
                    [-1, 1, 2, -2], [1, -1, -2, 2]]) / 6.0
    ktt = np.array([[2, 1, -1, -2], [1, 2, -2, -1],
                    [-1, -2, 2, 1], [-2, -1, 1, 2]]) / 6.0
    K_el = (dt / ds) * kss + (ds / dt) * ktt
    npt = n_t + 1
    rows, cols, vals = [], [], []
    for i in range(n_s):
        for j in range(n_t):
            n00 = i * npt + j
            loc = [n00, n00 + npt, n00 + npt + 1, n00 + 1]
            for p in range(4):
                for q in range(4):
                    rows.append(loc[p])
                    cols.append(loc[q])
                    vals.append(K_el[p, q])
    N = (n_s + 1) * npt
    return sparse.coo_matrix((vals, (rows, cols)), shape=(N, N)).tocsr()


class CoreProblem:
    """Half-disk wall-core problem for one gamma = d - cos(alpha) in (0, 2).

    A wall of negative orientation maps onto this range by the flip
    mu -> -mu, which leaves the energy invariant; only |gamma| matters.

    The grid is log-polar: s = log r from log(delta/rmin_factor) to 0. The
    inner circle is left free (natural boundary condition); the factor must
    keep r_min at or below delta/10 so the core is fully resolved.
    """

    def __init__(self, gamma: float, eps: float, ds: float = 0.125,
                 n_t: int = 64, rmin_factor: float = 20.0):
        if not 0.0 < gamma < 2.0:
            raise ValueError("gamma must lie in (0, 2)")
        if rmin_factor < 10.0:
            raise ValueError("inner radius must be at most delta/10")
        if not 0.0 < eps <= 0.5:
            raise ValueError("eps must lie in (0, 1/2]")
        self.gamma = gamma
        self.eps = eps
        self.delta = eps * math.log(1.0 / eps)
        self.lam = math.log(1.0 / self.delta)
        self.rmin = self.delta / rmin_factor
        s_min = math.log(self.rmin)
        self.n_s = int(math.ceil(-s_min / ds))
        self.ds = -s_min / self.n_s
        self.n_t = n_t
        self.dt = math.pi / n_t
        n_s = self.n_s
        npt = n_t + 1
        K = q1_stiffness(self.ds, self.dt, n_s, n_t)
        N = (n_s + 1) * npt
        idx = np.arange(N).reshape(n_s + 1, npt)
        arc = idx[n_s, :]
        diam_r = idx[:n_s, 0]
        diam_l = idx[:n_s, n_t]
        diam = np.concatenate([diam_r, diam_l])
        fixed = np.concatenate([arc, diam])
        free_mask = np.ones(N, dtype=bool)
        free_mask[fixed] = False
        self.free_idx = np.where(free_mask)[0]
        Kff = K[self.free_idx][:, self.free_idx].tocsc()
        Kfd = K[self.free_idx][:, diam]
        Kfa = K[self.free_idx][:, arc]
        Kdd = K[diam][:, diam]
        Kda = K[diam][:, arc]
        Kaa = K[arc][:, arc]
        lu = splu(Kff)
        X = lu.solve(Kfd.toarray())
        S = np.asarray(Kdd.toarray() - Kfd.T.toarray() @ X)
        self.S = 0.5 * (S + S.T)
        ones_arc = np.ones(arc.size)
        Ya = lu.solve(Kfa @ ones_arc)
        self.b_vec = np.asarray(Kda @ ones_arc - Kfd.T @ Ya).ravel()
        self.c0 = float(ones_arc @ (Kaa @ ones_arc) - (Kfa @ ones_arc) @ Ya)
        self.arcval = 1.0 - gamma
        self._lu = lu
        self._K = K
        self._Kfd, self._Kfa = Kfd, Kfa
        self.idx, self.diam, self.arc = idx, diam, arc
        s_nodes = s_min + self.ds * np.arange(n_s)
        self.xr = np.exp(s_nodes)
        self.dx_cells = np.diff(np.concatenate([[0.0], self.xr, [1.0]]))

    def dirichlet_energy(self, mu_diam) -> float:
        """int |grad w|^2 for diameter data (right side then left), arc fixed."""
        mu_diam = np.asarray(mu_diam, dtype=float)
        c = self.arcval
        return float(mu_diam @ (self.S @ mu_diam)
                     + 2.0 * c * (self.b_vec @ mu_diam) + c * c * self.c0)

    def solve_field(self, mu_diam):
        """Full node array of the harmonic field for the given diameter data."""
        mu_diam = np.asarray(mu_diam, dtype=float)
        N = self._K.shape[0]
        w = np.zeros(N)
        w[self.diam] = mu_diam
        w[self.arc] = self.arcval
        rhs = -(self._Kfd @ mu_diam + self._Kfa @ (self.arcval * np.ones(self.arc.size)))
        w[self.free_idx] = self._lu.solve(rhs)
        return w

    def energy_grad(self, psi_rl):
        """Total core energy and gradient in the psi parametrization.

        psi_rl stacks the right-diameter then left-diameter node values; the
        center is pinned at psi = 0 and the corners at +/- arccos(1-gamma).
        """
        n = self.n_s
        psir, psil = psi_rl[:n], psi_rl[n:]
        A0 = math.acos(1.0 - self.gamma)
        ex = 0.0
        gr = np.zeros_like(psi_rl)
        for sgn, ps, sl in ((+1, psir, slice(0, n)), (-1, psil, slice(n, 2 * n))):
            path = np.concatenate([[0.0], ps, [sgn * A0]])
            d = np.diff(path)
            ex += 0.5 * self.eps * np.sum(d * d / self.dx_cells)
            gpath = np.zeros(n + 2)
            gpath[1:] += self.eps * d / self.dx_cells
            gpath[:-1] -= self.eps * d / self.dx_cells
            gr[sl] += gpath[1:-1]
        psi = np.concatenate([psir, psil])
        mu = np.cos(psi)
        Smu = self.S @ mu + self.arcval * self.b_vec
        Ed = float(mu @ Smu + self.arcval * (self.b_vec @ mu)
                   + self.arcval ** 2 * self.c0)
        gr += Smu * (-np.sin(psi))
        return ex + 0.5 * Ed, gr

    def construction_mu(self):
        """Logarithmic competitor trace on the diameter nodes (right, left)."""
        d2 = self.delta ** 2
        xs = np.concatenate([self.xr, -self.xr])
        f = (np.log(xs * xs + d2) - math.log(d2)) / (math.log(1.0 + d2) - math.log(d2))
        return 1.0 - self.gamma * f

    def psi_from_mu(self, mu):
        n = self.n_s
        psi = np.empty(2 * n)
        psi[:n] = np.arccos(np.clip(mu[:n], -1.0, 1.0))
        psi[n:] = -np.arccos(np.clip(mu[n:], -1.0, 1.0))
        return psi

    def construction_energy(self) -> float:
        return self.energy_grad(self.psi_from_mu(self.construction_mu()))[0]

    def closed_form_bound(self) -> float:
        """Competitor bound: pi g^2/(2 s) + g^2 T / (g (2-g) log(1/eps) s).

        s = log sqrt(1/delta^2 + 1) is the effective number of dyadic shells
        and T the tail cost integral.
        """
        g = self.gamma
        s_half = math.log(math.sqrt(1.0 / self.delta ** 2 + 1.0))
        return (0.5 * math.pi * g * g / s_half
                + g * g * TAIL_COST_INTEGRAL / (g * (2.0 - g) * math.log(1.0 / self.eps) * s_half))


def halfdisk_dirichlet_energy(problem: CoreProblem, mu_diam) -> float:
    return problem.dirichlet_energy(mu_diam)


@dataclass
class CoreMinimizeResult:
    problem: CoreProblem
    psi: np.ndarray
    energy: float
    f_value: float
    converged: bool
    iterations: int

    @property
    def mu(self):
        return np.cos(self.psi)

    @property
    def lam(self) -> float:
        return self.problem.lam


def minimize_core(gamma: float, eps: float, ds: float = 0.125, n_t: int = 64,
                  rmin_factor: float = 20.0, maxiter: int = 20_000) -> CoreMinimizeResult:
    problem = CoreProblem(gamma, eps, ds=ds, n_t=n_t, rmin_factor=rmin_factor)
    psi0 = problem.psi_from_mu(problem.construction_mu())
    res = scipy_minimize(problem.energy_grad, psi0, jac=True, method="L-BFGS-B",
                         options=dict(maxiter=maxiter, ftol=1e-18, gtol=1e-13, maxcor=30))
    E = float(res.fun)
    lam = problem.lam
    f = lam * lam * E - 0.5 * math.pi * gamma * gamma * lam
    return CoreMinimizeResult(problem=problem, psi=res.x, energy=E, f_value=f,
                              converged=bool(res.success or res.status == 1),
                              iterations=int(res.nit))


def profile_law_sup(result: CoreMinimizeResult, window=(0.1, 0.9)) -> float:
    """sup over the window of |lam (mu - (1-gamma)) - gamma log(1/x)|.

    The minimizer trace follows the logarithmic law outside the core; the sup
    shrinks as eps decreases.
    """
    pb = result.problem
    n = pb.n_s
    mu_r = np.cos(result.psi[:n])
    mask = (pb.xr > window[0]) & (pb.xr < window[1])
    prof = (mu_r[mask] - (1.0 - pb.gamma)) * pb.lam
    target = pb.gamma * np.log(1.0 / pb.xr[mask])
    return float(np.max(np.abs(prof - target)))


DEFAULT_CORE_LADDER = (1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5)


@dataclass
class CoreEnergyResult:
    gamma: float
    epsilons: np.ndarray
    lams: np.ndarray
    inf_energies: np.ndarray
    f_values: np.ndarray
    e_gamma: float
    uncertainty: float
    e_drop_largest: float
    e_two_term: float
    runs: list

    def summary(self) -> dict:
        return {"e_gamma": self.e_gamma, "uncertainty": self.uncertainty}


def extract_core_energy(gamma: float, epsilons=DEFAULT_CORE_LADDER, ds: float = 0.125,
                        n_t: int = 64, rmin_factor: float = 20.0) -> CoreEnergyResult:
    """Ladder of core minimizations and the extrapolated constant e(gamma).

    Fits f(eps) = e + c/lam; the reported uncertainty is the shift of e when
    the coarsest rung is dropped. Needs at least 5 rungs.
    """
    epsilons = tuple(sorted(set(float(e) for e in epsilons), reverse=True))
    if len(epsilons) < 5:
        raise ValueError("core extraction needs at least 5 eps values")
    runs = [minimize_core(gamma, e, ds=ds, n_t=n_t, rmin_factor=rmin_factor)
            for e in epsilons]
    lams = np.array([r.lam for r in runs])
    fs = np.array([r.f_value for r in runs])
    A = np.column_stack([np.ones_like(lams), 1.0 / lams])
    e_fit = float(np.linalg.lstsq(A, fs, rcond=None)[0][0])
    e_drop = float(np.linalg.lstsq(A[1:], fs[1:], rcond=None)[0][0])
    A2 = np.column_stack([np.ones_like(lams), 1.0 / lams, 1.0 / lams ** 2])
    e_two = float(np.linalg.lstsq(A2, fs, rcond=None)[0][0])
    return CoreEnergyResult(
        gamma=gamma, epsilons=np.array(epsilons), lams=lams,
        inf_energies=np.array([r.energy for r in runs]), f_values=fs,
        e_gamma=e_fit, uncertainty=abs(e_fit - e_drop),
        e_drop_largest=e_drop, e_two_term=e_two, runs=runs)
