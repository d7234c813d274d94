"""Problem instances, scales, Mobius geometry of (-1,1), and phase liftings.

Everything downstream works with a wall configuration (positions, signs, wall
angle) on the interval (-1,1) and a continuous phase lifting of the in-plane
magnetization m = (cos phi, sin phi). This module owns those types plus the
hyperbolic-type metric on (-1,1) that controls pair interactions.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
import math

import numpy as np

TWO_PI = 2.0 * math.pi


def mobius_metric(b: float, c: float) -> float:
    """Metric rho(b,c) = |b-c| / (1 - b*c) on (-1,1)."""
    if not (-1.0 < b < 1.0 and -1.0 < c < 1.0):
        raise ValueError(f"mobius_metric arguments must lie in (-1,1), got {b}, {c}")
    return abs(b - c) / (1.0 - b * c)


def mobius_transform(b: float, z):
    """Disk automorphism of the upper half-plane picture: z -> (z+b)/(1+b z).

    Fixes -1 and +1, sends 0 to b. Accepts scalars or arrays of complex points
    in the closed upper half-plane.
    """
    if not -1.0 < b < 1.0:
        raise ValueError(f"mobius_transform center must lie in (-1,1), got {b}")
    z = np.asarray(z, dtype=complex)
    out = (z + b) / (1.0 + b * z)
    return out if out.ndim else complex(out)


def default_branches(alpha: float, signs) -> tuple[int, ...]:
    """Minimal-rotation branch assignment.

    Walk the walls left to right starting from phi(-1) = alpha. Each wall with
    sign +1 must pin phi to an even multiple of pi, sign -1 to an odd multiple.
    Pick the admissible value closest to the previous pin; break exact ties
    (opposite-sign neighbours sit exactly pi away on both sides) toward the
    smaller value, i.e. decreasing phase.

    Returns the integers p_n with phi(a_n) = p_n * pi.
    """
    branches = []
    prev = alpha
    for sgn in signs:
        if sgn > 0:
            base = TWO_PI * round(prev / TWO_PI)
        else:
            base = math.pi + TWO_PI * round((prev - math.pi) / TWO_PI)
        cands = (base - TWO_PI, base, base + TWO_PI)
        best = min(cands, key=lambda c: (round(abs(c - prev), 12), c))
        branches.append(int(round(best / math.pi)))
        prev = best
    return tuple(branches)


@dataclass(frozen=True)
class WallConfig:
    """Prescribed wall positions and signs with the wall angle alpha.

    positions must be strictly increasing inside (-1,1); signs are +-1. The
    branch integers fix the pinned phase values phi(a_n) = branches[n] * pi and
    default to the minimal-rotation assignment.
    """

    alpha: float
    positions: tuple[float, ...]
    signs: tuple[int, ...]
    branches: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not 0.0 < self.alpha < math.pi:
            raise ValueError(f"alpha must lie in (0, pi) strictly, got {self.alpha}")
        pos = tuple(float(p) for p in self.positions)
        sgn = tuple(int(s) for s in self.signs)
        if len(pos) == 0:
            raise ValueError("need at least one wall")
        if len(pos) != len(sgn):
            raise ValueError("positions and signs must have equal length")
        if any(s not in (-1, 1) for s in sgn):
            raise ValueError(f"signs must be +-1, got {sgn}")
        if pos[0] <= -1.0 or pos[-1] >= 1.0:
            raise ValueError(f"wall positions must lie inside (-1,1), got {pos}")
        if any(b >= a for a, b in zip(pos[1:], pos[:-1])):
            raise ValueError(f"wall positions must be strictly increasing, got {pos}")
        br = tuple(int(b) for b in self.branches) or default_branches(self.alpha, sgn)
        if len(br) != len(pos):
            raise ValueError("branches must have one integer per wall")
        for s, p in zip(sgn, br):
            if s == 1 and p % 2 != 0:
                raise ValueError(f"sign +1 needs an even multiple of pi, got {p}")
            if s == -1 and p % 2 == 0:
                raise ValueError(f"sign -1 needs an odd multiple of pi, got {p}")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "signs", sgn)
        object.__setattr__(self, "branches", br)

    @property
    def N(self) -> int:
        return len(self.positions)

    @property
    def gammas(self) -> np.ndarray:
        return np.array([s - math.cos(self.alpha) for s in self.signs])

    @property
    def Gamma(self) -> float:
        return float(np.sum(self.gammas**2))

    @property
    def rho(self) -> float:
        """Half the minimal gap, counting the boundary at distance doubled."""
        a = self.positions
        gaps = [2.0 * (a[0] + 1.0), 2.0 * (1.0 - a[-1])]
        gaps += [a[i + 1] - a[i] for i in range(len(a) - 1)]
        return 0.5 * min(gaps)

    @property
    def pinned_values(self) -> tuple[float, ...]:
        return tuple(p * math.pi for p in self.branches)

    def snapped(self, M: int) -> "WallConfig":
        """Snap positions to the nearest node of the uniform M-interval grid.

        The snapped positions are the authoritative instance used everywhere,
        including the closed-form interaction energy, so the discrete and
        analytic computations refer to the same walls.
        """
        h = 2.0 / M
        idx = [int(round((p + 1.0) / h)) for p in self.positions]
        if len(set(idx)) != len(idx):
            raise ValueError(f"grid M={M} too coarse: walls collide after snapping")
        if idx[0] <= 0 or idx[-1] >= M:
            raise ValueError(f"grid M={M}: wall snapped onto the interval boundary")
        snapped = tuple(-1.0 + h * i for i in idx)
        return replace(self, positions=snapped)

    def wall_indices(self, M: int) -> list[int]:
        h = 2.0 / M
        return [int(round((p + 1.0) / h)) for p in self.positions]

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "positions": list(self.positions),
            "signs": list(self.signs),
            "branches": list(self.branches),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WallConfig":
        return cls(
            alpha=float(d["alpha"]),
            positions=tuple(d["positions"]),
            signs=tuple(d["signs"]),
            branches=tuple(d.get("branches", ())),
        )


@dataclass(frozen=True)
class Scales:
    """The small parameter and the derived core width delta = eps*log(1/eps)."""

    epsilon: float

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 0.5:
            raise ValueError(f"epsilon must lie in (0, 1/2], got {self.epsilon}")

    @property
    def delta(self) -> float:
        return self.epsilon * math.log(1.0 / self.epsilon)

    @property
    def log_inv_delta(self) -> float:
        return math.log(1.0 / self.delta)


@dataclass
class PhaseField:
    """Discretized lifting phi on the uniform grid over [-1, 1].

    x: nodes, phi: values, pinned: boolean mask of nodes whose value is fixed
    (the two endpoints and every wall node).
    """

    x: np.ndarray
    phi: np.ndarray
    pinned: np.ndarray
    alpha: float

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.phi = np.asarray(self.phi, dtype=float)
        self.pinned = np.asarray(self.pinned, dtype=bool)
        if self.x.shape != self.phi.shape or self.x.shape != self.pinned.shape:
            raise ValueError("x, phi, pinned must have identical shapes")
        if not np.all(np.isfinite(self.phi)):
            raise ValueError("phase contains non-finite values")

    @property
    def h(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def m1(self) -> np.ndarray:
        return np.cos(self.phi)

    @property
    def m2(self) -> np.ndarray:
        return np.sin(self.phi)

    def copy(self) -> "PhaseField":
        return PhaseField(self.x.copy(), self.phi.copy(), self.pinned.copy(), self.alpha)


def lift_and_wind(phase: PhaseField, tol: float = 1e-9) -> int | None:
    """Winding number of m = (cos phi, sin phi) when it closes up.

    Returns (phi(1) - phi(-1)) / 2pi as an integer if m(1) = m(-1) within
    tolerance, None otherwise. A closed-up m whose phase difference is not
    close to a multiple of 2pi indicates a broken lifting and raises.
    """
    dphi = float(phase.phi[-1] - phase.phi[0])
    closed = (
        abs(math.cos(phase.phi[-1]) - math.cos(phase.phi[0])) <= tol
        and abs(math.sin(phase.phi[-1]) - math.sin(phase.phi[0])) <= tol
    )
    if not closed:
        return None
    k = dphi / TWO_PI
    if abs(k - round(k)) > 1e-6:
        raise ValueError(f"closed trace with non-integer winding {k}; lifting bug")
    return int(round(k))


def phase_from_m1(x, m1, wall_idx, pins, alpha, end_sign=None):
    """Lift a profile m1 to a continuous phase hitting the pinned values.

    Between consecutive pinned nodes the lifting is phi = s*arccos(m1) + c
    with the sign s in {+1,-1} and the shift c (a multiple of pi) solved from
    the endpoint pins; when no arccos branch connects them (different parity
    plateaus) fall back to a linear ramp. The final segment runs from the last
    wall to x=1 where only cos phi = cos alpha is required; end_sign selects
    phi(1) = c + end_sign*alpha among the admissible values, defaulting to the
    one nearest the last pin (ties toward the smaller value).
    """
    x = np.asarray(x, dtype=float)
    A = np.arccos(np.clip(np.asarray(m1, dtype=float), -1.0, 1.0))
    n = x.size
    nodes = [0] + list(wall_idx) + [n - 1]
    vals = [alpha] + list(pins)

    last = vals[-1]
    cands = []
    for k in (-1, 0, 1):
        base = TWO_PI * round((last - alpha) / TWO_PI) + k * TWO_PI
        cands.append(alpha + base)
        base = TWO_PI * round((last + alpha) / TWO_PI) + k * TWO_PI
        cands.append(-alpha + base)
    if end_sign is None:
        end = min(cands, key=lambda c: (round(abs(c - last), 12), c))
    else:
        want = [c for c in cands if math.copysign(1.0, math.sin(c)) == math.copysign(1.0, end_sign * math.sin(alpha))]
        end = min(want, key=lambda c: (round(abs(c - last), 12), c))
    vals.append(end)

    phi = np.empty(n)
    for i0, i1, v0, v1 in zip(nodes[:-1], nodes[1:], vals[:-1], vals[1:]):
        seg = slice(i0, i1 + 1)
        placed = False
        for s in (1.0, -1.0):
            # need s*A(i0) + c = v0 and s*A(i1) + c = v1 with a single c
            c0 = v0 - s * A[i0]
            c1 = v1 - s * A[i1]
            if abs(c0 - c1) < 1e-9:
                phi[seg] = s * A[seg] + c0
                placed = True
                break
        if not placed:
            phi[seg] = np.interp(x[seg], (x[i0], x[i1]), (v0, v1))
    phi[0] = alpha
    for i, p in zip(wall_idx, pins):
        phi[i] = p
    phi[-1] = end
    return phi
