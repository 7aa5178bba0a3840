"""Gradient-index optics analogue: refractive-index maps and an RK4 ray tracer.

Rays obey ``d/ds (n dr/ds) = grad n`` with ``s`` the arc length.  With
``t = dr/ds`` a unit vector this becomes

    dt/ds = (grad(n^2)/2 - (t . grad(n^2)/2) t) / n^2

which only needs ``n^2`` and its gradient, both available in closed form for
every profile.  Outside the lens region rays travel in straight lines.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .complex_core import Family, PotentialSpec
from .errors import NegativeIndexSquared, OutOfDomain


class Profile(enum.Enum):
    FROM_POTENTIAL = "from-potential"
    EATON_EXACT = "eaton-exact"
    EATON_APPROX = "eaton-approx"
    MONOMIAL = "monomial"


class Termination(enum.Enum):
    EXITED_DOMAIN = "ExitedDomain"
    MAX_STEPS = "MaxSteps"
    HIT_SINGULARITY = "HitSingularity"


@dataclass(frozen=True)
class IndexMap:
    """A radial index profile plus the disc it fills.

    ``region_radius`` is where the medium meets vacuum: ``a`` for the exact
    Eaton lens and ``2a`` for the near-centre power law (both where n = 1);
    ``r_out`` for monomial and potential-derived profiles.
    """

    profile: Profile
    a: Optional[float] = None
    phi: Optional[float] = None
    alpha: Optional[float] = None
    n: Optional[float] = None
    m: float = 1.0
    spec: Optional[PotentialSpec] = None
    r_out: float = 1.0
    r_min: Optional[float] = None

    @classmethod
    def eaton_exact(cls, a: float = 1.0, r_min: Optional[float] = None) -> "IndexMap":
        return cls(Profile.EATON_EXACT, a=a, r_out=a, r_min=r_min)

    @classmethod
    def eaton_approx(cls, a: float, phi: float, r_min: Optional[float] = None) -> "IndexMap":
        return cls(Profile.EATON_APPROX, a=a, phi=phi, r_out=2.0 * a, r_min=r_min)

    @classmethod
    def monomial(cls, alpha: float, n: float, m: float = 1.0, r_out: float = 1.0,
                 r_min: Optional[float] = None) -> "IndexMap":
        return cls(Profile.MONOMIAL, alpha=alpha, n=n, m=m, r_out=r_out, r_min=r_min)

    @classmethod
    def from_potential(cls, spec: PotentialSpec, r_out: float = 1.0,
                       r_min: Optional[float] = None) -> "IndexMap":
        return cls(Profile.FROM_POTENTIAL, spec=spec, m=spec.m, r_out=r_out, r_min=r_min)

    @classmethod
    def for_spec(cls, spec: PotentialSpec, r_out: float = 1.0) -> "IndexMap":
        """The natural optical profile of a spec (Eaton lenses keep their own form)."""
        if spec.family is Family.EATON_EXACT:
            return cls.eaton_exact(spec.a)
        if spec.family is Family.EATON_APPROX:
            return cls.eaton_approx(spec.a, spec.phi)
        return cls.monomial(spec.alpha, spec.n, spec.m, r_out=r_out)

    @property
    def region_radius(self) -> float:
        return self.r_out

    @property
    def exclusion(self) -> float:
        if self.r_min is not None:
            return self.r_min
        power = self._power
        if power is not None and power[1] == 0:
            # uniform medium: nothing to avoid at the centre
            return 0.0
        return 1e-3 * self.region_radius

    @property
    def _power(self):
        """(coefficient, exponent) with n^2 = coefficient * r**exponent, or None."""
        if self.profile is Profile.MONOMIAL:
            return 2.0 * self.m * self.alpha, self.n
        if self.profile is Profile.FROM_POTENTIAL:
            return 2.0 * self.spec.m * self.spec.alpha, self.spec.n
        if self.profile is Profile.EATON_APPROX:
            e2 = 2.0 * self.phi / (self.phi + math.pi)
            return (2.0 * self.a) ** e2, -e2
        return None

    def n2_grad(self, x: float, y: float):
        """(n^2, d(n^2)/dx, d(n^2)/dy) at a point; scalar floats for speed."""
        rr = x * x + y * y
        if self.profile is Profile.EATON_EXACT:
            r = math.sqrt(rr)
            two_a = 2.0 * self.a
            k = -two_a / (rr * r)
            return two_a / r - 1.0, k * x, k * y
        c, p = self._power
        if p == 0:
            return c, 0.0, 0.0
        n2 = c * rr ** (0.5 * p)
        k = p * n2 / rr
        return n2, k * x, k * y

    def n2(self, r):
        r = np.asarray(r, float)
        with np.errstate(divide="ignore"):
            if self.profile is Profile.EATON_EXACT:
                return 2.0 * self.a / r - 1.0
            c, p = self._power
            return c * np.power(r, p)


def index_at(imap: IndexMap, p) -> float:
    """Refractive index at a point ``(x, y)`` (tuple or ComplexPoint)."""
    x, y = (p.x, p.y) if hasattr(p, "x") else p
    r = math.hypot(x, y)
    if r < imap.exclusion:
        raise OutOfDomain(f"r={r} inside the exclusion radius {imap.exclusion}")
    if imap.profile is Profile.EATON_EXACT and r > 2.0 * imap.a:
        raise OutOfDomain(f"Eaton index undefined beyond r = 2a (r={r})")
    n2 = float(imap.n2(r))
    if n2 < 0:
        raise NegativeIndexSquared(f"n^2 = {n2} < 0 at r={r}")
    return math.sqrt(n2)


@dataclass
class RayState:
    position: tuple
    direction: tuple
    s: float = 0.0


@dataclass
class RayPath:
    """Sampled ray; arrays are aligned with increasing arc length ``s``."""

    s: np.ndarray
    x: np.ndarray
    y: np.ndarray
    dx: np.ndarray
    dy: np.ndarray
    n_idx: np.ndarray
    termination: Termination
    deflection: Optional[float]
    rotation: float
    bouguer_drift: float
    entry: Optional[RayState] = None

    @property
    def samples(self) -> list:
        return [RayState((x, y), (dx, dy), s)
                for s, x, y, dx, dy in zip(self.s, self.x, self.y, self.dx, self.dy)]

    @property
    def final(self) -> RayState:
        return RayState((self.x[-1], self.y[-1]), (self.dx[-1], self.dy[-1]), self.s[-1])


def _rk4(imap: IndexMap, x, y, tx, ty, h):
    n2g = imap.n2_grad

    def rhs(x, y, tx, ty):
        n2, gx, gy = n2g(x, y)
        k = 0.5 * (gx * tx + gy * ty)
        return tx, ty, (0.5 * gx - k * tx) / n2, (0.5 * gy - k * ty) / n2

    a1, b1, c1, d1 = rhs(x, y, tx, ty)
    hh = 0.5 * h
    a2, b2, c2, d2 = rhs(x + hh * a1, y + hh * b1, tx + hh * c1, ty + hh * d1)
    a3, b3, c3, d3 = rhs(x + hh * a2, y + hh * b2, tx + hh * c2, ty + hh * d2)
    a4, b4, c4, d4 = rhs(x + h * a3, y + h * b3, tx + h * c3, ty + h * d3)
    h6 = h / 6.0
    x += h6 * (a1 + 2 * a2 + 2 * a3 + a4)
    y += h6 * (b1 + 2 * b2 + 2 * b3 + b4)
    tx += h6 * (c1 + 2 * c2 + 2 * c3 + c4)
    ty += h6 * (d1 + 2 * d2 + 2 * d3 + d4)
    norm = math.hypot(tx, ty)
    return x, y, tx / norm, ty / norm


def _entry_distance(x, y, tx, ty, R) -> Optional[float]:
    """Distance along the line to the first crossing of the circle |r| = R."""
    b = x * tx + y * ty
    c = x * x + y * y - R * R
    disc = b * b - c
    if disc < 0:
        return None
    lam = -b - math.sqrt(disc)
    if lam < 0:
        return None
    return lam


def trace_ray(imap: IndexMap, start: RayState, step: float, max_steps: int = 1_000_000) -> RayPath:
    """Integrate one ray through the lens region with fixed-step RK4.

    A start outside the region is first carried in a straight line to the
    boundary.  The last step is shortened so the exit lands exactly on the
    boundary.  ``deflection`` is the accumulated rotation of the direction,
    signed positive when the ray bends in the sense of its own angular
    momentum about the centre (i.e. toward the centre).
    """
    if step <= 0:
        raise ValueError("step must be positive")
    R = imap.region_radius
    x, y = map(float, start.position)
    tx, ty = map(float, start.direction)
    norm = math.hypot(tx, ty)
    tx, ty = tx / norm, ty / norm
    s = float(start.s)
    S, X, Y, TX, TY = [s], [x], [y], [tx], [ty]
    if math.hypot(x, y) > R * (1 + 1e-12):
        lam = _entry_distance(x, y, tx, ty, R)
        if lam is None:
            raise OutOfDomain("ray does not reach the lens region")
        x, y, s = x + lam * tx, y + lam * ty, s + lam
        S.append(s); X.append(x); Y.append(y); TX.append(tx); TY.append(ty)
    entry = RayState((x, y), (tx, ty), s)
    ang_mom = x * ty - y * tx
    b0 = math.sqrt(imap.n2_grad(x, y)[0]) * ang_mom
    r_min = imap.exclusion
    rotation = 0.0
    termination = Termination.MAX_STEPS
    for _ in range(max_steps):
        nx_, ny_, ntx, nty = _rk4(imap, x, y, tx, ty, step)
        rn = math.hypot(nx_, ny_)
        if rn >= R:
            def miss(sig):
                px, py, _, _ = _rk4(imap, x, y, tx, ty, sig)
                return math.hypot(px, py) - R
            sig = brentq(miss, 0.0, step, xtol=1e-15, rtol=4 * np.finfo(float).eps) \
                if miss(0.0) < 0 else 0.0
            nx_, ny_, ntx, nty = _rk4(imap, x, y, tx, ty, sig) if sig > 0 else (x, y, tx, ty)
            h_taken = sig
            termination = Termination.EXITED_DOMAIN
        elif rn < r_min:
            termination = Termination.HIT_SINGULARITY
            break
        else:
            h_taken = step
        rotation += math.atan2(tx * nty - ty * ntx, tx * ntx + ty * nty)
        x, y, tx, ty = nx_, ny_, ntx, nty
        s += h_taken
        S.append(s); X.append(x); Y.append(y); TX.append(tx); TY.append(ty)
        if termination is Termination.EXITED_DOMAIN:
            break
    X, Y = np.array(X), np.array(Y)
    TX, TY = np.array(TX), np.array(TY)
    rr = np.hypot(X, Y)
    inside = rr <= R * (1 + 1e-12)
    n_idx = np.where(inside, np.sqrt(np.maximum(imap.n2(np.maximum(rr, 1e-300)), 0.0)), 1.0)
    bou = n_idx * (X * TY - Y * TX)
    if b0 != 0:
        drift = float(np.max(np.abs(bou[inside] - b0)) / abs(b0))
    else:
        drift = float(np.max(np.abs(bou[inside])))
    deflection = None
    if termination is Termination.EXITED_DOMAIN:
        sign = math.copysign(1.0, ang_mom) if ang_mom != 0 else 1.0
        deflection = rotation * sign
    return RayPath(np.array(S), X, Y, TX, TY, n_idx, termination, deflection, rotation,
                   drift, entry)


def entry_state(imap: IndexMap, b: float) -> RayState:
    """Ray travelling along +x at height ``b``, placed on the region boundary."""
    R = imap.region_radius
    if abs(b) >= R:
        raise OutOfDomain(f"impact parameter {b} outside the lens entrance (radius {R})")
    return RayState((-math.sqrt(R * R - b * b), float(b)), (1.0, 0.0), 0.0)


@dataclass
class DeflectionRow:
    b: float
    deflection: Optional[float]
    termination: str
    path: Optional[RayPath] = field(default=None, repr=False)


def deflection_curve(imap: IndexMap, impact_parameters: Sequence[float], step: float,
                     max_steps: int = 1_000_000) -> list:
    """One trace per impact parameter; failures are recorded per row."""
    rows = []
    for b in impact_parameters:
        try:
            path = trace_ray(imap, entry_state(imap, b), step, max_steps)
        except OutOfDomain:
            rows.append(DeflectionRow(float(b), None, "OutOfDomain"))
            continue
        rows.append(DeflectionRow(float(b), path.deflection, path.termination.value, path))
    return rows
