"""Holomorphic generators f(z), g(z) = f'(z) with explicit branch windows.

Everything is evaluated in polar form, ``z = r exp(i theta)``, where ``theta``
is the *unwrapped* branch angle.  Powers ``z**p`` are ``r**p exp(i p theta)``,
so the branch is entirely controlled by where ``theta`` is allowed to live.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import BranchViolation, DualWaveError, SingularPoint, StencilOutOfDomain

TWO_PI = 2.0 * math.pi


class Family(enum.Enum):
    MONOMIAL = "monomial"
    EATON_EXACT = "eaton-exact"
    EATON_APPROX = "eaton-approx"


class Form(enum.Enum):
    POWER_LAW = "power-law"
    LOGARITHMIC = "logarithmic"


@dataclass(frozen=True)
class ComplexPoint:
    """A point of the plane, optionally pinned to a branch angle.

    ``theta=None`` means the angle is resolved inside whatever branch window
    the point is evaluated in.  An explicit ``theta`` is taken literally and
    must lie in that window.
    """

    x: float
    y: float
    theta: Optional[float] = None

    @classmethod
    def polar(cls, r: float, theta: float) -> "ComplexPoint":
        if r < 0:
            raise ValueError(f"radius must be non-negative, got {r}")
        return cls(r * math.cos(theta), r * math.sin(theta), float(theta))

    @classmethod
    def cartesian(cls, x: float, y: float) -> "ComplexPoint":
        return cls(float(x), float(y), None)

    @property
    def r(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True)
class PotentialSpec:
    """One member of the factorizable family, ``V - E_shift = -alpha r**n``.

    The Eaton families are stored together with the monomial parameters they
    imply, so every downstream consumer only needs ``n``, ``alpha`` and
    ``energy_shift``.
    """

    family: Family = Family.MONOMIAL
    n: float = 0.0
    alpha: float = 0.5
    m: float = 1.0
    hbar: float = 1.0
    energy_shift: float = 0.0
    a: Optional[float] = None
    phi: Optional[float] = None

    def __post_init__(self):
        for name in ("alpha", "m", "hbar"):
            val = getattr(self, name)
            if not (val > 0 and math.isfinite(val)):
                raise DualWaveError(f"{name} must be positive and finite, got {val}")
        if self.family is not Family.MONOMIAL and not (self.a and self.a > 0):
            raise DualWaveError(f"lens radius a must be positive, got {self.a}")
        if self.family is Family.EATON_APPROX and not (self.phi and self.phi > 0):
            raise DualWaveError(f"refraction angle phi must be positive, got {self.phi}")

    @classmethod
    def monomial(cls, n: float, alpha: Optional[float] = None, m: float = 1.0,
                 hbar: float = 1.0, energy_shift: float = 0.0) -> "PotentialSpec":
        # default units: sqrt(2 m alpha) = 1
        if alpha is None:
            alpha = 1.0 / (2.0 * m)
        return cls(Family.MONOMIAL, float(n), float(alpha), float(m), float(hbar),
                   float(energy_shift))

    @classmethod
    def eaton_exact(cls, a: float = 1.0, m: float = 1.0, hbar: float = 1.0) -> "PotentialSpec":
        return cls(Family.EATON_EXACT, -1.0, a / m, m, hbar, -1.0 / (2.0 * m), a=a)

    @classmethod
    def eaton_approx(cls, a: float, phi: float, m: float = 1.0,
                     hbar: float = 1.0) -> "PotentialSpec":
        e = phi / (phi + math.pi)
        alpha = (2.0 * a) ** (2.0 * e) / (2.0 * m)
        return cls(Family.EATON_APPROX, -2.0 * e, alpha, m, hbar, 0.0, a=a, phi=phi)

    @property
    def is_logarithmic(self) -> bool:
        return self.n == -2.0

    @property
    def g_scale(self) -> float:
        """sqrt(2 m alpha), the modulus of g at r = 1."""
        return math.sqrt(2.0 * self.m * self.alpha)

    def depth(self, r):
        """alpha * r**n, i.e. E_shift - V = |g|^2 / 2m."""
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return self.alpha * np.power(r, self.n)

    def potential(self, x, y):
        return self.energy_shift - self.depth(np.hypot(x, y))

    def perturbed(self, param: str, fraction: float) -> "PotentialSpec":
        """Copy with ``alpha`` or ``n`` moved by a relative ``fraction``.

        A zero exponent is moved by ``fraction`` in absolute terms, otherwise
        the perturbation would vanish for the constant potential.
        """
        if param == "alpha":
            return replace(self, family=Family.MONOMIAL, alpha=self.alpha * (1.0 + fraction))
        if param == "n":
            return replace(self, family=Family.MONOMIAL,
                           n=self.n + fraction * max(abs(self.n), 1.0))
        raise DualWaveError(f"cannot perturb parameter {param!r}")

    def to_dict(self) -> dict:
        return {
            "family": self.family.value, "n": self.n, "alpha": self.alpha, "m": self.m,
            "hbar": self.hbar, "energy_shift": self.energy_shift, "a": self.a, "phi": self.phi,
        }


@dataclass(frozen=True)
class BranchWindow:
    """Half-open angular window ``[theta0, theta0 + period)``."""

    theta0: float = 0.0
    period: float = TWO_PI

    def contains(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return (theta >= self.theta0) & (theta < self.theta0 + self.period)

    def widened(self, factor: float = 2.0) -> "BranchWindow":
        return BranchWindow(self.theta0, self.period * factor)

    def resolve(self, theta) -> np.ndarray:
        """Map angles of geometric points into the window.

        Angles already inside are kept (they may be on a higher sheet).  Others
        are shifted by multiples of 2*pi and, for windows narrower than 2*pi,
        further reduced modulo the period, which leaves every generator value
        unchanged.
        """
        theta = np.asarray(theta, dtype=float)
        inside = self.contains(theta)
        t = self.theta0 + np.mod(theta - self.theta0, TWO_PI)
        if self.period < TWO_PI:
            t = self.theta0 + np.mod(t - self.theta0, self.period)
        return np.where(inside, theta, t)


def default_period(form: Form, exponent: float) -> float:
    if form is Form.LOGARITHMIC or exponent == 0:
        return TWO_PI
    return TWO_PI / abs(exponent)


@dataclass(frozen=True)
class HolomorphicPair:
    """f(z) and its derivative g(z) for one of the two supported forms.

    PowerLaw: ``f = c z**p``, ``g = c p z**(p-1)``.
    Logarithmic: ``f = c log z``, ``g = c / z``.
    """

    form: Form
    coefficient: float
    exponent: float = 1.0
    window: BranchWindow = field(default_factory=BranchWindow)
    spec: Optional[PotentialSpec] = None

    @classmethod
    def power_law(cls, coefficient: float, exponent: float, theta0: float = 0.0,
                  period: Optional[float] = None) -> "HolomorphicPair":
        if period is None:
            period = default_period(Form.POWER_LAW, exponent)
        return cls(Form.POWER_LAW, float(coefficient), float(exponent),
                   BranchWindow(theta0, period))

    @classmethod
    def logarithmic(cls, coefficient: float, theta0: float = 0.0,
                    period: float = TWO_PI) -> "HolomorphicPair":
        return cls(Form.LOGARITHMIC, float(coefficient), 0.0, BranchWindow(theta0, period))

    @classmethod
    def from_spec(cls, spec: PotentialSpec, theta0: float = 0.0,
                  period: Optional[float] = None) -> "HolomorphicPair":
        k = spec.g_scale
        if spec.is_logarithmic:
            form, c, p = Form.LOGARITHMIC, k, 0.0
        else:
            form, c, p = Form.POWER_LAW, 2.0 * k / (spec.n + 2.0), 1.0 + spec.n / 2.0
        if period is None:
            period = default_period(form, p)
        return cls(form, c, p, BranchWindow(theta0, period), spec)

    def with_window(self, window: BranchWindow) -> "HolomorphicPair":
        return replace(self, window=window)

    @property
    def singular_at_origin(self) -> bool:
        return self.form is Form.LOGARITHMIC or self.exponent < 1.0

    @property
    def single_valued_on_plane(self) -> bool:
        """True when f has no branch cut (integer power)."""
        return self.form is Form.POWER_LAW and float(self.exponent).is_integer()

    @property
    def mass(self) -> float:
        return self.spec.m if self.spec is not None else 1.0

    # vectorised kernels -------------------------------------------------

    def f_polar(self, r, theta) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        c = self.coefficient
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.form is Form.LOGARITHMIC:
                return c * (np.log(r) + 1j * theta)
            p = self.exponent
            return c * np.power(r, p) * np.exp(1j * p * theta)

    def g_polar(self, r, theta) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        c = self.coefficient
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.form is Form.LOGARITHMIC:
                return c / r * np.exp(-1j * theta)
            q = self.exponent - 1.0
            return c * self.exponent * np.power(r, q) * np.exp(1j * q * theta)

    def g_abs2(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        c = self.coefficient
        with np.errstate(divide="ignore"):
            if self.form is Form.LOGARITHMIC:
                return c * c / (r * r)
            return (c * self.exponent) ** 2 * np.power(r, 2.0 * (self.exponent - 1.0))

    def resolve_theta(self, x, y) -> np.ndarray:
        return self.window.resolve(np.arctan2(y, x))

    def point_polar(self, p: ComplexPoint) -> tuple[float, float]:
        """(r, theta) of ``p`` inside this pair's window, with domain checks."""
        r = p.r
        if r == 0.0 and self.singular_at_origin:
            raise SingularPoint("generator is singular or branch-ambiguous at z = 0")
        if p.theta is None:
            theta = float(self.resolve_theta(p.x, p.y))
        else:
            theta = p.theta
            if not self.window.contains(theta):
                w = self.window
                raise BranchViolation(
                    f"theta={theta} outside branch window [{w.theta0}, {w.theta0 + w.period})")
        return r, theta


def eval_f(pair: HolomorphicPair, p: ComplexPoint) -> complex:
    r, theta = pair.point_polar(p)
    return complex(pair.f_polar(r, theta))


def eval_g(pair: HolomorphicPair, p: ComplexPoint) -> complex:
    r, theta = pair.point_polar(p)
    return complex(pair.g_polar(r, theta))


def decompose_uv(pair: HolomorphicPair, p: ComplexPoint) -> tuple[float, float]:
    f = eval_f(pair, p)
    return f.real, f.imag


def _stencil_uv(pair: HolomorphicPair, p: ComplexPoint, h: float):
    r0, theta0 = pair.point_polar(p)
    z0 = complex(r0 * math.cos(theta0), r0 * math.sin(theta0))
    out = []
    for dz in (h, -h, 1j * h, -1j * h):
        z = z0 + dz
        r = abs(z)
        if r == 0.0 or z0 == 0:
            if pair.singular_at_origin:
                raise StencilOutOfDomain("stencil touches the singular point")
            theta = theta0
        else:
            # continue the angle from the centre instead of re-resolving it
            theta = theta0 + math.atan2((z / z0).imag, (z / z0).real)
        if not pair.window.contains(theta):
            raise StencilOutOfDomain("stencil crosses the branch window edge")
        out.append(complex(pair.f_polar(r, theta)))
    return out


def cauchy_riemann_residual(pair: HolomorphicPair, p: ComplexPoint,
                            h: float) -> tuple[float, float]:
    """Central-difference residuals (u_x - v_y, u_y + v_x) at ``p``."""
    if h <= 0:
        raise ValueError("step must be positive")
    if pair.singular_at_origin and p.r <= h:
        raise StencilOutOfDomain(f"stencil of width {h} reaches the origin")
    fxp, fxm, fyp, fym = _stencil_uv(pair, p, h)
    fx = (fxp - fxm) / (2.0 * h)
    fy = (fyp - fym) / (2.0 * h)
    return fx.real - fy.imag, fy.real + fx.imag
