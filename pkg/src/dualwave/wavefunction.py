"""Dual wavefunctions psi_u = u exp(i v/hbar) and psi_v = v exp(i u/hbar)."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .complex_core import (BranchWindow, ComplexPoint, HolomorphicPair, PotentialSpec,
                           TWO_PI)
from .errors import EmptyGrid
from .grid import Grid2D


class Which(enum.Enum):
    U = "u"
    V = "v"


@dataclass(frozen=True)
class DualWavefunction:
    pair: HolomorphicPair
    which: Which = Which.U
    hbar: float = 1.0

    @classmethod
    def from_spec(cls, spec: PotentialSpec, which: Which = Which.U, **window) -> "DualWavefunction":
        return cls(HolomorphicPair.from_spec(spec, **window), which, spec.hbar)

    @property
    def mass(self) -> float:
        return self.pair.mass

    def swapped(self) -> "DualWavefunction":
        other = Which.V if self.which is Which.U else Which.U
        return DualWavefunction(self.pair, other, self.hbar)

    def split(self, u, v):
        """(amplitude, action) for this member; action is unwrapped, not reduced mod 2*pi."""
        return (u, v) if self.which is Which.U else (v, u)

    def psi_polar(self, r, theta) -> np.ndarray:
        f = self.pair.f_polar(r, theta)
        amp, action = self.split(f.real, f.imag)
        return amp * np.exp(1j * action / self.hbar)


def eval_psi(w: DualWavefunction, p: ComplexPoint) -> complex:
    r, theta = w.pair.point_polar(p)
    return complex(w.psi_polar(r, theta))


def amplitude_phase(w: DualWavefunction, p: ComplexPoint) -> tuple[float, float]:
    """Signed amplitude and phase (radians, unwrapped) at ``p``."""
    r, theta = w.pair.point_polar(p)
    f = complex(w.pair.f_polar(r, theta))
    amp, action = w.split(f.real, f.imag)
    return amp, action / w.hbar


@dataclass(frozen=True)
class ExtendedWavefunction:
    """A dual solution carried along a third axis zeta with wavenumber ``k_zeta``.

    ``energy`` defaults to ``k_zeta**2 / 2m + E_shift``; pass it explicitly to
    build deliberately off-shell states.
    """

    base: DualWavefunction
    k_zeta: float = 0.0
    energy: Optional[float] = None

    @property
    def energy_shift(self) -> float:
        spec = self.base.pair.spec
        return spec.energy_shift if spec is not None else 0.0

    @property
    def E(self) -> float:
        if self.energy is not None:
            return self.energy
        return self.k_zeta ** 2 / (2.0 * self.base.mass) + self.energy_shift


def eval_psi_extended(w: ExtendedWavefunction, p: ComplexPoint, zeta: float, t: float) -> complex:
    amp, phase = amplitude_phase(w.base, p)
    hbar = w.base.hbar
    arg = phase + (w.k_zeta * zeta - w.E * t) / hbar
    return amp * complex(math.cos(arg), math.sin(arg))


@dataclass
class SingleValuednessReport:
    period: Optional[float]
    verified: dict
    mismatch: dict
    multivalued: dict

    def to_dict(self) -> dict:
        return {"period": self.period, "verified": self.verified, "mismatch": self.mismatch,
                "multivalued": self.multivalued}


def _ring_mismatch(w: DualWavefunction, radii, thetas, shift: float) -> float:
    r, th = np.meshgrid(radii, thetas)
    a = w.psi_polar(r, th)
    b = w.psi_polar(r, th + shift)
    return float(np.max(np.abs(b - a)) / np.max(np.abs(a)))


def single_valuedness(spec: PotentialSpec, radii=(0.5, 1.0, 1.7), n_angles: int = 64,
                      tol: float = 1e-10) -> SingleValuednessReport:
    """Angular period of both duals, checked numerically on sample rings.

    The comparison uses a window twice as wide as the period so that both
    ``theta`` and ``theta + period`` are legitimate branch angles.
    """
    pair = HolomorphicPair.from_spec(spec)
    if spec.is_logarithmic:
        period = TWO_PI
    else:
        period = 4.0 * math.pi / abs(spec.n + 2.0)
    wide = pair.with_window(BranchWindow(pair.window.theta0, 2.0 * period))
    # skip the exact edge so both angles stay inside the half-open window
    thetas = wide.window.theta0 + (np.arange(n_angles) + 0.5) * period / n_angles
    radii = np.asarray(radii, float)
    verified, mismatch, multi = {}, {}, {}
    for which in Which:
        w = DualWavefunction(wide, which, spec.hbar)
        mm = _ring_mismatch(w, radii, thetas, period)
        mismatch[which.value] = mm
        if spec.is_logarithmic and which is Which.V:
            # v = c*theta grows without bound: no period exists
            verified[which.value] = None
            multi[which.value] = True
        else:
            verified[which.value] = bool(mm <= tol)
            multi[which.value] = not verified[which.value]
    return SingleValuednessReport(period, verified, mismatch, multi)


@dataclass
class FieldSample:
    """Tabulated dual wavefunction on a grid; ``mask`` is True on excluded nodes."""

    w: DualWavefunction
    grid: Grid2D
    x: np.ndarray
    y: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    u: np.ndarray
    v: np.ndarray
    psi: np.ndarray
    g_abs2: np.ndarray
    mask: np.ndarray
    r_exclude: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def amplitude(self) -> np.ndarray:
        return self.w.split(self.u, self.v)[0]

    @property
    def action(self) -> np.ndarray:
        return self.w.split(self.u, self.v)[1]

    @property
    def valid(self) -> np.ndarray:
        return ~self.mask

    @property
    def n_unmasked(self) -> int:
        return int(np.count_nonzero(~self.mask))


def _cut_mask(theta: np.ndarray) -> np.ndarray:
    """Nodes whose 5-point stencil straddles a jump of the branch angle."""
    jump = np.zeros(theta.shape, bool)
    d_xi = np.abs(np.diff(theta, axis=1)) > math.pi
    d_eta = np.abs(np.diff(theta, axis=0)) > math.pi
    jump[:, 1:] |= d_xi
    jump[:, :-1] |= d_xi
    jump[1:, :] |= d_eta
    jump[:-1, :] |= d_eta
    return jump


def default_exclusion(pair: HolomorphicPair, grid: Grid2D) -> float:
    if not pair.singular_at_origin:
        return 0.0
    _, _, r, _ = grid.nodes()
    return 1e-3 * float(np.max(r))


def node_mask(pair: HolomorphicPair, grid: Grid2D, r_exclude: Optional[float] = None):
    """(mask, theta, r_exclude) for ``pair`` sampled on ``grid``."""
    x, y, r, theta_explicit = grid.nodes()
    if r_exclude is None:
        r_exclude = default_exclusion(pair, grid)
    if theta_explicit is None:
        theta = pair.resolve_theta(x, y)
    else:
        theta = pair.window.resolve(theta_explicit)
    mask = r < r_exclude
    if pair.singular_at_origin:
        mask |= r == 0.0
    if not pair.single_valued_on_plane:
        mask |= _cut_mask(theta)
    return mask, theta, r_exclude


def sample_grid(w: DualWavefunction, grid: Grid2D, r_exclude: Optional[float] = None) -> FieldSample:
    mask, theta, r_exclude = node_mask(w.pair, grid, r_exclude)
    if mask.all():
        raise EmptyGrid("every grid node is masked")
    x, y, r, _ = grid.nodes()
    with np.errstate(all="ignore"):
        f = w.pair.f_polar(r, theta)
        u, v = f.real, f.imag
        amp, action = w.split(u, v)
        psi = amp * np.exp(1j * action / w.hbar)
        g2 = w.pair.g_abs2(r)
    nan = np.nan
    u = np.where(mask, nan, u)
    v = np.where(mask, nan, v)
    psi = np.where(mask, complex(nan, nan), psi)
    g2 = np.where(mask, nan, g2)
    return FieldSample(w, grid, x, y, r, theta, u, v, psi, g2, mask, r_exclude)
