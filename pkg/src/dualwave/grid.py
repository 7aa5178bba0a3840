"""Cell-centred sample lattices and second-order difference operators.

Both geometries are orthogonal coordinate systems ``(xi, eta)`` with scale
factors ``h1``, ``h2``:

* Cartesian: ``(x, y)``, ``h1 = h2 = 1``.
* Annular, linear radii: ``(r, theta)``, ``h1 = 1``, ``h2 = r``.
* Annular, log radii: ``(log r, theta)``, ``h1 = h2 = r`` (conformal).

Arrays are shaped ``(n_eta, n_xi)``.  Refining doubles the node count per
axis, which halves both steps exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from .errors import StencilOutOfDomain

MIN_STENCIL_NODES = 5


@dataclass(frozen=True)
class Cartesian:
    x0: float
    x1: float
    y0: float
    y1: float
    nx: int
    ny: int


@dataclass(frozen=True)
class Annular:
    r_min: float
    r_max: float
    nr: int
    ntheta: int
    log_radial: bool = False
    theta0: float = 0.0
    theta1: float = 2.0 * math.pi


@dataclass(frozen=True)
class Grid2D:
    geometry: Union[Cartesian, Annular]

    def __post_init__(self):
        g = self.geometry
        if isinstance(g, Cartesian):
            if not (g.x1 > g.x0 and g.y1 > g.y0):
                raise ValueError("cartesian bounds must be increasing")
            n = (g.nx, g.ny)
        else:
            if not (0 < g.r_min < g.r_max):
                raise ValueError("annulus needs 0 < r_min < r_max")
            if not g.theta1 > g.theta0:
                raise ValueError("annulus angular range must be increasing")
            n = (g.nr, g.ntheta)
        if min(n) < 1:
            raise ValueError("grid needs at least one node per axis")

    @classmethod
    def cartesian(cls, x0, x1, y0, y1, nx, ny=None) -> "Grid2D":
        return cls(Cartesian(float(x0), float(x1), float(y0), float(y1), int(nx),
                             int(nx if ny is None else ny)))

    @classmethod
    def annular(cls, r_min, r_max, nr, ntheta, log_radial=False, theta0=0.0,
                theta1=2.0 * math.pi) -> "Grid2D":
        return cls(Annular(float(r_min), float(r_max), int(nr), int(ntheta), bool(log_radial),
                           float(theta0), float(theta1)))

    @property
    def is_polar(self) -> bool:
        return isinstance(self.geometry, Annular)

    @property
    def shape(self) -> tuple[int, int]:
        g = self.geometry
        return (g.ny, g.nx) if not self.is_polar else (g.ntheta, g.nr)

    @property
    def size(self) -> int:
        a, b = self.shape
        return a * b

    def _bounds(self):
        g = self.geometry
        if not self.is_polar:
            return (g.x0, g.x1), (g.y0, g.y1)
        if g.log_radial:
            return (math.log(g.r_min), math.log(g.r_max)), (g.theta0, g.theta1)
        return (g.r_min, g.r_max), (g.theta0, g.theta1)

    @property
    def steps(self) -> tuple[float, float]:
        (a0, a1), (b0, b1) = self._bounds()
        n_eta, n_xi = self.shape
        return (a1 - a0) / n_xi, (b1 - b0) / n_eta

    @property
    def h(self) -> float:
        return max(self.steps)

    def refined(self, factor: int = 2) -> "Grid2D":
        g = self.geometry
        if self.is_polar:
            return Grid2D(replace(g, nr=g.nr * factor, ntheta=g.ntheta * factor))
        return Grid2D(replace(g, nx=g.nx * factor, ny=g.ny * factor))

    def logical(self):
        """1-D node coordinates (xi, eta)."""
        (a0, _), (b0, _) = self._bounds()
        dxi, deta = self.steps
        n_eta, n_xi = self.shape
        return a0 + (np.arange(n_xi) + 0.5) * dxi, b0 + (np.arange(n_eta) + 0.5) * deta

    def nodes(self):
        """(x, y, r, theta_explicit); theta_explicit is None on Cartesian grids."""
        xi, eta = self.logical()
        XI, ETA = np.meshgrid(xi, eta)
        if not self.is_polar:
            return XI, ETA, np.hypot(XI, ETA), None
        r = np.exp(XI) if self.geometry.log_radial else XI
        return r * np.cos(ETA), r * np.sin(ETA), r, ETA

    def describe(self) -> dict:
        g = self.geometry
        d = {"kind": "annular" if self.is_polar else "cartesian"}
        d.update({k: getattr(g, k) for k in g.__dataclass_fields__})
        d["steps"] = list(self.steps)
        return d

    def require_stencil(self):
        if min(self.shape) < MIN_STENCIL_NODES:
            raise StencilOutOfDomain(
                f"grid {self.shape[1]}x{self.shape[0]} too coarse: need at least "
                f"{MIN_STENCIL_NODES} nodes per axis for a 5-point stencil")


def parse_grid(text: str) -> Grid2D:
    """Parse ``cartesian:x0,x1,y0,y1,nx,ny`` or ``annular|logpolar:rmin,rmax,nr,nt[,t0,t1]``."""
    kind, _, rest = text.partition(":")
    vals = [v for v in rest.split(",") if v.strip()]
    kind = kind.strip().lower()
    try:
        if kind == "cartesian":
            if len(vals) not in (5, 6):
                raise ValueError
            x0, x1, y0, y1 = map(float, vals[:4])
            nx = int(vals[4])
            ny = int(vals[5]) if len(vals) == 6 else nx
            return Grid2D.cartesian(x0, x1, y0, y1, nx, ny)
        if kind in ("annular", "logpolar"):
            if len(vals) not in (4, 6):
                raise ValueError
            r0, r1 = float(vals[0]), float(vals[1])
            nr, nt = int(vals[2]), int(vals[3])
            extra = {}
            if len(vals) == 6:
                extra = dict(theta0=float(vals[4]), theta1=float(vals[5]))
            return Grid2D.annular(r0, r1, nr, nt, log_radial=kind == "logpolar", **extra)
    except ValueError:
        pass
    raise ValueError(f"cannot parse grid spec {text!r}")


class Stencil:
    """Compact second-order operators on the interior nodes of a grid.

    ``valid`` flags usable nodes; results are NaN except on interior nodes,
    i.e. valid nodes whose four neighbours are valid too.
    """

    def __init__(self, grid: Grid2D, valid: Optional[np.ndarray] = None):
        grid.require_stencil()
        self.grid = grid
        shape = grid.shape
        valid = np.ones(shape, bool) if valid is None else np.asarray(valid, bool)
        inner = np.zeros(shape, bool)
        inner[1:-1, 1:-1] = (valid[1:-1, 1:-1] & valid[1:-1, 2:] & valid[1:-1, :-2]
                             & valid[2:, 1:-1] & valid[:-2, 1:-1])
        self.valid = valid
        self.interior = inner
        self.dxi, self.deta = grid.steps
        self._metric()

    def _metric(self):
        g = self.grid
        xi, eta = g.logical()
        n_eta, n_xi = g.shape
        ones = np.ones((n_eta - 2, n_xi - 2))
        if not g.is_polar:
            self.h1 = self.h2 = self.jac = ones
            self.w_xi_p = self.w_xi_m = self.w_eta = ones
            return
        if g.geometry.log_radial:
            r = np.exp(xi[1:-1])[None, :] * ones
            self.h1 = self.h2 = r
            self.jac = r * r
            self.w_xi_p = self.w_xi_m = self.w_eta = ones
        else:
            r = xi[1:-1][None, :] * ones
            self.h1 = ones
            self.h2 = r
            self.jac = r
            self.w_xi_p = r + 0.5 * self.dxi
            self.w_xi_m = r - 0.5 * self.dxi
            self.w_eta = 1.0 / r

    def _embed(self, core: np.ndarray) -> np.ndarray:
        dtype = np.result_type(core.dtype, float)
        out = np.full(self.grid.shape, np.nan, dtype=dtype)
        out[1:-1, 1:-1] = core
        out[~self.interior] = np.nan
        return out

    def grad(self, f: np.ndarray):
        """Orthonormal-frame components of the gradient."""
        g_xi = (f[1:-1, 2:] - f[1:-1, :-2]) / (2.0 * self.dxi) / self.h1
        g_eta = (f[2:, 1:-1] - f[:-2, 1:-1]) / (2.0 * self.deta) / self.h2
        return self._embed(g_xi), self._embed(g_eta)

    def div_k_grad(self, k: np.ndarray, f: np.ndarray) -> np.ndarray:
        """div(k grad f), flux form with face-averaged k."""
        c = f[1:-1, 1:-1]
        kc = k[1:-1, 1:-1]
        kxp = 0.5 * (k[1:-1, 2:] + kc)
        kxm = 0.5 * (k[1:-1, :-2] + kc)
        kep = 0.5 * (k[2:, 1:-1] + kc)
        kem = 0.5 * (k[:-2, 1:-1] + kc)
        fx = (self.w_xi_p * kxp * (f[1:-1, 2:] - c)
              - self.w_xi_m * kxm * (c - f[1:-1, :-2])) / self.dxi ** 2
        fe = self.w_eta * (kep * (f[2:, 1:-1] - c) - kem * (c - f[:-2, 1:-1])) / self.deta ** 2
        return self._embed((fx + fe) / self.jac)

    def laplacian(self, f: np.ndarray) -> np.ndarray:
        c = f[1:-1, 1:-1]
        fx = (self.w_xi_p * (f[1:-1, 2:] - c) - self.w_xi_m * (c - f[1:-1, :-2])) / self.dxi ** 2
        fe = self.w_eta * (f[2:, 1:-1] - 2.0 * c + f[:-2, 1:-1]) / self.deta ** 2
        return self._embed((fx + fe) / self.jac)
