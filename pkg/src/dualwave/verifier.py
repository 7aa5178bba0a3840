"""Residuals of the Schrödinger, Madelung and Cauchy-Riemann identities.

Two independent routes are provided.  The analytic route evaluates the
Laplacian through the Wirtinger form ``lap = 4 g conj(g) d2/(df dconj(f))``
and must vanish to round-off.  The finite-difference route samples fields on
a grid, applies the second-order operators from :mod:`dualwave.grid`, and is
judged by its observed convergence order under a factor-two refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .complex_core import ComplexPoint, Form, HolomorphicPair, PotentialSpec
from .errors import SignViolation, SingularPoint
from .grid import Grid2D, Stencil
from .wavefunction import (DualWavefunction, ExtendedWavefunction, FieldSample, Which,
                           eval_psi_extended, sample_grid)

ORDER_BAND = (1.8, 2.2)
EXACT_TOL = 1e-9
AMPLITUDE_FLOOR = 1e-6

IDENTITIES = (
    "schrodinger",
    "hamilton_jacobi",
    "continuity",
    "bohm_potential",
    "cauchy_riemann",
    "harmonicity",
    "orthogonality",
    "gradient_norm",
)


@dataclass
class ResidualReport:
    """Norms of one residual field.

    ``l2`` is the root-mean-square over the evaluated nodes, so
    ``l2 <= linf <= linf * sqrt(count)``.
    """

    name: str
    l2: float
    linf: float
    h: float
    count: int
    excluded: int = 0
    observed_order: Optional[float] = None
    tolerances: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    residual: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        d = {
            "name": self.name, "l2": self.l2, "linf": self.linf, "h": self.h,
            "count": self.count, "excluded": self.excluded,
            "observed_order": self.observed_order, "tolerances": dict(self.tolerances),
        }
        d.update(self.extra)
        return d


def _report(name: str, values: np.ndarray, where: np.ndarray, grid: Grid2D,
            excluded: int = 0, **tolerances) -> ResidualReport:
    sel = np.abs(values[where])
    if sel.size == 0:
        raise SingularPoint(f"{name}: no interior nodes left to evaluate")
    # np.sum reduces pairwise, which keeps the result order-independent enough
    l2 = float(np.sqrt(np.sum(sel * sel) / sel.size))
    linf = float(np.max(sel))
    return ResidualReport(name, l2, linf, grid.h, int(sel.size), excluded,
                          tolerances=tolerances, residual=values)


def potential_term(pair: HolomorphicPair, r, potential: Optional[PotentialSpec] = None,
                   energy_offset: float = 0.0) -> np.ndarray:
    """V - E_shift on the sampled radii (optionally from another spec, for negative controls)."""
    spec = potential if potential is not None else pair.spec
    if spec is None:
        base = -pair.g_abs2(r) / (2.0 * pair.mass)
    else:
        base = -spec.depth(r)
    return base - energy_offset


def _prepare(w: DualWavefunction, grid: Grid2D, r_exclude=None):
    grid.require_stencil()
    sample = sample_grid(w, grid, r_exclude)
    return sample, Stencil(grid, sample.valid)


# ---------------------------------------------------------------- analytic path

def _wirtinger_mixed(which: Which, f: complex, hbar: float) -> complex:
    """d2 psi / (df dconj(f)) for psi written as a function of f and conj(f)."""
    fb = f.conjugate()
    if which is Which.U:
        a = (f + fb) / 2.0
        a_f, a_fb = 0.5, 0.5
        k_f, k_fb = 1.0 / (2.0 * hbar), -1.0 / (2.0 * hbar)
    else:
        a = (f - fb) / 2j
        a_f, a_fb = 1.0 / 2j, -1.0 / 2j
        k_f = k_fb = 1j / (2.0 * hbar)
    phase = np.exp(k_f * f + k_fb * fb)
    return complex(phase * (a_f * k_fb + a_fb * k_f + a * k_f * k_fb))


def analytic_laplacian(w: DualWavefunction, p: ComplexPoint) -> complex:
    r, theta = w.pair.point_polar(p)
    f = complex(w.pair.f_polar(r, theta))
    g = complex(w.pair.g_polar(r, theta))
    return 4.0 * (g * g.conjugate()).real * _wirtinger_mixed(w.which, f, w.hbar)


def schrodinger_residual_analytic(w: DualWavefunction, p: ComplexPoint) -> float:
    """Relative residual of ``-(hbar^2/2m) lap psi + (V - E_shift) psi`` at ``p``.

    Normalised by ``|(V - E_shift) psi|``; returns the absolute value when
    that vanishes (e.g. on a nodal line or for a degenerate pair).
    """
    r, theta = w.pair.point_polar(p)
    psi = complex(w.psi_polar(r, theta))
    vterm = float(potential_term(w.pair, r))
    lap = analytic_laplacian(w, p)
    res = abs(-(w.hbar ** 2) / (2.0 * w.mass) * lap + vterm * psi)
    scale = abs(vterm * psi)
    return res / scale if scale > 0 else res


def _fd4_second(fun, h: float) -> complex:
    # fourth-order central second derivative along one axis
    return (-fun(2 * h) + 16 * fun(h) - 30 * fun(0.0) + 16 * fun(-h) - fun(-2 * h)) / (12 * h * h)


def _fd4_first(fun, h: float) -> complex:
    return (-fun(2 * h) + 8 * fun(h) - 8 * fun(-h) + fun(-2 * h)) / (12 * h)


def extended_residual(w: ExtendedWavefunction, p: ComplexPoint, zeta: float, t: float,
                      method: str = "analytic", h: float = 1e-3, relative: bool = False) -> float:
    """|[-(hbar^2/2m) lap3 + V - i hbar d/dt] psi| at one spacetime point.

    With ``relative=True`` the residual is divided by |psi| (when nonzero),
    which makes an energy error read the same at every point off the nodes.

    ``method="analytic"`` uses the Wirtinger Laplacian in the plane and exact
    zeta/t derivatives.  ``method="fd"`` differentiates ``eval_psi_extended``
    with fourth-order central stencils in all four variables.
    """
    base = w.base
    hbar, m = base.hbar, base.mass
    r, theta = base.pair.point_polar(p)
    vfull = float(potential_term(base.pair, r)) + w.energy_shift
    psi = eval_psi_extended(w, p, zeta, t)
    if method == "analytic":
        spatial = complex(np.exp(1j * (w.k_zeta * zeta - w.E * t) / hbar))
        lap = analytic_laplacian(base, p) * spatial - (w.k_zeta / hbar) ** 2 * psi
        dpsi_dt = -1j * w.E / hbar * psi
    elif method == "fd":
        z0 = complex(p.x, p.y)

        def at(dz):
            z = z0 + dz
            th = theta + math.atan2((z / z0).imag, (z / z0).real)
            return eval_psi_extended(w, ComplexPoint.polar(abs(z), th), zeta, t)

        lap = (_fd4_second(lambda s: at(s), h) + _fd4_second(lambda s: at(1j * s), h)
               + _fd4_second(lambda s: eval_psi_extended(w, p, zeta + s, t), h))
        dpsi_dt = _fd4_first(lambda s: eval_psi_extended(w, p, zeta, t + s), h)
    else:
        raise ValueError(f"unknown method {method!r}")
    res = abs(-(hbar ** 2) / (2.0 * m) * lap + vfull * psi - 1j * hbar * dpsi_dt)
    if relative and psi != 0:
        return res / abs(psi)
    return res


# ------------------------------------------------------- finite-difference path

def schrodinger_residual_fd(w: DualWavefunction, grid: Grid2D,
                            potential: Optional[PotentialSpec] = None,
                            energy_offset: float = 0.0, r_exclude=None) -> ResidualReport:
    sample, st = _prepare(w, grid, r_exclude)
    vterm = potential_term(w.pair, sample.r, potential, energy_offset)
    lap = st.laplacian(sample.psi)
    res = -(w.hbar ** 2) / (2.0 * w.mass) * lap + vterm * sample.psi
    return _report("schrodinger", res, st.interior, grid)


def plane_wave_residual_fd(kappa: float, grid: Grid2D, m: float = 1.0, hbar: float = 1.0,
                           energy_shift: float = 0.0) -> ResidualReport:
    """Sanity input: psi = exp(i kappa x / hbar) with V - E_shift = -kappa^2 / 2m."""
    st = Stencil(grid)
    x, _, _, _ = grid.nodes()
    psi = np.exp(1j * kappa * x / hbar)
    res = -(hbar ** 2) / (2.0 * m) * st.laplacian(psi) - kappa ** 2 / (2.0 * m) * psi
    return _report("schrodinger", res, st.interior, grid)


def bohm_potential(amplitude: Union[FieldSample, np.ndarray], grid: Optional[Grid2D] = None,
                   hbar: float = 1.0, m: float = 1.0, floor: float = AMPLITUDE_FLOOR,
                   valid: Optional[np.ndarray] = None) -> ResidualReport:
    """Q = -(hbar^2/2m) lap(A) / A where |A| exceeds ``floor * max|A|``."""
    if isinstance(amplitude, FieldSample):
        sample = amplitude
        grid = sample.grid
        A = sample.amplitude
        hbar, m = sample.w.hbar, sample.w.mass
        valid = sample.valid
    else:
        A = np.asarray(amplitude, float)
    if grid is None:
        raise ValueError("a grid is required with a bare amplitude array")
    st = Stencil(grid, valid)
    lap = st.laplacian(A)
    absA = np.abs(A)
    above = absA > floor * np.nanmax(absA[st.valid])
    where = st.interior & above
    with np.errstate(divide="ignore", invalid="ignore"):
        Q = -(hbar ** 2) / (2.0 * m) * lap / A
    excluded = int(np.count_nonzero(st.interior & ~above))
    return _report("bohm_potential", Q, where, grid, excluded, amplitude_floor=floor)


def madelung_fields(A: np.ndarray, S: np.ndarray, vterm, grid: Grid2D, m: float = 1.0,
                    hbar: float = 1.0, valid: Optional[np.ndarray] = None,
                    floor: float = AMPLITUDE_FLOOR):
    """(Hamilton-Jacobi, continuity) reports for arbitrary amplitude/action fields.

    ``vterm`` is V - E_shift on the nodes (scalar or array).
    """
    st = Stencil(grid, valid)
    gs_xi, gs_eta = st.grad(S)
    absA = np.abs(A)
    above = absA > floor * np.nanmax(absA[st.valid])
    with np.errstate(divide="ignore", invalid="ignore"):
        Q = -(hbar ** 2) / (2.0 * m) * st.laplacian(A) / A
    hj = (gs_xi ** 2 + gs_eta ** 2) / (2.0 * m) + Q + vterm
    excluded = int(np.count_nonzero(st.interior & ~above))
    hj_rep = _report("hamilton_jacobi", hj, st.interior & above, grid, excluded,
                     amplitude_floor=floor)
    cont = st.div_k_grad(A * A, S) / m
    return hj_rep, _report("continuity", cont, st.interior, grid)


def madelung_residuals(w: DualWavefunction, grid: Grid2D,
                       potential: Optional[PotentialSpec] = None, energy_offset: float = 0.0,
                       floor: float = AMPLITUDE_FLOOR, r_exclude=None):
    """(Hamilton-Jacobi, continuity) reports for the stationary Madelung split."""
    grid.require_stencil()
    sample = sample_grid(w, grid, r_exclude)
    vterm = potential_term(w.pair, sample.r, potential, energy_offset)
    return madelung_fields(sample.amplitude, sample.action, vterm, grid, w.mass, w.hbar,
                           sample.valid, floor)


def continuity_terms(w: DualWavefunction, grid: Grid2D, r_exclude=None):
    """The two pieces of div(A^2 grad S): 2A grad A . grad S and A^2 lap S."""
    sample, st = _prepare(w, grid, r_exclude)
    A, S = sample.amplitude, sample.action
    ga, gb = st.grad(A)
    sa, sb = st.grad(S)
    t1 = 2.0 * A * (ga * sa + gb * sb)
    t2 = A * A * st.laplacian(S)
    return (_report("continuity_advective", t1, st.interior, grid),
            _report("continuity_diffusive", t2, st.interior, grid))


def holomorphic_identities(w: DualWavefunction, grid: Grid2D, r_exclude=None) -> dict:
    """Cauchy-Riemann, harmonicity, orthogonality and gradient-norm residuals.

    Cauchy-Riemann is evaluated on the generator's (u, v); the others on the
    dual's own (amplitude, action), which is the same pair up to order.
    """
    sample, st = _prepare(w, grid, r_exclude)
    u, v = sample.u, sample.v
    A, S = sample.amplitude, sample.action
    u_xi, u_eta = st.grad(u)
    v_xi, v_eta = st.grad(v)
    cr = np.hypot(u_xi - v_eta, u_eta + v_xi)
    harm = np.hypot(st.laplacian(A), st.laplacian(S))
    a_xi, a_eta = st.grad(A)
    s_xi, s_eta = st.grad(S)
    orth = a_xi * s_xi + a_eta * s_eta
    gnorm = (a_xi ** 2 + a_eta ** 2) - (s_xi ** 2 + s_eta ** 2)
    where = st.interior
    return {
        "cauchy_riemann": _report("cauchy_riemann", cr, where, grid),
        "harmonicity": _report("harmonicity", harm, where, grid),
        "orthogonality": _report("orthogonality", orth, where, grid),
        "gradient_norm": _report("gradient_norm", gnorm, where, grid),
    }


def gradient_norm_vs_g(w: DualWavefunction, grid: Grid2D, r_exclude=None) -> ResidualReport:
    """|grad u|^2 - |g|^2, the second half of the gradient-norm identity."""
    sample, st = _prepare(w, grid, r_exclude)
    a, b = st.grad(sample.u)
    return _report("gradient_norm_vs_g", a * a + b * b - sample.g_abs2, st.interior, grid)


def log_potential_harmonicity(potential: Union[PotentialSpec, Callable], grid: Grid2D,
                              energy_shift: float = 0.0, r_exclude: float = 0.0) -> ResidualReport:
    """Discrete Laplacian of log|V - E_shift| (zero for the factorizable family).

    ``potential`` is a spec (using its own shift) or a callable ``V(x, y)``
    combined with ``energy_shift``.
    """
    x, y, r, _ = grid.nodes()
    with np.errstate(divide="ignore", invalid="ignore"):
        if isinstance(potential, PotentialSpec):
            vterm = -potential.depth(r)
        else:
            vterm = np.asarray(potential(x, y), float) - energy_shift
    valid = np.isfinite(vterm) & (r > r_exclude)
    if np.any(vterm[valid] >= 0):
        raise SignViolation("V - E_shift must be negative on every unmasked node")
    st = Stencil(grid, valid)
    with np.errstate(divide="ignore", invalid="ignore"):
        logv = np.log(-vterm)
    return _report("log_potential_harmonicity", st.laplacian(logv), st.interior, grid)


# ------------------------------------------------------------------ refinement

def observed_order(coarse: float, fine: float) -> Optional[float]:
    if not (coarse > 0 and fine > 0) or not (math.isfinite(coarse) and math.isfinite(fine)):
        return None
    return math.log2(coarse / fine)


def converge(compute: Callable[[Grid2D], ResidualReport], grid: Grid2D,
             norm: str = "l2") -> ResidualReport:
    """Run ``compute`` on ``grid`` and its refinement; annotate the fine report."""
    coarse = compute(grid)
    fine = compute(grid.refined())
    fine.observed_order = observed_order(getattr(coarse, norm), getattr(fine, norm))
    fine.extra.update(coarse_l2=coarse.l2, coarse_linf=coarse.linf, coarse_h=coarse.h,
                      order_norm=norm)
    return fine


def passes(report: ResidualReport, band=ORDER_BAND, exact_tol: float = EXACT_TOL) -> bool:
    """Order inside ``band``, or the residual already at round-off level."""
    if report.linf <= exact_tol:
        return True
    o = report.observed_order
    return o is not None and band[0] <= o <= band[1]


def canonical_grid(pair: HolomorphicPair, n: int = 64) -> Grid2D:
    """A grid on which every identity has a genuine O(h^2) truncation error.

    Power laws are polynomials on Cartesian lattices (exact stencils for
    n = 0, 2), so they are sampled on a log-polar sector that avoids every
    nodal line of u and v.  The logarithm is linear in log-polar coordinates,
    so it gets a Cartesian square away from the origin and the cut.
    """
    if pair.form is Form.LOGARITHMIC or pair.exponent == 0:
        return Grid2D.cartesian(1.0, 2.0, 1.0, 2.0, n, n)
    quarter = 0.5 * math.pi / abs(pair.exponent)
    t0 = pair.window.theta0
    return Grid2D.annular(0.5, 2.0, n, n, log_radial=True,
                          theta0=t0 + 0.1 * quarter, theta1=t0 + 0.9 * quarter)


def parse_negative_control(text: Optional[str]):
    """``"alpha:5"`` -> ("alpha", 0.05)."""
    if not text:
        return None
    name, _, pct = text.partition(":")
    name = name.strip().replace("-", "_")
    if name not in ("alpha", "n", "energy_shift"):
        raise ValueError(f"negative control must perturb alpha, n or energy_shift, got {name!r}")
    return name, float(pct) / 100.0


@dataclass
class SuiteResult:
    spec: PotentialSpec
    grid: Grid2D
    reports: dict
    analytic: dict
    negative_control: Optional[tuple] = None

    def passed(self, identity: str) -> bool:
        return all(passes(rep) for rep in self.reports[identity].values())

    @property
    def all_passed(self) -> bool:
        return all(self.passed(k) for k in self.reports) and self.analytic["passed"]

    def rows(self) -> list:
        out = []
        for name in IDENTITIES:
            for dual, rep in self.reports[name].items():
                out.append({"identity": name, "dual": dual, "l2": rep.l2, "linf": rep.linf,
                            "order": rep.observed_order, "pass": passes(rep)})
        return out


def analytic_sweep(spec: PotentialSpec, n_points: int = 100, tol: float = 1e-12) -> dict:
    """Analytic-path residual at deterministic points spread over the branch window."""
    pair = HolomorphicPair.from_spec(spec)
    k = np.arange(n_points)
    # golden-ratio angles and a radial sweep; the window edge is never hit
    frac = np.mod(0.5 + k * 0.6180339887498949, 1.0)
    thetas = pair.window.theta0 + pair.window.period * (0.02 + 0.96 * frac)
    radii = 0.3 + 2.7 * (k + 0.5) / n_points
    worst = 0.0
    for which in Which:
        w = DualWavefunction(pair, which, spec.hbar)
        for r, th in zip(radii, thetas):
            worst = max(worst, schrodinger_residual_analytic(w, ComplexPoint.polar(r, th)))
    return {"max_relative": worst, "points": int(n_points), "tolerance": tol,
            "passed": bool(worst <= tol)}


def run_suite(spec: PotentialSpec, grid: Optional[Grid2D] = None,
              negative_control: Optional[tuple] = None) -> SuiteResult:
    """All eight finite-difference identities, both duals, two resolutions."""
    pair = HolomorphicPair.from_spec(spec)
    if grid is None:
        grid = canonical_grid(pair)
    grid.require_stencil()
    potential, offset = None, 0.0
    if negative_control is not None:
        name, frac = negative_control
        if name == "energy_shift":
            offset = frac * max(abs(spec.energy_shift), 1.0)
        else:
            potential = spec.perturbed(name, frac)
    reports = {name: {} for name in IDENTITIES}
    for which in Which:
        w = DualWavefunction(pair, which, spec.hbar)
        key = which.value
        reports["schrodinger"][key] = converge(
            lambda g: schrodinger_residual_fd(w, g, potential, offset), grid)
        reports["hamilton_jacobi"][key] = converge(
            lambda g: madelung_residuals(w, g, potential, offset)[0], grid)
        reports["continuity"][key] = converge(lambda g: madelung_residuals(w, g)[1], grid)
        reports["bohm_potential"][key] = converge(
            lambda g: bohm_potential(sample_grid(w, g)), grid)
        for name in ("cauchy_riemann", "harmonicity", "orthogonality", "gradient_norm"):
            reports[name][key] = converge(
                lambda g, name=name: holomorphic_identities(w, g)[name], grid)
    band = {"order_band": list(ORDER_BAND), "exact_tol": EXACT_TOL}
    for per_dual in reports.values():
        for rep in per_dual.values():
            rep.tolerances.update(band)
    return SuiteResult(spec, grid, reports, analytic_sweep(spec), negative_control)
