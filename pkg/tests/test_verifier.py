import json
import math

import numpy as np
import pytest
import sympy as sp

from dualwave.complex_core import ComplexPoint, HolomorphicPair, PotentialSpec
from dualwave.errors import SignViolation, StencilOutOfDomain
from dualwave.grid import Grid2D
from dualwave.verifier import (ResidualReport, analytic_laplacian, bohm_potential, canonical_grid,
                               continuity_terms, converge, extended_residual,
                               holomorphic_identities, log_potential_harmonicity, madelung_fields,
                               madelung_residuals, observed_order, parse_negative_control, passes,
                               plane_wave_residual_fd, run_suite, schrodinger_residual_analytic,
                               schrodinger_residual_fd)
from dualwave.wavefunction import DualWavefunction, ExtendedWavefunction, Which, sample_grid

CANONICAL = (0.0, 2.0, -1.0, -2.0)


def _w(n, which=Which.U, **kw):
    return DualWavefunction.from_spec(PotentialSpec.monomial(n, **kw), which)


# ------------------------------------------------------------ symbolic oracle

R, T = sp.symbols("r theta", positive=True)


def _sym_psi(n, which, m, alpha, hbar):
    if n == -2:
        f = sp.sqrt(2 * m * alpha) * (sp.log(R) + sp.I * T)
    else:
        p = 1 + sp.Rational(n, 2) if float(n).is_integer() else 1 + sp.nsimplify(n) / 2
        c = 2 * sp.sqrt(2 * m * alpha) / (n + 2)
        f = c * R ** p * (sp.cos(p * T) + sp.I * sp.sin(p * T))
    u, v = sp.re(sp.expand_complex(f)), sp.im(sp.expand_complex(f))
    amp, act = (u, v) if which is Which.U else (v, u)
    return amp * sp.exp(sp.I * act / hbar)


def _polar_laplacian(psi):
    return sp.diff(psi, R, 2) + sp.diff(psi, R) / R + sp.diff(psi, T, 2) / R ** 2


@pytest.mark.parametrize("n", (0, 2, -1, -2, 1))
@pytest.mark.parametrize("which", list(Which))
def test_symbolic_laplacian_oracle(n, which):
    m, alpha, hbar = sp.Rational(3, 2), sp.Rational(2, 3), sp.Rational(4, 5)
    psi = _sym_psi(n, which, m, alpha, hbar)
    lap = _polar_laplacian(psi)
    # the solution family: lap psi = -(2m/hbar^2) alpha r^n psi
    assert sp.simplify(lap + 2 * m * alpha * R ** n * psi / hbar ** 2) == 0
    w = DualWavefunction.from_spec(PotentialSpec.monomial(float(n), float(alpha), float(m),
                                                          float(hbar)), which)
    lap_num = sp.lambdify((R, T), lap)
    for r, th in ((0.7, 0.3), (1.3, 0.6 * w.pair.window.period), (2.1, 0.9 * w.pair.window.period)):
        ref = complex(lap_num(r, th))
        got = analytic_laplacian(w, ComplexPoint.polar(r, th))
        assert got == pytest.approx(ref, rel=1e-11, abs=1e-13)


def test_analytic_residual_examples():
    for n in CANONICAL:
        for which in Which:
            w = _w(n, which, alpha=1.3, m=0.7, hbar=1.9)
            for r, frac in ((0.4, 0.1), (1.0, 0.5), (2.5, 0.77)):
                p = ComplexPoint.polar(r, frac * w.pair.window.period)
                assert schrodinger_residual_analytic(w, p) <= 1e-12
    log = _w(-2.0)
    assert schrodinger_residual_analytic(log, ComplexPoint.polar(1.0, 1.0)) <= 1e-12
    degenerate = DualWavefunction(HolomorphicPair.power_law(0.0, 2.0))
    assert schrodinger_residual_analytic(degenerate, ComplexPoint.cartesian(0.3, 0.4)) == 0.0


# ---------------------------------------------------------- finite differences

def test_schrodinger_fd_constant_potential_order():
    rep = converge(lambda g: schrodinger_residual_fd(_w(0.0, which=Which.V), g),
                   Grid2D.cartesian(1, 2, 1, 2, 100))
    assert rep.h == pytest.approx(0.005)
    assert 1.8 <= rep.observed_order <= 2.2


def test_plane_wave_sanity():
    rep = converge(lambda g: plane_wave_residual_fd(1.7, g, m=0.9, hbar=1.1),
                   Grid2D.cartesian(0, 1, 0, 1, 32))
    assert 1.8 <= rep.observed_order <= 2.2
    assert rep.linf < 1e-3


def test_wrong_alpha_does_not_converge():
    spec = PotentialSpec.monomial(2.0)
    w = DualWavefunction.from_spec(spec)
    wrong = spec.perturbed("alpha", 0.10)
    grid = canonical_grid(w.pair, 32)
    norms = [schrodinger_residual_fd(w, g, wrong).linf
             for g in (grid, grid.refined(), grid.refined().refined())]
    assert min(norms) > 0.01
    assert norms[-1] > 0.9 * norms[0]


def test_report_invariants_and_json():
    rep = schrodinger_residual_fd(_w(-1.0), canonical_grid(_w(-1.0).pair, 16))
    assert rep.l2 <= rep.linf <= rep.linf * math.sqrt(rep.count)
    assert rep.observed_order is None
    d = json.loads(json.dumps(rep.to_dict()))
    assert set(d) >= {"name", "l2", "linf", "h", "observed_order"}


def test_stencil_too_coarse():
    with pytest.raises(StencilOutOfDomain):
        schrodinger_residual_fd(_w(0.0), Grid2D.cartesian(1, 2, 1, 2, 4))


def test_bohm_dual_solutions_converge():
    for n in CANONICAL:
        w = _w(n)
        rep = converge(lambda g: bohm_potential(sample_grid(w, g)), canonical_grid(w.pair, 32))
        assert 1.8 <= rep.observed_order <= 2.2


def test_bohm_gaussian_control():
    # 101 cell-centred nodes on [-1, 1] put one node exactly at the origin
    def q0(n):
        g = Grid2D.cartesian(-1, 1, -1, 1, n)
        x, y, r, _ = g.nodes()
        rep = bohm_potential(np.exp(-r * r / 2), g)
        c = n // 2
        assert r[c, c] == 0.0
        return rep.residual[c, c]

    coarse, fine = q0(51), q0(101)
    assert fine == pytest.approx(1.0, abs=1e-3)
    assert math.log2(abs(coarse - 1) / abs(fine - 1)) == pytest.approx(2.0, abs=0.1)


def test_bohm_constant_amplitude_is_zero():
    g = Grid2D.cartesian(0, 1, 0, 1, 9)
    rep = bohm_potential(np.full(g.shape, 3.0), g)
    assert rep.linf == 0.0


def test_bohm_floor_excludes_nodal_lines():
    w = _w(2.0)
    # the full quarter plane includes the nodal line theta = pi/4 of u = r^2 cos 2 theta
    g = Grid2D.cartesian(0.1, 1.1, 0.1, 1.1, 10)
    rep = bohm_potential(sample_grid(w, g))
    assert rep.excluded > 0 and rep.tolerances["amplitude_floor"] == 1e-6


def test_madelung_hydrogen_annulus():
    w = _w(-1.0)
    grid = Grid2D.annular(0.5, 2.0, 32, 32, theta0=0.3, theta1=2.8)
    hj = converge(lambda g: madelung_residuals(w, g)[0], grid)
    cont = converge(lambda g: madelung_residuals(w, g)[1], grid)
    assert 1.8 <= hj.observed_order <= 2.2
    assert 1.8 <= cont.observed_order <= 2.2


def test_madelung_plane_wave_control():
    g = Grid2D.cartesian(0, 1, 0, 1, 16)
    x, _, _, _ = g.nodes()
    kappa, m = 1.3, 0.8
    hj, cont = madelung_fields(np.ones(g.shape), kappa * x, -kappa ** 2 / (2 * m), g, m)
    assert hj.linf < 1e-12
    assert cont.linf < 1e-12


def test_madelung_duals_agree():
    grid = canonical_grid(_w(2.0).pair, 32)
    for k in (0, 1):
        a = madelung_residuals(_w(2.0), grid)[k]
        b = madelung_residuals(_w(2.0, Which.V), grid)[k]
        assert 0.5 <= a.l2 / b.l2 <= 2.0
        assert 0.5 <= a.linf / b.linf <= 2.0


@pytest.mark.parametrize("n", CANONICAL)
def test_continuity_term_by_term(n):
    w = _w(n, Which.V)
    grid = canonical_grid(w.pair, 32)
    coarse = continuity_terms(w, grid)
    fine = continuity_terms(w, grid.refined())
    for c, f in zip(coarse, fine):
        f.observed_order = observed_order(c.l2, f.l2)
        assert passes(f), (f.name, f.observed_order, f.linf)


@pytest.mark.parametrize("n", CANONICAL)
def test_holomorphic_identities_converge(n):
    w = _w(n)
    grid = canonical_grid(w.pair, 32)
    for name in ("cauchy_riemann", "harmonicity", "orthogonality", "gradient_norm"):
        rep = converge(lambda g: holomorphic_identities(w, g)[name], grid)
        assert passes(rep), (name, rep.observed_order, rep.linf)


# ----------------------------------------------------------- family membership

@pytest.mark.parametrize("n", (2.0, -1.0, -2.0, 0.7))
def test_log_potential_members(n):
    rep = converge(lambda g: log_potential_harmonicity(PotentialSpec.monomial(n), g),
                   Grid2D.cartesian(1, 2, 1, 2, 32))
    assert 1.8 <= rep.observed_order <= 2.2


def test_log_potential_constant_is_exact():
    rep = log_potential_harmonicity(PotentialSpec.monomial(0.0), Grid2D.cartesian(1, 2, 1, 2, 32))
    assert rep.linf == 0.0


def test_log_potential_non_member():
    grid = Grid2D.cartesian(1, 2, 1, 2, 32)
    reps = []
    for g in (grid, grid.refined(), grid.refined().refined()):
        rep = log_potential_harmonicity(lambda x, y: -(x * x + 1), g)
        x, _, _, _ = g.nodes()
        oracle = 2 * (1 - x * x) / (x * x + 1) ** 2
        err = np.nanmax(np.abs(rep.residual - oracle)[~np.isnan(rep.residual)])
        reps.append((rep.linf, err))
    assert all(linf >= 0.1 for linf, _ in reps)
    assert math.log2(reps[1][1] / reps[2][1]) == pytest.approx(2.0, abs=0.2)


def test_log_potential_eaton_index_informational():
    # the index profile 2a/r - 1 is not a monomial; the residual must not vanish
    a, m = 1.0, 1.0
    grid = Grid2D.annular(0.3, 1.5, 32, 32, theta0=0.1, theta1=1.5)
    reps = [log_potential_harmonicity(lambda x, y: -(2 * a / np.hypot(x, y) - 1) / (2 * m), g)
            for g in (grid, grid.refined())]
    assert min(r.linf for r in reps) > 0.1


def test_log_potential_sign_violation():
    with pytest.raises(SignViolation):
        log_potential_harmonicity(lambda x, y: x - 1.5, Grid2D.cartesian(1, 2, 1, 2, 8))


# ------------------------------------------------------------- extended, suite

@pytest.mark.parametrize("n", CANONICAL)
def test_extended_on_and_off_shell(n):
    base = _w(n, hbar=0.9, m=1.2)
    on = ExtendedWavefunction(base, k_zeta=2.0)
    p = ComplexPoint.polar(1.1, 0.37 * base.pair.window.period)
    assert extended_residual(on, p, 0.4, 0.7) <= 1e-10
    assert extended_residual(on, p, 0.4, 0.7, method="fd", h=1e-2) <= 1e-5
    # off-shell residual is |dE psi|: linear in the perturbation
    d1 = extended_residual(ExtendedWavefunction(base, 2.0, on.E * 1.01), p, 0.4, 0.7)
    d2 = extended_residual(ExtendedWavefunction(base, 2.0, on.E * 1.02), p, 0.4, 0.7)
    assert d2 / d1 == pytest.approx(2.0, rel=1e-6)


def test_parse_negative_control():
    assert parse_negative_control("alpha:5") == ("alpha", 0.05)
    assert parse_negative_control("energy-shift:10") == ("energy_shift", 0.1)
    assert parse_negative_control(None) is None
    with pytest.raises(ValueError):
        parse_negative_control("mass:5")


def test_run_suite_passes_and_reports_tolerances():
    res = run_suite(PotentialSpec.monomial(-1.0))
    assert res.all_passed
    rows = res.rows()
    assert len(rows) == 16
    rep = res.reports["schrodinger"]["u"]
    assert rep.tolerances == {"order_band": [1.8, 2.2], "exact_tol": 1e-9}
    assert isinstance(rep, ResidualReport) and "coarse_l2" in rep.extra


@pytest.mark.parametrize("control", ("alpha:5", "n:5", "energy_shift:5"))
def test_run_suite_negative_controls_fail(control):
    res = run_suite(PotentialSpec.monomial(2.0), negative_control=parse_negative_control(control))
    assert not res.passed("schrodinger")
    assert not res.all_passed
