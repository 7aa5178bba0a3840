"""Dual wavefunctions of the 2D Schrödinger equation built from holomorphic functions."""

__version__ = "0.1.0"

from .complex_core import (BranchWindow, ComplexPoint, Family, Form, HolomorphicPair,
                           PotentialSpec, cauchy_riemann_residual, decompose_uv, eval_f, eval_g)
from .grid import Grid2D, parse_grid
from .optics import IndexMap, RayPath, RayState, deflection_curve, index_at, trace_ray
from .verifier import (ResidualReport, bohm_potential, log_potential_harmonicity,
                       madelung_residuals, run_suite, schrodinger_residual_analytic,
                       schrodinger_residual_fd)
from .wavefunction import (DualWavefunction, ExtendedWavefunction, FieldSample, Which,
                           eval_psi, eval_psi_extended, sample_grid, single_valuedness)
