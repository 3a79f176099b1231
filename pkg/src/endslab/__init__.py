"""Numerical laboratory for kernels on manifolds with exact Euclidean ends."""
from __future__ import annotations

__version__ = "0.1.0"

import os as _os

# ENDSLAB_THREADS caps BLAS threads; it must be set before numpy loads
if _os.environ.get("ENDSLAB_THREADS"):
    for _v in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_v, _os.environ["ENDSLAB_THREADS"])

from .cohomology import (grad_cutoff_Ln_norm, ibp_terms, linear_cutoff_check, log_cutoff,
                         vanishing_experiment)
from .geometry import (ModelManifold, PointM, WarpProfile, one_form_norm, sphere_volume, volume_ball,
                       volume_growth, warp_eval)
from .harmonic import HarmonicProfile, bounded_harmonic_h, dirichlet_energy, phi_expansion_coefficient, phi_plus
from .heat import (ContourSpec, contour_identity_check, flat_heat, heat_kernel, heat_limit_experiment,
                   offdiagonal_decay_experiment)
from .modes import eigenvalue, radial_apply, synthesize_kernel, zonal_kernel
from .radial import RadialGrid, apply_resolvent, exterior_solution, mode_green, solve_homogeneous
from .report import ExperimentReport, fit_loglog
from .resolvent import euclidean_resolvent, parametrix_error_order, rb0_leading_coefficient, resolvent
from .riesz import (FieldOnM, QuadratureSpec, lp_norm, riesz_apply, riesz_kernel, riesz_kernel_row,
                    sqrt_laplacian_apply, threshold_experiment)

__all__ = [
    "ModelManifold", "PointM", "WarpProfile", "one_form_norm", "sphere_volume", "volume_ball",
    "volume_growth", "warp_eval", "HarmonicProfile", "bounded_harmonic_h", "dirichlet_energy",
    "phi_expansion_coefficient", "phi_plus", "eigenvalue", "radial_apply", "synthesize_kernel",
    "zonal_kernel", "RadialGrid", "apply_resolvent", "exterior_solution", "mode_green",
    "solve_homogeneous", "ExperimentReport", "fit_loglog", "euclidean_resolvent",
    "parametrix_error_order", "rb0_leading_coefficient", "resolvent", "ContourSpec",
    "contour_identity_check", "flat_heat", "heat_kernel", "heat_limit_experiment",
    "offdiagonal_decay_experiment", "FieldOnM", "QuadratureSpec", "lp_norm", "riesz_apply",
    "riesz_kernel", "riesz_kernel_row", "sqrt_laplacian_apply", "threshold_experiment",
    "grad_cutoff_Ln_norm", "ibp_terms", "linear_cutoff_check", "log_cutoff", "vanishing_experiment",
]
