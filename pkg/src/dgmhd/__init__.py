"""Structured-mesh DG solver for 2D ideal compressible MHD.

The pieces: pointwise state algebra (`physics`), mesh and modal basis
(`mesh`, `basis`), the semi-discrete DG operator (`dg`), per-stage
oscillation damping (`oe`), locally divergence-free magnetic projection
(`ldf`), SSP-RK3 marching (`stepping`), benchmark catalogue (`cases`),
error/conservation reporting (`diagnostics`), and run orchestration
(`driver`, `cli`).
"""

__version__ = "0.1.0"

from .basis import BasisSpec, QuadratureRule, eval_basis, eval_basis_grad, mass_diagonal
from .cases import CASES, CaseSpec, case_by_name, exact_vortex, init_field
from .dg import ModalField, llf_flux, residual
from .diagnostics import (
    conservation_audit,
    convergence_order,
    divergence_report,
    l2_error,
)
from .driver import (
    RunConfig,
    RunSummary,
    advance,
    convergence_study,
    format_convergence_table,
    load_config,
    run,
    write_snapshot,
)
from .errors import (
    InadmissibleInitialData,
    NegativePressure,
    NonFiniteResidual,
    NonFiniteSpeed,
    NonPositiveDensity,
    NonPositiveError,
    SolverError,
)
from .ldf import apply_ldf, df_basis_values, df_norms, expand_df, project_ldf
from .mesh import Mesh, ghost_state
from .oe import NormalizationCache, apply_oe, build_normalization, delta, deltas, face_sigma
from .physics import cons_to_prim, flux, max_wave_speed, prim_to_cons, primitive, state
from .stepping import StepControls, compute_dt, enforce_positive, step

__all__ = [
    "BasisSpec", "QuadratureRule", "eval_basis", "eval_basis_grad", "mass_diagonal",
    "CASES", "CaseSpec", "case_by_name", "exact_vortex", "init_field",
    "ModalField", "llf_flux", "residual",
    "conservation_audit", "convergence_order", "divergence_report", "l2_error",
    "RunConfig", "RunSummary", "advance", "convergence_study",
    "format_convergence_table", "load_config", "run", "write_snapshot",
    "InadmissibleInitialData", "NegativePressure", "NonFiniteResidual",
    "NonFiniteSpeed", "NonPositiveDensity", "NonPositiveError", "SolverError",
    "apply_ldf", "df_basis_values", "df_norms", "expand_df", "project_ldf",
    "Mesh", "ghost_state",
    "NormalizationCache", "apply_oe", "build_normalization", "delta", "deltas",
    "face_sigma",
    "cons_to_prim", "flux", "max_wave_speed", "prim_to_cons", "primitive", "state",
    "StepControls", "compute_dt", "enforce_positive", "step",
]
