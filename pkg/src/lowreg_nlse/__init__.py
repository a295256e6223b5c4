"""Low-regularity time integrators for NLS-type equations on the 1D torus."""
from __future__ import annotations

from .cubic import (
    CubicScheme,
    CubicSchemeConfig,
    ResonanceWeights,
    g_zero_mode,
    h_field,
    nrli1_step,
    nrsli2_step,
    os18_step,
    strang_step,
)
from .harness import (
    Equation,
    OrderFit,
    SimParams,
    SolverFailure,
    SweepRecord,
    TrajectoryResult,
    error_vs_time,
    fit_order,
    make_initial_data,
    read_records_csv,
    reference_solution,
    run_trajectory,
    sweep_eps,
    sweep_tau,
    write_records_csv,
)
from .quadratic import (
    FixedPointError,
    QuadNonlinearity,
    QuadSchemeConfig,
    li1_conj_step,
    li1_step,
    sli2_conj_step,
    sli2_step,
)
from .selftest import run_selftest
from .spectral import (
    OperatorSymbols,
    SpectralField,
    TorusGrid,
    antiderivative,
    apply_phi1_laplacian,
    conjugate_field,
    field_from_text,
    field_to_text,
    forward_transform,
    free_propagate,
    inverse_transform,
    phi1,
    random_initial_data,
    sobolev_norm,
)

__version__ = "0.1.0"

__all__ = [
    "CubicScheme",
    "CubicSchemeConfig",
    "Equation",
    "FixedPointError",
    "OperatorSymbols",
    "OrderFit",
    "QuadNonlinearity",
    "QuadSchemeConfig",
    "ResonanceWeights",
    "SimParams",
    "SolverFailure",
    "SpectralField",
    "SweepRecord",
    "TorusGrid",
    "TrajectoryResult",
    "antiderivative",
    "apply_phi1_laplacian",
    "conjugate_field",
    "error_vs_time",
    "field_from_text",
    "field_to_text",
    "fit_order",
    "forward_transform",
    "free_propagate",
    "g_zero_mode",
    "h_field",
    "inverse_transform",
    "li1_conj_step",
    "li1_step",
    "make_initial_data",
    "nrli1_step",
    "nrsli2_step",
    "os18_step",
    "phi1",
    "random_initial_data",
    "read_records_csv",
    "reference_solution",
    "run_selftest",
    "run_trajectory",
    "sli2_conj_step",
    "sli2_step",
    "sobolev_norm",
    "strang_step",
    "sweep_eps",
    "sweep_tau",
    "write_records_csv",
    "__version__",
]
