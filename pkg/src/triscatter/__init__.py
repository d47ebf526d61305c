"""Numerical workbench for three identical 1D quantum particles.

After removing the centre of mass, the three-particle problem lives on the
plane {x1 + x2 + x3 = 0}.  Each pair interaction acts along a line through
the origin, so the scattered plane wave is the field diffracted by three
semi-transparent screens.  The workbench builds an explicit ray-plus-
diffraction approximation of that field, evaluates its closed-form
discrepancy under the Schroedinger operator, and solves the remaining
correction problem by quadratic finite elements on a disk with an outgoing
radiation boundary condition.
"""

from .pair1d import (
    PairPotential,
    PairScattering,
    bump_potential,
    chi_eval,
    chi_eval_with_derivative,
    solve_pair,
)
from .geometry import (
    DegenerateFanError,
    SectorFan,
    anomalous_rays,
    build_fan,
    chart,
    chart_inverse,
    classify,
    inner,
    jacobi,
    jacobi_inverse,
    norm,
    reflect,
    triple,
)
from .wavefield import FieldModel, fresnel_remainder, fresnel_step, smoothstep
from .mesh import (
    Mesh,
    MeshQualityError,
    PointLocator,
    build_mesh,
    estimate_p2_dofs,
    read_mesh,
    size_field,
    strip_window_tagger,
    write_mesh,
)
from .fem import (
    FemProblem,
    NonConvergenceError,
    PointOutsideDomainError,
    assemble,
    evaluate,
    l2_error_against,
    l2_norm,
    manufactured_plane_wave_problem,
    problem_from_solution,
    solve,
)
from .diagnostics import (
    DiagnosticsReport,
    angular_profile,
    boundary_norms,
    control_swap_map,
    relative_amplitude,
    run_diagnostics,
    symmetry_defect,
    total_field,
)
from .config import ConfigInvalidError, RunConfig, load_config
from .cli import Runner, main as cli_main, run

__all__ = [
    "PairPotential", "PairScattering", "bump_potential", "chi_eval",
    "chi_eval_with_derivative", "solve_pair",
    "DegenerateFanError", "SectorFan", "anomalous_rays", "build_fan", "chart",
    "chart_inverse", "classify", "inner", "jacobi", "jacobi_inverse", "norm",
    "reflect", "triple",
    "FieldModel", "fresnel_remainder", "fresnel_step", "smoothstep",
    "Mesh", "MeshQualityError", "PointLocator", "build_mesh", "estimate_p2_dofs",
    "read_mesh", "size_field", "strip_window_tagger", "write_mesh",
    "FemProblem", "NonConvergenceError", "PointOutsideDomainError", "assemble",
    "evaluate", "l2_error_against", "l2_norm", "manufactured_plane_wave_problem",
    "problem_from_solution", "solve",
    "DiagnosticsReport", "angular_profile", "boundary_norms", "control_swap_map",
    "relative_amplitude", "run_diagnostics", "symmetry_defect", "total_field",
    "ConfigInvalidError", "RunConfig", "load_config",
    "Runner", "cli_main", "run",
]
