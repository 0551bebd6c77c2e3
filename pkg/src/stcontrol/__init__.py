"""Space-time finite element solvers and benchmarks for box-constrained
parabolic optimal control."""

from .bench import (
    BENCH_CONFIG,
    BenchRow,
    ConfigError,
    RunPlan,
    built_in_plan,
    dump_fields,
    execute_run,
    load_config,
    run_sweep,
)
from .cases import CaseSpec, get_case, case_names
from .factors import FactorizationError
from .optimizer import PgmConfig, RunRecord, run
from .problem import (
    BoxBounds,
    DiscreteProblem,
    KktDiagnostics,
    ProblemData,
    SpaceTimeBackend,
    adjoint_rhs,
    build_rhs,
    discretize,
    kkt_residual,
    objective,
    objective_terms,
    project,
    reduced_gradient,
    weighted_inner,
    weighted_norm,
)
from .semidiscrete import SemiDiscreteBackend, cn_backward, cn_forward
from .spacetime import (
    AdjointCoeffs,
    SpaceTimeOperator,
    apply,
    apply_transpose,
    assemble_operator,
    assemble_sparse_oracle,
    solve_forward,
    solve_transpose,
)
from .spatial import (
    IntervalMesh,
    SpatialDiscretization,
    assemble_boundary_load,
    assemble_mass_1d,
    assemble_stiffness_robin_1d,
    build_interval_mesh,
    interpolate,
    tensorize,
)
from .temporal import TemporalGrid, TemporalMatrices, assemble_temporal, build_temporal_grid

__version__ = "0.1.0"
