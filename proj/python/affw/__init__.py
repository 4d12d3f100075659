"""Affine-invariant Frank-Wolfe on strongly convex sets."""

from ._affw import (
    AffineMap,
    DataError,
    Error,
    FeasibleSet,
    Gauge,
    InputError,
    InvariantError,
    NumericalError,
    Objective,
    Problem,
    ProjectionObjective,
    QuadraticObjective,
    StrategyKind,
    Trace,
    ball_projection_problem,
    config_hash,
    directional_smoothness,
    empirical_rate,
    fw_gap,
    solve,
    theory_rate_linear,
    theory_rate_sublinear,
    transform_problem,
    verify,
)

__version__ = "0.1.0"
