"""Distributed least-squares flow over fixed and switching graphs."""

from ._core import (
    AssumptionProfile,
    ConfigError,
    DivergenceError,
    InadmissibleError,
    InsufficientWindowError,
    NotPositiveDefiniteError,
    NotStronglyConvexError,
    OutOfRateScopeError,
    StepSizeSchedule,
    __version__,
    algebraic_connectivity,
    check,
    cost,
    fit_loglog_slope,
    global_gradient,
    is_connected,
    laplacian,
    least_squares,
    limit_oracle,
    predict_rate,
    preset,
    preset_names,
    problem,
    run,
    simulate,
    solve_spd,
    strong_convexity_constant,
    sym_eigen,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
