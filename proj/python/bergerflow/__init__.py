"""U(2)-invariant warped Berger Ricci flow on R^4."""

from ._core import (
    ConfigError,
    CurvatureField,
    Flow,
    InvalidArgument,
    MetricState,
    NumericalBreakdown,
    Profile,
    ResolutionExhausted,
    SchemaError,
    analyze,
    bryant_profile,
    curvature_field,
    cylinder_profile,
    estimate_T,
    initial_state,
    monitor_report,
    run,
    validate_class,
    validate_config,
)

__all__ = [
    "ConfigError",
    "CurvatureField",
    "Flow",
    "InvalidArgument",
    "MetricState",
    "NumericalBreakdown",
    "Profile",
    "ResolutionExhausted",
    "SchemaError",
    "analyze",
    "bryant_profile",
    "curvature_field",
    "cylinder_profile",
    "estimate_T",
    "initial_state",
    "monitor_report",
    "run",
    "validate_class",
    "validate_config",
]
