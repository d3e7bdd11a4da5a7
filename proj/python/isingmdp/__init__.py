from ._core import (
    BracketError,
    ClassificationError,
    ConfigError,
    ResourceError,
    SpinConfiguration,
    __version__,
    analytic_value_x,
    classify_x,
    classify_y,
    classify_z,
    downhill_absorption,
    energy_delta,
    family_values,
    hamiltonian,
    hitting_time_moments,
    is_robust,
    lambda_crossing,
    model_labels,
    relax,
    run_command,
    serialize_model,
    simulate,
    stripe_pair,
    verify_kernel,
)

__all__ = [
    "BracketError",
    "ClassificationError",
    "ConfigError",
    "ResourceError",
    "SpinConfiguration",
    "__version__",
    "analytic_value_x",
    "classify_x",
    "classify_y",
    "classify_z",
    "downhill_absorption",
    "energy_delta",
    "family_values",
    "hamiltonian",
    "hitting_time_moments",
    "is_robust",
    "lambda_crossing",
    "model_labels",
    "relax",
    "run_command",
    "serialize_model",
    "simulate",
    "stripe_pair",
    "verify_kernel",
]
