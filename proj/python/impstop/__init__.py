"""Impulse control and stopping games on jump-diffusions."""

from ._impstop import (
    ConfigError,
    Example1Params,
    Example2Params,
    JumpAtom,
    QviError,
    StructuralError,
    certify,
    classify,
    example1_constants,
    example1_exponents,
    example1_value,
    investor_constants,
    reference_config,
    run,
    solve,
)

__all__ = [
    "ConfigError",
    "Example1Params",
    "Example2Params",
    "JumpAtom",
    "QviError",
    "StructuralError",
    "certify",
    "classify",
    "example1_constants",
    "example1_exponents",
    "example1_value",
    "investor_constants",
    "reference_config",
    "run",
    "solve",
]
