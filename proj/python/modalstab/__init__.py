"""Modal boundary stabilization of the heat equation on a disk or ball."""

from ._core import (
    ConfigError,
    DomainError,
    EigenMode,
    Error,
    GainSet,
    GainValidationError,
    InsufficientDataError,
    ModeTable,
    ResonanceError,
    RunConfig,
    Shape,
    StabilityReport,
    SynthesisError,
    auto_scale_gains,
    bessel_j,
    bessel_j_zero,
    hurwitz_margin,
    lifting_coefficients,
    run_simulate,
    run_spectrum,
    run_synthesize,
    run_verify,
    simulate,
    spherical_bessel_j,
    spherical_bessel_zero,
    synthesize,
    validate_gains,
    verify,
)

__all__ = [name for name in dir() if not name.startswith("_")]
