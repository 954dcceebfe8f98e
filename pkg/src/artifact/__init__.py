"""Multipartite EPR steering, entanglement and monogamy for Gaussian CV networks."""

from .errors import ArtifactError, InvalidArgument, MonogamyViolation, OptimizerAbort, Unsupported, ValidationError
from .phase_space import GaussianState, SymplecticOp, apply, beam_splitter, phase_shift, squeezer, vacuum

__all__ = [
    "ArtifactError",
    "GaussianState",
    "InvalidArgument",
    "MonogamyViolation",
    "OptimizerAbort",
    "SymplecticOp",
    "Unsupported",
    "ValidationError",
    "apply",
    "beam_splitter",
    "phase_shift",
    "squeezer",
    "vacuum",
]

__version__ = "0.1.0"
