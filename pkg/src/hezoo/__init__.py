"""Homomorphic encryption schemes from coding theory and polynomial rings behind one interface."""

from .core import (
    ALL_SCHEMES,
    CiphertextEnvelope,
    NoiseReport,
    SchemeId,
    adapter_for,
    deserialize_envelope,
    eval_dispatch,
    serialize,
)
from .errors import HEError
from .rng import RngStream

__version__ = "0.1.0"

__all__ = [
    "ALL_SCHEMES",
    "CiphertextEnvelope",
    "HEError",
    "NoiseReport",
    "RngStream",
    "SchemeId",
    "adapter_for",
    "deserialize_envelope",
    "eval_dispatch",
    "serialize",
]
