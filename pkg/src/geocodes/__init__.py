"""Geometric entanglement codes on projective Hilbert space."""

from .hilbert import Ray, ValidationError, BipartiteSplit
from .geometry import fs_distance, fs_gradient, classify_step, ClassifierThresholds, MoveLabel
from .entanglement import GeoKey, StandardVN, TwistedLocal, TwistedGlobal, QubitHeight, evaluate
from .codes import EncoderConfig, Trajectory, encode, decode_index, decode_profile

__version__ = "0.1.0"

__all__ = [
    "Ray", "ValidationError", "BipartiteSplit",
    "fs_distance", "fs_gradient", "classify_step", "ClassifierThresholds", "MoveLabel",
    "GeoKey", "StandardVN", "TwistedLocal", "TwistedGlobal", "QubitHeight", "evaluate",
    "EncoderConfig", "Trajectory", "encode", "decode_index", "decode_profile",
]
