# segmentation/spectral_angle.py
import math

import numpy as np

from utils.errors import ArgumentError, DegenerateInputError


def sam_angle(a, b) -> float:
    """Spectral angle in radians between two spectral vectors."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ArgumentError(f"spectral vectors differ in length: {a.size} vs {b.size}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise DegenerateInputError("spectral angle is undefined for a zero vector")
    cosine = float(np.dot(a, b)) / (norm_a * norm_b)
    return math.acos(min(1.0, max(-1.0, cosine)))


def spectral_heterogeneity(a, b) -> float:
    """
    sam_angle with a total fallback for zero vectors: two zero vectors are
    identical (0), a zero and a non-zero vector are orthogonal (pi/2).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    zero_a = not np.any(a)
    zero_b = not np.any(b)
    if zero_a and zero_b:
        return 0.0
    if zero_a or zero_b:
        return math.pi / 2
    return sam_angle(a, b)
