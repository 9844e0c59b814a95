"""Small input-validation helpers shared across the package."""

from __future__ import annotations

import numpy as np


def check_positive(name: str, value: float) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return value


def as_point(z) -> np.ndarray:
    z = np.asarray(z, dtype=float).reshape(-1)
    if z.shape != (2,) or not np.all(np.isfinite(z)):
        raise ValueError(f"expected a finite 2D point, got {z!r}")
    return z


def as_unit_vector(v, tol: float = 1e-12) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (2,):
        raise ValueError(f"expected a 2D vector, got {v!r}")
    norm = float(np.hypot(v[0], v[1]))
    if not np.isfinite(norm) or abs(norm - 1.0) > tol:
        raise ValueError(f"expected a unit vector, got norm {norm!r}")
    return v


def check_complex_vector(name: str, u, length: int | None = None) -> np.ndarray:
    u = np.asarray(u, dtype=complex).reshape(-1)
    if length is not None and u.shape[0] != length:
        raise ValueError(f"{name} has length {u.shape[0]}, expected {length}")
    if not np.all(np.isfinite(u.real)) or not np.all(np.isfinite(u.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return u
