"""Cylindrical Bessel functions J_n, Y_n and the Hankel function H_n^(1).

Self-contained double-precision routines for real non-negative arguments
and integer orders n >= 0, the only transcendental machinery needed by the
sound-soft disc far-field series.

Algorithms
----------
J_n : Miller's backward recurrence normalized by J_0 + 2*sum_m J_{2m} = 1,
      which is uniformly stable for all n and x; a two-term ascending
      series handles very small arguments.
Y_0, Y_1 : logarithmic Neumann series built from the J array,

      Y_0(x) = (2/pi) [ (ln(x/2)+gamma) J_0(x) - 2 sum_{m>=1} (-1)^m J_{2m}(x)/m ]
      Y_1(x) = (2/pi) [ (ln(x/2)+gamma) J_1(x) - J_0(x)/x
                        + sum_{m>=1} (-1)^m (J_{2m-1}(x)-J_{2m+1}(x))/m ]

      (the second line is -d/dx of the first).  Both reuse the Miller
      array and keep full accuracy on the whole supported range, unlike a
      truncated Hankel asymptotic expansion at moderate x.
Y_n : forward recurrence, which is stable upward because Y_n is the
      dominant solution.

Accuracy is pinned by the test suite against a slow extended-precision
series evaluator.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "bessel_j",
    "bessel_j_array",
    "bessel_y",
    "bessel_y_array",
    "hankel1",
    "j01_y01",
]

_EULER_GAMMA = 0.5772156649015329

# Orders of headroom for the backward recurrence start; generous so the
# seeded tail is fully decayed before the returned range begins.
_MILLER_ACC = 160


def _check_order(n: int) -> int:
    if not isinstance(n, (int, np.integer)):
        raise ValueError(f"order must be an integer, got {n!r}")
    if n < 0:
        raise ValueError(f"order must be non-negative, got {n}")
    return int(n)


def _check_argument(x: float, allow_zero: bool) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"argument must be finite, got {x!r}")
    if x < 0.0 or (x == 0.0 and not allow_zero):
        kind = "x >= 0" if allow_zero else "x > 0"
        raise ValueError(f"argument outside domain {kind}: {x!r}")
    return x


def bessel_j_array(nmax: int, x: float) -> np.ndarray:
    """Return ``[J_0(x), ..., J_nmax(x)]`` by normalized backward recurrence."""
    nmax = _check_order(nmax)
    x = _check_argument(x, allow_zero=True)

    if x == 0.0:
        out = np.zeros(nmax + 1)
        out[0] = 1.0
        return out
    if x < 1e-6:
        # two ascending-series terms; remainder is O(x^4) relative
        out = np.empty(nmax + 1)
        half = 0.5 * x
        term = 1.0
        for n in range(nmax + 1):
            out[n] = term * (1.0 - half * half / (n + 1))
            term *= half / (n + 1)
        return out

    top = max(nmax, int(math.ceil(x)))
    start = top + 1 + int(math.ceil(math.sqrt(_MILLER_ACC * max(top, 4))))
    if start % 2 == 1:
        start += 1

    out = np.zeros(nmax + 1)
    jp = 0.0          # J_{m+1} (unnormalized)
    jc = 1e-30        # J_m
    norm = 0.0        # accumulates J_0 + 2*sum J_{2m}
    for m in range(start, 0, -1):
        jm = (2.0 * m / x) * jc - jp
        jp = jc
        jc = jm
        if m - 1 <= nmax:
            out[m - 1] = jc
        if (m - 1) % 2 == 0 and m - 1 > 0:
            norm += 2.0 * jc
        if abs(jc) > 1e250:
            jc *= 1e-250
            jp *= 1e-250
            norm *= 1e-250
            out *= 1e-250
    norm += jc  # adds J_0
    out /= norm
    return out


def bessel_j(n: int, x: float) -> float:
    """Bessel function of the first kind J_n(x) for n >= 0, x >= 0."""
    n = _check_order(n)
    x = _check_argument(x, allow_zero=True)
    return float(bessel_j_array(n, x)[n])


def bessel_y_array(nmax: int, x: float) -> np.ndarray:
    """Return ``[Y_0(x), ..., Y_nmax(x)]`` for x > 0.

    Values that exceed the double range (large n, small x) saturate at
    -inf; they are never NaN.
    """
    nmax = _check_order(nmax)
    x = _check_argument(x, allow_zero=False)

    # J array long enough for the Neumann sums: J_m is negligible once
    # m exceeds x by a few dozen orders.
    jtop = int(math.ceil(x)) + 44
    j = bessel_j_array(jtop + 1, x)

    logf = math.log(0.5 * x) + _EULER_GAMMA
    s0 = 0.0
    s1 = 0.0
    sign = -1.0
    for m in range(1, jtop // 2 + 1):
        s0 += sign * j[2 * m] / m
        s1 += sign * (j[2 * m - 1] - j[2 * m + 1]) / m
        sign = -sign
    y0 = (2.0 / math.pi) * (logf * j[0] - 2.0 * s0)
    y1 = (2.0 / math.pi) * (logf * j[1] - j[0] / x + s1)

    out = np.empty(nmax + 1)
    out[0] = y0
    if nmax >= 1:
        out[1] = y1
    with np.errstate(over="ignore"):
        for n in range(1, nmax):
            nxt = (2.0 * n / x) * out[n] - out[n - 1]
            if math.isinf(nxt):
                # saturate the remaining (monotonically growing) tail
                out[n + 1:] = nxt
                break
            out[n + 1] = nxt
    return out


def bessel_y(n: int, x: float) -> float:
    """Bessel function of the second kind Y_n(x) for n >= 0, x > 0."""
    n = _check_order(n)
    x = _check_argument(x, allow_zero=False)
    return float(bessel_y_array(n, x)[n])


def hankel1(n: int, x: float) -> complex:
    """Hankel function of the first kind, H_n^(1)(x) = J_n(x) + i Y_n(x)."""
    n = _check_order(n)
    x = _check_argument(x, allow_zero=False)
    return complex(bessel_j(n, x), bessel_y(n, x))


def j01_y01(x: np.ndarray):
    """Vectorized J_0, J_1, Y_0, Y_1 over an array of positive arguments.

    Same algorithms as the scalar routines (Miller recurrence plus the
    logarithmic Neumann series), run across the whole array at once; this
    is the boundary-integral fast path, which needs orders 0 and 1 at many
    arguments.
    """
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        z = np.empty(0)
        return z, z.copy(), z.copy(), z.copy()
    if not np.all(np.isfinite(x)) or np.any(x <= 0.0):
        raise ValueError("arguments must be positive and finite")

    flat = x.reshape(-1)
    xmax = float(flat.max())
    jtop = int(math.ceil(xmax)) + 44
    start = jtop + 2 + int(math.ceil(math.sqrt(_MILLER_ACC * max(jtop, 4))))
    if start % 2 == 1:
        start += 1

    npts = flat.size
    j = np.zeros((jtop + 2, npts))
    jp = np.zeros(npts)
    jc = np.full(npts, 1e-30)
    norm = np.zeros(npts)
    for m in range(start, 0, -1):
        jm = (2.0 * m / flat) * jc - jp
        jp = jc
        jc = jm
        if m - 1 <= jtop + 1:
            j[m - 1] = jc
        if (m - 1) % 2 == 0 and m - 1 > 0:
            norm += 2.0 * jc
        big = np.abs(jc) > 1e250
        if big.any():
            jc[big] *= 1e-250
            jp[big] *= 1e-250
            norm[big] *= 1e-250
            j[:, big] *= 1e-250
    norm += jc
    j /= norm

    logf = np.log(0.5 * flat) + _EULER_GAMMA
    s0 = np.zeros(npts)
    s1 = np.zeros(npts)
    sign = -1.0
    for m in range(1, jtop // 2 + 1):
        s0 += sign * j[2 * m] / m
        s1 += sign * (j[2 * m - 1] - j[2 * m + 1]) / m
        sign = -sign
    y0 = (2.0 / math.pi) * (logf * j[0] - 2.0 * s0)
    y1 = (2.0 / math.pi) * (logf * j[1] - j[0] / flat + s1)

    shape = x.shape
    return (
        j[0].reshape(shape),
        j[1].reshape(shape),
        y0.reshape(shape),
        y1.reshape(shape),
    )
