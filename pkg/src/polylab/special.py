"""Digamma and trigamma on the positive half-line.

Upward recurrence to x >= 10, then the Stirling-type asymptotic series.  With
terms through x**-12 the truncation error is below 1e-15 at the threshold.
"""

import math

_SHIFT = 10.0

# Bernoulli-number coefficients B_{2k} / (2k) for the digamma series
_DIGAMMA_COEF = (1 / 12, -1 / 120, 1 / 252, -1 / 240, 1 / 132, -691 / 32760)
# B_{2k} for the trigamma series
_TRIGAMMA_COEF = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730)


def _check(x):
    x = float(x)
    if not x > 0.0 or math.isinf(x):
        raise ValueError(f"argument must be positive and finite, got {x}")
    return x


def digamma(x: float) -> float:
    x = _check(x)
    acc = 0.0
    while x < _SHIFT:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    p = inv2
    for c in _DIGAMMA_COEF:
        series += c * p
        p *= inv2
    return acc + math.log(x) - 0.5 / x - series


def trigamma(x: float) -> float:
    x = _check(x)
    acc = 0.0
    while x < _SHIFT:
        acc += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    series = 0.0
    p = inv2 * inv
    for c in _TRIGAMMA_COEF:
        series += c * p
        p *= inv2
    return acc + inv + 0.5 * inv2 + series
