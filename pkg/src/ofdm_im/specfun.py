"""Special functions needed by the closed-form rate and error expressions.

Only four functions are required, each on a restricted domain:

* the exponential integral Ei at strictly negative arguments,
* the error function (plus erfc / scaled erfcx to dodge cancellation),
* exact integer binomial coefficients,
* the binary entropy function in bits.

Everything is implemented from scratch (series + continued fractions) and
validated in the test suite against independent quadrature oracles and
scipy.  A scaled form ``e1_scaled(t) = e^t * E1(t)`` is exposed because the
rate formula multiplies Ei(-1/rho) by exp(1/rho), which overflows near
rho -> 0 if evaluated as two factors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

_EULER_GAMMA = 0.5772156649015328606
_SQRT_PI = math.sqrt(math.pi)
_MAX_ITERS = 500
_EPS = 1e-17


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative tolerance pair used by numeric comparisons."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-12

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")


def _e1_series(t: float) -> float:
    # E1(t) = -gamma - ln t + sum_{n>=1} (-1)^{n+1} t^n / (n * n!), t > 0
    total = -_EULER_GAMMA - math.log(t)
    term = 1.0
    for n in range(1, _MAX_ITERS):
        term *= -t / n
        delta = -term / n
        total += delta
        if abs(delta) < _EPS * abs(total) + 1e-300:
            return total
    raise ArithmeticError(f"E1 series did not converge at t={t}")


def _e1_cf_scaled(t: float) -> float:
    # e^t * E1(t) via the continued fraction
    #   E1(t) = e^-t / (t + 1 - 1/(t + 3 - 4/(t + 5 - 9/(...))))
    # evaluated with the modified Lentz algorithm.
    tiny = 1e-300
    f = t + 1.0
    if f == 0.0:
        f = tiny
    c = f
    d = 0.0
    for j in range(1, _MAX_ITERS):
        a = -float(j) * float(j)
        b = t + 2.0 * j + 1.0
        d = b + a * d
        if d == 0.0:
            d = tiny
        c = b + a / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < _EPS:
            return 1.0 / f
    raise ArithmeticError(f"E1 continued fraction did not converge at t={t}")


# Series/continued-fraction crossover.  At t=4 the alternating series still
# carries ~3e-13 relative cancellation error while the continued fraction
# already converges in a handful of terms, so the switch sits there rather
# than at larger t.
_E1_CROSSOVER = 4.0


def e1_scaled(t: float) -> float:
    """Scaled exponential integral ``e^t * E1(t)`` for t > 0.

    Stays bounded for all t > 0 (it decays like 1/t), unlike the raw pair
    ``exp(t)`` / ``E1(t)`` whose product overflows past t ~ 709.
    """
    if not t > 0:
        raise ValueError(f"e1_scaled requires t > 0, got {t}")
    if t < _E1_CROSSOVER:
        return math.exp(t) * _e1_series(t)
    return _e1_cf_scaled(t)


def exp_integral_ei(x: float) -> float:
    """Exponential integral Ei(x) for x < 0.

    Ei(x) = -int_{-x}^inf e^-t / t dt; strictly negative, decreasing from
    0 toward -inf as x rises to 0.  Positive arguments are outside the
    needed domain.
    """
    if not x < 0:
        raise ValueError(f"exp_integral_ei requires x < 0, got {x}")
    t = -x
    # Ei(-t) = -E1(t)
    return -e1_scaled(t) * math.exp(-t) if t >= _E1_CROSSOVER else -_e1_series(t)


def _erf_series(x: float) -> float:
    # erf(x) = (2x/sqrt(pi)) e^{-x^2} sum_n (2x^2)^n / (1*3*...*(2n+1)),
    # all terms positive, so no cancellation.
    xx = 2.0 * x * x
    term = 1.0
    total = 1.0
    for n in range(1, _MAX_ITERS):
        term *= xx / (2 * n + 1)
        total += term
        if term < _EPS * total:
            return (2.0 * x / _SQRT_PI) * math.exp(-x * x) * total
    raise ArithmeticError(f"erf series did not converge at x={x}")


def _erfcx_cf(x: float) -> float:
    # e^{x^2} erfc(x) = (1/sqrt(pi)) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    # (Laplace continued fraction), modified Lentz; accurate for x >= ~2.
    tiny = 1e-300
    f = x
    c = f
    d = 0.0
    for j in range(1, _MAX_ITERS):
        a = 0.5 * j
        b = x
        d = b + a * d
        if d == 0.0:
            d = tiny
        c = b + a / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < _EPS:
            return 1.0 / (f * _SQRT_PI)
    raise ArithmeticError(f"erfcx continued fraction did not converge at x={x}")


_ERF_CROSSOVER = 2.0


def erf(x: float) -> float:
    """Error function, odd, |erf| < 1 for finite x."""
    if x < 0:
        return -erf(-x)
    if x == 0.0:
        return 0.0
    if x < _ERF_CROSSOVER:
        return _erf_series(x)
    return 1.0 - _erfcx_cf(x) * math.exp(-x * x)


def erfc(x: float) -> float:
    """Complementary error function 1 - erf(x), without the cancellation."""
    if x < 0:
        return 2.0 - erfc(-x)
    if x < _ERF_CROSSOVER:
        return 1.0 - _erf_series(x)
    return _erfcx_cf(x) * math.exp(-x * x)


def erfcx(x: float) -> float:
    """Scaled complementary error function ``e^{x^2} erfc(x)``, x >= 0.

    Bounded for any nonnegative x (decays like 1/(x sqrt(pi))); the closed
    form for the index detection error needs erfc(y) * exp(y^2) at y values
    where both factors over/underflow.
    """
    if x < 0:
        raise ValueError(f"erfcx requires x >= 0, got {x}")
    if x < _ERF_CROSSOVER:
        return math.exp(x * x) * (1.0 - _erf_series(x)) if x > 0 else 1.0
    return _erfcx_cf(x)


def binom(n: int, k: int) -> int:
    """Exact binomial coefficient n! / (k! (n-k)!)."""
    if n < 0 or k < 0:
        raise ValueError(f"binom requires nonnegative arguments, got ({n}, {k})")
    if k > n:
        raise ValueError(f"binom requires k <= n, got ({n}, {k})")
    return math.comb(n, k)


def binary_entropy(p: float) -> float:
    """Binary entropy -p log2 p - (1-p) log2 (1-p) in bits, with 0 log 0 = 0.

    Inputs within 1e-15 outside [0, 1] are clamped (upstream probability
    arithmetic rounds past the endpoints).
    """
    if -1e-15 <= p < 0.0:
        p = 0.0
    elif 1.0 < p <= 1.0 + 1e-15:
        p = 1.0
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"binary_entropy requires p in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)
