"""Single-cell OFDM index modulation rate analytics.

One of n_f subcarriers is active per transmission; the receiver detects the
active index by maximum received power.  The achievable rate splits into
r1, the Rayleigh-fading rate of the symbol carried on the active subcarrier
with Gaussian input, and r2, the rate carried by the index choice itself,
modeled as an n_f-ary symmetric channel whose error probability has a
closed form (an alternating binomial sum of scaled complementary error
functions).  All SNR arguments here are linear; dB conversion belongs to
callers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from .specfun import binary_entropy, binom, e1_scaled, erfcx

_SQRT_HALF_PI = math.sqrt(math.pi / 2.0)
_LN2 = math.log(2.0)

# Above this subcarrier count the alternating sum exceeds what compensated
# double summation can cancel (terms ~1e15 against results ~1e-1), so the
# evaluation switches to 50-digit arithmetic.
_COMPENSATED_NF_LIMIT = 32
_MP_DPS = 50


@dataclass(frozen=True)
class SingleCellConfig:
    """Subcarrier count and linear SNR evaluation grid."""

    n_f: int
    snr_grid: tuple[float, ...]

    def __post_init__(self):
        _validate_nf(self.n_f)
        if not self.snr_grid:
            raise ValueError("snr_grid must be non-empty")
        for rho in self.snr_grid:
            _validate_rho(rho)


@dataclass(frozen=True)
class RatePoint:
    """Rates and index error probability at one SNR point."""

    snr: float
    r1: float
    p_err: float
    r2: float
    r_total: float

    def __post_init__(self):
        if not 0.0 <= self.p_err <= 1.0:
            raise ValueError(f"p_err outside [0, 1]: {self.p_err}")
        if self.r_total != self.r1 + self.r2:
            raise ValueError("r_total must equal r1 + r2")


def _validate_rho(rho: float) -> None:
    if not (rho > 0 and math.isfinite(rho)):
        raise ValueError(f"SNR must be positive and finite, got {rho}")


def _validate_nf(n_f: int) -> None:
    if not (isinstance(n_f, int) and n_f >= 2):
        raise ValueError(f"subcarrier count must be an integer >= 2, got {n_f}")


def rate_symbol(rho: float) -> float:
    """Ergodic rate (bits/use) of a Rayleigh channel with Gaussian input.

    Evaluates integral_0^inf log2(1+z*rho) e^-z dz in the scaled form
    e^(1/rho) E1(1/rho) / ln 2, which stays finite for any rho > 0.
    """
    _validate_rho(rho)
    return e1_scaled(1.0 / rho) / _LN2


def _kahan_sum_descending(terms: list[float]) -> float:
    # compensated summation, largest magnitudes first
    total = 0.0
    carry = 0.0
    for t in sorted(terms, key=abs, reverse=True):
        y = t - carry
        s = total + y
        carry = (s - total) - y
        total = s
    return total


def _index_error_sum_mp(rho: float, n_f: int) -> float:
    with mpmath.workdps(_MP_DPS):
        r = mpmath.mpf(rho)
        total = mpmath.mpf(1)
        for m in range(2, n_f + 1):
            y2 = m / (2 * r * (m - 1))
            y = mpmath.sqrt(y2)
            term = (binom(n_f - 1, n_f - m)
                    * mpmath.sqrt(mpmath.pi / 2)
                    * mpmath.erfc(y) * mpmath.exp(y2)
                    / mpmath.sqrt(r * (m - 1) * m))
            total += term if (m - 1) % 2 == 0 else -term
        return float(total)


def index_error_prob(rho: float, n_f: int) -> float:
    """Probability that max-power detection picks the wrong subcarrier index.

    Closed form: an alternating sum over m = n_f - k of binomially weighted
    scaled erfc terms; the m = 1 summand is the analytic limit 1 (its raw
    expression is 0/0).  Decreasing in rho, tends to (n_f-1)/n_f as rho -> 0
    and to 0 as rho -> inf.
    """
    _validate_rho(rho)
    _validate_nf(n_f)
    if n_f > _COMPENSATED_NF_LIMIT:
        total = _index_error_sum_mp(rho, n_f)
    else:
        terms = [1.0]
        for m in range(2, n_f + 1):
            y2 = m / (2.0 * rho * (m - 1.0))
            sign = 1.0 if (m - 1) % 2 == 0 else -1.0
            terms.append(sign * binom(n_f - 1, n_f - m) * _SQRT_HALF_PI
                         * erfcx(math.sqrt(y2))
                         / math.sqrt(rho * (m - 1.0) * m))
        total = _kahan_sum_descending(terms)
    return min(1.0, max(0.0, 1.0 - total))


def rate_index_from_error(p_err: float, n_f: int) -> float:
    """Rate (bits/use) of an n_f-ary symmetric channel with error prob p_err.

    log2(n_f) - Hb(p_err) - p_err*log2(n_f - 1); exactly log2(n_f) at
    p_err = 0 and 0 at the uniform-output point p_err = (n_f-1)/n_f.
    """
    _validate_nf(n_f)
    if not 0.0 <= p_err <= 1.0:
        raise ValueError(f"error probability outside [0, 1]: {p_err}")
    r2 = math.log2(n_f) - binary_entropy(p_err) - p_err * math.log2(n_f - 1)
    if r2 < 0.0:
        # rounding at the uniform-output point; anything materially negative
        # means p_err exceeded (n_f-1)/n_f, where the formula is not a rate
        if r2 < -1e-9:
            raise ArithmeticError(
                f"index rate formula returned {r2} (p_err={p_err}, n_f={n_f})")
        r2 = 0.0
    return r2


def rate_index(rho: float, n_f: int) -> float:
    """Index rate r2 (bits/use) at linear SNR rho."""
    return rate_index_from_error(index_error_prob(rho, n_f), n_f)


def rate_total(cfg: SingleCellConfig) -> list[RatePoint]:
    """Evaluate r1, index error probability, r2, and r1+r2 on the SNR grid."""
    points = []
    for rho in cfg.snr_grid:
        r1 = rate_symbol(rho)
        p = index_error_prob(rho, cfg.n_f)
        r2 = rate_index_from_error(p, cfg.n_f)
        points.append(RatePoint(snr=rho, r1=r1, p_err=p, r2=r2,
                                r_total=r1 + r2))
    return points


def optimal_nf(rho: float, nf_max: int, powers_of_two: bool = True) -> int:
    """Subcarrier count in [2, nf_max] maximizing the index rate r2 at rho.

    By default only powers of two are candidates (integer index bit counts);
    powers_of_two=False searches every integer.  Ties break toward the
    smaller count.
    """
    _validate_rho(rho)
    if nf_max < 2:
        raise ValueError(f"nf_max must be >= 2, got {nf_max}")
    if powers_of_two:
        candidates = []
        n = 2
        while n <= nf_max:
            candidates.append(n)
            n *= 2
    else:
        candidates = list(range(2, nf_max + 1))
    best_nf = candidates[0]
    best_r2 = rate_index(rho, best_nf)
    for n_f in candidates[1:]:
        r2 = rate_index(rho, n_f)
        if r2 > best_r2:
            best_nf, best_r2 = n_f, r2
    return best_nf
