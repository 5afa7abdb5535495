"""Zero-mean circularly symmetric Gaussian mixtures.

The noise-plus-interference variable of the multi-cell model is an exact
finite mixture of zero-mean complex Gaussians: each interferer contributes
its power with probability 1/n_f (subcarrier collision) and nothing
otherwise, so conditioning on the collision subset makes the total exactly
Gaussian with variance noise_var + sum of colliding powers.  This module
provides that exact construction by subset enumeration, density evaluation,
simplified EM fitting (all component means are zero, so the squared
magnitude is a sufficient statistic), differential entropy bounds in two
conventions, and an exact radial-quadrature entropy used as the oracle.

Convention note: ``printed`` entropy formulas have the shape
1/2 + sum w*log2(2*pi*e*sigma) with sigma the square root of the complex
variance; ``consistent`` uses the complex-Gaussian entropy
sum w*log2(pi*e*sigma^2).  Only the consistent pair brackets the true
mixture entropy, so oracles and the rate pipeline default to it; the
printed pair is kept for tabulated display outputs.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from . import _backend

_LOG2_2PIE = math.log2(2.0 * math.pi * math.e)
_LOG2_PIE = math.log2(math.pi * math.e)
_WEIGHT_SUM_TOL = 1e-9
_MERGE_REL_TOL = 1e-12
_MAX_ENUM_TERMS = 20
_CONVENTIONS = ("printed", "consistent")


@dataclass(frozen=True)
class MoGDist:
    """Weights and total complex variances of a zero-mean Gaussian mixture."""

    weights: tuple[float, ...]
    variances: tuple[float, ...]

    def __post_init__(self):
        if len(self.weights) != len(self.variances) or not self.weights:
            raise ValueError("weights and variances must be equal-length, non-empty")
        for w in self.weights:
            if not (w >= 0 and math.isfinite(w)):
                raise ValueError(f"weights must be >= 0 and finite, got {w}")
        for v in self.variances:
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"variances must be > 0 and finite, got {v}")
        if abs(sum(self.weights) - 1.0) > _WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1, got {sum(self.weights)}")

    @property
    def q(self) -> int:
        return len(self.weights)

    def mean_power(self) -> float:
        return float(sum(w * v for w, v in zip(self.weights, self.variances)))


@dataclass(frozen=True)
class EmSettings:
    """Fit size and stopping controls for the zero-mean EM."""

    q_prime: int = 4
    max_iters: int = 500
    loglik_tol: float = 1e-8  # per sample; threshold is loglik_tol * n_samples
    restarts: int = 5

    def __post_init__(self):
        if self.q_prime < 1:
            raise ValueError(f"q_prime must be >= 1, got {self.q_prime}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.loglik_tol > 0:
            raise ValueError(f"loglik_tol must be > 0, got {self.loglik_tol}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")


@dataclass(frozen=True)
class EmFitResult:
    """Best-restart fit: distribution, complex log-likelihood (nats), history."""

    dist: MoGDist
    loglik: float
    iterations: int
    histories: tuple[tuple[float, ...], ...]


def mog_pdf(dist: MoGDist, z) -> np.ndarray | float:
    """Complex-plane density sum_k w_k/(pi v_k) exp(-|z|^2/v_k)."""
    z = np.asarray(z)
    w = np.array(dist.weights)
    v = np.array(dist.variances)
    u = (z.real ** 2 + z.imag ** 2)[..., np.newaxis]
    dens = np.sum(w / (np.pi * v) * np.exp(-u / v), axis=-1)
    return float(dens) if dens.ndim == 0 else dens


def mog_pdf_real(dist: MoGDist, x) -> np.ndarray | float:
    """Density of the real part: sum_k w_k/sqrt(pi v_k) exp(-x^2/v_k)."""
    x = np.asarray(x, dtype=np.float64)
    w = np.array(dist.weights)
    v = np.array(dist.variances)
    u = (x * x)[..., np.newaxis]
    dens = np.sum(w / np.sqrt(np.pi * v) * np.exp(-u / v), axis=-1)
    return float(dens) if dens.ndim == 0 else dens


def sample_mog(dist: MoGDist, n: int, rng: np.random.Generator) -> np.ndarray:
    """n complex draws from the mixture (component, then circular Gaussian)."""
    comp = rng.choice(dist.q, size=n, p=np.array(dist.weights) / sum(dist.weights))
    scale = np.sqrt(np.array(dist.variances)[comp] / 2.0)
    parts = rng.standard_normal((n, 2)) * scale[:, np.newaxis]
    return parts[:, 0] + 1j * parts[:, 1]


def _merge_components(variances: np.ndarray,
                      weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(variances, kind="stable")
    v_sorted = variances[order]
    w_sorted = weights[order]
    out_v: list[float] = []
    out_w: list[float] = []
    for v, w in zip(v_sorted, w_sorted):
        if out_v and v - out_v[-1] <= _MERGE_REL_TOL * v:
            out_w[-1] += w
        else:
            out_v.append(v)
            out_w.append(w)
    return np.array(out_v), np.array(out_w)


def exact_mog_enumeration(powers: Sequence[float], n_f: int,
                          noise_var: float) -> MoGDist:
    """Exact mixture of noise plus interference for given interferer powers.

    Each of the len(powers) interferers collides with probability 1/n_f and
    then adds its power to the component variance.  Components with equal
    variances (1e-12 relative) are merged, so equal-power interferers yield
    binomial weights.  Valid for constant-modulus symbol constellations,
    where a colliding interferer's contribution is exactly Gaussian.
    """
    if len(powers) > _MAX_ENUM_TERMS:
        raise ValueError(
            f"enumeration over {len(powers)} interferers needs 2^{len(powers)} "
            f"components; limit is {_MAX_ENUM_TERMS}")
    if n_f < 1:
        raise ValueError(f"n_f must be >= 1, got {n_f}")
    if not noise_var > 0:
        raise ValueError(f"noise_var must be > 0, got {noise_var}")
    p_hit = 1.0 / n_f
    variances = np.array([float(noise_var)])
    weights = np.array([1.0])
    for t in powers:
        if not t >= 0:
            raise ValueError(f"interferer power must be >= 0, got {t}")
        variances = np.concatenate([variances, variances + float(t)])
        weights = np.concatenate([weights * (1.0 - p_hit), weights * p_hit])
        variances, weights = _merge_components(variances, weights)
    weights = weights / weights.sum()
    return MoGDist(tuple(weights.tolist()), tuple(variances.tolist()))


def _em_initial_variances(mean_power: float, q: int, restart: int,
                          rng: np.random.Generator) -> np.ndarray:
    base = np.geomspace(0.5 * mean_power, 20.0 * mean_power, q)
    if restart == 0:
        return base
    return base * rng.lognormal(0.0, 0.75, q)


def em_fit(samples, settings: EmSettings,
           rng: np.random.Generator | None = None) -> EmFitResult:
    """Fit a zero-mean complex Gaussian mixture by EM on |tau|^2.

    ``samples`` is a complex array or any object with a ``samples`` array
    attribute.  Restart 0 starts from variances log-spaced over
    [0.5, 20] times the mean power with uniform weights; later restarts
    jitter that grid using ``rng`` (a fixed-seed generator by default).
    The best final log-likelihood wins.  The log-likelihood is
    nondecreasing across iterations (the baseline resets if a collapsed
    component is dropped) and the weighted variance total equals the
    sample mean power after every update; violations raise.
    """
    tau = np.asarray(getattr(samples, "samples", samples))
    u = np.ascontiguousarray((tau.real ** 2 + tau.imag ** 2), dtype=np.float64)
    n = u.shape[0]
    if n < 10 * settings.q_prime:
        raise ValueError(
            f"need at least {10 * settings.q_prime} samples to fit "
            f"{settings.q_prime} components, got {n}")
    if rng is None:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(0)))
    mean_u = float(u.mean())
    const = -n * math.log(math.pi)
    if u.max() == u.min():
        if mean_u <= 0:
            raise ValueError("all samples are zero; no positive-variance fit exists")
        loglik = const - n * (math.log(mean_u) + 1.0)
        return EmFitResult(MoGDist((1.0,), (mean_u,)), loglik, 0, ((loglik,),))

    best: tuple[float, MoGDist, int] | None = None
    histories: list[tuple[float, ...]] = []
    for restart in range(settings.restarts):
        w = np.full(settings.q_prime, 1.0 / settings.q_prime)
        s2 = _em_initial_variances(mean_u, settings.q_prime, restart, rng)
        history: list[float] = []
        prev_ll: float | None = None
        iters = 0
        for _ in range(settings.max_iters):
            w, s2, ll_kernel = _backend.em_pass(u, w, s2)
            iters += 1
            ll = ll_kernel + const
            total = float(np.sum(w * s2))
            if abs(total - mean_u) > 1e-9 * mean_u:
                raise ArithmeticError(
                    f"weighted variance total {total} drifted from sample "
                    f"mean power {mean_u}")
            if prev_ll is not None and ll < prev_ll - 1e-9 * max(1.0, abs(prev_ll)):
                raise ArithmeticError(
                    f"log-likelihood decreased: {prev_ll} -> {ll}")
            converged = prev_ll is not None and abs(ll - prev_ll) \
                < settings.loglik_tol * n
            history.append(ll)
            prev_ll = ll
            w, s2, pruned = _prune_collapsed(w, s2, mean_u)
            if pruned:
                # the component set changed; comparisons restart from here
                prev_ll = None
            if converged:
                break
        ll_final = float(_backend.em_pass(u, w, s2)[2]) + const
        history.append(ll_final)
        histories.append(tuple(history))
        if best is None or ll_final > best[0]:
            keep = w > 1e-12
            w_kept = w[keep] / w[keep].sum()
            dist = _sorted_dist(w_kept, s2[keep])
            best = (ll_final, dist, iters)
    assert best is not None
    return EmFitResult(best[1], best[0], best[2], tuple(histories))


def _prune_collapsed(w: np.ndarray, s2: np.ndarray,
                     mean_power: float) -> tuple[np.ndarray, np.ndarray, bool]:
    collapsed = s2 < 1e-12 * mean_power
    if not collapsed.any():
        return w, s2, False
    if collapsed.all():
        raise ArithmeticError("every mixture component collapsed")
    warnings.warn(
        f"dropping {int(collapsed.sum())} collapsed mixture component(s)",
        RuntimeWarning, stacklevel=3)
    w = w[~collapsed]
    s2 = s2[~collapsed]
    return w / w.sum(), s2, True


def _sorted_dist(w: np.ndarray, s2: np.ndarray) -> MoGDist:
    order = np.argsort(s2, kind="stable")
    return MoGDist(tuple(w[order].tolist()), tuple(s2[order].tolist()))


def _check_convention(convention: str) -> None:
    if convention not in _CONVENTIONS:
        raise ValueError(
            f"convention must be one of {_CONVENTIONS}, got {convention!r}")


def entropy_lower_bound_conditional(dist: MoGDist,
                                    convention: str = "printed") -> float:
    """Mixture-of-entropies lower bound on the conditional entropy, in bits.

    printed: 1/2 + sum w*log2(2*pi*e*sigma); consistent:
    sum w*log2(pi*e*sigma^2), which is a true lower bound for the complex
    mixture entropy (concavity of entropy).
    """
    _check_convention(convention)
    if convention == "printed":
        return 0.5 + sum(w * (_LOG2_2PIE + 0.5 * math.log2(v))
                         for w, v in zip(dist.weights, dist.variances))
    return sum(w * (_LOG2_PIE + math.log2(v))
               for w, v in zip(dist.weights, dist.variances))


def entropy_upper_bound(dist: MoGDist, convention: str = "printed") -> float:
    """Cross-term entropy upper bound, in bits; weights must all be > 0.

    printed: 1/2 + sum w*log2(2*pi*e*sigma/w); consistent:
    sum w*log2(pi*e*sigma^2/w), a true upper bound for the complex mixture
    entropy (the extra sum w*log2(1/w) dominates the mixing deficit).
    """
    _check_convention(convention)
    for w in dist.weights:
        if w == 0:
            raise ValueError(
                "zero-weight component; remove it before evaluating the bound")
    if convention == "printed":
        return 0.5 + sum(w * (_LOG2_2PIE + 0.5 * math.log2(v) - math.log2(w))
                         for w, v in zip(dist.weights, dist.variances))
    return sum(w * (_LOG2_PIE + math.log2(v) - math.log2(w))
               for w, v in zip(dist.weights, dist.variances))


def sum_rate_upper_bound(noise_ici: MoGDist, received: MoGDist,
                         convention: str = "printed") -> float:
    """Upper bound on the multi-cell rate: H(received) upper bound minus
    H(noise+interference) lower bound, in bits."""
    return (entropy_upper_bound(received, convention)
            - entropy_lower_bound_conditional(noise_ici, convention))


def entropy_exact_radial(dist: MoGDist) -> float:
    """Differential entropy (bits, complex convention) by radial quadrature.

    Circular symmetry reduces the plane integral of -p log2 p to
    -integral_0^inf pi * g(u) log2 g(u) du with u = |z|^2 and
    g(u) = sum w/(pi v) exp(-u/v).
    """
    w = np.array(dist.weights)
    v = np.array(dist.variances)
    keep = w > 0
    w, v = w[keep], v[keep]
    coeff = w / (math.pi * v)

    def integrand(u: float) -> float:
        g = float(np.sum(coeff * np.exp(-u / v)))
        if g <= 0.0:
            return 0.0
        return -math.pi * g * math.log2(g)

    upper = 200.0 * float(v.max())
    h1, e1 = quad(integrand, 0.0, upper, limit=400, epsabs=1e-10, epsrel=1e-10)
    h2, e2 = quad(integrand, upper, np.inf, limit=200, epsabs=1e-12)
    if e1 + e2 > 1e-6:
        raise ArithmeticError(
            f"entropy quadrature error estimate {e1 + e2} exceeds 1e-6 bits")
    return h1 + h2


def mog_to_json(dist: MoGDist, meta: dict | None = None) -> str:
    """Serialize as {"weights": [...], "variances": [...], "meta": {...}}."""
    payload = {"weights": list(dist.weights),
               "variances": list(dist.variances),
               "meta": dict(meta or {})}
    return json.dumps(payload, sort_keys=True, indent=2)


def mog_from_json(text: str) -> tuple[MoGDist, dict]:
    payload = json.loads(text)
    dist = MoGDist(tuple(float(w) for w in payload["weights"]),
                   tuple(float(v) for v in payload["variances"]))
    return dist, dict(payload.get("meta", {}))
