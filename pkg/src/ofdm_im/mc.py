"""Monte Carlo oracles for the analytic results.

Every sampler here is deterministic given a TrialPlan: trials split into
fixed-size chunks, each chunk owns a counter-derived random stream
(SeedSequence spawn keyed by (stream id, chunk index) feeding a Philox
generator), and per-chunk draw order is fixed.  Merging is by chunk index,
so results are byte-identical at any worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Callable

import numpy as np

from . import _backend, geometry
from .mog import EmSettings, MoGDist, em_fit, entropy_exact_radial, mog_pdf

if TYPE_CHECKING:
    from .multicell import MultiCellConfig

_STREAM_INDEX_ERROR = 1
_STREAM_SINR = 2
_STREAM_ICI = 3
_STREAM_RECEIVED = 4
_STREAM_EM = 5
_STREAM_SWEEP = 6

_DEFAULT_CHUNK = 250_000
# cap on expected interferer draws held in memory at once (SINR sampler)
_SINR_POINT_BUDGET = 5_000_000


@dataclass(frozen=True)
class TrialPlan:
    """Trial count, master seed, and chunk size of one Monte Carlo run."""

    trials: int
    master_seed: int
    chunk_size: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValueError(
                f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if self.chunk_size is None:
            object.__setattr__(self, "chunk_size",
                               min(self.trials, _DEFAULT_CHUNK))
        if not 1 <= self.chunk_size <= self.trials:
            raise ValueError(
                f"chunk_size must be in [1, trials], got {self.chunk_size}")

    def chunks(self) -> list[tuple[int, int]]:
        """(chunk index, chunk trial count) pairs covering all trials."""
        full, rem = divmod(self.trials, self.chunk_size)
        sizes = [self.chunk_size] * full + ([rem] if rem else [])
        return list(enumerate(sizes))


@dataclass(frozen=True, eq=False)
class ComplexSampleSet:
    """Complex draws plus a descriptor of the scenario that produced them."""

    samples: np.ndarray
    meta: dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.samples) == 0:
            raise ValueError("sample set must be non-empty")
        if not np.all(np.isfinite(self.samples.real)) \
                or not np.all(np.isfinite(self.samples.imag)):
            raise ValueError("sample set contains non-finite values")

    def __len__(self) -> int:
        return len(self.samples)

    def write_csv(self, path: str | Path) -> Path:
        """One sample per row as 're,im', after sorted '# key = value' lines."""
        path = Path(path)
        lines = [f"# {k} = {self.meta[k]}" for k in sorted(self.meta)]
        lines.append("re,im")
        for z in self.samples:
            # plain-float repr keeps rows round-trippable and backend-neutral
            lines.append(f"{float(z.real)!r},{float(z.imag)!r}")
        path.write_text("\n".join(lines) + "\n")
        return path


@dataclass(frozen=True, eq=False)
class ErrorEstimate:
    """Error fraction, its binomial standard error, and the detection counts."""

    estimate: float
    stderr: float
    trials: int
    confusion: np.ndarray

    def three_sigma(self) -> float:
        return 3.0 * self.stderr


@dataclass(frozen=True)
class MutualInfoEstimate:
    """Plug-in rate estimate from mixture fits of received and interference sets."""

    mi: float
    stderr: float
    fit_received: MoGDist
    fit_noise_ici: MoGDist
    h_received: float
    h_noise_ici: float


def _chunk_rng(master_seed: int, stream: int,
               chunk_index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(master_seed, spawn_key=(stream, chunk_index))
    return np.random.Generator(np.random.Philox(seq))


def derive_seed(master_seed: int, index: int) -> int:
    """A 64-bit seed for sub-run ``index``, decorrelated from the master."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(_STREAM_SWEEP, index))
    return int(seq.generate_state(1, np.uint64)[0])


def _map_chunks(fn: Callable[[int, int], object], plan: TrialPlan,
                workers: int) -> list:
    chunks = plan.chunks()
    if workers <= 1:
        return [fn(idx, size) for idx, size in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: fn(c[0], c[1]), chunks))


def _complex_normal_parts(rng: np.random.Generator, shape: tuple[int, ...],
                          var: float) -> tuple[np.ndarray, np.ndarray]:
    # one generator call, fixed draw order, split into contiguous re/im
    parts = rng.standard_normal(shape + (2,)) * math.sqrt(var / 2.0)
    return (np.ascontiguousarray(parts[..., 0]),
            np.ascontiguousarray(parts[..., 1]))


def qam_constellation(order: int) -> np.ndarray:
    """Square QAM points with exactly unit average energy."""
    if order not in (4, 16, 64):
        raise ValueError(f"qam order must be 4, 16, or 64, got {order}")
    side = int(round(math.sqrt(order)))
    levels = np.arange(-(side - 1), side, 2, dtype=np.float64)
    re, im = np.meshgrid(levels, levels)
    points = (re + 1j * im).ravel()
    return points / math.sqrt(float(np.mean(np.abs(points) ** 2)))


def simulate_index_error(rho: float, n_f: int, plan: TrialPlan,
                         workers: int = 1) -> ErrorEstimate:
    """Estimate the index detection error probability by direct simulation.

    Per trial: a uniform active index, a real standard normal symbol on it,
    a unit-variance complex Gaussian channel coefficient, and complex
    Gaussian noise of variance 1/rho on all n_f subcarriers; an error is a
    trial whose maximum received power lies off the active subcarrier.
    """
    if not (rho > 0 and math.isfinite(rho)):
        raise ValueError(f"SNR must be positive and finite, got {rho}")
    if n_f < 2:
        raise ValueError(f"subcarrier count must be >= 2, got {n_f}")

    def run_chunk(idx: int, size: int) -> np.ndarray:
        rng = _chunk_rng(plan.master_seed, _STREAM_INDEX_ERROR, idx)
        true_idx = rng.integers(0, n_f, size)
        x = rng.standard_normal(size)
        h_re, h_im = _complex_normal_parts(rng, (size,), 1.0)
        y_re, y_im = _complex_normal_parts(rng, (size, n_f), 1.0 / rho)
        rows = np.arange(size)
        y_re[rows, true_idx] += h_re * x
        y_im[rows, true_idx] += h_im * x
        return _backend.detect_confusion(y_re, y_im,
                                         true_idx.astype(np.int64), n_f)

    confusion = sum(_map_chunks(run_chunk, plan, workers))
    errors = int(confusion.sum() - np.trace(confusion))
    p = errors / plan.trials
    stderr = math.sqrt(p * (1.0 - p) / plan.trials)
    return ErrorEstimate(p, stderr, plan.trials, confusion)


def confusion_mutual_info(confusion: np.ndarray) -> float:
    """Plug-in mutual information (bits) of a joint count matrix."""
    total = confusion.sum()
    if total <= 0:
        raise ValueError("confusion matrix is empty")
    joint = confusion / total
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    mask = joint > 0
    return float(np.sum(joint[mask]
                        * np.log2(joint[mask] / (px @ py)[mask])))


def simulate_sinr(cfg: "MultiCellConfig", plan: TrialPlan,
                  workers: int = 1) -> np.ndarray:
    """Raw SINR draws (linear) for the Poisson interferer field.

    Interferers form a thinned field of density density/n_f on a disc of
    radius 40/sqrt(pi*density) around the terminal; their mean interference
    beyond the disc, density_eff*2*pi*R^(2-alpha)/(alpha-2), is added as a
    deterministic compensation so the truncated window matches the
    whole-plane law.  Serving link: fixed distance, unit-mean exponential
    power fade.
    """
    radius = geometry.default_window_radius(cfg.density)
    lam_eff = cfg.density / cfg.n_f
    mu = lam_eff * math.pi * radius ** 2
    tail = lam_eff * 2.0 * math.pi * radius ** (2.0 - cfg.alpha) \
        / (cfg.alpha - 2.0)
    signal_gain = cfg.tx_power * cfg.serving_distance ** (-cfg.alpha)
    block = max(1, min(int(_SINR_POINT_BUDGET / max(mu, 1.0)), plan.chunk_size))

    def run_chunk(idx: int, size: int) -> np.ndarray:
        rng = _chunk_rng(plan.master_seed, _STREAM_SINR, idx)
        out = np.empty(size)
        for start in range(0, size, block):
            n = min(block, size - start)
            counts = rng.poisson(mu, n)
            g0 = rng.standard_exponential(n)
            k_total = int(counts.sum())
            radii = radius * np.sqrt(rng.random(k_total))
            g = rng.standard_exponential(k_total)
            vals = g * radii ** (-cfg.alpha)
            seg = np.repeat(np.arange(n, dtype=np.int64), counts)
            interf = _backend.segment_sum(vals, seg, n) + tail
            out[start:start + n] = (signal_gain * g0) \
                / (cfg.noise_var + cfg.tx_power * interf)
        return out

    return np.concatenate(_map_chunks(run_chunk, plan, workers))


def empirical_cdf(samples: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Fraction of samples <= each grid value."""
    ordered = np.sort(np.asarray(samples))
    return np.searchsorted(ordered, np.asarray(grid), side="right") \
        / len(ordered)


def _ici_chunk(rng: np.random.Generator, size: int, m: int, p_hit: float,
               table: np.ndarray, amps: np.ndarray, noise_var: float,
               qam_order: int) -> tuple[np.ndarray, np.ndarray]:
    # fixed draw order: collision mask, channels, symbols, thermal noise
    active = (rng.random((size, m)) < p_hit).astype(np.float64)
    h_re, h_im = _complex_normal_parts(rng, (size, m), 1.0)
    sym = rng.integers(0, qam_order, (size, m))
    x_re = np.ascontiguousarray(table.real[sym])
    x_im = np.ascontiguousarray(table.imag[sym])
    n_re, n_im = _complex_normal_parts(rng, (size,), noise_var)
    tau_re, tau_im = _backend.ici_accumulate(active, h_re, h_im,
                                             x_re, x_im, amps)
    return n_re + tau_re, n_im + tau_im


def _ici_sample_array(amps: np.ndarray, n_f: int, qam_order: int,
                      noise_var: float, plan: TrialPlan,
                      workers: int) -> np.ndarray:
    table = qam_constellation(qam_order)
    p_hit = 1.0 / n_f
    m = len(amps)

    def run_chunk(idx: int, size: int) -> np.ndarray:
        rng = _chunk_rng(plan.master_seed, _STREAM_ICI, idx)
        re, im = _ici_chunk(rng, size, m, p_hit, table, amps, noise_var,
                            qam_order)
        return re + 1j * im

    return np.concatenate(_map_chunks(run_chunk, plan, workers))


def sample_noise_plus_ici_powers(powers, n_f: int, qam_order: int,
                                 noise_var: float, plan: TrialPlan,
                                 workers: int = 1) -> ComplexSampleSet:
    """Draw noise-plus-interference samples for explicit interferer powers.

    Same sampling law as sample_noise_plus_ici, with the per-interferer
    received powers listed directly instead of derived from a hex layout;
    the natural companion of exact_mog_enumeration for small scenarios.
    """
    powers = [float(t) for t in powers]
    if not powers:
        raise ValueError("need at least one interferer power")
    for t in powers:
        if not t >= 0:
            raise ValueError(f"interferer power must be >= 0, got {t}")
    if n_f < 2:
        raise ValueError(f"subcarrier count must be >= 2, got {n_f}")
    if not noise_var > 0:
        raise ValueError(f"noise_var must be > 0, got {noise_var}")
    samples = _ici_sample_array(np.sqrt(np.array(powers)), n_f, qam_order,
                                noise_var, plan, workers)
    meta = {"kind": "noise_plus_ici", "powers": tuple(powers), "n_f": n_f,
            "qam_order": qam_order, "noise_var": noise_var,
            "trials": plan.trials, "master_seed": plan.master_seed}
    return ComplexSampleSet(samples, meta)


def sample_noise_plus_ici(scenario: geometry.HexScenario,
                          model: geometry.PathlossModel, n_f: int,
                          qam_order: int, noise_var: float, plan: TrialPlan,
                          workers: int = 1) -> ComplexSampleSet:
    """Draw noise-plus-interference samples for the hex-grid scenario.

    Each non-serving site collides with the observed subcarrier with
    probability 1/n_f and then contributes sqrt(received power) times a
    unit complex Gaussian channel times a uniform unit-energy QAM symbol;
    thermal noise is complex Gaussian with variance noise_var.
    """
    if n_f < 2:
        raise ValueError(f"subcarrier count must be >= 2, got {n_f}")
    if not noise_var > 0:
        raise ValueError(f"noise_var must be > 0, got {noise_var}")
    distances = geometry.interferer_distances(scenario)
    amps = np.sqrt(np.array([geometry.received_power(model, d)
                             for d in distances]))
    samples = _ici_sample_array(amps, n_f, qam_order, noise_var, plan,
                                workers)
    meta = {"kind": "noise_plus_ici", "n_b": scenario.n_b,
            "isd": scenario.isd, "serving_distance": scenario.serving_distance,
            "alpha": model.alpha, "tx_power": model.tx_power, "n_f": n_f,
            "qam_order": qam_order, "noise_var": noise_var,
            "trials": plan.trials, "master_seed": plan.master_seed}
    return ComplexSampleSet(samples, meta)


def sample_received(scenario: geometry.HexScenario,
                    model: geometry.PathlossModel, n_f: int, qam_order: int,
                    noise_var: float, plan: TrialPlan,
                    workers: int = 1) -> ComplexSampleSet:
    """Draw received-signal samples: serving term plus noise-plus-interference.

    The serving site contributes sqrt(received power at serving_distance)
    times a unit complex Gaussian channel times a uniform QAM symbol on
    every trial (its subcarrier is the one observed).
    """
    if n_f < 2:
        raise ValueError(f"subcarrier count must be >= 2, got {n_f}")
    if not noise_var > 0:
        raise ValueError(f"noise_var must be > 0, got {noise_var}")
    serving_amp = math.sqrt(
        geometry.received_power(model, scenario.serving_distance))
    distances = geometry.interferer_distances(scenario)
    amps = np.sqrt(np.array([geometry.received_power(model, d)
                             for d in distances]))
    table = qam_constellation(qam_order)
    p_hit = 1.0 / n_f
    m = len(distances)

    def run_chunk(idx: int, size: int) -> np.ndarray:
        rng = _chunk_rng(plan.master_seed, _STREAM_RECEIVED, idx)
        hs_re, hs_im = _complex_normal_parts(rng, (size,), 1.0)
        sym = rng.integers(0, qam_order, size)
        xs_re = table.real[sym]
        xs_im = table.imag[sym]
        re, im = _ici_chunk(rng, size, m, p_hit, table, amps, noise_var,
                            qam_order)
        re = re + serving_amp * (hs_re * xs_re - hs_im * xs_im)
        im = im + serving_amp * (hs_re * xs_im + hs_im * xs_re)
        return re + 1j * im

    samples = np.concatenate(_map_chunks(run_chunk, plan, workers))
    meta = {"kind": "received", "n_b": scenario.n_b, "isd": scenario.isd,
            "serving_distance": scenario.serving_distance,
            "alpha": model.alpha, "tx_power": model.tx_power, "n_f": n_f,
            "qam_order": qam_order, "noise_var": noise_var,
            "trials": plan.trials, "master_seed": plan.master_seed}
    return ComplexSampleSet(samples, meta)


def _plugin_entropy_stderr(fit: MoGDist, samples: np.ndarray) -> float:
    # spread of the per-sample log density, the sampling-noise scale of a
    # plug-in entropy estimate
    logp = np.log2(mog_pdf(fit, samples))
    return float(np.std(logp) / math.sqrt(len(samples)))


def empirical_mutual_info(scenario: geometry.HexScenario,
                          model: geometry.PathlossModel, n_f: int,
                          qam_order: int, noise_var: float, plan: TrialPlan,
                          settings: EmSettings,
                          workers: int = 1) -> MutualInfoEstimate:
    """Estimate the rate H(received) - H(noise plus interference) in bits.

    Draws independent sample sets for the received signal and for noise
    plus interference, fits each with the zero-mean mixture EM, and
    differences their exact (radial quadrature) entropies.  The reported
    standard error is the approximate sampling noise of the two plug-in
    entropies, combined in quadrature.  This is a validation oracle for the
    closed-form rate bound, not a bound itself.
    """
    if plan.trials < 10_000:
        raise ValueError(
            f"mutual information estimation needs >= 10000 samples, got {plan.trials}")
    psi = sample_noise_plus_ici(scenario, model, n_f, qam_order, noise_var,
                                plan, workers)
    received = sample_received(scenario, model, n_f, qam_order, noise_var,
                               plan, workers)
    rng_psi = _chunk_rng(plan.master_seed, _STREAM_EM, 0)
    rng_y = _chunk_rng(plan.master_seed, _STREAM_EM, 1)
    fit_psi = em_fit(psi, settings, rng_psi).dist
    fit_y = em_fit(received, settings, rng_y).dist
    h_psi = entropy_exact_radial(fit_psi)
    h_y = entropy_exact_radial(fit_y)
    stderr = math.hypot(_plugin_entropy_stderr(fit_psi, psi.samples),
                        _plugin_entropy_stderr(fit_y, received.samples))
    return MutualInfoEstimate(h_y - h_psi, stderr, fit_y, fit_psi, h_y, h_psi)
