"""End-to-end trials and the spacing-sweep benchmark.

A trial drops sources on a 1 m circle around the array at a seeded
random rotation, renders the room scene, runs the weighting pipeline
on the recording, and scores the clustered directions against the
known geometry.  The benchmark repeats this over a grid of source
spacings and weighting schemes with per-trial derived seeds, so every
scheme hears bit-identical audio, then reports the median of the
per-trial mean errors.
"""

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from .clustering import match_sources, spherical_kmeans
from .render import ScenarioSpec, render_array
from .room import RoomSpec
from .shd import ArraySpec, encode_shd, piv_doa_field
from .signals import gen_speechlike
from .tf import stft
from .weighting import SCHEMES, ec_weights, subsample_top_p

__all__ = [
    "TrialConfig",
    "TrialReport",
    "BenchmarkCell",
    "BenchmarkReport",
    "field_from_recording",
    "estimate_sources",
    "simulate_trial",
    "run_trial",
    "run_benchmark",
]

log = logging.getLogger("sphdoa.pipeline")


def normalize_scheme(name):
    key = str(name).lower().replace("-", "").replace("_", "")
    if key not in SCHEMES:
        raise ValueError(f"unknown weighting scheme {name!r}")
    return key


@dataclass(frozen=True)
class TrialConfig:
    """Everything one trial depends on, scene and processing alike."""

    # scene
    room_dims: tuple = (5.0, 6.0, 4.0)
    t60: float = 0.4
    snr_db: float = 20.0
    n_sources: int = 2
    spacing_deg: float = 30.0
    duration: float = 2.0
    sample_rate: float = 16000.0
    circle_radius: float = 1.0
    array_center: tuple | None = None  # room center when omitted
    rotation_deg: float | None = None  # fixes the circle rotation; seeded otherwise
    max_delay: float = 0.09
    reflection_formula: str = "sabine"
    rigid: bool = True
    seed: int = 0
    # processing
    fft_size: int = 1024
    overlap: float = 0.75
    band: tuple = (200.0, 4000.0)
    order: int = 1
    max_gain_db: float = 20.0
    p_percent: float = 5.0
    scheme: str = "ec"
    restarts: int = 10

    def __post_init__(self):
        if not 0.0 < self.spacing_deg < 180.0:
            raise ValueError("spacing_deg must lie in (0, 180)")
        if not 0.0 < self.p_percent <= 100.0:
            raise ValueError("p_percent must lie in (0, 100]")
        if self.n_sources < 1:
            raise ValueError("need at least one source")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        object.__setattr__(self, "scheme", normalize_scheme(self.scheme))

    @property
    def room(self):
        return RoomSpec(dims=self.room_dims, t60=self.t60)

    @property
    def center(self):
        if self.array_center is not None:
            return np.asarray(self.array_center, dtype=float)
        return np.asarray(self.room_dims, dtype=float) / 2.0


@dataclass(frozen=True)
class TrialReport:
    """Scored outcome of a single trial."""

    scheme: str
    spacing_deg: float
    seed: int
    estimated: tuple  # (azimuth_deg, inclination_deg) per source
    truth: tuple
    errors_deg: tuple
    mean_error_deg: float
    elapsed_s: float


@dataclass(frozen=True)
class BenchmarkCell:
    scheme: str
    spacing_deg: float
    median_error_deg: float
    trials: int
    n_failed: int
    seed: int


@dataclass(frozen=True)
class BenchmarkReport:
    cells: tuple
    schemes: tuple
    spacings: tuple
    trials: int
    seed: int
    config: dict
    version: str


def field_from_recording(
    mics, array=None, fft_size=1024, overlap=0.75, band=(200.0, 4000.0),
    order=1, max_gain_db=20.0,
):
    """STFT, encode and per-bin DOA estimation for a capsule recording."""
    if array is None:
        array = ArraySpec()
    spec = stft(mics, fft_size=fft_size, overlap=overlap)
    shd = encode_shd(spec, array, order=order, max_gain_db=max_gain_db)
    lo = int(np.ceil(band[0] / shd.bin_hz))
    hi = int(np.floor(band[1] / shd.bin_hz))
    if hi < lo:
        raise ValueError("analysis band holds no STFT bins")
    hi = min(hi, shd.n_bins - 1)
    return piv_doa_field(shd, band=np.arange(lo, hi + 1))


def estimate_sources(doa_field, scheme, n_sources, p_percent=5.0, restarts=10, seed=0):
    """Weight, subsample and cluster a DOA field into source directions.

    Returns unit vectors [n_sources, 3].  Raises when the weighted
    subsample is too small to support the requested source count.
    """
    weights = ec_weights(doa_field, scheme)
    picked = subsample_top_p(doa_field, weights, p_percent)
    if picked.shape[0] < n_sources:
        raise ValueError("insufficient weighted support")
    result = spherical_kmeans(picked, n_sources, seed=seed, restarts=restarts)
    return result.centroids


def _source_layout(cfg, rotation):
    """Positions on the circle and their true directions from the array."""
    thetas = rotation + np.radians(cfg.spacing_deg) * np.arange(cfg.n_sources)
    units = np.stack(
        [np.cos(thetas), np.sin(thetas), np.zeros_like(thetas)], axis=1
    )
    positions = cfg.center[np.newaxis, :] + cfg.circle_radius * units
    return positions, units


def simulate_trial(cfg, seed_seq=None):
    """Render the capsule recording for one trial.

    Independent child streams drive the rotation, each source signal,
    and the sensor noise, so any one can be varied without touching
    the others.  Returns the recording, the true source directions as
    unit vectors, and the seed reserved for clustering.
    """
    if seed_seq is None:
        seed_seq = np.random.SeedSequence(cfg.seed)
    children = seed_seq.spawn(cfg.n_sources + 3)
    if cfg.rotation_deg is None:
        rotation = np.random.default_rng(children[0]).uniform(0.0, 2.0 * np.pi)
    else:
        rotation = np.radians(cfg.rotation_deg)
    positions, truth = _source_layout(cfg, rotation)

    sources = tuple(
        (positions[j], gen_speechlike(cfg.duration, cfg.sample_rate, seed=children[1 + j]))
        for j in range(cfg.n_sources)
    )
    noise_seed = int(children[cfg.n_sources + 1].generate_state(1)[0])
    cluster_seed = int(children[cfg.n_sources + 2].generate_state(1)[0])

    scenario = ScenarioSpec(
        room=cfg.room,
        array=ArraySpec(rigid=cfg.rigid),
        array_center=tuple(cfg.center),
        sources=sources,
        snr_db=cfg.snr_db,
        seed=noise_seed,
    )
    mics = render_array(
        scenario,
        max_delay=cfg.max_delay,
        reflection_formula=cfg.reflection_formula,
    )
    return mics, truth, cluster_seed


def _scene_field(cfg, seed_seq=None):
    """Render one trial and estimate its DOA field."""
    mics, truth, cluster_seed = simulate_trial(cfg, seed_seq)
    doa_field = field_from_recording(
        mics,
        array=ArraySpec(rigid=cfg.rigid),
        fft_size=cfg.fft_size,
        overlap=cfg.overlap,
        band=cfg.band,
        order=cfg.order,
        max_gain_db=cfg.max_gain_db,
    )
    return doa_field, truth, cluster_seed


def _to_degrees_pair(v):
    az = np.degrees(np.mod(np.arctan2(v[1], v[0]), 2.0 * np.pi))
    inc = np.degrees(np.arccos(np.clip(v[2], -1.0, 1.0)))
    return float(az), float(inc)


def run_trial(cfg):
    """One full scene-to-score pass; deterministic per config."""
    t_start = time.perf_counter()
    seed_seq = np.random.SeedSequence(cfg.seed)
    doa_field, truth, cluster_seed = _scene_field(cfg, seed_seq)
    est = estimate_sources(
        doa_field, cfg.scheme, cfg.n_sources, cfg.p_percent, cfg.restarts, cluster_seed
    )
    pairing, errors = match_sources(est, truth)
    aligned = est[pairing]
    errors_deg = tuple(float(np.degrees(e)) for e in errors)
    return TrialReport(
        scheme=cfg.scheme,
        spacing_deg=cfg.spacing_deg,
        seed=cfg.seed,
        estimated=tuple(_to_degrees_pair(v) for v in aligned),
        truth=tuple(_to_degrees_pair(v) for v in truth),
        errors_deg=errors_deg,
        mean_error_deg=float(np.mean(errors_deg)),
        elapsed_s=time.perf_counter() - t_start,
    )


def _pool_size(threads):
    """Worker count: explicit argument, else SPHDOA_THREADS, else CPUs.

    The environment variable also caps an explicit request, so a
    deployment can bound the pool regardless of caller arguments.
    """
    limit = os.environ.get("SPHDOA_THREADS")
    limit = max(1, int(limit)) if limit is not None else None
    if threads is not None:
        size = threads
        if limit is not None:
            size = min(size, limit)
    elif limit is not None:
        size = limit
    else:
        size = os.cpu_count() or 1
    return max(1, size)


def _benchmark_unit(cfg, spacing, trial_index, schemes):
    """All schemes' mean errors for one (spacing, trial) cell.

    The derived seed depends only on the master seed and trial index,
    so every scheme, and every spacing, sees the same source material.
    """
    seed_seq = np.random.SeedSequence(entropy=(cfg.seed, trial_index))
    scfg = replace(cfg, spacing_deg=spacing)
    out = {}
    try:
        doa_field, truth, cluster_seed = _scene_field(scfg, seed_seq)
    except Exception as exc:
        log.warning("trial %d at %g deg failed to render: %s", trial_index, spacing, exc)
        return {scheme: None for scheme in schemes}
    for scheme in schemes:
        try:
            est = estimate_sources(
                doa_field, scheme, scfg.n_sources, scfg.p_percent,
                scfg.restarts, cluster_seed,
            )
            _, errors = match_sources(est, truth)
            out[scheme] = float(np.degrees(np.mean(errors)))
        except Exception as exc:
            log.warning(
                "trial %d at %g deg failed for %s: %s", trial_index, spacing, scheme, exc
            )
            out[scheme] = None
    return out


def run_benchmark(cfg, spacings, trials, schemes, threads=None):
    """Median angular error per (scheme, spacing) over shared trials.

    Trials run in a thread pool (capped by the SPHDOA_THREADS
    environment variable); results are aggregated in a fixed order so
    the report does not depend on scheduling.  Failed trials are
    logged and excluded; more than 20% failures aborts.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if not spacings:
        raise ValueError("need at least one spacing")
    schemes = [normalize_scheme(s) for s in schemes]
    if len(set(schemes)) != len(schemes):
        raise ValueError("duplicate schemes requested")
    spacings = [float(s) for s in spacings]

    jobs = [(spacing, t) for spacing in spacings for t in range(trials)]
    results = {}
    workers = _pool_size(threads)
    if workers == 1:
        for spacing, t in jobs:
            results[(spacing, t)] = _benchmark_unit(cfg, spacing, t, schemes)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                (spacing, t): pool.submit(_benchmark_unit, cfg, spacing, t, schemes)
                for spacing, t in jobs
            }
            for key, fut in futures.items():
                results[key] = fut.result()

    cells = []
    n_failed_total = 0
    for scheme in schemes:
        for spacing in spacings:
            errs = [
                results[(spacing, t)][scheme]
                for t in range(trials)
                if results[(spacing, t)][scheme] is not None
            ]
            n_failed = trials - len(errs)
            n_failed_total += n_failed
            median = float(np.median(errs)) if errs else float("nan")
            cells.append(
                BenchmarkCell(
                    scheme=scheme,
                    spacing_deg=spacing,
                    median_error_deg=median,
                    trials=trials,
                    n_failed=n_failed,
                    seed=cfg.seed,
                )
            )

    total_units = len(schemes) * len(spacings) * trials
    if n_failed_total > 0.2 * total_units:
        raise RuntimeError(
            f"benchmark aborted: {n_failed_total} of {total_units} trials failed"
        )

    from . import __version__

    return BenchmarkReport(
        cells=tuple(cells),
        schemes=tuple(schemes),
        spacings=tuple(spacings),
        trials=trials,
        seed=cfg.seed,
        config=asdict(cfg),
        version=__version__,
    )
