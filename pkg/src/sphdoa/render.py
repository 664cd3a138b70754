"""Frequency-domain rendering of room scenes onto a spherical array.

Each source is expanded into mirror images, and every image radiates a
spherical wave whose pressure on the (optionally rigid) sphere surface
is evaluated through its spherical-harmonic series.  The sum over
images factors: the per-image radial terms collapse into coefficient
vectors ``C[f, nm]`` once per frequency, after which the capsule
pressures are a single matrix product with the capsule harmonics.
Outgoing waves use the second-kind Hankel function, matching the
``exp(+i w t)`` sign convention stated in :mod:`sphdoa.shd`.

Series order is chosen adaptively per frequency block from the decay
of the worst-case term envelope, so low bands stay cheap while high
bands keep full accuracy.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.fft
from scipy.special import gammaln, spherical_jn

from .room import RoomSpec, image_sources, t60_to_reflection
from .shd import ArraySpec, sh_matrix
from .signals import add_noise_snr
from .tf import MultichannelSignal

__all__ = ["ScenarioSpec", "render_array", "render_shd_direct"]

_NOISE_SALT = 977  # keeps the additive-noise stream apart from source seeds


@dataclass(frozen=True)
class ScenarioSpec:
    """A room, an array placed in it, and sources with their signals.

    ``sources`` is a sequence of ``(position, MultichannelSignal)``
    pairs; each signal must be mono and all must share one sample
    rate.  ``snr_db`` sets sensor noise added after rendering
    (``inf`` for noiseless).
    """

    room: RoomSpec = field(default_factory=RoomSpec)
    array: ArraySpec = field(default_factory=ArraySpec)
    array_center: tuple = (2.5, 3.0, 1.7)
    sources: tuple = ()
    snr_db: float = np.inf
    seed: int = 0

    def __post_init__(self):
        center = np.asarray(self.array_center, dtype=float)
        if center.shape != (3,):
            raise ValueError("array_center must be a 3-vector")
        if not self.room.contains(center):
            raise ValueError("array center must lie inside the room")
        if not self.sources:
            raise ValueError("scenario needs at least one source")
        rate = None
        for pos, sig in self.sources:
            pos = np.asarray(pos, dtype=float)
            if not self.room.contains(pos):
                raise ValueError("source position must lie inside the room")
            dist = np.linalg.norm(pos - center)
            if dist <= self.array.radius:
                raise ValueError("source must lie outside the array sphere")
            if sig.n_channels != 1:
                raise ValueError("source signals must be mono")
            if rate is None:
                rate = sig.sample_rate
            elif sig.sample_rate != rate:
                raise ValueError("all source signals must share a sample rate")

    @property
    def sample_rate(self):
        return self.sources[0][1].sample_rate


def _h2_seed(x):
    """Orders 0 and 1 of the outgoing spherical Hankel function."""
    h0 = 1j * np.exp(-1j * x) / x
    return h0, h0 * (1.0 / x + 1j)


def _log10_h2_mag(x, orders):
    """log10 |h2_n(x)| for scalar x via the scaled upward recurrence."""
    h0, h1 = _h2_seed(complex(x))
    out = np.empty(orders + 1)
    scale = 0.0
    prev, curr = h0, h1
    out[0] = np.log10(abs(h0))
    if orders >= 1:
        out[1] = np.log10(abs(h1))
    for n in range(1, orders):
        prev, curr = curr, (2 * n + 1) / x * curr - prev
        mag = abs(curr)
        if mag > 1e120:
            prev /= 1e120
            curr /= 1e120
            scale += 120.0
            mag = abs(curr)
        out[n + 1] = np.log10(mag) + scale
    return out


def _log10_bracket_mag(xa, orders, rigid):
    """log10 magnitude of the surface radial term at ``xa`` per order.

    Rigid: ``-i / (xa^2 h2_n'(xa))`` with the derivative from the
    recurrence relation.  Open: ``j_n(xa)``, switching to the small
    argument power series once scipy underflows.
    """
    if not rigid:
        j = spherical_jn(np.arange(orders + 1), xa)
        out = np.empty(orders + 1)
        ok = j != 0.0
        out[ok] = np.log10(np.abs(j[ok]))
        n_bad = np.nonzero(~ok)[0]
        # j_n(x) ~ x^n / (2n+1)!!
        ln_dfact = gammaln(2 * n_bad + 2) - n_bad * np.log(2.0) - gammaln(n_bad + 1)
        out[~ok] = n_bad * np.log10(xa) - ln_dfact / np.log(10.0)
        return out

    out = np.empty(orders + 1)
    h0, h1 = _h2_seed(complex(xa))
    scale = 0.0
    prev, curr = h0, h1
    # h2_0' = -h2_1
    out[0] = -2.0 * np.log10(xa) - np.log10(abs(h1))
    for n in range(1, orders + 1):
        deriv = prev - (n + 1) / xa * curr
        out[n] = -2.0 * np.log10(xa) - (np.log10(abs(deriv)) + scale)
        prev, curr = curr, (2 * n + 1) / xa * curr - prev
        mag = abs(curr)
        if mag > 1e120:
            prev /= 1e120
            curr /= 1e120
            scale += 120.0
    return out


def _series_order(ka, kr_min, rigid, tol, cap):
    """Smallest order whose worst-case tail falls below ``tol``.

    The term envelope ``(2n+1) |radial_n(ka)| |h2_n(kr_min)|`` decays
    geometrically once n passes ka; truncation where it has dropped by
    ``tol`` relative to its peak bounds the series error.  Failing to
    converge within ``cap`` orders means an image sits too close to
    the sphere surface for this expansion.
    """
    log_env = (
        np.log10(2.0 * np.arange(cap + 1) + 1.0)
        + _log10_bracket_mag(ka, cap, rigid)
        + _log10_h2_mag(kr_min, cap)
    )
    peak = np.maximum.accumulate(log_env)
    drop = np.log10(tol)
    for n in range(cap + 1):
        if log_env[n] - peak[n] < drop and (n == cap or log_env[n + 1] <= log_env[n]):
            return max(n, 2)
    raise ValueError(
        "spherical series did not converge; an image source is too close "
        "to the array surface"
    )


def _canvas_size(scenario, n_out, max_order, max_delay):
    """FFT length covering every admissible image path.

    Derived from the requested bounds, not the realized image set, so
    scenarios sharing bounds and duration land on the same grid; the
    residual of the dropped DC bin then cancels exactly in
    superposition comparisons.
    """
    room = scenario.room
    c = room.speed_of_sound
    rate = scenario.sample_rate
    diag = float(np.linalg.norm(room.dims))
    reach = np.inf
    if max_delay is not None:
        reach = c * max_delay
    if max_order is not None:
        reach = min(reach, (max_order + 1) * diag)
    pad = int(np.ceil((reach + 2.0 * scenario.array.radius) / c * rate)) + 256
    return scipy.fft.next_fast_len(n_out + pad, real=True)


def _source_images(scenario, pos, max_order, max_delay, reflection_formula):
    # t60 = 0 means anechoic: only the direct path radiates
    if max_order == 0 or scenario.room.t60 == 0:
        return image_sources(
            scenario.room, pos, scenario.array_center, 0.0, max_order=0
        )
    reflection = t60_to_reflection(scenario.room, formula=reflection_formula)
    return image_sources(
        scenario.room,
        pos,
        scenario.array_center,
        reflection,
        max_order=max_order,
        max_delay=max_delay,
    )


def _image_arrays(scenario, images):
    center = np.asarray(scenario.array_center, dtype=float)
    pos = np.array([im.position for im in images])
    offsets = pos - center
    radii = np.linalg.norm(offsets, axis=1)
    dirs = offsets / radii[:, np.newaxis]
    gains = np.array([im.gain for im in images])
    return radii, dirs, gains


def _support(spectrum, rel=1e-7):
    """Indices of bins that carry non-negligible source energy.

    Bin 0 is always dropped: the radial functions are singular at DC
    and a DC offset carries no directional information.
    """
    mag = np.abs(spectrum)
    keep = mag > rel * mag.max()
    keep[0] = False
    return np.nonzero(keep)[0]


def _surface_pressure(scenario, spectrum, freqs, images, series_tol, series_cap):
    """Capsule pressure spectra for one source, summed over images.

    Returns a complex array [n_bins, n_capsules]; unsupported bins are
    identically zero.
    """
    array = scenario.array
    a = array.radius
    c = scenario.room.speed_of_sound
    radii, dirs, gains = _image_arrays(scenario, images)
    r_min = radii.min()

    kk = _support(spectrum)
    pressures = np.zeros((len(freqs), array.n_capsules), dtype=complex)
    if len(kk) == 0:
        return pressures

    # capsule harmonics get sliced per block once the order is known
    k_top = 2.0 * np.pi * freqs[kk[-1]] / c
    n_cap_order = _series_order(k_top * a, k_top * r_min, array.rigid, series_tol, series_cap)
    az_c, inc_c = array.capsule_angles()
    y_cap = sh_matrix(az_c, inc_c, n_cap_order)
    az_i, inc_i = np.mod(np.arctan2(dirs[:, 1], dirs[:, 0]), 2 * np.pi), np.arccos(
        np.clip(dirs[:, 2], -1.0, 1.0)
    )
    y_img = sh_matrix(az_i, inc_i, n_cap_order) * gains[:, np.newaxis]

    block = max(64, int(2.0e6 / max(len(radii), 1)))
    for start in range(0, len(kk), block):
        sel = kk[start : start + block]
        k = 2.0 * np.pi * freqs[sel] / c
        ka = k * a
        n_hi = min(
            n_cap_order,
            _series_order(ka[-1], k[-1] * r_min, array.rigid, series_tol, series_cap),
        )

        x = k[:, np.newaxis] * radii[np.newaxis, :]
        h_lo, h_hi = _h2_seed(x)  # orders n-1 and n once the loop runs
        ha_lo, ha_hi = _h2_seed(ka)
        xa2 = ka**2

        n_coef = (n_hi + 1) ** 2
        coef = np.empty((len(sel), n_coef), dtype=complex)
        for n in range(n_hi + 1):
            if n == 0:
                hn = h_lo
                deriv = -ha_hi  # h2_0' = -h2_1
            else:
                if n >= 2:
                    h_lo, h_hi = h_hi, (2 * n - 1) / x * h_hi - h_lo
                    ha_lo, ha_hi = ha_hi, (2 * n - 1) / ka * ha_hi - ha_lo
                hn = h_hi
                deriv = ha_lo - (n + 1) / ka * ha_hi

            if array.rigid:
                bracket = -1j / (xa2 * deriv)
            else:
                bracket = spherical_jn(n, ka)

            sl = slice(n * n, (n + 1) * (n + 1))
            coef[:, sl] = (hn @ y_img[:, sl]) * bracket[:, np.newaxis]

        coef *= (-1j * k * spectrum[sel])[:, np.newaxis]
        pressures[sel] += coef @ y_cap[:, :n_coef].T
    return pressures


def render_array(
    scenario,
    images=None,
    max_order=None,
    max_delay=0.15,
    reflection_formula="sabine",
    series_tol=1e-9,
    series_cap=100,
):
    """Simulate the capsule recordings of a scenario.

    Parameters
    ----------
    scenario : ScenarioSpec
    images : optional precomputed image list per source, aligned with
        ``scenario.sources``; computed from the bounds when omitted.
    max_order, max_delay : optional bounds on the image expansion;
        ``max_order=0`` (or ``t60=0``) renders the direct path only.
        At least one bound is required; the defaults keep images up to
        a 150 ms propagation delay.
    reflection_formula : "sabine" or "eyring"
    series_tol : relative truncation level of the radial series.
    series_cap : order budget; exceeding it raises, which happens only
        when an image is nearly touching the array surface.

    Returns
    -------
    MultichannelSignal
        One channel per capsule, same length as the longest source
        signal, with sensor noise at ``scenario.snr_db``.
    """
    rate = scenario.sample_rate
    n_out = max(sig.n_samples for _, sig in scenario.sources)

    if max_order is None and max_delay is None:
        raise ValueError("need max_order and/or max_delay")

    if images is None:
        images = [
            _source_images(scenario, pos, max_order, max_delay, reflection_formula)
            for pos, sig in scenario.sources
        ]
    per_source = images

    nfft = _canvas_size(scenario, n_out, max_order, max_delay)
    freqs = np.arange(nfft // 2 + 1) * (rate / nfft)

    total = np.zeros((nfft // 2 + 1, scenario.array.n_capsules), dtype=complex)
    for (pos, sig), images in zip(scenario.sources, per_source):
        spectrum = scipy.fft.rfft(sig.samples[0], nfft)
        total += _surface_pressure(scenario, spectrum, freqs, images, series_tol, series_cap)

    samples = scipy.fft.irfft(total.T, nfft, axis=1)[:, :n_out]
    out = MultichannelSignal(samples=samples, sample_rate=rate)
    if np.isfinite(scenario.snr_db):
        out = add_noise_snr(out, scenario.snr_db, seed=[scenario.seed, _NOISE_SALT])
    return out


def render_shd_direct(
    scenario,
    order=1,
    images=None,
    max_order=None,
    max_delay=0.15,
    reflection_formula="sabine",
):
    """Render the scene directly as spherical-harmonic signals.

    Every image is treated as a far-field arrival from its direction,
    carrying the free-field amplitude and delay of its path to the
    array center; a unit plane wave from direction W encodes as
    ``4 pi Y_nm(W)``.  This bypasses the capsule array and the rigid
    sphere entirely, which makes it an independent reference for the
    microphone-domain chain (they agree up to wavefront curvature).

    Returns
    -------
    MultichannelSignal
        ``(order + 1)^2`` channels in ACN order.
    """
    rate = scenario.sample_rate
    n_out = max(sig.n_samples for _, sig in scenario.sources)
    c = scenario.room.speed_of_sound

    if max_order is None and max_delay is None:
        raise ValueError("need max_order and/or max_delay")

    if images is None:
        images = [
            _source_images(scenario, pos, max_order, max_delay, reflection_formula)
            for pos, _ in scenario.sources
        ]
    per_source = images
    nfft = _canvas_size(scenario, n_out, max_order, max_delay)
    freqs = np.arange(nfft // 2 + 1) * (rate / nfft)

    n_ch = (order + 1) ** 2
    total = np.zeros((nfft // 2 + 1, n_ch), dtype=complex)
    for (pos, sig), images in zip(scenario.sources, per_source):
        radii, dirs, gains = _image_arrays(scenario, images)
        az, inc = np.mod(np.arctan2(dirs[:, 1], dirs[:, 0]), 2 * np.pi), np.arccos(
            np.clip(dirs[:, 2], -1.0, 1.0)
        )
        # 4 pi Y_nm per unit plane wave times e^{-ikr}/(4 pi r) per image
        y = sh_matrix(az, inc, order) * (gains / radii)[:, np.newaxis]
        spectrum = scipy.fft.rfft(sig.samples[0], nfft)
        kk = _support(spectrum)
        k = 2.0 * np.pi * freqs[kk] / c
        phases = np.exp(-1j * k[:, np.newaxis] * radii[np.newaxis, :])
        total[kk] += spectrum[kk, np.newaxis] * (phases @ y)

    samples = scipy.fft.irfft(total.T, nfft, axis=1)[:, :n_out]
    out = MultichannelSignal(samples=samples, sample_rate=rate)
    if np.isfinite(scenario.snr_db):
        out = add_noise_snr(out, scenario.snr_db, seed=[scenario.seed, _NOISE_SALT])
    return out
