"""Multichannel short-time Fourier analysis.

Analysis only: the DOA pipeline never resynthesizes audio, so there is
no inverse transform and no perfect-reconstruction constraint.  Frames
advance by ``hop = fft_size * (1 - overlap)`` samples, each frame is
windowed and transformed, and only the one-sided spectrum is kept.
"""

from dataclasses import dataclass

import numpy as np
from scipy.signal import get_window

__all__ = ["MultichannelSignal", "Spectrogram", "stft", "band_mask"]


@dataclass(frozen=True)
class MultichannelSignal:
    """Time-domain signals, one row per channel, at a common sample rate."""

    samples: np.ndarray  # [channels, length]
    sample_rate: float

    def __post_init__(self):
        samples = np.atleast_2d(np.asarray(self.samples, dtype=float))
        object.__setattr__(self, "samples", samples)
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")

    @property
    def n_channels(self):
        return self.samples.shape[0]

    @property
    def n_samples(self):
        return self.samples.shape[1]

    @property
    def duration(self):
        return self.n_samples / self.sample_rate


@dataclass(frozen=True)
class Spectrogram:
    """One-sided complex time-frequency grid per channel.

    ``bins`` has shape [channels, K, T] with K = fft_size // 2 + 1
    frequency bins spaced ``bin_hz = sample_rate / fft_size`` apart.
    """

    bins: np.ndarray  # complex [channels, K, T]
    hop: int
    fft_size: int
    sample_rate: float

    @property
    def n_channels(self):
        return self.bins.shape[0]

    @property
    def n_bins(self):
        return self.bins.shape[1]

    @property
    def n_frames(self):
        return self.bins.shape[2]

    @property
    def bin_hz(self):
        return self.sample_rate / self.fft_size

    @property
    def bin_frequencies(self):
        return np.arange(self.n_bins) * self.bin_hz


def stft(sig, fft_size=1024, overlap=0.75, window="hann"):
    """Short-time Fourier transform of a multichannel signal.

    Parameters
    ----------
    sig : MultichannelSignal
    fft_size : int
        Frame and FFT length in samples; must be a power of two.
    overlap : float
        Fraction of a frame shared with its successor, in [0, 1).
        The hop is ``fft_size * (1 - overlap)`` samples.
    window : str
        Taper id understood by :func:`scipy.signal.get_window`
        (periodic form), e.g. ``"hann"`` or ``"boxcar"``; ``"rect"`` is
        accepted as an alias for ``"boxcar"``.

    Returns
    -------
    Spectrogram
        ``floor((n_samples - fft_size) / hop) + 1`` frames of one-sided
        spectra; no zero padding, so trailing samples that do not fill
        a frame are dropped.
    """
    if fft_size <= 0 or fft_size & (fft_size - 1):
        raise ValueError("fft_size must be a power of two")
    if not 0.0 <= overlap < 1.0:
        raise ValueError("overlap must lie in [0, 1)")
    if sig.n_samples < fft_size:
        raise ValueError(
            f"signal ({sig.n_samples} samples) is shorter than one frame ({fft_size})"
        )
    hop = int(round(fft_size * (1.0 - overlap)))
    if hop < 1:
        raise ValueError("overlap too close to 1: hop collapses to zero")
    if window == "rect":
        window = "boxcar"
    win = get_window(window, fft_size, fftbins=True)

    frames = np.lib.stride_tricks.sliding_window_view(
        sig.samples, fft_size, axis=1
    )[:, ::hop, :]
    bins = np.fft.rfft(frames * win, axis=2)  # [channels, T, K]
    return Spectrogram(
        bins=np.ascontiguousarray(bins.transpose(0, 2, 1)),
        hop=hop,
        fft_size=fft_size,
        sample_rate=sig.sample_rate,
    )


def band_mask(spec, f_lo, f_hi):
    """Indices of the bins whose center frequency lies in [f_lo, f_hi].

    Both edges are inclusive.  Raises ValueError when the requested band
    is malformed or contains no bin center.
    """
    nyquist = spec.sample_rate / 2.0
    if not 0.0 <= f_lo < f_hi or f_hi > nyquist:
        raise ValueError(
            f"band must satisfy 0 <= f_lo < f_hi <= {nyquist} Hz, got [{f_lo}, {f_hi}]"
        )
    freqs = spec.bin_frequencies
    idx = np.nonzero((freqs >= f_lo) & (freqs <= f_hi))[0]
    if idx.size == 0:
        raise ValueError(f"band [{f_lo}, {f_hi}] Hz contains no bin center")
    return idx
