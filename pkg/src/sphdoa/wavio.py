"""WAV reading and writing for array recordings.

Recordings are written as float32 with one channel per capsule.  On
read, 16- and 32-bit integer files are rescaled to the same float
range; sample rates are taken as-is, so callers that need a specific
rate must check for it (resampling is out of scope).
"""

import numpy as np
from scipy.io import wavfile

from .tf import MultichannelSignal

__all__ = ["read_wav", "write_wav"]


def write_wav(path, signal):
    """Write a MultichannelSignal as a float32 WAV file."""
    data = np.ascontiguousarray(signal.samples.T, dtype=np.float32)
    try:
        wavfile.write(path, int(round(signal.sample_rate)), data)
    except OSError as exc:
        raise OSError(f"cannot write WAV to {path}: {exc}") from exc


def read_wav(path, expect_rate=None):
    """Read a WAV file into a MultichannelSignal.

    Integer PCM is scaled onto [-1, 1).  When `expect_rate` is given
    a mismatching file is rejected instead of resampled.
    """
    try:
        rate, data = wavfile.read(path)
    except OSError as exc:
        raise OSError(f"cannot read WAV from {path}: {exc}") from exc
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.int32:
        samples = data.astype(np.float64) / 2147483648.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise ValueError(f"{path}: unsupported WAV sample format {data.dtype}")
    if samples.ndim == 1:
        samples = samples[np.newaxis, :]
    else:
        samples = samples.T
    if expect_rate is not None and rate != expect_rate:
        raise ValueError(
            f"{path}: sample rate {rate} Hz, expected {expect_rate} Hz; "
            "resampling is out of scope"
        )
    return MultichannelSignal(samples, float(rate))
