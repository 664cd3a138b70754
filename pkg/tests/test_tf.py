import numpy as np
import pytest

from sphdoa.tf import MultichannelSignal, band_mask, stft


def make_signal(samples, fs=16000.0):
    return MultichannelSignal(samples=np.atleast_2d(samples), sample_rate=fs)


class TestStftGrid:
    def test_paper_grid_parameters(self):
        # 16 kHz, FFT 1024, 75% overlap
        sig = make_signal(np.zeros(16000))
        spec = stft(sig, fft_size=1024, overlap=0.75)
        assert spec.hop == 256
        assert spec.n_bins == 513
        assert spec.bin_hz == pytest.approx(15.625)

    def test_frame_count(self):
        sig = make_signal(np.zeros(4096))
        spec = stft(sig, fft_size=1024, overlap=0.75)
        assert spec.n_frames == (4096 - 1024) // 256 + 1

    def test_short_signal_rejected(self):
        with pytest.raises(ValueError):
            stft(make_signal(np.zeros(512)), fft_size=1024)

    def test_non_power_of_two_rejected(self):
        with pytest.raises(ValueError):
            stft(make_signal(np.zeros(4096)), fft_size=1000)

    def test_multichannel_shape(self):
        rng = np.random.default_rng(0)
        sig = make_signal(rng.standard_normal((4, 8192)))
        spec = stft(sig, fft_size=1024, overlap=0.75)
        assert spec.bins.shape == (4, 513, 29)


class TestStftContent:
    def test_pure_bin_tone_rectangular(self):
        # cosine at bin 64's center frequency concentrates there
        fs, n = 16000.0, 4096
        fft_size = 1024
        f = 64 * fs / fft_size
        t = np.arange(n) / fs
        sig = make_signal(np.cos(2 * np.pi * f * t))
        spec = stft(sig, fft_size=fft_size, overlap=0.75, window="rect")
        mag2 = np.abs(spec.bins[0]) ** 2
        total = mag2.sum(axis=0)
        assert np.all(mag2[64] / total > 0.99)

    def test_windowed_parseval(self):
        # time-domain frame energy computed directly is the oracle
        rng = np.random.default_rng(42)
        x = rng.standard_normal(4096)
        fft_size, hop = 1024, 256
        sig = make_signal(x)
        spec = stft(sig, fft_size=fft_size, overlap=0.75, window="hann")
        win = 0.5 * (1 - np.cos(2 * np.pi * np.arange(fft_size) / fft_size))
        for t in range(spec.n_frames):
            frame = x[t * hop : t * hop + fft_size] * win
            energy_time = np.sum(frame**2)
            X = spec.bins[0, :, t]
            energy_freq = (
                np.abs(X[0]) ** 2
                + 2 * np.sum(np.abs(X[1:-1]) ** 2)
                + np.abs(X[-1]) ** 2
            ) / fft_size
            assert energy_freq == pytest.approx(energy_time, rel=1e-6)

    def test_linearity(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((2, 4096))
        y = rng.standard_normal((2, 4096))
        a, b = 2.5, -0.7
        sx = stft(make_signal(x)).bins
        sy = stft(make_signal(y)).bins
        sxy = stft(make_signal(a * x + b * y)).bins
        assert np.allclose(sxy, a * sx + b * sy, rtol=1e-10, atol=1e-10)

    def test_deterministic(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal(8192)
        s1 = stft(make_signal(x)).bins
        s2 = stft(make_signal(x.copy())).bins
        assert np.array_equal(s1, s2)


class TestBandMask:
    def make_spec(self):
        return stft(make_signal(np.zeros(2048)), fft_size=1024, overlap=0.75)

    def test_full_band(self):
        spec = self.make_spec()
        idx = band_mask(spec, 0.0, 8000.0)
        assert np.array_equal(idx, np.arange(513))

    def test_processing_band(self):
        # 200-4000 Hz at 15.625 Hz/bin spans bins 13..256
        spec = self.make_spec()
        idx = band_mask(spec, 200.0, 4000.0)
        assert idx[0] == 13
        assert idx[-1] == 256

    def test_degenerate_band_rejected(self):
        spec = self.make_spec()
        with pytest.raises(ValueError):
            band_mask(spec, 1000.0, 1000.0)

    def test_empty_band_rejected(self):
        spec = self.make_spec()
        # between two bin centers: 15.625 Hz spacing, no center in (16, 31)
        with pytest.raises(ValueError):
            band_mask(spec, 16.0, 31.0)

    def test_band_above_nyquist_rejected(self):
        spec = self.make_spec()
        with pytest.raises(ValueError):
            band_mask(spec, 200.0, 9000.0)
