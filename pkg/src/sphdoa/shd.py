"""Spherical-harmonic machinery for rigid-sphere microphone arrays.

Real spherical harmonics in ACN channel order with N3D (orthonormal)
normalization are used everywhere: channel ``n*n + n + m`` holds
:math:`Y_{n,m}`, and :math:`Y_{0,0} = 1/\\sqrt{4\\pi}`.  The first-order
channels are dipoles along y (ACN 1), z (ACN 2) and x (ACN 3).

Phase conventions follow the engineering :math:`e^{+i\\omega t}` time
dependence: a delay by ``tau`` multiplies a spectrum by
:math:`e^{-i\\omega\\tau}` (the numpy FFT convention), outgoing radiation
uses the spherical Hankel function of the second kind, and the rigid
mode strength below is defined accordingly.  The encoder applies the
full complex inverse of the mode strength, so a unit plane wave
arriving from direction ``Omega`` encodes to coefficients proportional
to ``Y_nm(Omega)`` with one order-independent constant, the pattern the
pseudo-intensity vector needs.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import lpmv, spherical_jn, spherical_yn

from .tf import Spectrogram

__all__ = [
    "ArraySpec",
    "ShdSpectrogram",
    "DoaField",
    "acn_index",
    "sh_basis",
    "sh_matrix",
    "mode_strength",
    "capsule_directions_32",
    "encode_shd",
    "piv_doa_field",
]

SPEED_OF_SOUND = 343.0

_KA_FLOOR = 1e-6


def acn_index(n, m):
    """Ambisonic channel number of degree ``n``, order ``m``."""
    return n * n + n + m


def sh_matrix(azimuth, inclination, order):
    """Real spherical harmonics evaluated at a set of directions.

    Parameters
    ----------
    azimuth, inclination : array_like, shape (Q,)
        Directions in radians (inclination from +z).
    order : int
        Maximum degree N.

    Returns
    -------
    numpy.ndarray, shape (Q, (N+1)**2)
        One row per direction, ACN column order, N3D normalization.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    azimuth = np.atleast_1d(np.asarray(azimuth, dtype=float))
    inclination = np.atleast_1d(np.asarray(inclination, dtype=float))
    q = azimuth.shape[0]
    x = np.cos(inclination)
    out = np.empty((q, (order + 1) ** 2))
    for n in range(order + 1):
        for m in range(n + 1):
            # lpmv includes the Condon-Shortley phase; (-1)^m removes it
            p = lpmv(m, n, x) * (-1.0) ** m
            norm = math.sqrt(
                (2 * n + 1)
                / (4.0 * math.pi)
                * math.factorial(n - m)
                / math.factorial(n + m)
            )
            if m == 0:
                out[:, acn_index(n, 0)] = norm * p
            else:
                rr = math.sqrt(2.0) * norm * p
                out[:, acn_index(n, m)] = rr * np.cos(m * azimuth)
                out[:, acn_index(n, -m)] = rr * np.sin(m * azimuth)
    return out


def sh_basis(azimuth, inclination, order):
    """Real SH vector (length ``(order+1)**2``) for a single direction."""
    return sh_matrix(azimuth, inclination, order)[0]


def _spherical_h2(n, x, derivative=False):
    """Spherical Hankel function of the second kind (outgoing, e^{+iwt})."""
    return spherical_jn(n, x, derivative) - 1j * spherical_yn(n, x, derivative)


def mode_strength(n, ka, rigid=True):
    """Frequency response of spherical-harmonic degree ``n`` on a sphere.

    For a rigid baffle::

        b_n(ka) = 4 pi i^n [ j_n(ka) - (j_n'(ka) / h_n'(ka)) h_n(ka) ]

    with ``h_n`` the spherical Hankel function of the second kind, and
    for an open (virtual) sphere ``b_n(ka) = 4 pi i^n j_n(ka)``.  A unit
    plane wave arriving from ``Omega`` produces raw capsule-domain
    coefficients ``b_n(ka) * Y_nm(Omega)``.

    Parameters
    ----------
    n : int
        Harmonic degree.
    ka : float or array_like
        Wavenumber times array radius; must exceed 1e-6 (callers are
        expected to band-limit away from DC).
    rigid : bool

    Returns
    -------
    complex or complex ndarray
    """
    ka_arr = np.asarray(ka, dtype=float)
    if np.any(ka_arr < _KA_FLOOR):
        raise ValueError(f"ka must be >= {_KA_FLOOR}; band-limit the input")
    prefactor = 4.0 * np.pi * (1j**n)
    if rigid:
        jn = spherical_jn(n, ka_arr)
        jnp = spherical_jn(n, ka_arr, derivative=True)
        hn = _spherical_h2(n, ka_arr)
        hnp = _spherical_h2(n, ka_arr, derivative=True)
        val = prefactor * (jn - (jnp / hnp) * hn)
    else:
        val = prefactor * spherical_jn(n, ka_arr)
    if np.isscalar(ka) or np.ndim(ka) == 0:
        return complex(val)
    return val


def capsule_directions_32():
    """Unit direction vectors of a 32-capsule pentakis-dodecahedral grid.

    The 20 dodecahedron vertices plus the 12 icosahedron vertices give a
    near-uniform 32-point layout (the standard geometry for rigid
    32-capsule arrays), well conditioned for encoding orders up to 4.
    """
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    verts = []
    # dodecahedron: (+-1, +-1, +-1) and cyclic (0, +-1/phi, +-phi)
    for sx in (1, -1):
        for sy in (1, -1):
            for sz in (1, -1):
                verts.append((sx, sy, sz))
    for s1 in (1, -1):
        for s2 in (1, -1):
            verts.append((0.0, s1 / phi, s2 * phi))
            verts.append((s1 / phi, s2 * phi, 0.0))
            verts.append((s1 * phi, 0.0, s2 / phi))
    # face-center apexes: the dual icosahedron aligned with the verts
    # above has its vertices along cyclic (0, +-phi, +-1)
    for s1 in (1, -1):
        for s2 in (1, -1):
            verts.append((0.0, s1 * phi, s2))
            verts.append((s1 * phi, s2, 0.0))
            verts.append((s1, 0.0, s2 * phi))
    v = np.array(verts, dtype=float)
    return v / np.linalg.norm(v, axis=1, keepdims=True)


@dataclass(frozen=True)
class ArraySpec:
    """Geometry of a spherical microphone array.

    ``capsules`` holds unit direction vectors, one per capsule, on a
    sphere of radius ``radius`` meters.  ``rigid`` selects the rigid
    baffle mode strength.
    """

    radius: float = 0.042
    capsules: np.ndarray = field(default_factory=capsule_directions_32)
    rigid: bool = True

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("array radius must be positive")
        caps = np.asarray(self.capsules, dtype=float).reshape(-1, 3)
        caps = caps / np.linalg.norm(caps, axis=1, keepdims=True)
        object.__setattr__(self, "capsules", caps)
        gram = caps @ caps.T
        np.fill_diagonal(gram, 0.0)
        if np.any(gram > 1.0 - 1e-12):
            raise ValueError("capsule directions must be distinct")

    @property
    def n_capsules(self):
        return self.capsules.shape[0]

    def capsule_angles(self):
        """(azimuth, inclination) arrays of the capsule directions."""
        az = np.mod(np.arctan2(self.capsules[:, 1], self.capsules[:, 0]), 2 * np.pi)
        inc = np.arccos(np.clip(self.capsules[:, 2], -1.0, 1.0))
        return az, inc


@dataclass(frozen=True)
class ShdSpectrogram:
    """Time-frequency grid of spherical-harmonic coefficients.

    ``coeffs`` has shape [(order+1)**2, K, T], ACN channel order, N3D
    normalization; grid metadata mirrors :class:`Spectrogram`.
    """

    coeffs: np.ndarray
    order: int
    hop: int
    fft_size: int
    sample_rate: float

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("encoding order must be at least 1")
        if self.coeffs.shape[0] != (self.order + 1) ** 2:
            raise ValueError("coefficient channel count does not match order")

    @property
    def n_bins(self):
        return self.coeffs.shape[1]

    @property
    def n_frames(self):
        return self.coeffs.shape[2]

    @property
    def bin_hz(self):
        return self.sample_rate / self.fft_size

    @property
    def bin_frequencies(self):
        return np.arange(self.n_bins) * self.bin_hz


@dataclass(frozen=True)
class DoaField:
    """Per-TF-point DOA unit vectors with a validity mask.

    ``u`` is [K, T, 3]; entries outside ``valid`` are zero.  ``band``
    lists the bin indices that took part in estimation.
    """

    u: np.ndarray
    valid: np.ndarray
    band: np.ndarray

    @property
    def n_bins(self):
        return self.u.shape[0]

    @property
    def n_frames(self):
        return self.u.shape[1]


def encode_shd(spec, array, order=1, max_gain_db=20.0, c=SPEED_OF_SOUND):
    """Encode capsule spectra into radially equalized SH coefficients.

    Per frequency bin the capsule pressures are projected onto the SH
    basis with the pseudoinverse of the capsule basis matrix, then each
    degree is equalized by ``4 pi / b_n(ka)`` so that a plane wave from
    ``Omega`` yields coefficients proportional to ``Y_nm(Omega)``.  The
    equalizer magnitude is dimensionless (approaching 1 for ka >> n)
    and is hard-clamped at ``max_gain_db`` to keep the low-frequency
    blow-up of the higher degrees bounded; bins too close to DC for the
    mode strength to be evaluated are zeroed.

    Parameters
    ----------
    spec : Spectrogram
        Capsule signals; channel order must match ``array.capsules``.
    array : ArraySpec
    order : int
        Encoding order N; requires ``(N+1)**2`` <= capsule count.
    max_gain_db : float
        Clamp on the radial correction magnitude.
    c : float
        Speed of sound, m/s.

    Returns
    -------
    ShdSpectrogram
    """
    if not isinstance(spec, Spectrogram):
        raise TypeError("encode_shd expects a Spectrogram")
    n_coeffs = (order + 1) ** 2
    if array.n_capsules < n_coeffs:
        raise ValueError(
            f"need at least {n_coeffs} capsules for order {order}, "
            f"got {array.n_capsules}"
        )
    if spec.n_channels != array.n_capsules:
        raise ValueError("spectrogram channel count does not match capsule count")

    az, inc = array.capsule_angles()
    basis = sh_matrix(az, inc, order)  # [M, n_coeffs]
    sv = np.linalg.svd(basis, compute_uv=False)
    if sv[-1] < 1e-10 * sv[0]:
        raise ValueError("degenerate capsule layout: SH basis matrix is singular")
    pinv = np.linalg.pinv(basis)  # [n_coeffs, M]

    # raw projection: [n_coeffs, K, T]
    p_nm = np.tensordot(pinv, spec.bins, axes=([1], [0]))

    ka = 2.0 * np.pi * spec.bin_frequencies * array.radius / c
    usable = ka >= _KA_FLOOR
    gain_limit = 10.0 ** (max_gain_db / 20.0)
    equalizer = np.zeros((n_coeffs, spec.n_bins), dtype=complex)
    for n in range(order + 1):
        g = np.zeros(spec.n_bins, dtype=complex)
        b = mode_strength(n, ka[usable], rigid=array.rigid)
        corr = 4.0 * np.pi / b
        mag = np.abs(corr)
        over = mag > gain_limit
        corr[over] *= gain_limit / mag[over]
        g[usable] = corr
        for m in range(-n, n + 1):
            equalizer[acn_index(n, m)] = g

    coeffs = p_nm * equalizer[:, :, np.newaxis]
    return ShdSpectrogram(
        coeffs=coeffs,
        order=order,
        hop=spec.hop,
        fft_size=spec.fft_size,
        sample_rate=spec.sample_rate,
    )


def piv_doa_field(shd, band, energy_floor=1e-6):
    """Pseudo-intensity-vector DOA estimates for every TF point.

    The PIV at a TF point is the real part of the conjugate pressure
    coefficient times the first-order (dipole) coefficients, mapped to
    Cartesian axes (ACN 3, 1, 2) -> (x, y, z).  Its direction, once
    normalized, points from the array toward the dominant source; the
    overall sign was fixed with a calibration run against a simulated
    plane wave from a known direction and is pinned by the test suite.

    Points are marked invalid when the bin lies outside ``band`` or the
    PIV norm falls below ``energy_floor`` times the frame's median
    in-band PIV norm (a relative floor, so rescaling the input changes
    nothing).

    Parameters
    ----------
    shd : ShdSpectrogram
        Needs order >= 1.
    band : array_like of int
        Bin indices to process (from :func:`sphdoa.tf.band_mask`).
    energy_floor : float
        Relative norm threshold below which a TF point is discarded.

    Returns
    -------
    DoaField
    """
    if shd.order < 1:
        raise ValueError("PIV needs at least first-order coefficients")
    band = np.asarray(band, dtype=int)
    if band.size == 0:
        raise ValueError("empty processing band")

    a00 = shd.coeffs[0]
    intensity = np.empty((shd.n_bins, shd.n_frames, 3))
    for axis, chan in enumerate((3, 1, 2)):  # x, y, z
        intensity[:, :, axis] = np.real(np.conj(a00) * shd.coeffs[chan])
    norm = np.linalg.norm(intensity, axis=2)

    in_band = np.zeros(shd.n_bins, dtype=bool)
    in_band[band] = True
    band_norms = norm[band, :]  # [len(band), T]
    median = np.median(band_norms, axis=0)  # per frame

    valid = in_band[:, np.newaxis] & (norm > 0.0) & (norm >= energy_floor * median)
    u = np.zeros_like(intensity)
    np.divide(intensity, norm[:, :, np.newaxis], out=u, where=valid[:, :, np.newaxis])
    u[~valid] = 0.0
    return DoaField(u=u, valid=valid, band=band)
