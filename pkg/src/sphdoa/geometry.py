"""Unit-vector and spherical-coordinate primitives for DOA processing.

Conventions used throughout the package: directions are right-handed
Cartesian unit vectors (x, y, z); inclination is measured from the +z
axis (0 = up, pi/2 = horizontal plane) and azimuth from +x toward +y.
The array simulator and the spherical-harmonic basis use the identical
convention, so angles round-trip between modules without remapping.
"""

import numpy as np

__all__ = [
    "normalize",
    "angular_error",
    "mean_direction",
    "medoid",
    "direction_to_vector",
    "vector_to_direction",
]

_TINY = np.finfo(float).tiny


def normalize(v):
    """Scale a 3-vector to unit length.

    Parameters
    ----------
    v : array_like, shape (3,)

    Returns
    -------
    numpy.ndarray
        ``v / ||v||``.

    Raises
    ------
    ValueError
        If ``||v||`` is zero (or denormally small).
    """
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n < _TINY:
        raise ValueError("cannot normalize a zero-length vector")
    return v / n


def angular_error(a, b):
    """Angle in radians between two unit vectors, in [0, pi].

    The dot product is clamped to [-1, 1] so rounding on nearly
    parallel or antiparallel inputs cannot produce NaN.
    """
    d = float(np.dot(a, b))
    return float(np.arccos(np.clip(d, -1.0, 1.0)))


def mean_direction(vs):
    """Component-wise arithmetic mean of a set of unit vectors.

    Parameters
    ----------
    vs : array_like, shape (n, 3)
        Unit vectors, one per row.

    Returns
    -------
    numpy.ndarray, shape (3,)
        The mean vector.  Its norm lies in [0, 1] (up to rounding) and
        shrinks as the input directions disperse; it is *not*
        renormalized here.

    Raises
    ------
    ValueError
        If ``vs`` is empty.
    """
    vs = np.asarray(vs, dtype=float)
    if vs.size == 0:
        raise ValueError("no valid DOA vectors in frame")
    return vs.reshape(-1, 3).mean(axis=0)


def medoid(vs):
    """Element of a set of unit vectors minimizing total chord distance.

    The medoid is the member ``v_i`` minimizing ``sum_j ||v_i - v_j||``
    (Euclidean chord distance; for unit vectors the chord is monotone in
    the subtended angle, so chord and arc length induce the same
    ordering).  Ties break toward the lowest index, which keeps the
    result deterministic across platforms.

    Parameters
    ----------
    vs : array_like, shape (n, 3)

    Returns
    -------
    (int, numpy.ndarray)
        Index of the medoid and the medoid vector itself.

    Raises
    ------
    ValueError
        If ``vs`` is empty.
    """
    vs = np.asarray(vs, dtype=float).reshape(-1, 3)
    if vs.shape[0] == 0:
        raise ValueError("cannot take the medoid of an empty set")
    diffs = vs[:, np.newaxis, :] - vs[np.newaxis, :, :]
    sums = np.linalg.norm(diffs, axis=-1).sum(axis=1)
    idx = int(np.argmin(sums))
    return idx, vs[idx].copy()


def direction_to_vector(azimuth, inclination):
    """Spherical direction (azimuth, inclination) to Cartesian unit vector.

    ``x = sin(inclination) cos(azimuth)``, ``y = sin(inclination)
    sin(azimuth)``, ``z = cos(inclination)``.  Accepts scalars or
    equal-shaped arrays; arrays produce an (..., 3) stack.
    """
    azimuth = np.asarray(azimuth, dtype=float)
    inclination = np.asarray(inclination, dtype=float)
    s = np.sin(inclination)
    out = np.stack(
        [s * np.cos(azimuth), s * np.sin(azimuth), np.cos(inclination)],
        axis=-1,
    )
    return out


def vector_to_direction(v):
    """Cartesian vector to (azimuth, inclination), inverse of
    :func:`direction_to_vector`.

    Azimuth is wrapped into [0, 2*pi); inclination lies in [0, pi].
    The input need not be exactly unit length; only its direction is
    used.
    """
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v, axis=-1)
    if np.any(n < _TINY):
        raise ValueError("cannot convert a zero-length vector to a direction")
    # atan2 keeps full relative accuracy near the poles where arccos(z)
    # would lose ~eps/sin(inclination)
    inclination = np.arctan2(np.hypot(v[..., 0], v[..., 1]), v[..., 2])
    azimuth = np.mod(np.arctan2(v[..., 1], v[..., 0]), 2.0 * np.pi)
    if v.ndim == 1:
        return float(azimuth), float(inclination)
    return azimuth, inclination
