"""Shoebox-room acoustics: reverberation calibration and image sources.

Reverberation is modeled with the image-source method on a rectangular
room with uniform wall absorption.  The absorption coefficient is
recovered from the requested reverberation time, and each image carries
a gain equal to the wall reflection coefficient raised to its
reflection count.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "RoomSpec",
    "ImageSource",
    "t60_to_reflection",
    "image_sources",
]


@dataclass(frozen=True)
class RoomSpec:
    """Rectangular room geometry and target reverberation.

    ``dims`` are the interior side lengths in meters; ``t60`` the
    reverberation time in seconds, 0 meaning anechoic.
    """

    dims: tuple = (5.0, 6.0, 4.0)
    t60: float = 0.4
    speed_of_sound: float = 343.0

    def __post_init__(self):
        dims = tuple(float(d) for d in self.dims)
        if len(dims) != 3 or any(d <= 0 for d in dims):
            raise ValueError("room dimensions must be three positive lengths")
        if self.t60 < 0:
            raise ValueError("reverberation time cannot be negative")
        if self.speed_of_sound <= 0:
            raise ValueError("speed of sound must be positive")
        object.__setattr__(self, "dims", dims)

    @property
    def volume(self):
        lx, ly, lz = self.dims
        return lx * ly * lz

    @property
    def surface_area(self):
        lx, ly, lz = self.dims
        return 2.0 * (lx * ly + lx * lz + ly * lz)

    def contains(self, point):
        p = np.asarray(point, dtype=float)
        return bool(np.all(p > 0) and np.all(p < np.asarray(self.dims)))


@dataclass(frozen=True)
class ImageSource:
    """One mirrored source: position, accumulated gain, reflection count."""

    position: np.ndarray
    gain: float
    order: int


def t60_to_reflection(room, formula="sabine"):
    """Uniform wall reflection coefficient achieving the room's T60.

    Sabine: ``alpha = 0.161 V / (t60 A)``; Eyring:
    ``alpha = 1 - exp(-0.161 V / (t60 A))``.  The reflection coefficient
    is ``sqrt(1 - alpha)`` (energy to amplitude).

    Parameters
    ----------
    room : RoomSpec
        Needs ``t60 > 0``; anechoic rooms have no wall coefficient and
        are handled upstream as direct-path-only.
    formula : {"sabine", "eyring"}

    Returns
    -------
    float in [0, 1)
    """
    if room.t60 <= 0:
        raise ValueError("t60 must be positive; anechoic is handled upstream")
    metric = 0.161 * room.volume / (room.t60 * room.surface_area)
    if formula == "sabine":
        alpha = metric
        if alpha >= 1.0:
            raise ValueError("room cannot achieve requested T60")
    elif formula == "eyring":
        alpha = 1.0 - np.exp(-metric)
    else:
        raise ValueError(f"unknown absorption formula {formula!r}")
    return float(np.sqrt(1.0 - alpha))


def _axis_candidates(length, source, center, p, reach):
    """Lattice indices r with |(1-2p) source + 2 r length - center| <= reach."""
    base = (1 - 2 * p) * source
    lo = int(np.ceil((center - reach - base) / (2.0 * length)))
    hi = int(np.floor((center + reach - base) / (2.0 * length)))
    return np.arange(lo, hi + 1)


def image_sources(room, src_pos, array_center, reflection, max_order=None, max_delay=None):
    """All image sources of one real source, with gains and orders.

    An image is indexed per axis by a parity bit p and a lattice shift
    r: its coordinate is ``(1-2p) x + 2 r L``, and it stands for
    ``2|r|`` wall reflections on that axis when p = 0 and ``|2r - 1|``
    when p = 1.  The total reflection count over the three axes is the
    image's order; its gain is ``reflection ** order``.  The direct path
    is the p = 0, r = 0 image with gain 1.

    At least one of ``max_order`` (reflection-count cutoff) and
    ``max_delay`` (propagation-delay cutoff, measured to the array
    center, in seconds) must be given; with both, images must satisfy
    both bounds.

    Parameters
    ----------
    room : RoomSpec
    src_pos, array_center : array_like, 3 floats, inside the room
    reflection : float in [0, 1]
    max_order : int or None
    max_delay : float seconds or None

    Returns
    -------
    list of ImageSource, deterministic order.
    """
    src = np.asarray(src_pos, dtype=float)
    center = np.asarray(array_center, dtype=float)
    if not room.contains(src) or not room.contains(center):
        raise ValueError("source and array positions must lie inside the room")
    if not 0.0 <= reflection <= 1.0:
        raise ValueError("reflection coefficient must lie in [0, 1]")
    if max_order is None and max_delay is None:
        raise ValueError("need max_order and/or max_delay")
    if max_order is not None and max_order < 0:
        raise ValueError("max_order cannot be negative")

    if max_delay is not None:
        reach = room.speed_of_sound * max_delay
    else:
        # order bound limits each axis shift: 2|r| <= max_order + 1
        reach = (max_order + 1) * max(room.dims) + max(room.dims)

    per_axis = []
    for d in range(3):
        rows = []
        for p in (0, 1):
            for r in _axis_candidates(room.dims[d], src[d], center[d], p, reach):
                coord = (1 - 2 * p) * src[d] + 2.0 * r * room.dims[d]
                count = 2 * abs(int(r)) if p == 0 else abs(2 * int(r) - 1)
                if max_order is not None and count > max_order:
                    continue
                rows.append((coord, count))
        per_axis.append(rows)

    out = []
    for cx, nx in per_axis[0]:
        for cy, ny in per_axis[1]:
            order_xy = nx + ny
            if max_order is not None and order_xy > max_order:
                continue
            for cz, nz in per_axis[2]:
                order = order_xy + nz
                if max_order is not None and order > max_order:
                    continue
                pos = np.array([cx, cy, cz])
                if max_delay is not None:
                    dist = np.linalg.norm(pos - center)
                    if dist > reach:
                        continue
                out.append(
                    ImageSource(position=pos, gain=reflection**order, order=order)
                )
    out.sort(key=lambda im: (im.order, im.position[0], im.position[1], im.position[2]))
    return out
