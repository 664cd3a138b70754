"""Render a two-source room scene onto the spherical array.

Builds a scenario by hand (room, array placement, source positions and
signals), renders the 32 capsule recordings with a modest image tail,
and writes them to a WAV file next to this script.
"""

import pathlib

import numpy as np

from sphdoa import (
    ArraySpec,
    RoomSpec,
    ScenarioSpec,
    gen_speechlike,
    render_array,
    write_wav,
)

room = RoomSpec(dims=(5.0, 6.0, 4.0), t60=0.3)
center = np.array([2.5, 3.0, 2.0])

# two talkers a metre from the array, 60 degrees apart
positions = []
for azimuth in (20.0, 80.0):
    th = np.radians(azimuth)
    positions.append(center + [np.cos(th), np.sin(th), 0.0])

sources = tuple(
    (tuple(pos), gen_speechlike(1.5, 16000.0, seed=seed))
    for seed, pos in enumerate(positions)
)

scenario = ScenarioSpec(
    room=room,
    array=ArraySpec(),
    array_center=tuple(center),
    sources=sources,
    snr_db=20.0,
    seed=0,
)

print(f"room {room.dims} m, t60 {room.t60} s")
print(f"array: {scenario.array.n_capsules} capsules, "
      f"radius {scenario.array.radius * 100:.1f} cm, rigid={scenario.array.rigid}")

mics = render_array(scenario, max_delay=0.08)
rms = np.sqrt(np.mean(mics.samples**2, axis=1))
print(f"rendered {mics.n_channels} channels x {mics.n_samples} samples")
print(f"capsule RMS spread {rms.min():.2e} .. {rms.max():.2e}")

out = pathlib.Path(__file__).with_name("scene.wav")
write_wav(out, mics)
print(f"wrote {out}")
