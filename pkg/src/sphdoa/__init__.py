"""Multi-source DOA estimation from spherical microphone arrays."""

__version__ = "0.1.0"

from .clustering import ClusterResult, match_sources, scalar_two_means, spherical_kmeans
from .config import load_config, make_trial_config
from .geometry import (
    angular_error,
    direction_to_vector,
    mean_direction,
    medoid,
    normalize,
    vector_to_direction,
)
from .pipeline import (
    BenchmarkReport,
    TrialConfig,
    TrialReport,
    estimate_sources,
    field_from_recording,
    run_benchmark,
    run_trial,
    simulate_trial,
)
from .render import ScenarioSpec, render_array, render_shd_direct
from .reports import emit_report, load_report
from .room import ImageSource, RoomSpec
from .shd import ArraySpec, ShdSpectrogram, encode_shd, piv_doa_field, sh_matrix
from .signals import activity_mask, add_noise_snr, gen_speechlike
from .tf import MultichannelSignal, Spectrogram, band_mask, stft
from .wavio import read_wav, write_wav
from .weighting import SCHEMES, ec_weights, subsample_top_p

__all__ = [
    "__version__",
    "ArraySpec",
    "BenchmarkReport",
    "ClusterResult",
    "ImageSource",
    "MultichannelSignal",
    "ScenarioSpec",
    "SCHEMES",
    "ShdSpectrogram",
    "Spectrogram",
    "RoomSpec",
    "TrialConfig",
    "TrialReport",
    "activity_mask",
    "add_noise_snr",
    "angular_error",
    "band_mask",
    "direction_to_vector",
    "ec_weights",
    "emit_report",
    "encode_shd",
    "estimate_sources",
    "field_from_recording",
    "gen_speechlike",
    "load_config",
    "load_report",
    "make_trial_config",
    "match_sources",
    "mean_direction",
    "medoid",
    "normalize",
    "piv_doa_field",
    "read_wav",
    "render_array",
    "render_shd_direct",
    "run_benchmark",
    "run_trial",
    "scalar_two_means",
    "sh_matrix",
    "simulate_trial",
    "spherical_kmeans",
    "stft",
    "subsample_top_p",
    "vector_to_direction",
    "write_wav",
]
