"""Estimation-consistency weighting of per-TF-point DOA estimates.

Every time-frequency point of a :class:`~sphdoa.shd.DoaField` carries a
DOA unit vector; these weightings score each point by how much its frame
looks single-source (the per-frame factor) and how well the point agrees
with the frame's consensus direction (the within-frame factor).

Four schemes are provided.  The baseline ``ec`` references the frame
mean; the improved schemes reference the frame medoid, which is robust
to the outlier bins that drag a mean off-source.  They differ in the
per-frame factor: ``ec1`` keeps the mean-based coherence, ``ec2``
binarizes it by two-means clustering across frames, ``ec3`` replaces it
with the frame's average within-frame agreement.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .clustering import fuzzy_cmeans_scalar, scalar_two_means
from .geometry import medoid
from .shd import DoaField

__all__ = [
    "SCHEMES",
    "FrameStats",
    "WeightField",
    "frame_stats",
    "within_frame_lambda",
    "psi_bar_binarize",
    "psi_hat",
    "ec_weights",
    "subsample_top_p",
]

SCHEMES = ("ec", "ec1", "ec2", "ec3")

_REF_FLOOR = 1e-12


@dataclass(frozen=True)
class FrameStats:
    """Per-frame summary statistics of a DOA field.

    Arrays are indexed by frame.  ``u_hat`` is the arithmetic mean of
    the frame's valid DOA vectors (norm <= 1, not renormalized) and
    ``psi = 1 - sqrt(1 - ||u_hat||)`` its coherence.  ``u_tilde`` is the
    medoid, zero for frames without valid bins; ``has_medoid`` marks
    where it is defined.
    """

    u_hat: np.ndarray
    u_tilde: np.ndarray
    psi: np.ndarray
    valid_bin_count: np.ndarray
    has_medoid: np.ndarray

    @property
    def n_frames(self):
        return self.psi.shape[0]


@dataclass(frozen=True)
class WeightField:
    """Per-TF-point weights in [0, 1] produced by one scheme.

    ``valid`` is the mask of the source field; invalid points carry
    weight 0.  ``stats`` keeps the frame statistics the weights were
    built from, for diagnostics.
    """

    w: np.ndarray
    valid: np.ndarray
    scheme: str
    stats: FrameStats | None = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected {SCHEMES}")


def frame_stats(field):
    """Mean direction, coherence and medoid for every frame.

    Frames with no valid bins get ``psi = 0``, zero vectors, and
    ``has_medoid = False``; nothing fails on them.

    Parameters
    ----------
    field : DoaField

    Returns
    -------
    FrameStats
    """
    if not isinstance(field, DoaField):
        raise TypeError("frame_stats expects a DoaField")
    n_frames = field.n_frames
    counts = field.valid.sum(axis=0)

    sums = (field.u * field.valid[:, :, None]).sum(axis=0)  # [T, 3]
    u_hat = np.zeros((n_frames, 3))
    nonempty = counts > 0
    u_hat[nonempty] = sums[nonempty] / counts[nonempty, None]
    norm = np.minimum(np.linalg.norm(u_hat, axis=1), 1.0)
    psi = np.where(nonempty, 1.0 - np.sqrt(1.0 - norm), 0.0)

    u_tilde = np.zeros((n_frames, 3))
    for t in np.flatnonzero(counts):
        u_tilde[t] = medoid(field.u[field.valid[:, t], t])[1]
    return FrameStats(
        u_hat=u_hat,
        u_tilde=u_tilde,
        psi=psi,
        valid_bin_count=counts,
        has_medoid=nonempty.copy(),
    )


def within_frame_lambda(field, ref):
    """Agreement of each TF point with its frame's reference direction.

    ``lambda(k, t) = 1 - arccos(u . ref / (||u|| ||ref||)) / pi``: 1 for
    parallel, 1/2 for orthogonal, 0 for antiparallel.  Invalid points
    get 0, as do all points of frames whose reference is degenerate
    (norm below 1e-12, e.g. a mean that cancelled to zero).

    Parameters
    ----------
    field : DoaField
    ref : ndarray [T, 3]
        Per-frame reference (mean or medoid); need not be unit-norm.

    Returns
    -------
    ndarray [K, T]
    """
    ref = np.asarray(ref, dtype=float)
    if ref.shape != (field.n_frames, 3):
        raise ValueError("reference must supply one vector per frame")
    ref_norm = np.linalg.norm(ref, axis=1)
    usable = ref_norm >= _REF_FLOOR
    safe_ref = np.where(usable[:, None], ref, 1.0)
    safe_norm = np.where(usable, ref_norm, 1.0)

    dots = np.einsum("ktc,tc->kt", field.u, safe_ref)
    u_norm = np.linalg.norm(field.u, axis=2)
    mask = field.valid & usable[None, :]
    cos = np.zeros_like(dots)
    np.divide(dots, u_norm * safe_norm[None, :], out=cos, where=mask)
    lam = np.where(mask, 1.0 - np.arccos(np.clip(cos, -1.0, 1.0)) / np.pi, 0.0)
    return lam


def psi_bar_binarize(psis, method="two-means", rule="above-centroid"):
    """Binary single-source frame weights from the coherence values.

    The frame coherences are clustered into two groups with centroids
    ``c0 <= c1``.  Under the default rule a frame gets 1 only when its
    coherence strictly exceeds the upper centroid ``c1``; frames equal
    to ``c1`` are suppressed.  ``rule="membership"`` instead accepts
    every frame closer to ``c1`` than to ``c0`` (the midpoint test),
    which keeps whole upper clusters instead of their upper tails.

    Parameters
    ----------
    psis : array_like
        One coherence per frame; at least two frames.
    method : {"two-means", "fuzzy-c-means"}
    rule : {"above-centroid", "membership"}

    Returns
    -------
    ndarray of {0.0, 1.0}
        If all coherences are identical, no frame can strictly exceed
        the collapsed centroid: all weights are 0 and a warning is
        raised.
    """
    psis = np.asarray(psis, dtype=float).ravel()
    if psis.size < 2:
        raise ValueError("binarization needs at least two frames")
    if method == "two-means":
        c0, c1 = scalar_two_means(psis)
    elif method == "fuzzy-c-means":
        c0, c1 = fuzzy_cmeans_scalar(psis)
    else:
        raise ValueError(f"unknown binarization method {method!r}")
    if c0 == c1:
        # degenerate clustering already warned; nothing can exceed c1
        return np.zeros_like(psis)
    if rule == "above-centroid":
        out = (psis > c1).astype(float)
    elif rule == "membership":
        out = (psis > 0.5 * (c0 + c1)).astype(float)
    else:
        raise ValueError(f"unknown binarization rule {rule!r}")
    if not out.any():
        warnings.warn("no frame exceeded the upper coherence centroid")
    return out


def psi_hat(lam, valid):
    """Per-frame mean of the within-frame weights over valid bins.

    Parameters
    ----------
    lam : ndarray [K, T]
        Within-frame weights referenced to the frame medoid.
    valid : ndarray [K, T] of bool

    Returns
    -------
    ndarray [T]
        Zero for frames without valid bins.
    """
    counts = valid.sum(axis=0)
    sums = np.where(valid, lam, 0.0).sum(axis=0)
    out = np.zeros_like(sums)
    np.divide(sums, counts, out=out, where=counts > 0)
    return out


def ec_weights(field, scheme, binarize_method="two-means", binarize_rule="above-centroid"):
    """Weights of one estimation-consistency scheme for a DOA field.

    ======  ==================  =========================
    scheme  per-frame factor    within-frame factor
    ======  ==================  =========================
    ec      psi (coherence)     agreement with the mean
    ec1     psi                 agreement with the medoid
    ec2     binarized psi       agreement with the medoid
    ec3     mean agreement      agreement with the medoid
    ======  ==================  =========================

    Parameters
    ----------
    field : DoaField
    scheme : str
        One of :data:`SCHEMES`, case-insensitive ("EC-1" style accepted).
    binarize_method, binarize_rule : str
        Passed to :func:`psi_bar_binarize` (only used by ``ec2``).

    Returns
    -------
    WeightField
    """
    key = scheme.lower().replace("-", "").replace("_", "")
    if key not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    stats = frame_stats(field)
    if key == "ec":
        lam = within_frame_lambda(field, stats.u_hat)
        per_frame = stats.psi
    else:
        lam = within_frame_lambda(field, stats.u_tilde)
        if key == "ec1":
            per_frame = stats.psi
        elif key == "ec2":
            per_frame = psi_bar_binarize(
                stats.psi, method=binarize_method, rule=binarize_rule
            )
        else:  # ec3
            per_frame = psi_hat(lam, field.valid)
    w = np.where(field.valid, per_frame[None, :] * lam, 0.0)
    return WeightField(w=w, valid=field.valid, scheme=key, stats=stats)


def subsample_top_p(field, weights, p):
    """The valid DOA vectors carrying the top ``p`` percent of weights.

    Selects ``ceil(p/100 * n_valid)`` points with the largest weights,
    globally over the whole grid.  Ties at the cutoff are broken toward
    the lowest frame-major flat index ``t * K + k``, making the
    selection deterministic.

    Parameters
    ----------
    field : DoaField
    weights : WeightField
        Must share the field's validity mask.
    p : float
        Percentage in (0, 100].

    Returns
    -------
    ndarray [n_selected, 3]
    """
    if not 0.0 < p <= 100.0:
        raise ValueError("percentage must lie in (0, 100]")
    if weights.w.shape != field.valid.shape:
        raise ValueError("weight grid does not match the DOA field")
    k_idx, t_idx = np.nonzero(field.valid)
    n_valid = k_idx.size
    if n_valid == 0:
        raise ValueError("no valid DOA vectors to subsample")
    n_keep = int(np.ceil(p / 100.0 * n_valid))
    w = weights.w[k_idx, t_idx]
    flat = t_idx * field.n_bins + k_idx
    order = np.lexsort((flat, -w))
    chosen = order[:n_keep]
    return field.u[k_idx[chosen], t_idx[chosen]]
