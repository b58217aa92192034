"""Emergent-structure diagnostics and the encode/reconstruct pipeline.

Covers the observables used to characterise trained networks: per-neuron
ocularity profiles, stripe periodicity statistics, binary dominance maps
with an autocorrelation-length summary, receptive-field montages, and
posterior-weighted reconstruction of an input from the reference vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, FlatProfileError
from .model import NetworkParams, pmd_posterior
from .topology import Topology


@dataclass
class OcularityProfile:
    """Per-neuron, per-retina summary of reference-vector structure."""

    left: np.ndarray
    right: np.ndarray
    measure: str = "absolute"


@dataclass
class StripeStats:
    dominant_period: float   # neurons per cycle, from the DFT peak of left-right
    antiphase_corr: float    # Pearson correlation of the two profiles
    amplitude: float         # mean |left - right|


def ocularity_profile(
    params: NetworkParams, topo: Topology, measure: str = "absolute"
) -> OcularityProfile:
    """Per-neuron reference-vector deviation within each retina's field.

    Deviations are taken from zero, the overall mean component value for
    zero-mean training data.  ``measure="absolute"`` averages |x'_i| and
    suits natural (textured) training data.  ``measure="signed"`` averages
    the components themselves; this is the right probe for featureless
    synthetic data, whose normalisation makes the two retinae exact
    negatives of each other, collapsing the absolute measure to identical
    left/right profiles while the signed means still expose which retina
    a neuron prefers.
    """
    if topo.num_retinae != 2:
        raise ConfigError("ocularity is defined only for two-retina topologies")
    if measure not in ("absolute", "signed"):
        raise ConfigError(f"measure must be absolute|signed, got {measure!r}")
    m = topo.num_neurons
    left = np.empty(m)
    right = np.empty(m)
    for y in range(m):
        seg = params.references[topo.rf_slice(y)]
        n = topo.rf_retina_count(y)
        if measure == "absolute":
            left[y] = np.abs(seg[:n]).mean()
            right[y] = np.abs(seg[n:]).mean()
        else:
            left[y] = seg[:n].mean()
            right[y] = seg[n:].mean()
    return OcularityProfile(left=left, right=right, measure=measure)


def stripe_stats(profile: OcularityProfile) -> StripeStats:
    """Periodicity summary of a 1-D ocularity profile pair.

    Constant profiles have no defined correlation and raise
    ``FlatProfileError``.  Profiles that vary but never separate
    (left == right everywhere) get an infinite dominant period.
    """
    left, right = profile.left, profile.right
    m = left.size
    if m < 8:
        raise ConfigError(f"need at least 8 neurons for stripe statistics, got {m}")
    if np.ptp(left) == 0.0 or np.ptp(right) == 0.0:
        raise FlatProfileError("profiles are constant; stripe statistics undefined")

    lz = left - left.mean()
    rz = right - right.mean()
    corr = float((lz @ rz) / np.sqrt((lz @ lz) * (rz @ rz)))

    diff = left - right
    if np.ptp(diff) == 0.0:
        period = np.inf
    else:
        spectrum = np.abs(np.fft.rfft(diff - diff.mean()))
        k = int(np.argmax(spectrum[1:])) + 1  # zero bin excluded
        period = m / k
    return StripeStats(
        dominant_period=float(period),
        antiphase_corr=corr,
        amplitude=float(np.abs(diff).mean()),
    )


def dominance_map_2d(
    params: NetworkParams, topo: Topology, measure: str = "signed"
) -> np.ndarray:
    """Binary ocularity labels (+1 left, -1 right) on the neuron grid.

    Exact ties go to the left label so the map is deterministic.
    """
    if topo.grid_rank != 2:
        raise ConfigError("dominance map needs a 2-D neuron grid")
    profile = ocularity_profile(params, topo, measure=measure)
    labels = np.where(profile.left >= profile.right, 1, -1).astype(np.int8)
    return labels.reshape(topo.grid_shape)


def label_autocorr_length(labels: np.ndarray) -> float:
    """Integrated autocorrelation length of a binary label grid.

    Lag correlations are averaged over both grid axes and summed
    (1 + 2 * sum of positive-lag correlations) up to the first
    non-positive lag.  Salt-and-pepper maps score about 1; contiguous
    domains of width w score roughly w.
    """
    z = labels.astype(np.float64)
    z -= z.mean()
    var = float((z * z).mean())
    if var == 0.0:
        raise FlatProfileError("single-label map; autocorrelation undefined")
    max_lag = max(1, min(labels.shape) // 2)
    length = 1.0
    for k in range(1, max_lag + 1):
        acc = []
        if labels.shape[0] > k:
            acc.append(float((z[k:, :] * z[:-k, :]).mean()))
        if labels.ndim == 2 and labels.shape[1] > k:
            acc.append(float((z[:, k:] * z[:, :-k]).mean()))
        corr = float(np.mean(acc)) / var
        if corr <= 0.0:
            break
        length += 2.0 * corr
    return length


def _scaled_tile(values: np.ndarray, cells: np.ndarray, tile_shape) -> np.ndarray:
    """One receptive-field window as a [0, 1] image; truncated cells stay 0."""
    tile = np.zeros(tile_shape)
    lo, hi = values.min(), values.max()
    if hi > lo:
        tile.flat[cells] = (values - lo) / (hi - lo)
    else:
        tile.flat[cells] = 0.5
    return tile


def montage(params: NetworkParams, topo: Topology, which: str = "weights") -> np.ndarray:
    """Tile every neuron's receptive-field vector into one grid image.

    Each tile is independently affine-scaled to [0, 1]; tiles are separated
    by 1-pixel black lines.  Single-retina topologies give a gray image
    (H, W); with two retinae the first retina is rendered into the blue
    channel and the second into yellow (red+green), shape (H, W, 3).
    """
    if topo.grid_rank != 2:
        raise ConfigError("montage needs a 2-D neuron grid")
    if which not in ("weights", "references"):
        raise ConfigError(f"montage source must be weights|references, got {which!r}")
    source = params.weights if which == "weights" else params.references

    rows, cols = topo.grid_shape
    th, tw = topo.rf_shape
    height = rows * th + (rows - 1)
    width = cols * tw + (cols - 1)
    color = topo.num_retinae == 2
    image = np.zeros((height, width, 3)) if color else np.zeros((height, width))

    for y in range(topo.num_neurons):
        gy, gx = divmod(y, cols)
        seg = slice(topo.rf_indptr[y], topo.rf_indptr[y + 1])
        vec = source[seg]
        cells = topo.rf_cells[seg]
        n = topo.rf_retina_count(y)
        window = (slice(gy * (th + 1), gy * (th + 1) + th),
                  slice(gx * (tw + 1), gx * (tw + 1) + tw))
        if color:
            image[window][:, :, 2] = _scaled_tile(vec[:n], cells[:n], (th, tw))
            yellow = _scaled_tile(vec[n:], cells[n:], (th, tw))
            image[window][:, :, 0] = yellow
            image[window][:, :, 1] = yellow
        else:
            image[window] = _scaled_tile(vec, cells, (th, tw))
    return image


def reconstruct(
    params: NetworkParams, topo: Topology, x: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Posterior-weighted sum of reference vectors, scattered back to input space.

    Returns ``(x_hat, posterior)``.  Input components outside every
    receptive field stay zero; overlapping fields accumulate.
    """
    state = pmd_posterior(params, topo, x)
    counts = np.diff(topo.rf_indptr)
    contrib = np.repeat(state.posterior, counts) * params.references
    x_hat = np.bincount(topo.rf_indices, weights=contrib, minlength=topo.input_dim)
    return x_hat, state.posterior


def write_ocularity_csv(path, profile: OcularityProfile) -> None:
    with open(path, "w") as fh:
        fh.write("index,left,right\n")
        for i, (l, r) in enumerate(zip(profile.left, profile.right)):
            fh.write(f"{i},{l:.17g},{r:.17g}\n")
