"""Training-data sources: synthetic featureless retinae and texture patches.

All sources emit flat, zero-mean sample vectors matching a topology's
input dimension, and own a seeded generator so a run's sample stream is
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import gaussian_filter

from .errors import ConfigError, DataError
from .topology import Topology


def brightness_pair(left: float, right: float) -> tuple[float, float]:
    """Normalise a pair of retina brightnesses onto the ocularity axis.

    The pair is scaled so the two retinae sum to one, then shifted to zero
    mean; the result satisfies left + right == 0 exactly.
    """
    total = left + right
    if total == 0.0:
        raise ValueError("left + right must be nonzero")
    v = left / total - 0.5
    return v, -v


@dataclass
class SyntheticRetinaSource:
    """Featureless two-retina images with independent brightnesses.

    Every pixel of a retina carries that retina's (normalised, zero-mean)
    brightness value, so each sample lives on the one-dimensional
    ocularity axis.
    """

    retina_shape: tuple[int, ...]
    num_retinae: int = 2
    rng: np.random.Generator = field(default_factory=np.random.default_rng)

    def __post_init__(self):
        if self.num_retinae != 2:
            raise ConfigError("synthetic featureless data needs exactly two retinae")
        self.retina_size = int(np.prod(self.retina_shape))

    @classmethod
    def from_topology(cls, topo: Topology, rng) -> "SyntheticRetinaSource":
        return cls(retina_shape=topo.retina_shape, num_retinae=topo.num_retinae, rng=rng)

    def sample(self) -> np.ndarray:
        while True:
            l, r = self.rng.uniform(0.0, 1.0, 2)
            if l + r > 0.0:
                break
        left, right = brightness_pair(l, r)
        out = np.empty(2 * self.retina_size)
        out[: self.retina_size] = left
        out[self.retina_size :] = right
        return out


@dataclass
class TexturePatchSource:
    """Random patches (1-D runs or 2-D windows) cut from a gray image.

    The image's global mean is subtracted from every patch so emitted
    samples are approximately zero mean.  With two retinae the per-retina
    patches are drawn at independent locations unless ``correlated`` is
    set, in which case both retinae see the same patch.
    """

    image: np.ndarray
    retina_shape: tuple[int, ...]
    num_retinae: int = 1
    rng: np.random.Generator = field(default_factory=np.random.default_rng)
    correlated: bool = False

    def __post_init__(self):
        self.image = np.asarray(self.image, dtype=np.float64)
        if self.image.ndim != 2:
            raise DataError(f"texture image must be 2-D, got shape {self.image.shape}")
        shape = self.retina_shape
        if len(shape) == 1:
            if shape[0] > self.image.shape[1]:
                raise DataError(
                    f"run length {shape[0]} exceeds image width {self.image.shape[1]}"
                )
        elif len(shape) == 2:
            if shape[0] > self.image.shape[0] or shape[1] > self.image.shape[1]:
                raise DataError(
                    f"patch {shape} exceeds image shape {self.image.shape}"
                )
        else:
            raise DataError(f"retina rank {len(shape)} unsupported")
        self.mean = float(self.image.mean())
        self.retina_size = int(np.prod(shape))

    @classmethod
    def from_topology(cls, topo: Topology, image, rng, correlated=False) -> "TexturePatchSource":
        return cls(
            image=image,
            retina_shape=topo.retina_shape,
            num_retinae=topo.num_retinae,
            rng=rng,
            correlated=correlated,
        )

    def _patch(self) -> np.ndarray:
        h, w = self.image.shape
        if len(self.retina_shape) == 1:
            (n,) = self.retina_shape
            i = int(self.rng.integers(0, h))
            j = int(self.rng.integers(0, w - n + 1))
            return self.image[i, j : j + n]
        r, c = self.retina_shape
        i = int(self.rng.integers(0, h - r + 1))
        j = int(self.rng.integers(0, w - c + 1))
        return self.image[i : i + r, j : j + c]

    def sample(self) -> np.ndarray:
        out = np.empty(self.num_retinae * self.retina_size)
        first = self._patch()
        for t in range(self.num_retinae):
            patch = first if (t == 0 or self.correlated) else self._patch()
            out[t * self.retina_size : (t + 1) * self.retina_size] = patch.ravel() - self.mean
        return out


def generate_texture(seed: int, shape=(256, 256), corr_length: float = 7.0) -> np.ndarray:
    """Seeded band-limited noise texture, values in [0, 1].

    White noise is smoothed with a wrap-around Gaussian, giving an
    autocorrelation that decays to 1/e at roughly ``corr_length`` pixels.
    """
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(shape)
    smooth = gaussian_filter(noise, sigma=corr_length / 2.0, mode="wrap")
    lo, hi = smooth.min(), smooth.max()
    return (smooth - lo) / (hi - lo)
