"""Equal-area isolatitude sphere pixelization and KL-divergence estimation.

The pixelization follows the 12*4^n hierarchy: order n gives N = 12*4^n
patches arranged on R(n) isolatitude rings (R doubles per order, 3 rings at
order 0, 9 at order 2), with per-ring pixel counts quantized from a
sin(theta) profile and ring boundaries placed so every patch has area
exactly 4*pi/N.  Patch assignment is a latitude-band lookup plus a
longitude bin.

The KL divergence of an empirical sample set against the uniform sphere is
the histogram estimator D = sum_i P_i log(P_i N) with the 0 log 0 = 0
convention and no smoothing; D_normalized divides by the bimodal value
log(N/2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


def ring_count(order: int) -> int:
    """Number of isolatitude rings at the given order (odd, ~2.25 * 2^order)."""
    r = round(2.25 * 2 ** order)
    if r % 2 == 0:
        r += 1
    return max(3, r)


@dataclass(frozen=True)
class SpherePixelization:
    order: int
    n_patches: int
    ring_sizes: tuple          # pixels per ring, north to south
    z_bounds: np.ndarray = field(repr=False)   # descending, len = rings + 1
    ring_offset: tuple         # first patch index of each ring

    @property
    def patch_area(self) -> float:
        return 4.0 * math.pi / self.n_patches

    def areas(self) -> np.ndarray:
        return np.full(self.n_patches, self.patch_area)

    def centers(self) -> np.ndarray:
        """Unit-vector centers of every patch (area-weighted in z)."""
        out = np.empty((self.n_patches, 3))
        for i, m in enumerate(self.ring_sizes):
            z = 0.5 * (self.z_bounds[i] + self.z_bounds[i + 1])
            rho = math.sqrt(max(0.0, 1.0 - z * z))
            phis = (np.arange(m) + 0.5) * TWO_PI / m
            sl = slice(self.ring_offset[i], self.ring_offset[i] + m)
            out[sl, 0] = rho * np.cos(phis)
            out[sl, 1] = rho * np.sin(phis)
            out[sl, 2] = z
        return out

    def assign(self, vectors: np.ndarray) -> np.ndarray:
        """Patch index of each unit vector; every vector maps to exactly one patch."""
        v = np.atleast_2d(np.asarray(vectors, dtype=float))
        norms = np.linalg.norm(v, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-6):
            raise ValueError("samples must be unit vectors to 1e-6")
        z = np.clip(v[:, 2] / norms, -1.0, 1.0)
        phi = np.mod(np.arctan2(v[:, 1], v[:, 0]), TWO_PI)
        # rings are bands z in (z_bounds[i+1], z_bounds[i]]; z = +1 -> ring 0
        ring = np.searchsorted(-self.z_bounds, -z, side="left") - 1
        ring = np.clip(ring, 0, len(self.ring_sizes) - 1)
        sizes = np.asarray(self.ring_sizes)[ring]
        offs = np.asarray(self.ring_offset)[ring]
        bins = np.minimum((phi / (TWO_PI / sizes)).astype(np.int64), sizes - 1)
        return offs + bins


def pixelize(order: int) -> SpherePixelization:
    """Equal-area isolatitude pixelization with N = 12 * 4^order patches."""
    if not 0 <= order <= 6:
        raise ValueError(f"order must be in 0..6, got {order}")
    n = 12 * 4 ** order
    rings = ring_count(order)
    mids = (np.arange(rings) + 0.5) * math.pi / rings
    raw = np.sin(mids)
    counts = np.maximum(1, np.rint(n * raw / raw.sum()).astype(int))
    # symmetrize, then absorb the rounding drift in the middle ring
    counts = np.minimum(counts, counts[::-1])
    counts[rings // 2] += n - counts.sum()
    if counts[rings // 2] < 1:
        raise RuntimeError("ring quantization failed")
    cum = np.concatenate([[0], np.cumsum(counts)])
    z_bounds = 1.0 - 2.0 * cum / n
    offsets = tuple(int(c) for c in cum[:-1])
    return SpherePixelization(order=order, n_patches=n,
                              ring_sizes=tuple(int(c) for c in counts),
                              z_bounds=z_bounds, ring_offset=offsets)


@dataclass
class EnsembleHistogram:
    """Patch-count histogram of an ensemble of unit vectors."""
    counts: np.ndarray
    total: int
    order: int

    @classmethod
    def empty(cls, pix: SpherePixelization) -> "EnsembleHistogram":
        return cls(np.zeros(pix.n_patches, dtype=np.int64), 0, pix.order)

    def add(self, pix: SpherePixelization, vectors: np.ndarray) -> "EnsembleHistogram":
        idx = pix.assign(vectors)
        self.counts += np.bincount(idx, minlength=pix.n_patches)
        self.total += len(idx)
        return self

    def merge(self, other: "EnsembleHistogram") -> "EnsembleHistogram":
        if other.order != self.order:
            raise ValueError("cannot merge histograms of different orders")
        return EnsembleHistogram(self.counts + other.counts,
                                 self.total + other.total, self.order)


def kl_from_counts(counts: np.ndarray, n_patches: int) -> tuple[float, float]:
    """(D, D_normalized) of an empirical patch histogram vs the uniform sphere."""
    total = counts.sum()
    if total == 0:
        raise ValueError("empty sample set")
    p = counts[counts > 0] / total
    d = float(np.sum(p * np.log(p * n_patches)))
    return d, d / math.log(n_patches / 2)


def kl_divergence(samples: np.ndarray, pix: SpherePixelization) -> tuple[float, float]:
    """Histogram KL divergence of unit-vector samples against the uniform sphere."""
    samples = np.atleast_2d(samples)
    if len(samples) == 0:
        raise ValueError("empty sample set")
    hist = EnsembleHistogram.empty(pix).add(pix, samples)
    return kl_from_counts(hist.counts, pix.n_patches)
