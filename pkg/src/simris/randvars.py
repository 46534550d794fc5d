"""Stochastic primitives and order-independent seeded substreams.

Every draw site is keyed by a tuple such as ``(realization, link, quantity)``
and mapped to its own :class:`numpy.random.Generator`. A realization's draws
therefore never depend on which worker produced it or in what order.
"""

from __future__ import annotations

import enum
import zlib
from dataclasses import dataclass

import numpy as np

from .geometry import AnglePair

__all__ = [
    "RngStream",
    "ClusterCountParams",
    "AngleLink",
    "CLUSTER_COUNT_28GHZ",
    "CLUSTER_COUNT_73GHZ",
    "SUBRAY_MAX",
    "ANGULAR_SPREAD",
    "sample_cluster_count",
    "sample_subray_count",
    "sample_cluster_angles",
    "sample_complex_gain",
    "sample_shadow_fading",
    "sample_uniform_phase",
    "sample_von_mises",
]

SUBRAY_MAX = 30
ANGULAR_SPREAD = np.deg2rad(5.0)


def _tag_to_int(tag):
    if isinstance(tag, (int, np.integer)):
        if tag < 0:
            raise ValueError("substream tags must be non-negative")
        return int(tag)
    return zlib.crc32(str(tag).encode("utf-8"))


@dataclass(frozen=True)
class RngStream:
    """A seed plus a substream key.

    >>> s = RngStream(7).child(3, "tx_ris", "gains")
    >>> s.generator().standard_normal() == s.generator().standard_normal()
    True
    """

    seed: int = 0
    key: tuple = ()

    def child(self, *tags):
        return RngStream(self.seed, self.key + tuple(_tag_to_int(t) for t in tags))

    def generator(self):
        ss = np.random.SeedSequence(entropy=int(self.seed) & (2**64 - 1), spawn_key=self.key)
        return np.random.Generator(np.random.PCG64(ss))


def _as_generator(rng):
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass(frozen=True)
class ClusterCountParams:
    lambda_p: float

    def __post_init__(self):
        if not self.lambda_p > 0:
            raise ValueError("lambda_p must be positive")


CLUSTER_COUNT_28GHZ = ClusterCountParams(1.8)
CLUSTER_COUNT_73GHZ = ClusterCountParams(1.9)


class AngleLink(enum.Enum):
    TX_RIS = "tx_ris"
    RIS_RX_OUTDOOR = "ris_rx_outdoor"


def sample_cluster_count(params, rng, size=None):
    """Number of clusters, ``max(1, Poisson(lambda_p))``."""
    rng = _as_generator(rng)
    lam = params.lambda_p if isinstance(params, ClusterCountParams) else float(params)
    return np.maximum(1, rng.poisson(lam, size=size))


def sample_subray_count(rng, size=None):
    """Sub-rays per cluster, uniform on the integers 1..30."""
    rng = _as_generator(rng)
    return rng.integers(1, SUBRAY_MAX, size=size, endpoint=True)


def sample_cluster_angles(rng, subray_counts, link=AngleLink.TX_RIS, spread=ANGULAR_SPREAD):
    """Draw cluster mean angles and Laplacian sub-ray angles around them.

    Parameters
    ----------
    subray_counts : sequence of int
        ``S_c`` for each cluster.
    link : AngleLink
        ``TX_RIS`` draws mean azimuth on [-pi/2, pi/2]; the outdoor RIS-Rx
        link uses [-pi/4, pi/4] to keep scatterers in front of the RIS.
        Mean elevation is always uniform on [-pi/4, pi/4].
    spread : float
        Standard deviation of the Laplacian around the cluster mean (rad).

    Returns
    -------
    means : AnglePair of arrays, shape (C,)
    subrays : AnglePair of arrays, shape (sum S_c,), cluster-major order
    """
    rng = _as_generator(rng)
    counts = np.asarray(subray_counts, dtype=int)
    n_clusters = counts.size
    az_half = np.pi / 2 if AngleLink(link) is AngleLink.TX_RIS else np.pi / 4
    mean_phi = rng.uniform(-az_half, az_half, size=n_clusters)
    mean_theta = rng.uniform(-np.pi / 4, np.pi / 4, size=n_clusters)
    scale = spread / np.sqrt(2.0)
    total = int(counts.sum())
    phi = np.repeat(mean_phi, counts) + rng.laplace(0.0, scale, size=total)
    theta = np.repeat(mean_theta, counts) + rng.laplace(0.0, scale, size=total)
    return AnglePair(mean_phi, mean_theta), AnglePair(phi, theta)


def sample_complex_gain(rng, size=None):
    """Circularly symmetric CN(0, 1) gains."""
    rng = _as_generator(rng)
    re = rng.standard_normal(size)
    im = rng.standard_normal(size)
    return (re + 1j * im) / np.sqrt(2.0)


def sample_shadow_fading(sigma_db, rng, size=None):
    """Shadow fading in dB, N(0, sigma_db^2)."""
    if sigma_db < 0:
        raise ValueError("sigma_db must be non-negative")
    rng = _as_generator(rng)
    return sigma_db * rng.standard_normal(size)


def sample_uniform_phase(rng, size=None):
    rng = _as_generator(rng)
    return rng.uniform(0.0, 2 * np.pi, size=size)


def sample_von_mises(kappa, rng, size=None):
    """Zero-mean von Mises phase errors on (-pi, pi].

    ``kappa = inf`` yields exact zeros; ``kappa = 0`` is uniform.
    """
    if kappa < 0:
        raise ValueError("kappa must be non-negative")
    rng = _as_generator(rng)
    if np.isinf(kappa):
        return np.zeros(size) if size is not None else 0.0
    return rng.vonmises(0.0, kappa, size=size)
