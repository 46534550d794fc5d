"""Generation of the Tx-RIS, RIS-Rx and Tx-Rx sub-channels.

A :class:`Scene` fixes the deterministic part of a simulation (terminal
positions, RIS panel, band, environment). :func:`generate_realization`
turns ``(scene, index, seed)`` into one :class:`ChannelRealization`; because
every random quantity comes from a substream keyed by the realization index
and link, realizations can be produced in any order or in parallel.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field

import numpy as np

from .errors import BelowReferenceDistance, DegenerateGeometry, NoScatterers
from .geometry import (
    AnglePair,
    Environment,
    Point3,
    RoomBounds,
    _direction,
    clip_cluster_distance,
    distance,
    ris_arrival_angles,
    ris_departure_angles_to_rx,
    ris_local_point,
    scatterer_position,
)
from .propagation import (
    PATH_LOSS_PROFILES,
    PathLossParams,
    RisPanel,
    element_gain,
    los_indicator,
    path_loss,
    wavenumber,
)
from .randvars import (
    AngleLink,
    RngStream,
    sample_cluster_angles,
    sample_cluster_count,
    sample_complex_gain,
    sample_shadow_fading,
    sample_subray_count,
    sample_uniform_phase,
)

__all__ = [
    "Scene",
    "ClusterSet",
    "ChannelRealization",
    "ChannelBatch",
    "default_lambda_p",
    "draw_cluster_set",
    "generate_tx_ris",
    "generate_ris_rx_indoor",
    "generate_ris_rx_outdoor",
    "generate_siso_indoor",
    "generate_siso_outdoor",
    "generate_realization",
    "generate_batch",
]

MAX_RESAMPLE = 100


def default_lambda_p(f_hz):
    """Poisson cluster mean for the 28 and 73 GHz presets."""
    ghz = f_hz / 1e9
    if abs(ghz - 28.0) < 1e-6:
        return 1.8
    if abs(ghz - 73.0) < 1e-6:
        return 1.9
    raise ValueError(f"no cluster-count preset at {ghz:g} GHz; supply lambda_p explicitly")


@dataclass(frozen=True)
class Scene:
    """Deterministic description of one simulated link."""

    environment: Environment
    tx: Point3
    rx: Point3
    panel: RisPanel
    f_hz: float
    bounds: RoomBounds = field(default_factory=RoomBounds)
    lambda_p: float | None = None
    los_profile: PathLossParams | None = None
    nlos_profile: PathLossParams | None = None
    include_direct_link: bool = True
    nlos_components: bool = True

    def __post_init__(self):
        env = Environment.parse(self.environment)
        object.__setattr__(self, "environment", env)
        object.__setattr__(self, "tx", Point3(*map(float, self.tx)))
        object.__setattr__(self, "rx", Point3(*map(float, self.rx)))
        if self.lambda_p is None:
            object.__setattr__(self, "lambda_p", default_lambda_p(self.f_hz))
        tag = env.value
        if self.los_profile is None:
            object.__setattr__(self, "los_profile", PATH_LOSS_PROFILES[f"{tag}-LOS"])
        if self.nlos_profile is None:
            object.__setattr__(self, "nlos_profile", PATH_LOSS_PROFILES[f"{tag}-NLOS"])

    @property
    def ris(self):
        return self.panel.position

    @property
    def indoor(self):
        return self.environment is Environment.INDOOR

    @property
    def ris_above_tx(self):
        return self.ris.z >= self.tx.z

    @property
    def k(self):
        return wavenumber(self.f_hz)

    def distances(self):
        return {
            "tx_ris": float(distance(self.tx, self.ris)),
            "ris_rx": float(distance(self.ris, self.rx)),
            "tx_rx": float(distance(self.tx, self.rx)),
        }

    def validate(self):
        """Check positions; warns if the Tx-RIS link is not in the far field."""
        d = self.distances()
        for name, value in d.items():
            if value < 1.0:
                raise BelowReferenceDistance(f"{name} distance {value:.4g} m is below 1 m")
        if self.indoor:
            for name, p in (("tx", self.tx), ("rx", self.rx), ("ris", self.ris)):
                if not self.bounds.contains(p):
                    raise DegenerateGeometry(f"{name} {tuple(p)} lies outside the room {self.bounds}")
        else:
            for name, p in (("tx", self.tx), ("rx", self.rx), ("ris", self.ris)):
                if p.z < 0:
                    raise DegenerateGeometry(f"{name} lies underground")
        self.panel.check_far_field(d["tx_ris"], self.f_hz)
        return self


@dataclass
class ClusterSet:
    """Retained scatterers of one clustered link, flattened cluster-major.

    ``subray_counts`` holds the drawn ``S_c``; ``gamma`` normalizes over the
    sub-rays that survived clipping so that ``gamma**2 * n_retained == 1``.
    """

    origin: np.ndarray
    mean_angles: AnglePair
    cluster_distance: np.ndarray
    subray_counts: np.ndarray
    cluster_index: np.ndarray
    angles: AnglePair
    distances: np.ndarray
    positions: np.ndarray
    beta: np.ndarray
    gamma: float
    attempts: int = 1

    @property
    def n_clusters(self):
        return int(self.subray_counts.size)

    @property
    def n_retained(self):
        return int(self.beta.size)


def draw_cluster_set(origin, link_distance, lambda_p, stream, *, env, bounds, link=AngleLink.TX_RIS,
                     ris=None, scenario=None):
    """Draw clusters, sub-ray angles, clipped distances and gains.

    For ``link=TX_RIS`` the rays leave ``origin`` (the Tx) along its
    broadside frame. For ``RIS_RX_OUTDOOR`` they leave the RIS along its
    broadside frame, which needs ``ris`` and ``scenario``.
    """
    origin = np.asarray(origin, dtype=float)
    for attempt in range(MAX_RESAMPLE):
        s = stream.child(attempt) if attempt else stream
        n_clusters = int(sample_cluster_count(lambda_p, s.child("count").generator()))
        counts = sample_subray_count(s.child("subrays").generator(), size=n_clusters)
        means, angles = sample_cluster_angles(s.child("angles").generator(), counts, link)
        a_c = s.child("distance").generator().uniform(1.0, link_distance, size=n_clusters)
        beta_all = sample_complex_gain(s.child("gains").generator(), size=int(counts.sum()))
        a_sub = np.repeat(a_c, counts)
        if link is AngleLink.TX_RIS:
            u = _direction(angles)
        else:
            u = ris_local_point(ris, 1.0, angles, scenario) - np.asarray(ris, dtype=float)
        a_clip = clip_cluster_distance(origin, angles, a_sub, bounds, env, direction=u)
        keep = ~np.isnan(a_clip)
        if not keep.any():
            continue
        sub_angles = AnglePair(angles.azimuth[keep], angles.elevation[keep])
        dist = a_clip[keep]
        if link is AngleLink.TX_RIS:
            pos = scatterer_position(origin, dist, sub_angles)
        else:
            pos = ris_local_point(ris, dist, sub_angles, scenario)
        cluster_index = np.repeat(np.arange(n_clusters), counts)[keep]
        beta = beta_all[keep]
        return ClusterSet(
            origin=origin,
            mean_angles=means,
            cluster_distance=a_c,
            subray_counts=counts,
            cluster_index=cluster_index,
            angles=sub_angles,
            distances=dist,
            positions=pos,
            beta=beta,
            gamma=float(np.sqrt(1.0 / beta.size)),
            attempts=attempt + 1,
        )
    raise NoScatterers(f"all sub-rays were clipped in {MAX_RESAMPLE} attempts")


@dataclass
class LinkDraw:
    """One generated sub-channel with its bookkeeping."""

    value: np.ndarray | complex
    los_part: np.ndarray | complex
    los: int
    shadow_los_db: float
    shadow_nlos_db: float
    clusters: ClusterSet | None = None


def _shadow(profile, stream, tag):
    return float(sample_shadow_fading(profile.sigma_db, stream.child(tag).generator()))


def generate_tx_ris(scene, stream):
    """Tx-RIS vector ``h``: clustered NLOS sum plus a Bernoulli-gated LOS ray."""
    panel, f, env = scene.panel, scene.f_hz, scene.environment
    d = float(distance(scene.tx, scene.ris))
    los = los_indicator(env, d, scene.ris_above_tx, stream.child("los").generator())
    x_los = _shadow(scene.los_profile, stream, "shadow_los")
    x_nlos = _shadow(scene.nlos_profile, stream, "shadow_nlos")
    eta = float(sample_uniform_phase(stream.child("los_phase").generator()))

    los_angles = ris_arrival_angles(scene.ris, scene.tx, panel.scenario)
    l_los = path_loss(scene.los_profile, f, d, x_los)
    h_los = los * np.sqrt(element_gain(panel.pattern, los_angles.elevation) * l_los) * np.exp(1j * eta) \
        * panel.response(los_angles, f)

    clusters = draw_cluster_set(scene.tx, d, scene.lambda_p, stream.child("clusters"),
                                env=env, bounds=scene.bounds)
    if scene.nlos_components:
        arr = ris_arrival_angles(scene.ris, clusters.positions, panel.scenario)
        l_nlos = path_loss(scene.nlos_profile, f, d, x_nlos)
        amp = clusters.beta * np.sqrt(element_gain(panel.pattern, arr.elevation) * l_nlos)
        h_nlos = clusters.gamma * (amp @ panel.response(arr, f))
    else:
        h_nlos = np.zeros(panel.n_elements, dtype=complex)
    return LinkDraw(h_nlos + h_los, h_los, int(los), x_los, x_nlos, clusters)


def _los_ray_to_rx(scene, los, x_los, eta):
    panel, f = scene.panel, scene.f_hz
    d = float(distance(scene.ris, scene.rx))
    ang = ris_departure_angles_to_rx(scene.ris, scene.rx, panel.scenario)
    l_los = path_loss(scene.los_profile, f, d, x_los)
    return los * np.sqrt(element_gain(panel.pattern, ang.elevation) * l_los) * np.exp(1j * eta) \
        * panel.response(ang, f)


def generate_ris_rx_indoor(scene, stream):
    """Pure-LOS RIS-Rx vector ``g``."""
    x_los = _shadow(scene.los_profile, stream, "shadow_los")
    eta = float(sample_uniform_phase(stream.child("los_phase").generator()))
    g = _los_ray_to_rx(scene, 1, x_los, eta)
    return LinkDraw(g, g, 1, x_los, 0.0, None)


def generate_ris_rx_outdoor(scene, stream):
    """Clustered RIS-Rx vector ``g`` with clusters independent of the Tx side."""
    panel, f, env = scene.panel, scene.f_hz, scene.environment
    d = float(distance(scene.ris, scene.rx))
    los = los_indicator(env, d, False, stream.child("los").generator())
    x_los = _shadow(scene.los_profile, stream, "shadow_los")
    x_nlos = _shadow(scene.nlos_profile, stream, "shadow_nlos")
    eta = float(sample_uniform_phase(stream.child("los_phase").generator()))
    g_los = _los_ray_to_rx(scene, los, x_los, eta)

    clusters = draw_cluster_set(scene.ris, d, scene.lambda_p, stream.child("clusters"), env=env,
                                bounds=scene.bounds, link=AngleLink.RIS_RX_OUTDOOR,
                                ris=scene.ris, scenario=panel.scenario)
    if scene.nlos_components:
        ang = clusters.angles
        l_nlos = path_loss(scene.nlos_profile, f, d, x_nlos)
        amp = clusters.beta * np.sqrt(element_gain(panel.pattern, ang.elevation) * l_nlos)
        g_nlos = clusters.gamma * (amp @ panel.response(ang, f))
    else:
        g_nlos = np.zeros(panel.n_elements, dtype=complex)
    return LinkDraw(g_nlos + g_los, g_los, int(los), x_los, x_nlos, clusters)


def generate_siso_indoor(scene, shared, tx_ris_los, stream):
    """Direct link over the clusters shared with the Tx-RIS link.

    ``shared`` is the :class:`LinkDraw` of the Tx-RIS link of the same
    realization; its gains and shadow samples are reused.
    """
    f = scene.f_hz
    d = float(distance(scene.tx, scene.rx))
    if scene.ris_above_tx:
        los = los_indicator(scene.environment, d, False, stream.child("los").generator())
    else:
        los = tx_ris_los
    eta = float(sample_uniform_phase(stream.child("los_phase").generator()))
    h_los = los * np.sqrt(path_loss(scene.los_profile, f, d, shared.shadow_los_db)) * np.exp(1j * eta)
    if scene.nlos_components:
        cl = shared.clusters
        b = distance(cl.positions, scene.ris)
        b_rx = distance(cl.positions, scene.rx)
        excess = scene.k * (b - b_rx)
        l_nlos = path_loss(scene.nlos_profile, f, d, shared.shadow_nlos_db)
        h_nlos = cl.gamma * np.sum(cl.beta * np.exp(1j * excess)) * np.sqrt(l_nlos)
    else:
        h_nlos = 0j
    return LinkDraw(complex(h_nlos + h_los), complex(h_los), int(los),
                    shared.shadow_los_db, shared.shadow_nlos_db, shared.clusters)


def generate_siso_outdoor(scene, stream):
    """Direct link with its own clusters, shadowing and LOS draw."""
    f = scene.f_hz
    d = float(distance(scene.tx, scene.rx))
    los = los_indicator(scene.environment, d, False, stream.child("los").generator())
    x_los = _shadow(scene.los_profile, stream, "shadow_los")
    x_nlos = _shadow(scene.nlos_profile, stream, "shadow_nlos")
    eta = float(sample_uniform_phase(stream.child("los_phase").generator()))
    h_los = los * np.sqrt(path_loss(scene.los_profile, f, d, x_los)) * np.exp(1j * eta)
    if scene.nlos_components:
        cs = stream.child("clusters")
        n_clusters = int(sample_cluster_count(scene.lambda_p, cs.child("count").generator()))
        counts = sample_subray_count(cs.child("subrays").generator(), size=n_clusters)
        beta = sample_complex_gain(cs.child("gains").generator(), size=int(counts.sum()))
        gamma = np.sqrt(1.0 / beta.size)
        h_nlos = gamma * np.sum(beta) * np.sqrt(path_loss(scene.nlos_profile, f, d, x_nlos))
    else:
        h_nlos = 0j
    return LinkDraw(complex(h_nlos + h_los), complex(h_los), int(los), x_los, x_nlos, None)


@dataclass
class ChannelRealization:
    """One draw of ``(h, g, h_siso)`` with LOS flags and shadow samples."""

    index: int
    h: np.ndarray
    g: np.ndarray
    h_siso: complex
    h_los: np.ndarray
    g_los: np.ndarray
    los_flags: dict
    shadow_db: dict
    clusters: dict

    @property
    def h_nlos(self):
        return self.h - self.h_los


def generate_realization(scene, index, seed=0):
    """Run the generation steps for realization ``index`` of ``scene``."""
    root = RngStream(seed).child(int(index))
    tx_ris = generate_tx_ris(scene, root.child("tx_ris"))
    if scene.indoor:
        ris_rx = generate_ris_rx_indoor(scene, root.child("ris_rx"))
    else:
        ris_rx = generate_ris_rx_outdoor(scene, root.child("ris_rx"))
    if not scene.include_direct_link:
        siso = LinkDraw(0j, 0j, 0, 0.0, 0.0, None)
    elif scene.indoor:
        siso = generate_siso_indoor(scene, tx_ris, tx_ris.los, root.child("tx_rx"))
    else:
        siso = generate_siso_outdoor(scene, root.child("tx_rx"))
    return ChannelRealization(
        index=int(index),
        h=tx_ris.value,
        g=ris_rx.value,
        h_siso=complex(siso.value),
        h_los=tx_ris.los_part,
        g_los=ris_rx.los_part,
        los_flags={"tx_ris": tx_ris.los, "ris_rx": ris_rx.los, "tx_rx": siso.los},
        shadow_db={
            "tx_ris": (tx_ris.shadow_los_db, tx_ris.shadow_nlos_db),
            "ris_rx": (ris_rx.shadow_los_db, ris_rx.shadow_nlos_db),
            "tx_rx": (siso.shadow_los_db, siso.shadow_nlos_db),
        },
        clusters={"tx_ris": tx_ris.clusters, "ris_rx": ris_rx.clusters, "tx_rx": siso.clusters},
    )


@dataclass
class ChannelBatch:
    """Stacked realizations: ``h`` and ``g`` are ``(M, N)``, ``h_siso`` is ``(M,)``."""

    indices: np.ndarray
    h: np.ndarray
    g: np.ndarray
    h_siso: np.ndarray
    los_flags: np.ndarray  # (M, 3): tx_ris, ris_rx, tx_rx
    h_los: np.ndarray | None = None

    def __len__(self):
        return int(self.indices.size)


def _chunk(scene, seed, indices, keep_los):
    n = scene.panel.n_elements
    m = len(indices)
    h = np.empty((m, n), dtype=complex)
    g = np.empty((m, n), dtype=complex)
    hs = np.empty(m, dtype=complex)
    flags = np.empty((m, 3), dtype=np.int8)
    h_los = np.empty((m, n), dtype=complex) if keep_los else None
    for row, idx in enumerate(indices):
        r = generate_realization(scene, idx, seed)
        h[row], g[row], hs[row] = r.h, r.g, r.h_siso
        flags[row] = (r.los_flags["tx_ris"], r.los_flags["ris_rx"], r.los_flags["tx_rx"])
        if keep_los:
            h_los[row] = r.h_los
    return h, g, hs, flags, h_los


def generate_batch(scene, n_realizations, seed=0, workers=1, start=0, keep_los=False):
    """Generate realizations ``start .. start + n - 1``, optionally in parallel.

    The output is identical for any ``workers`` value.
    """
    scene.validate()
    indices = np.arange(start, start + n_realizations)
    if workers <= 1 or n_realizations < 2 * workers:
        parts = [_chunk(scene, seed, indices, keep_los)]
    else:
        splits = np.array_split(indices, workers * 4)
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_chunk, scene, seed, s, keep_los) for s in splits if s.size]
            parts = [fut.result() for fut in futures]
    h = np.concatenate([p[0] for p in parts])
    g = np.concatenate([p[1] for p in parts])
    hs = np.concatenate([p[2] for p in parts])
    flags = np.concatenate([p[3] for p in parts])
    h_los = np.concatenate([p[4] for p in parts]) if keep_los else None
    return ChannelBatch(indices, h, g, hs, flags, h_los)
