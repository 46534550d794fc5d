"""Deterministic propagation primitives.

Element pattern, planar RIS array response, close-in path loss with
frequency-dependent exponent, LOS probability models and the radar range
path gains of the static multi-scatterer baseline.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BelowReferenceDistance, DegenerateGeometry, FarFieldWarning, NotSquare
from .geometry import Environment, MountingScenario, Point3

__all__ = [
    "SPEED_OF_LIGHT",
    "wavelength",
    "wavenumber",
    "ElementPattern",
    "PathLossParams",
    "PATH_LOSS_PROFILES",
    "RisPanel",
    "element_gain",
    "array_response",
    "path_loss",
    "path_loss_db",
    "los_probability",
    "los_indicator",
    "radar_path_gains",
]

SPEED_OF_LIGHT = 299_792_458.0

# q = G_e(0)/4 - 1/2 with G_e(0) = 4 pi A_e / lambda^2 and A_e = (lambda/2)^2
DEFAULT_PATTERN_EXPONENT = math.pi / 4 - 0.5


def wavelength(f_hz):
    return SPEED_OF_LIGHT / f_hz


def wavenumber(f_hz):
    return 2 * np.pi / wavelength(f_hz)


@dataclass(frozen=True)
class ElementPattern:
    """Rotationally symmetric ``cos^q`` element pattern.

    The default exponent 0.2854 (printed as 0.285) gives a boresight gain of
    exactly pi, i.e. 5 dBi.
    """

    q: float = DEFAULT_PATTERN_EXPONENT

    def __post_init__(self):
        if not self.q > -0.5:
            raise ValueError("pattern exponent must exceed -1/2")

    @property
    def boresight_gain(self):
        return 2.0 * (2.0 * self.q + 1.0)

    def gain(self, theta):
        return element_gain(self, theta)


def element_gain(pattern, theta):
    """Linear gain ``2(2q+1) cos^{2q}(theta)``; zero outside (-pi/2, pi/2)."""
    theta = np.asarray(theta, dtype=float)
    c = np.cos(theta)
    inside = (theta > -np.pi / 2) & (theta < np.pi / 2) & (c > 0)
    g = np.where(inside, pattern.boresight_gain * np.power(np.where(inside, c, 1.0), 2 * pattern.q), 0.0)
    return float(g) if g.ndim == 0 else g


@dataclass(frozen=True)
class PathLossParams:
    """Close-in model parameters: exponent, shadow std (dB), b, f0 (Hz)."""

    n: float
    sigma_db: float
    b: float = 0.0
    f0_hz: float = 24.2e9

    def __post_init__(self):
        if not self.n > 0:
            raise ValueError("path loss exponent must be positive")
        if self.sigma_db < 0:
            raise ValueError("shadow fading std must be non-negative")

    def effective_exponent(self, f_hz):
        return self.n * (1.0 + self.b * (f_hz - self.f0_hz) / self.f0_hz)


PATH_LOSS_PROFILES = {
    "InH-NLOS": PathLossParams(n=3.19, sigma_db=8.29, b=0.06, f0_hz=24.2e9),
    "InH-LOS": PathLossParams(n=1.73, sigma_db=3.02, b=0.0),
    "UMi-NLOS": PathLossParams(n=3.19, sigma_db=8.2, b=0.0),
    "UMi-LOS": PathLossParams(n=1.98, sigma_db=3.1, b=0.0),
}


def path_loss_db(params, f_hz, d, shadow_db=0.0):
    """Path gain in dB (negative numbers are attenuation)."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 1.0):
        raise BelowReferenceDistance(f"distance {np.min(d):.6g} m is below the 1 m reference")
    if f_hz <= 0:
        raise ValueError("frequency must be positive")
    lam = wavelength(f_hz)
    out = (
        -20.0 * np.log10(4 * np.pi / lam)
        - 10.0 * params.effective_exponent(f_hz) * np.log10(d)
        - np.asarray(shadow_db, dtype=float)
    )
    return float(out) if out.ndim == 0 else out


def path_loss(params, f_hz, d, shadow_db=0.0):
    """Linear path gain ``10^(L_dB/10)``."""
    return 10.0 ** (np.asarray(path_loss_db(params, f_hz, d, shadow_db)) / 10.0)


def los_probability(env, d):
    """LOS probability for the indoor office or outdoor street-canyon model."""
    env = Environment.parse(env)
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    if env is Environment.INDOOR:
        p = np.where(
            d <= 1.2,
            1.0,
            np.where(d <= 6.5, np.exp(-(d - 1.2) / 4.7), 0.32 * np.exp(-(d - 6.5) / 32.6)),
        )
    else:
        e = np.exp(-d / 39.0)
        p = np.minimum(20.0 / d, 1.0) * (1.0 - e) + e
    return float(p) if p.ndim == 0 else p


def los_indicator(env, d, ris_above_tx, rng, size=None):
    """Bernoulli LOS flag; forced to 1 when the RIS is not below the Tx indoors."""
    env = Environment.parse(env)
    if ris_above_tx and env is Environment.INDOOR:
        return np.ones(size, dtype=int) if size is not None else 1
    p = los_probability(env, d)
    u = rng.random(size)
    out = np.asarray(u < p).astype(int)
    return int(out) if size is None else out


def radar_path_gains(a_m, b_mn, c_n, sigma_rcs, g_e, lam):
    """Radar range path gains ``(L_RIS[m, n], L_LOS[n])`` of the static baseline."""
    a_m, b_mn, c_n = (np.asarray(v, dtype=float) for v in (a_m, b_mn, c_n))
    if np.any(a_m <= 0) or np.any(b_mn <= 0) or np.any(c_n <= 0):
        raise DegenerateGeometry("radar range distances must be positive")
    if np.any(np.asarray(sigma_rcs) < 0):
        raise ValueError("radar cross section must be non-negative")
    l_los = g_e * lam**2 / (4 * np.pi * c_n) ** 2
    l_ris = g_e * lam**2 * np.asarray(sigma_rcs, dtype=float) / ((4 * np.pi) ** 3 * a_m**2 * b_mn**2)
    return l_ris, l_los


@dataclass(frozen=True)
class RisPanel:
    """Square RIS with ``n_elements`` reflectors.

    ``spacing`` defaults to half a wavelength at ``f_hz`` when left as None;
    ``position`` is the reference (south-east) element.
    """

    n_elements: int
    position: Point3 = Point3(0.0, 0.0, 0.0)
    scenario: MountingScenario = MountingScenario.SIDE_WALL
    spacing: float | None = None
    pattern: ElementPattern = field(default_factory=ElementPattern)

    def __post_init__(self):
        side = math.isqrt(int(self.n_elements)) if self.n_elements > 0 else 0
        if side * side != self.n_elements or self.n_elements <= 0:
            raise NotSquare(f"N={self.n_elements} is not a perfect square")
        if self.spacing is not None and not self.spacing > 0:
            raise ValueError("element spacing must be positive")
        object.__setattr__(self, "position", Point3(*map(float, self.position)))
        object.__setattr__(self, "scenario", MountingScenario.parse(self.scenario))

    @property
    def side(self):
        return math.isqrt(self.n_elements)

    def element_spacing(self, f_hz):
        return wavelength(f_hz) / 2 if self.spacing is None else self.spacing

    def indices(self):
        """``(x, y)`` index of each element; x runs fastest."""
        s = self.side
        x = np.tile(np.arange(s), s)
        y = np.repeat(np.arange(s), s)
        return x, y

    def check_far_field(self, d, f_hz):
        limit = self.n_elements * wavelength(f_hz) / 2
        if d <= limit:
            warnings.warn(
                f"distance {d:.3g} m is within the far-field limit N*lambda/2 = {limit:.3g} m",
                FarFieldWarning,
                stacklevel=2,
            )
            return False
        return True

    def response(self, angles, f_hz):
        return array_response(self, angles, wavenumber(f_hz), spacing=self.element_spacing(f_hz))


def array_response(panel, angles, k, spacing=None):
    """Steering vector(s) ``exp(j k d (x sin(theta) + y sin(phi) cos(theta)))``.

    ``angles`` may hold arrays of shape ``(...)``; the result has shape
    ``(..., N)``.
    """
    if isinstance(panel, (int, np.integer)):
        n = int(panel)
        side = math.isqrt(n)
        if side * side != n:
            raise NotSquare(f"N={n} is not a perfect square")
        x = np.tile(np.arange(side), side)
        y = np.repeat(np.arange(side), side)
        d = spacing if spacing is not None else np.pi / k
    else:
        x, y = panel.indices()
        d = spacing if spacing is not None else (panel.spacing if panel.spacing is not None else np.pi / k)
    phi = np.asarray(angles[0], dtype=float)[..., None]
    theta = np.asarray(angles[1], dtype=float)[..., None]
    phase = k * d * (x * np.sin(theta) + y * np.sin(phi) * np.cos(theta))
    return np.exp(1j * phase)
