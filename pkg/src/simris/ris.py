"""RIS response configuration: ideal alignment, quantization, phase noise.

All functions broadcast over leading axes, so a batch of realizations with
``h`` and ``g`` of shape ``(M, N)`` and ``h_siso`` of shape ``(M,)`` is handled
in one call.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .errors import DimensionMismatch
from .randvars import RngStream, sample_von_mises

__all__ = [
    "PhaseMode",
    "RisPhaseConfig",
    "optimal_phases",
    "quantize_phases",
    "perturb_phases",
    "apply_phase_mode",
    "compose",
]

TWO_PI = 2 * np.pi


def _wrap(x):
    # np.mod can round tiny negatives up to exactly 2 pi
    x = np.mod(x, TWO_PI)
    return np.where(x >= TWO_PI, 0.0, x)


class PhaseMode(enum.Enum):
    IDEAL = "ideal"
    QUANTIZED = "quantized"
    NOISY = "noisy"
    QUANTIZED_NOISY = "quantized-noisy"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        v = str(value).lower().replace("_", "-")
        for m in cls:
            if v in (m.value, m.name.lower().replace("_", "-")):
                return m
        raise ValueError(f"unknown phase mode {value!r}")


@dataclass(frozen=True)
class RisPhaseConfig:
    """Diagonal of Theta as magnitudes ``alpha`` and phases ``phases`` in [0, 2 pi)."""

    phases: np.ndarray
    alpha: np.ndarray | float = 1.0
    mode: PhaseMode = PhaseMode.IDEAL
    q_bits: int | None = None
    kappa: float | None = None

    @property
    def theta(self):
        return np.asarray(self.alpha) * np.exp(1j * np.asarray(self.phases))


def optimal_phases(h, g, h_siso=0.0, alpha=1.0):
    """Phases that co-phase every cascaded term with the direct path."""
    h = np.asarray(h, dtype=complex)
    g = np.asarray(g, dtype=complex)
    if h.shape != g.shape:
        raise DimensionMismatch(f"h {h.shape} and g {g.shape} differ")
    ref = np.angle(np.asarray(h_siso, dtype=complex))  # angle(0) == 0
    phases = _wrap(ref[..., None] - np.angle(g) - np.angle(h))
    return RisPhaseConfig(phases=phases, alpha=alpha)


def quantize_phases(cfg, q_bits):
    """Snap each phase to the nearest of ``2**q_bits`` uniform levels.

    Exact ties go to the lower level.
    """
    if int(q_bits) < 1:
        raise ValueError("q_bits must be >= 1")
    levels = 2 ** int(q_bits)
    step = TWO_PI / levels
    x = _wrap(np.asarray(cfg.phases, dtype=float))
    m = np.ceil(x / step - 0.5)
    snapped = np.mod(m, levels) * step
    mode = PhaseMode.QUANTIZED_NOISY if cfg.mode in (PhaseMode.NOISY, PhaseMode.QUANTIZED_NOISY) \
        else PhaseMode.QUANTIZED
    return replace(cfg, phases=snapped, mode=mode, q_bits=int(q_bits))


def perturb_phases(cfg, kappa, rng):
    """Add i.i.d. zero-mean von Mises errors of concentration ``kappa``."""
    phases = np.asarray(cfg.phases, dtype=float)
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    err = sample_von_mises(kappa, gen, size=phases.shape)
    return replace(cfg, phases=_wrap(phases + err), mode=PhaseMode.NOISY, kappa=float(kappa))


def apply_phase_mode(cfg, mode, q_bits=None, kappa=None, rng=None):
    """Apply an imperfection model to ideal phases.

    For the combined mode the estimation error is applied first and the
    noisy phase is then quantized.
    """
    mode = PhaseMode.parse(mode)
    if mode is PhaseMode.IDEAL:
        return cfg
    if mode in (PhaseMode.NOISY, PhaseMode.QUANTIZED_NOISY):
        if kappa is None or rng is None:
            raise ValueError(f"{mode.value} mode needs kappa and rng")
        cfg = perturb_phases(cfg, kappa, rng)
    if mode in (PhaseMode.QUANTIZED, PhaseMode.QUANTIZED_NOISY):
        if q_bits is None:
            raise ValueError(f"{mode.value} mode needs q_bits")
        cfg = quantize_phases(cfg, q_bits)
    return cfg


def compose(h, g, cfg, h_siso=0.0):
    """Overall channel ``g^T Theta h + h_siso``."""
    h = np.asarray(h, dtype=complex)
    g = np.asarray(g, dtype=complex)
    theta = cfg.theta if isinstance(cfg, RisPhaseConfig) else np.asarray(cfg, dtype=complex)
    if h.shape[-1] != g.shape[-1] or np.shape(theta)[-1:] not in ((), (h.shape[-1],)):
        raise DimensionMismatch(f"shapes h {h.shape}, g {g.shape}, theta {np.shape(theta)}")
    if h.shape != g.shape:
        raise DimensionMismatch(f"h {h.shape} and g {g.shape} differ")
    return np.sum(g * theta * h, axis=-1) + np.asarray(h_siso, dtype=complex)
