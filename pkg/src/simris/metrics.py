"""SNR, ergodic achievable rate and Monte Carlo sweeps.

Rates with and without the RIS are computed from the same channel draws so
that their difference has low variance. Sweeps reuse the seed at every grid
point for the same reason.
"""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, field

import numpy as np

from .channel import generate_batch
from .errors import SimRISError
from .geometry import Point3
from .randvars import RngStream
from .ris import PhaseMode, apply_phase_mode, compose, optimal_phases

__all__ = [
    "dbm_to_watts",
    "LinkBudget",
    "PhaseSettings",
    "RateResult",
    "SweepAxis",
    "SweepRow",
    "snr",
    "composite_channel",
    "rate_from_batch",
    "achievable_rate",
    "sweep",
    "power_shift_db",
]


def dbm_to_watts(p_dbm):
    return 10.0 ** ((np.asarray(p_dbm, dtype=float) - 30.0) / 10.0)


@dataclass(frozen=True)
class LinkBudget:
    pt_dbm: float = 30.0
    pn_dbm: float = -100.0

    def __post_init__(self):
        if not (np.isfinite(self.pt_dbm) and np.isfinite(self.pn_dbm)):
            raise ValueError("powers must be finite")

    @property
    def pt_watts(self):
        return float(dbm_to_watts(self.pt_dbm))

    @property
    def pn_watts(self):
        return float(dbm_to_watts(self.pn_dbm))


@dataclass(frozen=True)
class PhaseSettings:
    mode: PhaseMode = PhaseMode.IDEAL
    q_bits: int | None = None
    kappa: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", PhaseMode.parse(self.mode))
        if self.mode in (PhaseMode.QUANTIZED, PhaseMode.QUANTIZED_NOISY) and not self.q_bits:
            raise ValueError(f"{self.mode.value} needs q_bits >= 1")
        if self.mode in (PhaseMode.NOISY, PhaseMode.QUANTIZED_NOISY) and (self.kappa is None or self.kappa < 0):
            raise ValueError(f"{self.mode.value} needs kappa >= 0")


@dataclass
class RateResult:
    """Monte Carlo estimate of ``E[log2(1 + rho)]`` in bits/s/Hz."""

    mean_rate: float
    stderr: float
    n_realizations: int
    mean_rate_no_ris: float
    stderr_no_ris: float
    config: dict = field(default_factory=dict)
    rates: np.ndarray | None = field(default=None, repr=False)
    rates_no_ris: np.ndarray | None = field(default=None, repr=False)


def snr(composite, budget):
    """Instantaneous SNR, linear scale."""
    return np.abs(np.asarray(composite)) ** 2 * budget.pt_watts / budget.pn_watts


def _stats(x):
    x = np.asarray(x, dtype=float)
    se = float(np.std(x, ddof=1) / np.sqrt(x.size)) if x.size > 1 else 0.0
    return float(np.mean(x)), se


def composite_channel(batch, phase=PhaseSettings(), seed=0):
    """Overall channel per realization under the requested phase control."""
    cfg = optimal_phases(batch.h, batch.g, batch.h_siso)
    if phase.mode in (PhaseMode.NOISY, PhaseMode.QUANTIZED_NOISY):
        rows = []
        for row, idx in enumerate(batch.indices):
            one = dataclasses.replace(cfg, phases=cfg.phases[row])
            stream = RngStream(seed).child(int(idx), "ris", "phase_error")
            rows.append(apply_phase_mode(one, phase.mode, phase.q_bits, phase.kappa, stream.generator()).phases)
        cfg = dataclasses.replace(cfg, phases=np.stack(rows), mode=phase.mode)
    else:
        cfg = apply_phase_mode(cfg, phase.mode, q_bits=phase.q_bits)
    return compose(batch.h, batch.g, cfg, batch.h_siso)


def rate_from_batch(batch, budget, phase=PhaseSettings(), seed=0, composite=None, config=None):
    if composite is None:
        composite = composite_channel(batch, phase, seed)
    rates = np.log2(1.0 + snr(composite, budget))
    rates0 = np.log2(1.0 + snr(batch.h_siso, budget))
    m, se = _stats(rates)
    m0, se0 = _stats(rates0)
    return RateResult(m, se, len(batch), m0, se0, dict(config or {}), rates, rates0)


def achievable_rate(scene, budget, n_realizations, seed=0, phase=PhaseSettings(), workers=1):
    """Ergodic rate of ``scene`` over ``n_realizations`` seeded draws."""
    if n_realizations < 1:
        raise ValueError("need at least one realization")
    batch = generate_batch(scene, n_realizations, seed=seed, workers=workers)
    echo = {"pt_dbm": budget.pt_dbm, "pn_dbm": budget.pn_dbm, "phase_mode": phase.mode.value, "seed": seed}
    return rate_from_batch(batch, budget, phase, seed, config=echo)


class SweepAxis(enum.Enum):
    TRANSMIT_POWER = "power"
    RX_POSITION = "rx"
    RIS_POSITION = "ris"
    ELEMENT_COUNT = "n"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        v = str(value).lower()
        for m in cls:
            if v in (m.value, m.name.lower()):
                return m
        raise ValueError(f"unknown sweep axis {value!r}")


@dataclass
class SweepRow:
    axis_value: object
    result: RateResult | None = None
    error: str | None = None


def _scene_at(scene, axis, value):
    if axis is SweepAxis.RX_POSITION:
        return dataclasses.replace(scene, rx=Point3(*map(float, value)))
    if axis is SweepAxis.RIS_POSITION:
        return dataclasses.replace(scene, panel=dataclasses.replace(scene.panel, position=Point3(*map(float, value))))
    if axis is SweepAxis.ELEMENT_COUNT:
        return dataclasses.replace(scene, panel=dataclasses.replace(scene.panel, n_elements=int(value)))
    raise ValueError(axis)


def sweep(scene, axis, grid, budget, n_realizations, seed=0, phase=PhaseSettings(), workers=1):
    """One :class:`RateResult` per grid point.

    Failing grid points become rows with ``error`` set; the sweep goes on.
    """
    axis = SweepAxis.parse(axis)
    grid = list(grid)
    if not grid:
        raise ValueError("empty sweep grid")
    rows = []
    if axis is SweepAxis.TRANSMIT_POWER:
        batch = generate_batch(scene, n_realizations, seed=seed, workers=workers)
        composite = composite_channel(batch, phase, seed)
        for pt in grid:
            b = dataclasses.replace(budget, pt_dbm=float(pt))
            rows.append(SweepRow(float(pt), rate_from_batch(batch, b, phase, seed, composite=composite)))
        return rows
    for value in grid:
        try:
            res = achievable_rate(_scene_at(scene, axis, value), budget, n_realizations, seed, phase, workers)
            rows.append(SweepRow(value, res))
        except (SimRISError, ValueError) as exc:
            rows.append(SweepRow(value, error=f"{type(exc).__name__}: {exc}"))
    return rows


def power_shift_db(pt_grid, rates_a, rates_b, n_levels=20, margin=0.25):
    """Horizontal offset (dB) that maps rate curve ``a`` onto curve ``b``.

    Both curves must increase with transmit power. The offset is averaged
    over ``n_levels`` rate levels inside the range both curves cover.
    Positive values mean ``b`` reaches a given rate with less power.
    """
    pt = np.asarray(pt_grid, dtype=float)
    ra, rb = np.asarray(rates_a, float), np.asarray(rates_b, float)
    lo = max(ra.min(), rb.min()) + margin
    hi = min(ra.max(), rb.max()) - margin
    if not hi > lo:
        raise ValueError("rate curves do not overlap")
    levels = np.linspace(lo, hi, n_levels)
    shift = np.interp(levels, ra, pt) - np.interp(levels, rb, pt)
    return float(np.mean(shift))
