"""Statistical channel simulator for RIS-assisted mmWave links."""

__version__ = "0.1.0"

from .channel import ChannelBatch, ChannelRealization, Scene, generate_batch, generate_realization
from .config import SimConfig, load_config, load_preset, parse_config
from .correlation import (
    CorrelationMatrix,
    analytic_correlation,
    eigenvalue_spread,
    empirical_correlation,
    semi_analytic_correlation,
)
from .errors import (
    BelowReferenceDistance,
    ConfigError,
    DegenerateGeometry,
    DimensionMismatch,
    FarFieldWarning,
    InsufficientSamples,
    NoScatterers,
    NotHermitian,
    NotSquare,
    QuadratureFailure,
    SimRISError,
)
from .geometry import Environment, MountingScenario, Point3, RoomBounds
from .metrics import LinkBudget, PhaseSettings, RateResult, achievable_rate, sweep
from .propagation import ElementPattern, PathLossParams, RisPanel, los_probability, path_loss_db
from .ris import PhaseMode, RisPhaseConfig, compose, optimal_phases
