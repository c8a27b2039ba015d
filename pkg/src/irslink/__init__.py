"""Link-level simulator and optimizer for passive-reflecting-surface links."""

from .beamforming import (
    BeamformingSolution,
    Codebook,
    align_phases,
    alternating_optimize,
    bs_irs_mrt,
    codebook_sweep,
    direct_and_cascade,
    discrete_refine,
    min_power_for_snr,
    mrt,
    null_interference,
    quantization_loss_bound,
    quantize_then_refine,
    received_gain,
)
from .channel import (
    ChannelRealization,
    ScenarioConfig,
    gen_bs_irs_los,
    gen_rayleigh,
    path_loss,
    realize,
    ula_response,
)
from .experiments import (
    ConfigError,
    ConfigErrorCode,
    ExperimentConfig,
    ExperimentResult,
    run_interference_vs_n,
    run_power_vs_distance,
    run_power_vs_n,
)
from .numerics import SeededRng, db_to_linear, linear_to_db, sample_cscg
from .reflection import (
    ConstraintKind,
    ConstraintSet,
    ReflectionState,
    absorb_state,
    effective_channel,
    project,
)

__version__ = "0.1.0"

__all__ = [
    "BeamformingSolution",
    "ChannelRealization",
    "Codebook",
    "ConfigError",
    "ConfigErrorCode",
    "ConstraintKind",
    "ConstraintSet",
    "ExperimentConfig",
    "ExperimentResult",
    "ReflectionState",
    "ScenarioConfig",
    "SeededRng",
    "absorb_state",
    "align_phases",
    "alternating_optimize",
    "bs_irs_mrt",
    "codebook_sweep",
    "db_to_linear",
    "direct_and_cascade",
    "discrete_refine",
    "effective_channel",
    "gen_bs_irs_los",
    "gen_rayleigh",
    "linear_to_db",
    "min_power_for_snr",
    "mrt",
    "null_interference",
    "path_loss",
    "project",
    "quantization_loss_bound",
    "quantize_then_refine",
    "realize",
    "received_gain",
    "run_interference_vs_n",
    "run_power_vs_distance",
    "run_power_vs_n",
    "sample_cscg",
    "ula_response",
]
