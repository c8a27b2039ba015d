"""Monte Carlo studies: required power versus distance and element count,
and residual interference versus element count.

Every study draws its channels from streams keyed by the realization
index, so the same fading is reused across sweep values and across
schemes (paired comparisons), and the output is independent of evaluation
order and of the worker count.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple

import numpy as np

from .beamforming import (
    align_phases,
    alternating_optimize,
    bs_irs_mrt,
    min_power_for_snr,
    mrt,
    null_interference,
    quantize_then_refine,
    received_gain,
)
from .channel import ChannelRealization, ScenarioConfig, realize
from .numerics import SeededRng, db_to_linear
from .reflection import ConstraintSet, effective_channel, project

POWER_DISTANCE_SCHEMES = ("joint", "bs_user_mrt", "bs_irs_mrt", "no_irs")
POWER_N_SCHEMES = ("continuous", "b1", "b2")
INTERFERENCE_SCHEMES = ("joint_amp_phase", "phase_only", "no_irs")


class ConfigErrorCode(enum.Enum):
    MISSING_FILE = "missing_file"
    BAD_SYNTAX = "bad_syntax"
    UNKNOWN_KEY = "unknown_key"
    TYPE_MISMATCH = "type_mismatch"
    INVALID_VALUE = "invalid_value"


class ConfigError(ValueError):
    """Invalid experiment configuration, with a code and optional line."""

    def __init__(self, code: ConfigErrorCode, message: str, line: int | None = None):
        self.code = code
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"[{code.value}]{where} {message}")


class ResultRow(NamedTuple):
    sweep_value: float
    scheme: str
    metric_value: float
    metric_unit: str
    n_realizations: int
    master_seed: int


@dataclass(frozen=True)
class ExperimentConfig:
    """Inputs of one Monte Carlo study."""

    scenario: ScenarioConfig = ScenarioConfig()
    sweep: tuple[str, tuple[float, ...]] = ("d", (20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0, 55.0))
    schemes: tuple[str, ...] = POWER_DISTANCE_SCHEMES
    n_realizations: int = 500
    master_seed: int = 1
    snr_target_db: float = 20.0
    interferer_power_dbm: float = 30.0
    keep_samples: bool = False

    def __post_init__(self) -> None:
        if self.n_realizations < 1:
            raise ConfigError(
                ConfigErrorCode.INVALID_VALUE,
                f"n_realizations must be >= 1, got {self.n_realizations}",
            )
        name, values = self.sweep
        if name not in ("d", "n"):
            raise ConfigError(ConfigErrorCode.INVALID_VALUE, f"unknown sweep variable {name!r}")
        if len(values) == 0:
            raise ConfigError(ConfigErrorCode.INVALID_VALUE, "sweep needs at least one value")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError(
                ConfigErrorCode.INVALID_VALUE, f"sweep values must be strictly increasing: {values}"
            )
        if not 0 <= self.master_seed < 1 << 64:
            raise ConfigError(
                ConfigErrorCode.INVALID_VALUE, f"master_seed must fit in 64 bits, got {self.master_seed}"
            )


@dataclass(eq=False)
class ExperimentResult:
    """Aggregated rows, plus optional per-realization samples."""

    rows: list[ResultRow]
    samples: dict[tuple[float, str], np.ndarray] = field(default_factory=dict)

    CSV_HEADER = "sweep_value,scheme,metric_value,metric_unit,n_realizations,master_seed"

    def to_csv_text(self) -> str:
        lines = [self.CSV_HEADER]
        for row in sorted(self.rows, key=lambda r: (r.sweep_value, r.scheme)):
            lines.append(
                f"{row.sweep_value:g},{row.scheme},{row.metric_value:.6f},"
                f"{row.metric_unit},{row.n_realizations},{row.master_seed}"
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(self.to_csv_text())

    def value(self, sweep_value: float, scheme: str) -> float:
        for row in self.rows:
            if row.sweep_value == sweep_value and row.scheme == scheme:
                return row.metric_value
        raise KeyError((sweep_value, scheme))


def channel_stream(master_seed: int, realization: int) -> SeededRng:
    """Stream for one Monte Carlo realization (shared across sweep values)."""
    return SeededRng(master_seed, realization)


def _check_schemes(requested, allowed) -> None:
    unknown = [s for s in requested if s not in allowed]
    if unknown:
        raise ConfigError(
            ConfigErrorCode.INVALID_VALUE,
            f"unknown scheme(s) {unknown}; allowed: {list(allowed)}",
        )


def _map_indexed(fn: Callable, args: list, workers: int) -> list:
    if workers <= 1:
        return [fn(a) for a in args]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, args))


def _mean_db(linear_values: np.ndarray) -> float:
    return float(10.0 * np.log10(np.mean(linear_values)))


def signal_scheme_gains(ch: ChannelRealization, schemes) -> dict[str, float]:
    """Channel power gain per signal-enhancement scheme on one realization."""
    ideal = ConstraintSet.ideal_continuous()
    gains: dict[str, float] = {}
    for scheme in schemes:
        if scheme == "joint":
            gains[scheme] = alternating_optimize(ch, ideal).gain_linear
        elif scheme == "bs_user_mrt":
            w = mrt(ch.h_bs_user)
            refl = align_phases(ch, w, ideal)
            gains[scheme] = received_gain(ch, refl, w)
        elif scheme == "bs_irs_mrt":
            gains[scheme] = bs_irs_mrt(ch, ideal).gain_linear
        elif scheme == "no_irs":
            gains[scheme] = float(np.linalg.norm(ch.h_bs_user) ** 2)
        else:
            raise ConfigError(ConfigErrorCode.INVALID_VALUE, f"unknown scheme {scheme!r}")
    return gains


def run_power_vs_distance(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Minimum transmit power (dBm) to hit the SNR target, versus distance.

    For each swept user distance the requested schemes are evaluated on
    the same channel realizations and the per-realization required powers
    are averaged in the linear domain.
    """
    _check_schemes(cfg.schemes, POWER_DISTANCE_SCHEMES)
    name, values = cfg.sweep
    if name != "d":
        raise ConfigError(ConfigErrorCode.INVALID_VALUE, "power-vs-distance sweeps 'd'")
    noise = cfg.scenario.noise_power_dbm
    rows: list[ResultRow] = []
    samples: dict[tuple[float, str], np.ndarray] = {}
    for d in values:
        scen = replace(cfg.scenario, user_position=(float(d), cfg.scenario.user_position[1]))

        def one(i: int, scen=scen) -> dict[str, float]:
            ch = realize(scen, channel_stream(cfg.master_seed, i))
            gains = signal_scheme_gains(ch, cfg.schemes)
            return {
                s: min_power_for_snr(g, cfg.snr_target_db, noise) for s, g in gains.items()
            }

        per_real = _map_indexed(one, list(range(cfg.n_realizations)), workers)
        for scheme in cfg.schemes:
            powers_dbm = np.array([r[scheme] for r in per_real])
            rows.append(
                ResultRow(float(d), scheme, _mean_db(db_to_linear(powers_dbm)), "dBm",
                          cfg.n_realizations, cfg.master_seed)
            )
            if cfg.keep_samples:
                samples[(float(d), scheme)] = powers_dbm
    return ExperimentResult(rows=rows, samples=samples)


def quantized_scheme_gains(ch: ChannelRealization, bits_list=(1, 2)) -> dict[str, float]:
    """Continuous-phase optimum and its b-bit quantized/refined variants.

    Returns gains for 'continuous' (unit-modulus joint optimization),
    'b{b}' (nearest-level rounding of the continuous phases followed by
    elementwise refinement, transmit beam re-matched afterwards) and
    'b{b}_quant' (rounding only, transmit beam re-matched).
    """
    unit = ConstraintSet.unit_modulus()
    sol = alternating_optimize(ch, unit)
    gains = {"continuous": sol.gain_linear}
    for b in bits_list:
        quantized = ConstraintSet.discrete_phase(b)
        vq = project(sol.refl.coefficients, quantized)
        gains[f"b{b}_quant"] = float(np.linalg.norm(effective_channel(ch, vq)) ** 2)
        vr = quantize_then_refine(ch, sol.w, sol.refl, b)
        gains[f"b{b}"] = float(np.linalg.norm(effective_channel(ch, vr)) ** 2)
    return gains


def run_power_vs_n(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Required transmit power versus the number of reflecting elements.

    The 'continuous' scheme keeps unit amplitudes with free phases; 'b1'
    and 'b2' round those phases to 1- and 2-bit lattices and refine them
    elementwise.  Rounding-only variants are reported as 'b{b}_quant'
    rows, and per-N quantization losses as 'loss_*' rows in dB.
    """
    _check_schemes(cfg.schemes, POWER_N_SCHEMES)
    name, values = cfg.sweep
    if name != "n":
        raise ConfigError(ConfigErrorCode.INVALID_VALUE, "power-vs-n sweeps 'n'")
    bits_list = tuple(int(s[1:]) for s in cfg.schemes if s != "continuous")
    noise = cfg.scenario.noise_power_dbm
    rows: list[ResultRow] = []
    samples: dict[tuple[float, str], np.ndarray] = {}
    for n_val in values:
        n_int = int(n_val)
        if n_int != n_val or n_int < 1:
            raise ConfigError(ConfigErrorCode.INVALID_VALUE, f"element count must be a positive integer, got {n_val}")
        scen = replace(cfg.scenario, n_elements=n_int)

        def one(i: int, scen=scen) -> dict[str, float]:
            ch = realize(scen, channel_stream(cfg.master_seed, i))
            gains = quantized_scheme_gains(ch, bits_list)
            return {
                s: min_power_for_snr(g, cfg.snr_target_db, noise) for s, g in gains.items()
            }

        per_real = _map_indexed(one, list(range(cfg.n_realizations)), workers)
        mean_power: dict[str, float] = {}
        emitted = list(cfg.schemes) + [f"b{b}_quant" for b in bits_list]
        for scheme in emitted:
            powers_dbm = np.array([r[scheme] for r in per_real])
            mean_power[scheme] = _mean_db(db_to_linear(powers_dbm))
            rows.append(
                ResultRow(float(n_int), scheme, mean_power[scheme], "dBm",
                          cfg.n_realizations, cfg.master_seed)
            )
            if cfg.keep_samples:
                samples[(float(n_int), scheme)] = powers_dbm
        if "continuous" in mean_power:
            for b in bits_list:
                for variant in (f"b{b}", f"b{b}_quant"):
                    rows.append(
                        ResultRow(float(n_int), f"loss_{variant}",
                                  mean_power[variant] - mean_power["continuous"], "dB",
                                  cfg.n_realizations, cfg.master_seed)
                    )
    return ExperimentResult(rows=rows, samples=samples)


def interference_metrics(ch: ChannelRealization, schemes) -> dict[str, float]:
    """Residual interference channel gain per scheme on one realization.

    Also reports the cancellation feasibility margin sum|f_n| - |t| under
    key 'margin' (non-negative means a perfect null is reachable with
    amplitude control).
    """
    out: dict[str, float] = {}
    t = complex(np.conj(ch.h_bs_user[0]))
    f = np.conj(ch.h_irs_user) * ch.g_bs_irs[:, 0] if ch.n_elements else np.zeros(0)
    out["margin"] = float(np.sum(np.abs(f)) - abs(t))
    for scheme in schemes:
        if scheme == "joint_amp_phase":
            _, res = null_interference(ch, ConstraintSet.ideal_continuous(),
                                       tol=1e-14, max_passes=400)
        elif scheme == "phase_only":
            _, res = null_interference(ch, ConstraintSet.unit_modulus(),
                                       tol=1e-14, max_passes=400)
        elif scheme == "no_irs":
            res = float(abs(t) ** 2)
        else:
            raise ConfigError(ConfigErrorCode.INVALID_VALUE, f"unknown scheme {scheme!r}")
        out[scheme] = res
    return out


def run_interference_vs_n(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Interference power at the user, normalized by noise power, versus N.

    The interferer transmits at ``interferer_power_dbm`` through a single
    antenna; the surface is driven to cancel.  Reported in dB after
    linear-domain averaging across realizations.
    """
    if cfg.scenario.m_antennas != 1:
        raise ConfigError(
            ConfigErrorCode.INVALID_VALUE,
            f"interference study requires m_antennas = 1, got {cfg.scenario.m_antennas}",
        )
    _check_schemes(cfg.schemes, INTERFERENCE_SCHEMES)
    name, values = cfg.sweep
    if name != "n":
        raise ConfigError(ConfigErrorCode.INVALID_VALUE, "interference-vs-n sweeps 'n'")
    p_tx_mw = db_to_linear(cfg.interferer_power_dbm)
    noise_mw = db_to_linear(cfg.scenario.noise_power_dbm)
    rows: list[ResultRow] = []
    samples: dict[tuple[float, str], np.ndarray] = {}
    for n_val in values:
        n_int = int(n_val)
        if n_int != n_val or n_int < 0:
            raise ConfigError(ConfigErrorCode.INVALID_VALUE, f"element count must be a non-negative integer, got {n_val}")
        scen = replace(cfg.scenario, n_elements=n_int)

        def one(i: int, scen=scen) -> dict[str, float]:
            ch = realize(scen, channel_stream(cfg.master_seed, i))
            return interference_metrics(ch, cfg.schemes)

        per_real = _map_indexed(one, list(range(cfg.n_realizations)), workers)
        for scheme in cfg.schemes:
            residual = np.array([r[scheme] for r in per_real])
            normalized = p_tx_mw * residual / noise_mw
            # perfect cancellation would give -inf dB; floor keeps metrics finite
            mean_lin = max(float(np.mean(normalized)), 1e-30)
            rows.append(
                ResultRow(float(n_int), scheme, float(10.0 * np.log10(mean_lin)), "dB",
                          cfg.n_realizations, cfg.master_seed)
            )
            if cfg.keep_samples:
                samples[(float(n_int), scheme)] = normalized
        if cfg.keep_samples:
            samples[(float(n_int), "margin")] = np.array([r["margin"] for r in per_real])
    return ExperimentResult(rows=rows, samples=samples)
