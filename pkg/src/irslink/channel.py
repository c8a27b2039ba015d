"""Scenario geometry and channel realization.

One realization consists of three links: a deterministic rank-one
line-of-sight matrix from the transmitter array to the reflecting surface,
and Rayleigh-faded vectors for the surface-to-user and direct
transmitter-to-user links.  Large-scale attenuation follows a power-law
path loss anchored at a reference loss one metre from the transmitter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import SeededRng, as_complex_matrix, as_complex_vector, db_to_linear, sample_cscg

Point = tuple[float, float]


@dataclass(frozen=True)
class ScenarioConfig:
    """Static geometry and propagation parameters of one link scenario.

    Positions are 2-D points in metres.  The user's x-coordinate is the
    swept transmitter-user horizontal distance in the distance study.
    """

    bs_position: Point = (0.0, 0.0)
    irs_position: Point = (50.0, 2.8)
    user_position: Point = (50.0, 0.0)
    m_antennas: int = 5
    n_elements: int = 40
    pl_exponent_bs_irs: float = 2.2
    pl_exponent_bs_user: float = 3.2
    pl_exponent_irs_user: float = 3.2
    c0_db: float = -30.0
    noise_power_dbm: float = -80.0
    antenna_spacing_wavelengths: float = 0.5

    def __post_init__(self) -> None:
        if self.m_antennas < 1:
            raise ValueError(f"m_antennas must be >= 1, got {self.m_antennas}")
        if self.n_elements < 0:
            raise ValueError(f"n_elements must be >= 0, got {self.n_elements}")
        for name in ("pl_exponent_bs_irs", "pl_exponent_bs_user", "pl_exponent_irs_user"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.antenna_spacing_wavelengths <= 0:
            raise ValueError("antenna_spacing_wavelengths must be > 0")
        for a, b, pair in (
            (self.bs_position, self.irs_position, "bs/irs"),
            (self.bs_position, self.user_position, "bs/user"),
            (self.irs_position, self.user_position, "irs/user"),
        ):
            if _dist(a, b) <= 0.0:
                raise ValueError(f"coincident {pair} positions: {a} / {b}")

    def bs_irs_distance(self) -> float:
        return _dist(self.bs_position, self.irs_position)

    def bs_user_distance(self) -> float:
        return _dist(self.bs_position, self.user_position)

    def irs_user_distance(self) -> float:
        return _dist(self.irs_position, self.user_position)


def _dist(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One draw of the three links: g_bs_irs is N x M, vectors are N and M."""

    g_bs_irs: np.ndarray
    h_irs_user: np.ndarray
    h_bs_user: np.ndarray

    def __post_init__(self) -> None:
        g = as_complex_matrix(self.g_bs_irs, "g_bs_irs")
        hr = as_complex_vector(self.h_irs_user, "h_irs_user")
        hd = as_complex_vector(self.h_bs_user, "h_bs_user")
        if g.shape != (hr.shape[0], hd.shape[0]):
            raise ValueError(
                f"inconsistent dimensions: g_bs_irs {g.shape}, "
                f"h_irs_user {hr.shape}, h_bs_user {hd.shape}"
            )
        object.__setattr__(self, "g_bs_irs", g)
        object.__setattr__(self, "h_irs_user", hr)
        object.__setattr__(self, "h_bs_user", hd)

    @property
    def n_elements(self) -> int:
        return self.h_irs_user.shape[0]

    @property
    def m_antennas(self) -> int:
        return self.h_bs_user.shape[0]


def path_loss(distance_m: float, exponent: float, c0_db: float) -> float:
    """Linear power gain 10^(c0/10) * d^(-exponent) at distance d metres."""
    if distance_m <= 0:
        raise ValueError(f"distance must be > 0, got {distance_m}")
    return db_to_linear(c0_db) * distance_m ** (-exponent)


def ula_response(n: int, cos_angle: float, spacing_wavelengths: float = 0.5) -> np.ndarray:
    """Uniform-linear-array response with unit-modulus entries."""
    return np.exp(2j * np.pi * spacing_wavelengths * np.arange(n) * cos_angle)


def gen_bs_irs_los(cfg: ScenarioConfig) -> np.ndarray:
    """Deterministic rank-one LoS matrix sqrt(PL) * a_irs * a_bs^H (N x M).

    Array responses are taken at the geometric departure/arrival angles of
    the transmitter-surface path, with arrays laid out along the x-axis.
    """
    if cfg.n_elements < 1:
        raise ValueError("gen_bs_irs_los requires at least one reflecting element")
    d = cfg.bs_irs_distance()
    if d <= 0:
        raise ValueError("degenerate geometry: transmitter and surface coincide")
    pl = path_loss(d, cfg.pl_exponent_bs_irs, cfg.c0_db)
    cos_dep = (cfg.irs_position[0] - cfg.bs_position[0]) / d
    cos_arr = (cfg.bs_position[0] - cfg.irs_position[0]) / d
    a_bs = ula_response(cfg.m_antennas, cos_dep, cfg.antenna_spacing_wavelengths)
    a_irs = ula_response(cfg.n_elements, cos_arr, cfg.antenna_spacing_wavelengths)
    return np.sqrt(pl) * np.outer(a_irs, a_bs.conj())


def gen_rayleigh(pl_linear: float, n: int, rng: SeededRng) -> np.ndarray:
    """Rayleigh-faded vector: sqrt(pl) times unit-variance CSCG samples."""
    if pl_linear <= 0:
        raise ValueError(f"path-loss gain must be > 0, got {pl_linear}")
    return np.sqrt(pl_linear) * sample_cscg(rng, n)


def realize(cfg: ScenarioConfig, rng: SeededRng) -> ChannelRealization:
    """Draw one channel realization for the scenario.

    The surface-user and direct links use disjoint substreams of ``rng``
    so a realization is a pure function of (cfg, rng).  With zero
    elements the surface links are empty and only the direct link is
    populated.
    """
    m, n = cfg.m_antennas, cfg.n_elements
    if n >= 1:
        g = gen_bs_irs_los(cfg)
        pl_ru = path_loss(cfg.irs_user_distance(), cfg.pl_exponent_irs_user, cfg.c0_db)
        h_r = gen_rayleigh(pl_ru, n, rng.split(1))
    else:
        g = np.zeros((0, m), dtype=np.complex128)
        h_r = np.zeros(0, dtype=np.complex128)
    pl_du = path_loss(cfg.bs_user_distance(), cfg.pl_exponent_bs_user, cfg.c0_db)
    h_d = gen_rayleigh(pl_du, m, rng.split(2))
    return ChannelRealization(g_bs_irs=g, h_irs_user=h_r, h_bs_user=h_d)
