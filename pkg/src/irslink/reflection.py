"""Reflection coefficients, their feasible sets, and the composite channel.

Each surface element multiplies its incident signal by a complex
coefficient v_n = beta_n * exp(j*theta_n) with beta_n <= 1 (a passive
element never amplifies).  Four feasible sets are supported: free
amplitude and phase, unit amplitude with free phase, unit amplitude with a
b-bit uniform phase lattice, and the absorbing state where every
coefficient is zero.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .numerics import as_complex_vector

_FEAS_TOL = 1e-9


class ConstraintKind(enum.Enum):
    IDEAL_CONTINUOUS = "ideal_continuous"
    UNIT_MODULUS = "unit_modulus"
    DISCRETE_PHASE = "discrete_phase"
    ABSORB = "absorb"


@dataclass(frozen=True)
class ConstraintSet:
    """Feasible set for the per-element reflection coefficients."""

    kind: ConstraintKind
    bits: int | None = None

    def __post_init__(self) -> None:
        if self.kind is ConstraintKind.DISCRETE_PHASE:
            if self.bits is None or self.bits < 1:
                raise ValueError(f"discrete phase control needs bits >= 1, got {self.bits}")
        elif self.bits is not None:
            raise ValueError(f"{self.kind.value} takes no bit count")

    @classmethod
    def ideal_continuous(cls) -> "ConstraintSet":
        return cls(ConstraintKind.IDEAL_CONTINUOUS)

    @classmethod
    def unit_modulus(cls) -> "ConstraintSet":
        return cls(ConstraintKind.UNIT_MODULUS)

    @classmethod
    def discrete_phase(cls, bits: int) -> "ConstraintSet":
        return cls(ConstraintKind.DISCRETE_PHASE, bits)

    @classmethod
    def absorb(cls) -> "ConstraintSet":
        return cls(ConstraintKind.ABSORB)

    def phase_levels(self) -> np.ndarray:
        """The 2^bits lattice phases {2*pi*k / 2^bits}."""
        if self.kind is not ConstraintKind.DISCRETE_PHASE:
            raise ValueError("phase levels exist only for discrete phase control")
        nlev = 1 << self.bits
        return 2.0 * np.pi * np.arange(nlev) / nlev

    def contains(self, v: np.ndarray, tol: float = _FEAS_TOL) -> bool:
        """Whether every coefficient satisfies this set (within tol)."""
        v = np.asarray(v, dtype=np.complex128)
        mod = np.abs(v)
        if self.kind is ConstraintKind.ABSORB:
            return bool(np.all(v == 0))
        if self.kind is ConstraintKind.IDEAL_CONTINUOUS:
            return bool(np.all(mod <= 1.0 + tol))
        if not np.all(np.abs(mod - 1.0) <= tol):
            return False
        if self.kind is ConstraintKind.UNIT_MODULUS:
            return True
        nlev = 1 << self.bits
        # distance of each phase to the nearest lattice point, wrap-aware
        steps = np.angle(v) * nlev / (2.0 * np.pi)
        dist_rad = np.abs(steps - np.round(steps)) * 2.0 * np.pi / nlev
        return bool(np.all(dist_rad <= tol))


@dataclass(frozen=True, eq=False)
class ReflectionState:
    """Per-element reflection coefficients plus the set they satisfy."""

    coefficients: np.ndarray
    constraint: ConstraintSet

    def __post_init__(self) -> None:
        v = as_complex_vector(self.coefficients, "coefficients")
        if not self.constraint.contains(v):
            raise ValueError(f"coefficients violate {self.constraint.kind.value} constraint")
        object.__setattr__(self, "coefficients", v)

    @property
    def n_elements(self) -> int:
        return self.coefficients.shape[0]


def absorb_state(n: int) -> ReflectionState:
    """All-zero coefficients: the surface contributes nothing."""
    return ReflectionState(np.zeros(n, dtype=np.complex128), ConstraintSet.absorb())


def project(v: np.ndarray, c: ConstraintSet) -> ReflectionState:
    """Entrywise nearest feasible point of ``c``.

    Free amplitude clips the modulus to one and keeps the phase; unit
    modulus keeps only the phase; discrete phase additionally rounds the
    phase to the nearest lattice level, breaking exact ties toward the
    lower level.  Zero entries carry phase 0.  Idempotent by construction.
    """
    v = as_complex_vector(v, "coefficients")
    if c.kind is ConstraintKind.ABSORB:
        return ReflectionState(np.zeros_like(v), c)
    if c.kind is ConstraintKind.IDEAL_CONTINUOUS:
        return ReflectionState(v / np.maximum(np.abs(v), 1.0), c)
    phases = np.angle(v)
    if c.kind is ConstraintKind.DISCRETE_PHASE:
        phases = _round_to_lattice(phases, c.bits)
    return ReflectionState(np.exp(1j * phases), c)


def _round_to_lattice(phases: np.ndarray, bits: int) -> np.ndarray:
    nlev = 1 << bits
    delta = 2.0 * np.pi / nlev
    q = np.mod(phases, 2.0 * np.pi) / delta
    k0 = np.floor(q)
    frac = q - k0
    k = np.where(frac > 0.5, k0 + 1.0, k0)
    # exact half-step ties resolve to the smaller phase value
    tie = frac == 0.5
    k = np.where(tie & (k0 + 1.0 == nlev), 0.0, np.where(tie, k0, k))
    return delta * np.mod(k, nlev)


def effective_channel(ch: ChannelRealization, refl: ReflectionState) -> np.ndarray:
    """Composite channel seen by the transmit beamformer (length M).

    Returns h_eff such that the received amplitude for beamformer w is
    <h_eff, w> = <h_d, w> + sum_n conj(h_r_n) * v_n * (G w)_n: the direct
    path plus the reflection-weighted multiplicative cascade.  Under the
    absorbing state, or with zero elements, equals the direct channel
    exactly.
    """
    if refl.n_elements != ch.n_elements:
        raise ValueError(
            f"reflection state has {refl.n_elements} elements, channel has {ch.n_elements}"
        )
    if ch.n_elements == 0 or refl.constraint.kind is ConstraintKind.ABSORB:
        return ch.h_bs_user.copy()
    weighted = np.conj(refl.coefficients) * ch.h_irs_user
    return ch.h_bs_user + ch.g_bs_irs.conj().T @ weighted
