"""Transmit and reflect beamforming optimizers.

Covers the closed-form pieces (maximum-ratio transmission, coherent phase
alignment), the alternating joint optimizer, elementwise refinement of
discrete phases, cyclic-coordinate interference nulling, codebook
selection, and the SNR-to-transmit-power mapping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .numerics import as_complex_vector
from .reflection import (
    ConstraintKind,
    ConstraintSet,
    ReflectionState,
    absorb_state,
    effective_channel,
    project,
)

_ALIGN_KINDS = (
    ConstraintKind.IDEAL_CONTINUOUS,
    ConstraintKind.UNIT_MODULUS,
    ConstraintKind.DISCRETE_PHASE,
)


@dataclass(frozen=True, eq=False)
class BeamformingSolution:
    """Result of one optimization run.

    ``gain_linear`` is the channel power gain |<h_eff, w>|^2 achieved by
    the unit-norm beamformer ``w`` together with the reflection state;
    ``trace`` holds the objective after each outer iteration and is
    non-decreasing.
    """

    w: np.ndarray
    refl: ReflectionState
    gain_linear: float
    trace: tuple[float, ...]

    def __post_init__(self) -> None:
        w = as_complex_vector(self.w, "w")
        if abs(np.linalg.norm(w) - 1.0) > 1e-10:
            raise ValueError("beamformer must be unit norm")
        object.__setattr__(self, "w", w)
        tr = tuple(float(x) for x in self.trace)
        if any(b < a * (1.0 - 1e-12) - 1e-300 for a, b in zip(tr, tr[1:])):
            raise ValueError("objective trace must be non-decreasing")
        object.__setattr__(self, "trace", tr)


@dataclass(frozen=True, eq=False)
class Codebook:
    """Pre-designed reflection patterns sharing one constraint set."""

    entries: tuple[ReflectionState, ...]

    def __post_init__(self) -> None:
        entries = tuple(self.entries)
        if not entries:
            raise ValueError("codebook must be non-empty")
        c0 = entries[0].constraint
        if any(e.constraint != c0 for e in entries[1:]):
            raise ValueError("codebook entries must share one constraint set")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)


def mrt(h: np.ndarray) -> np.ndarray:
    """Maximum-ratio transmit beamformer w = h / ||h||."""
    h = as_complex_vector(h, "channel")
    norm = np.linalg.norm(h)
    if norm == 0.0:
        raise ValueError("MRT undefined for an all-zero channel")
    return h / norm


def direct_and_cascade(ch: ChannelRealization, w: np.ndarray) -> tuple[complex, np.ndarray]:
    """Received-amplitude decomposition for a fixed beamformer.

    Returns (t, a) with direct term t = <h_d, w> and per-element cascade
    coefficients a_n = conj(h_r_n) * (G w)_n, so that a reflection state v
    produces the amplitude t + sum_n a_n v_n.
    """
    t = complex(np.vdot(ch.h_bs_user, w))
    a = np.conj(ch.h_irs_user) * (ch.g_bs_irs @ w)
    return t, a


def received_gain(ch: ChannelRealization, refl: ReflectionState, w: np.ndarray) -> float:
    """Channel power gain |<h_eff, w>|^2."""
    return float(abs(np.vdot(effective_channel(ch, refl), w)) ** 2)


def align_phases(ch: ChannelRealization, w: np.ndarray, c: ConstraintSet) -> ReflectionState:
    """Phase each element so its reflected path adds coherently with the
    direct path at the receiver.

    Sets v_n = exp(j*(arg t - arg a_n)) with (t, a) from
    :func:`direct_and_cascade` (arg t := 0 when t = 0).  Amplitudes stay
    at one, which is optimal for coherent combining; for discrete phase
    control the continuous solution is rounded to the nearest lattice
    level.
    """
    if c.kind not in _ALIGN_KINDS:
        raise ValueError(f"cannot align phases under {c.kind.value}")
    t, a = direct_and_cascade(ch, w)
    ref = np.angle(t) if t != 0 else 0.0
    v = np.exp(1j * (ref - np.angle(a)))
    if c.kind is ConstraintKind.DISCRETE_PHASE:
        return project(v, c)
    return ReflectionState(v, c)


def _principal_right_singular(g: np.ndarray) -> np.ndarray:
    _, _, vh = np.linalg.svd(g)
    return vh[0].conj()


def alternating_optimize(
    ch: ChannelRealization,
    c: ConstraintSet,
    tol: float = 1e-4,
    max_iter: int = 100,
) -> BeamformingSolution:
    """Joint transmit/reflect optimization by alternating closed forms.

    Repeats (i) refl <- align_phases(ch, w, c) and (ii) w <- mrt(h_eff)
    until the relative objective improvement drops below ``tol`` or
    ``max_iter`` is reached.  The run is started once from the direct-link
    MRT beamformer and once from the transmitter-surface beam, and the
    better fixed point is returned, which makes the result dominate both
    heuristic baselines on every realization.
    """
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    direct_norm = np.linalg.norm(ch.h_bs_user)
    if ch.n_elements == 0 or c.kind is ConstraintKind.ABSORB:
        w = mrt(ch.h_bs_user)
        refl = absorb_state(ch.n_elements) if c.kind is ConstraintKind.ABSORB else ReflectionState(
            np.zeros(0, dtype=np.complex128), c
        )
        gain = received_gain(ch, refl, w)
        return BeamformingSolution(w=w, refl=refl, gain_linear=gain, trace=(gain,))

    starts = []
    if direct_norm > 0.0:
        starts.append(mrt(ch.h_bs_user))
    starts.append(_principal_right_singular(ch.g_bs_irs))

    best: BeamformingSolution | None = None
    for w0 in starts:
        w = w0
        trace: list[float] = []
        refl = None
        for _ in range(max_iter):
            candidate = align_phases(ch, w, c)
            h_eff = effective_channel(ch, candidate)
            gain = float(np.linalg.norm(h_eff) ** 2)
            if trace and gain < trace[-1]:
                # possible only under discrete levels; keep the best iterate
                break
            refl = candidate
            w = mrt(h_eff)
            trace.append(gain)
            if len(trace) >= 2 and trace[-1] - trace[-2] < tol * trace[-2]:
                break
        sol = BeamformingSolution(w=w, refl=refl, gain_linear=trace[-1], trace=tuple(trace))
        if best is None or sol.gain_linear > best.gain_linear:
            best = sol
    return best


def bs_irs_mrt(ch: ChannelRealization, c: ConstraintSet) -> BeamformingSolution:
    """Beam at the rank-one transmitter-surface channel, then align phases."""
    if ch.n_elements == 0:
        raise ValueError("transmitter-surface MRT needs at least one element")
    w = _principal_right_singular(ch.g_bs_irs)
    refl = align_phases(ch, w, c)
    gain = received_gain(ch, refl, w)
    return BeamformingSolution(w=w, refl=refl, gain_linear=gain, trace=(gain,))


def discrete_refine(
    ch: ChannelRealization,
    w: np.ndarray,
    start: ReflectionState,
    bits: int,
    passes: int = 20,
) -> ReflectionState:
    """Cyclic coordinate ascent over the 2^bits phase levels per element.

    Holding all other elements fixed, each element in ascending index
    order is moved to the level that maximizes |t + sum a_n v_n|^2 (kept
    only on strict improvement, so the objective never decreases and a
    full pass without change is a fixed point).  Stops after ``passes``
    full passes at the latest.
    """
    want = ConstraintSet.discrete_phase(bits)
    if start.constraint != want:
        raise ValueError(f"start must satisfy {want}, got {start.constraint}")
    if start.n_elements != ch.n_elements:
        raise ValueError("start state dimension does not match the channel")
    t, a = direct_and_cascade(ch, w)
    nlev = 1 << bits
    levels = np.exp(2j * np.pi * np.arange(nlev) / nlev)
    v = list(start.coefficients)
    a_list = [complex(x) for x in a]
    total = complex(t) + sum(an * vn for an, vn in zip(a_list, v))
    for _ in range(passes):
        changed = False
        for n, an in enumerate(a_list):
            rest = total - an * v[n]
            powers = np.abs(rest + an * levels)
            k = int(np.argmax(powers))  # first max: ties pick the lowest level
            if levels[k] != v[n] and powers[k] > abs(rest + an * v[n]):
                v[n] = complex(levels[k])
                total = rest + an * v[n]
                changed = True
        if not changed:
            break
    return ReflectionState(np.asarray(v, dtype=np.complex128), want)


def quantize_then_refine(
    ch: ChannelRealization,
    w: np.ndarray,
    continuous: ReflectionState,
    bits: int,
    passes: int = 20,
) -> ReflectionState:
    """Round a continuous solution to the lattice, then refine elementwise."""
    quantized = project(continuous.coefficients, ConstraintSet.discrete_phase(bits))
    return discrete_refine(ch, w, quantized, bits, passes)


def null_interference(
    ch: ChannelRealization,
    c: ConstraintSet,
    tol: float = 1e-12,
    max_passes: int = 200,
    start: ReflectionState | None = None,
) -> tuple[ReflectionState, float]:
    """Minimize the interference power |t + sum_n f_n v_n|^2 at the user.

    Requires a single-antenna interferer (M = 1), absorbing the scalar
    beamformer into t = <h_d, 1> and f_n = conj(h_r_n) * G[n, 0].  Cyclic
    coordinate descent with the per-element closed form: the unconstrained
    minimizer -c_n / f_n (c_n the residual excluding element n), projected
    onto the feasible set.  With free amplitudes the problem is convex, so
    the fixed point is the global minimum within ``tol``; with unit
    modulus it is a monotone heuristic.  By default descent starts from
    the anti-aligned unit-modulus state.  Returns (state, residual power).
    """
    if ch.m_antennas != 1:
        raise ValueError("interference nulling assumes a single-antenna interferer (M = 1)")
    if c.kind not in (ConstraintKind.IDEAL_CONTINUOUS, ConstraintKind.UNIT_MODULUS):
        raise ValueError(f"unsupported constraint for nulling: {c.kind.value}")
    t = complex(np.conj(ch.h_bs_user[0]))
    f = np.conj(ch.h_irs_user) * ch.g_bs_irs[:, 0]
    n = ch.n_elements
    if n == 0:
        return ReflectionState(np.zeros(0, dtype=np.complex128), c), abs(t) ** 2

    ref = np.angle(t) if t != 0 else 0.0
    if start is None:
        v = np.exp(1j * (np.pi + ref - np.angle(f)))
    else:
        if start.n_elements != n:
            raise ValueError("start state dimension does not match the channel")
        if not c.contains(start.coefficients):
            raise ValueError("start state violates the requested constraint")
        v = start.coefficients.copy()

    unit = c.kind is ConstraintKind.UNIT_MODULUS
    f_list = [complex(x) for x in f]
    vals = [complex(x) for x in v]
    r = t + sum(fn * vn for fn, vn in zip(f_list, vals))
    prev = abs(r) ** 2
    for _ in range(max_passes):
        for i, fn in enumerate(f_list):
            if fn == 0:
                continue
            cn = r - fn * vals[i]
            if unit:
                vn = complex(np.exp(1j * (np.pi + np.angle(cn) - np.angle(fn))))
            else:
                vn = -cn / fn
                mod = abs(vn)
                if mod > 1.0:
                    vn /= mod
            r = cn + fn * vn
            vals[i] = vn
        cur = abs(r) ** 2
        if prev - cur <= tol * max(prev, 1e-300):
            break
        prev = cur
    v = np.asarray(vals, dtype=np.complex128)
    state = ReflectionState(v, c)
    residual = float(abs(t + np.sum(f * v)) ** 2)
    return state, residual


def codebook_sweep(
    ch: ChannelRealization, w: np.ndarray, cb: Codebook
) -> tuple[int, float]:
    """Evaluate every codebook entry and return (argmax index, its gain).

    Ties resolve to the lowest index.
    """
    best_idx = 0
    best_gain = -1.0
    for idx, entry in enumerate(cb.entries):
        g = received_gain(ch, entry, w)
        if g > best_gain:
            best_idx, best_gain = idx, g
    return best_idx, best_gain


def min_power_for_snr(gain_linear: float, snr_target_db: float, noise_dbm: float) -> float:
    """Transmit power (dBm) needed to hit the SNR target over this gain."""
    if gain_linear <= 0:
        raise ValueError(f"channel gain must be > 0 to reach any SNR, got {gain_linear}")
    return snr_target_db + noise_dbm - 10.0 * math.log10(gain_linear)


def quantization_loss_bound(bits: int) -> float:
    """Asymptotic power loss (dB) of b-bit uniform phase quantization.

    Equals -20*log10(E[cos d]) with d uniform on one quantization cell,
    i.e. -20*log10((2^b / pi) * sin(pi / 2^b)).
    """
    if bits < 1:
        raise ValueError(f"bits must be >= 1, got {bits}")
    nlev = 1 << bits
    return -20.0 * math.log10(nlev / math.pi * math.sin(math.pi / nlev))
