"""Complex-array validation, seedable random streams, and dB conversions.

Complex vectors and matrices are plain ``numpy`` arrays of dtype
``complex128``; the validators below enforce the invariants (finite
entries, expected shape) at module boundaries.  All magnitudes are kept
linear internally; dB / dBm appears only at I/O boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    # Finalizer of the splitmix64 generator: a 64-bit avalanche bijection.
    x &= _MASK64
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    x = (x ^ (x >> 27)) * 0x94D049BB133111EB & _MASK64
    return x ^ (x >> 31)


def _mix64(a: int, b: int) -> int:
    # Order-sensitive combine of two 64-bit words into one.
    return _splitmix64((a * 0x9E3779B97F4A7C15 + b + 1) & _MASK64)


@dataclass(frozen=True)
class SeededRng:
    """Value-type handle on a deterministic random stream.

    A stream is identified by ``(master_seed, stream_id)``.  The same pair
    always yields the same samples; distinct pairs yield statistically
    independent streams.  Instances are immutable; operations that consume
    randomness derive a fresh counter-based generator on every call, so
    every such operation is a pure function of (seed, stream, inputs).
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if not 0 <= v < 1 << 64:
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {v}")

    def split(self, index: int) -> "SeededRng":
        """Derive the ``index``-th substream of this stream."""
        return SeededRng(self.master_seed, _mix64(self.stream_id, index))

    def generator(self) -> np.random.Generator:
        """Fresh counter-based generator positioned at the stream start."""
        seq = np.random.SeedSequence((self.master_seed, self.stream_id))
        return np.random.Generator(np.random.Philox(seq))


def sample_cscg(rng: SeededRng, n: int) -> np.ndarray:
    """Draw ``n`` i.i.d. circularly symmetric complex Gaussian samples.

    Zero mean, unit variance: real and imaginary parts are independent
    Gaussians with variance 1/2 each.  Draws are interleaved so that the
    first ``m < n`` samples of a stream are a prefix of any longer draw
    from the same stream (used to pair sweeps over the element count).
    """
    if n < 0:
        raise ValueError(f"sample count must be >= 0, got {n}")
    raw = rng.generator().standard_normal(2 * n)
    return (raw[0::2] + 1j * raw[1::2]) * np.sqrt(0.5)


def db_to_linear(x_db):
    """10^(x/10); accepts scalars or arrays."""
    if np.ndim(x_db):
        return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)
    return 10.0 ** (float(x_db) / 10.0)


def linear_to_db(x):
    """10*log10(x) for x > 0; raises on non-positive input."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise ValueError(f"linear_to_db requires positive finite input, got {x}")
    out = 10.0 * np.log10(arr)
    return out if np.ndim(x) else float(out)


def as_complex_vector(x, name: str = "vector") -> np.ndarray:
    """Validate and return a finite 1-D complex128 array."""
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_complex_matrix(x, name: str = "matrix") -> np.ndarray:
    """Validate and return a finite 2-D complex128 array."""
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr
