"""Dense statevectors and the few kernels QAOA simulation needs."""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DimensionMismatchError, NumericInputError, SizeGuardError
from .sat import DEFAULT_MAX_N, CostTable

# Above this size the butterfly FWHT beats the two-factor matrix product.
_MATMUL_HADAMARD_MAX_N = 14

PhaseSpec = Union[np.ndarray, Sequence[float], Callable[[np.ndarray], np.ndarray]]


class Statevector:
    """``2**n`` complex128 amplitudes, index bit ``i`` is qubit ``i``.

    Operations mutate ``amplitudes`` in place and return ``self`` so calls can
    be chained. A statevector has a single owner; copy it before sharing.
    """

    __slots__ = ("n", "amplitudes")

    def __init__(self, n: int, amplitudes: np.ndarray):
        amplitudes = np.ascontiguousarray(amplitudes, dtype=np.complex128)
        if amplitudes.shape != (1 << n,):
            raise DimensionMismatchError(
                f"expected {1 << n} amplitudes for n={n}, got shape {amplitudes.shape}"
            )
        self.n = n
        self.amplitudes = amplitudes

    def __repr__(self) -> str:
        return f"Statevector(n={self.n}, norm={self.norm():.12f})"

    def copy(self) -> "Statevector":
        return Statevector(self.n, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @classmethod
    def basis(cls, n: int, index: int) -> "Statevector":
        amps = np.zeros(1 << n, dtype=np.complex128)
        amps[index] = 1.0
        return cls(n, amps)

    def dump(self, path) -> None:
        """Write amplitudes as little-endian interleaved (real, imag) doubles."""
        np.ascontiguousarray(self.amplitudes, dtype="<c16").tofile(path)

    @classmethod
    def load(cls, path, n: int) -> "Statevector":
        return cls(n, np.fromfile(path, dtype="<c16"))


def check_size(n: int, max_n: int = DEFAULT_MAX_N) -> None:
    if n < 1 or n > max_n:
        raise SizeGuardError(f"n={n} outside supported range [1, {max_n}]")


def uniform_state(n: int, max_n: int = DEFAULT_MAX_N) -> Statevector:
    """The equal superposition |+>^n."""
    check_size(n, max_n)
    return Statevector(n, np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128))


def fwht_in_place(state: Statevector) -> Statevector:
    """Apply H^{⊗n} with orthonormal scaling (an involution).

    Radix-2 butterflies, one vectorised stage per qubit.
    """
    a = state.amplitudes
    size = a.shape[0]
    scale = 1.0 / np.sqrt(2.0)
    h = 1
    while h < size:
        blocks = a.reshape(-1, 2, h)
        lo = blocks[:, 0, :].copy()
        hi = blocks[:, 1, :]
        blocks[:, 0, :] += hi
        blocks[:, 0, :] *= scale
        np.subtract(lo, hi, out=hi)
        hi *= scale
        h *= 2
    return state


@lru_cache(maxsize=None)
def _hadamard_factors(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal Hadamard matrices for the high and low halves of the index."""
    lo_bits = n // 2
    hi_bits = n - lo_bits

    def sylvester(bits: int) -> np.ndarray:
        h = np.ones((1, 1))
        for _ in range(bits):
            h = np.block([[h, h], [h, -h]])
        return h / np.sqrt(2.0**bits)

    return sylvester(hi_bits), sylvester(lo_bits)


def hadamard_transform(amplitudes: np.ndarray, n: int) -> np.ndarray:
    """Return H^{⊗n} applied to a raw amplitude array (not in place).

    For moderate ``n`` this factors H^{⊗n} = H_hi ⊗ H_lo and does two small
    matrix products, which is much faster than ``n`` butterfly stages in numpy.
    """
    if n > _MATMUL_HADAMARD_MAX_N:
        out = Statevector(n, amplitudes.copy())
        return fwht_in_place(out).amplitudes
    h_hi, h_lo = _hadamard_factors(n)
    mat = amplitudes.reshape(h_hi.shape[0], h_lo.shape[0])
    return (h_hi @ mat @ h_lo).reshape(-1)


def _resolve_phases(state: Statevector, phase_for_index: PhaseSpec) -> np.ndarray:
    size = state.amplitudes.shape[0]
    if callable(phase_for_index):
        phases = np.asarray(phase_for_index(np.arange(size)), dtype=float)
    else:
        phases = np.asarray(phase_for_index, dtype=float)
        if phases.shape == (state.n + 1,):
            phases = phases[popcounts(state.n)]
    if phases.shape != (size,):
        raise DimensionMismatchError(
            f"phase table has shape {phases.shape}, need ({size},) or ({state.n + 1},)"
        )
    if not np.all(np.isfinite(phases)):
        raise NumericInputError("phase table contains non-finite values")
    return phases


def apply_diagonal_phase(state: Statevector, phase_for_index: PhaseSpec) -> Statevector:
    """Multiply amplitude ``x`` by ``exp(-i * phase(x))``.

    ``phase_for_index`` is a per-index array of length ``2**n``, a
    per-Hamming-weight array of length ``n + 1``, or a vectorised callable on
    the index array.
    """
    phases = _resolve_phases(state, phase_for_index)
    state.amplitudes *= np.exp(-1j * phases)
    return state


@lru_cache(maxsize=None)
def popcounts(n: int) -> np.ndarray:
    """Hamming weight of every index in ``[0, 2**n)``."""
    idx = np.arange(1 << n, dtype=np.uint32)
    counts = np.zeros(1 << n, dtype=np.intp)
    for bit in range(n):
        counts += (idx >> bit) & 1
    counts.setflags(write=False)
    return counts


def expectation_diagonal(state: Statevector, table: CostTable | np.ndarray) -> float:
    """<psi| D |psi> for a diagonal observable given by its values."""
    values = table.values if isinstance(table, CostTable) else np.asarray(table)
    if values.shape != state.amplitudes.shape:
        raise DimensionMismatchError(
            f"table of size {values.shape[0]} does not match 2^{state.n}"
        )
    return float(np.dot(state.probabilities(), values))


def probability_of_set(state: Statevector, indices: Sequence[int] | np.ndarray) -> float:
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size == 0:
        return 0.0
    size = state.amplitudes.shape[0]
    if idx.min() < 0 or idx.max() >= size:
        raise DimensionMismatchError(f"index outside [0, {size})")
    return float(np.sum(np.abs(state.amplitudes[idx]) ** 2))
