"""Symmetric X-product mixers and the Grover mixer.

A product-family mixer is ``H_M(W) = sum_{w in W} sum_{|S| = w} prod_{i in S} X_i``.
Conjugating by H^{⊗n} turns every X into a Z, so in the Hadamard basis the
mixer is diagonal and its eigenvalue on a basis state of Hamming weight ``h`` is
``sum_{w in W} K_w(h; n)`` where ``K_w`` is a Krawtchouk value. Applying
``exp(-i beta H_M)`` is then two transforms around a diagonal phase.

The Grover mixer is the projector ``|psi0><psi0|`` onto the uniform state and
is applied as a rank-1 update.

Labels: ``grover``, ``W{1}``, ``W{1..4}``, ``W{3,5}``, ``W{1,2,5..8}``. Runs
of three or more consecutive degrees print as ``a..b``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .errors import InvalidMixerError, NumericInputError, SizeGuardError
from .statevector import (
    Statevector,
    hadamard_transform,
    popcounts,
)

DENSE_MAX_N = 6


@dataclass(frozen=True)
class MixerSpec:
    """Either a product family over degrees ``weights`` or the Grover mixer
    (``weights is None``)."""

    weights: tuple[int, ...] | None

    def __post_init__(self) -> None:
        if self.weights is None:
            return
        w = tuple(sorted(int(x) for x in self.weights))
        if not w:
            raise InvalidMixerError("mixer degree set W must be nonempty")
        if len(set(w)) != len(w):
            raise InvalidMixerError(f"mixer degrees must be distinct: {self.weights}")
        if w[0] < 1:
            raise InvalidMixerError(f"mixer degrees must be >= 1: {self.weights}")
        object.__setattr__(self, "weights", w)

    @classmethod
    def product(cls, weights) -> "MixerSpec":
        return cls(tuple(weights))

    @classmethod
    def grover(cls) -> "MixerSpec":
        return cls(None)

    @classmethod
    def transverse(cls) -> "MixerSpec":
        return cls((1,))

    @property
    def is_grover(self) -> bool:
        return self.weights is None

    def validate_for(self, n: int) -> None:
        if self.weights is not None and self.weights[-1] > n:
            raise InvalidMixerError(
                f"mixer degree {self.weights[-1]} exceeds qubit count {n}"
            )

    @property
    def label(self) -> str:
        return format_mixer(self)

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class PhaseProfile:
    """Mixer eigenvalue for each Hamming weight ``h = 0..n`` of the Hadamard basis."""

    n: int
    lam: tuple[int, ...]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.lam, dtype=float)


_LABEL_RE = re.compile(r"^W\{([0-9.,\s]+)\}$")


def parse_mixer(label: str) -> MixerSpec:
    text = label.strip()
    if text.lower() == "grover":
        return MixerSpec.grover()
    match = _LABEL_RE.match(text)
    if not match:
        raise InvalidMixerError(f"cannot parse mixer label {label!r}")
    weights: list[int] = []
    for part in match.group(1).split(","):
        part = part.strip()
        try:
            if ".." in part:
                lo_s, hi_s = part.split("..")
                lo, hi = int(lo_s), int(hi_s)
                if hi < lo:
                    raise InvalidMixerError(f"empty range {part!r} in {label!r}")
                weights.extend(range(lo, hi + 1))
            else:
                weights.append(int(part))
        except ValueError as exc:
            raise InvalidMixerError(f"cannot parse mixer label {label!r}") from exc
    return MixerSpec(tuple(weights))


def format_mixer(spec: MixerSpec) -> str:
    if spec.weights is None:
        return "grover"
    parts = []
    for _, run in itertools.groupby(enumerate(spec.weights), lambda t: t[1] - t[0]):
        vals = [v for _, v in run]
        if len(vals) >= 3:
            parts.append(f"{vals[0]}..{vals[-1]}")
        else:
            parts.extend(str(v) for v in vals)
    return "W{" + ",".join(parts) + "}"


def krawtchouk(w: int, h: int, n: int) -> int:
    """Eigenvalue of the degree-``w`` symmetric X-product sum on a Hadamard
    basis state of Hamming weight ``h``: sum_j (-1)^j C(h, j) C(n-h, w-j)."""
    if not (0 <= w <= n and 0 <= h <= n):
        raise InvalidMixerError(f"krawtchouk needs 0 <= w, h <= n; got w={w}, h={h}, n={n}")
    return sum((-1) ** j * comb(h, j) * comb(n - h, w - j) for j in range(w + 1))


@lru_cache(maxsize=None)
def _profile(weights: tuple[int, ...], n: int) -> PhaseProfile:
    lam = tuple(sum(krawtchouk(w, h, n) for w in weights) for h in range(n + 1))
    return PhaseProfile(n=n, lam=lam)


def phase_profile(spec: MixerSpec, n: int) -> PhaseProfile:
    if spec.is_grover:
        raise InvalidMixerError("the Grover mixer has no Hamming-weight phase profile")
    spec.validate_for(n)
    return _profile(spec.weights, n)


@lru_cache(maxsize=None)
def _weight_phase_table(weights: tuple[int, ...], n: int) -> tuple[np.ndarray, np.ndarray]:
    """(eigenvalue per Hamming weight, Hamming weight per index)."""
    lam = _profile(weights, n).as_array()
    return lam, popcounts(n)


def mixer_kernel(spec: MixerSpec, n: int):
    """Return ``f(amplitudes, beta) -> amplitudes`` applying ``exp(-i beta H_M)``.

    The returned function may reuse or overwrite its input array.
    """
    spec.validate_for(n)
    if spec.is_grover:
        inv_sqrt = 2.0 ** (-n / 2)

        def apply_grover(amps: np.ndarray, beta: float) -> np.ndarray:
            overlap = amps.sum() * inv_sqrt
            amps += (np.exp(-1j * beta) - 1.0) * overlap * inv_sqrt
            return amps

        return apply_grover

    lam, weight = _weight_phase_table(spec.weights, n)

    def apply_product(amps: np.ndarray, beta: float) -> np.ndarray:
        spectral = hadamard_transform(amps, n)
        spectral *= np.exp(-1j * beta * lam)[weight]
        return hadamard_transform(spectral, n)

    return apply_product


def apply_mixer(state: Statevector, spec: MixerSpec, beta: float) -> Statevector:
    """Apply ``exp(-i beta H_M)`` to ``state`` in place."""
    if not np.isfinite(beta):
        raise NumericInputError(f"non-finite mixer angle {beta}")
    kernel = mixer_kernel(spec, state.n)
    state.amplitudes[:] = kernel(state.amplitudes, float(beta))
    return state


def _pauli_x_product(n: int, qubits: tuple[int, ...]) -> np.ndarray:
    x = np.array([[0.0, 1.0], [1.0, 0.0]])
    eye = np.eye(2)
    out = np.ones((1, 1))
    # qubit i is bit i of the index, so the Kronecker factor for qubit n-1 is leftmost
    for q in reversed(range(n)):
        out = np.kron(out, x if q in qubits else eye)
    return out


def mixer_hamiltonian(spec: MixerSpec, n: int) -> np.ndarray:
    """Dense H_M as an explicit sum of X-products (or the Grover projector)."""
    if n > DENSE_MAX_N:
        raise SizeGuardError(f"dense mixer limited to n <= {DENSE_MAX_N}, got {n}")
    dim = 1 << n
    if spec.is_grover:
        psi0 = np.full(dim, 2.0 ** (-n / 2))
        return np.outer(psi0, psi0)
    spec.validate_for(n)
    ham = np.zeros((dim, dim))
    for w in spec.weights:
        for qubits in itertools.combinations(range(n), w):
            ham += _pauli_x_product(n, qubits)
    return ham


def dense_mixer_matrix(spec: MixerSpec, n: int, beta: float) -> np.ndarray:
    """Full ``2**n x 2**n`` unitary ``exp(-i beta H_M)`` for verification.

    The Hamiltonian is built term by term and exponentiated through a generic
    Hermitian eigendecomposition, independent of the Hadamard-basis path.
    """
    ham = mixer_hamiltonian(spec, n)
    evals, evecs = np.linalg.eigh(ham)
    return (evecs * np.exp(-1j * beta * evals)) @ evecs.conj().T
