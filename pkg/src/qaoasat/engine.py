"""p-round QAOA evolution and the three performance metrics."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidThresholdError, UndefinedRatioError
from .mixers import MixerSpec, format_mixer, mixer_kernel, parse_mixer
from .sat import DEFAULT_MAX_N, CostTable, SatInstance, brute_force_oracle
from .separators import (
    SeparatorSpec,
    SeparatorTable,
    build_separator,
)
from .statevector import (
    Statevector,
    check_size,
    expectation_diagonal,
    probability_of_set,
    uniform_state,
)

STANDARD = "standard"
LITERAL_EQ1 = "literal-eq1"
ORDERINGS = (STANDARD, LITERAL_EQ1)


@dataclass(frozen=True)
class Implementation:
    """A (mixer, separator) pair, labelled e.g. ``W{1}-Obj``, ``grover-Th:12``
    or ``grover-Th`` (threshold left to the scan)."""

    mixer: MixerSpec
    separator: SeparatorSpec

    @property
    def label(self) -> str:
        if self.separator.kind == "obj":
            suffix = "Obj"
        elif self.separator.threshold is None:
            suffix = "Th"
        else:
            suffix = f"Th:{self.separator.threshold}"
        return f"{format_mixer(self.mixer)}-{suffix}"

    def with_threshold(self, t: int) -> "Implementation":
        return Implementation(self.mixer, SeparatorSpec.thresh(t))

    def __str__(self) -> str:
        return self.label


_IMPL_RE = re.compile(r"^(?P<mixer>.+)-(?P<sep>Obj|Th(?::(?P<t>\d+))?)$", re.IGNORECASE)


def parse_implementation(label: str) -> Implementation:
    match = _IMPL_RE.match(label.strip())
    if not match:
        raise InvalidThresholdError(f"cannot parse implementation label {label!r}")
    mixer = parse_mixer(match.group("mixer"))
    if match.group("sep").lower() == "obj":
        return Implementation(mixer, SeparatorSpec.objective())
    t = match.group("t")
    return Implementation(mixer, SeparatorSpec.thresh(None if t is None else int(t)))


TRANSVERSE_OBJ = Implementation(MixerSpec.transverse(), SeparatorSpec.objective())
GROVER_OBJ = Implementation(MixerSpec.grover(), SeparatorSpec.objective())
GROVER_TH = Implementation(MixerSpec.grover(), SeparatorSpec.thresh())


@dataclass(frozen=True)
class AngleSchedule:
    betas: tuple[float, ...] = ()
    gammas: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        if len(self.betas) != len(self.gammas):
            raise ValueError(
                f"{len(self.betas)} betas but {len(self.gammas)} gammas"
            )

    @property
    def p(self) -> int:
        return len(self.betas)

    def as_vector(self) -> np.ndarray:
        """Layout ``[beta_1..beta_p, gamma_1..gamma_p]``."""
        return np.array(self.betas + self.gammas, dtype=float)

    @classmethod
    def from_vector(cls, vec: Sequence[float]) -> "AngleSchedule":
        vec = list(vec)
        if len(vec) % 2:
            raise ValueError("angle vector must have even length")
        p = len(vec) // 2
        return cls(tuple(vec[:p]), tuple(vec[p:]))

    @classmethod
    def constant(cls, p: int, beta: float, gamma: float) -> "AngleSchedule":
        return cls((beta,) * p, (gamma,) * p)


@dataclass(frozen=True)
class MetricsRecord:
    expectation: float
    approximation_ratio: float
    gsp: float
    p: int


def approximation_ratio(state: Statevector, table: CostTable) -> float:
    """<H_C> / max C."""
    if table.c_max <= 0:
        raise UndefinedRatioError("c_max = 0, approximation ratio undefined")
    return expectation_diagonal(state, table) / table.c_max


def ground_state_probability(state: Statevector, table: CostTable) -> float:
    return probability_of_set(state, table.ground_states)


def resolve_separator(table: CostTable, impl: Implementation) -> SeparatorTable:
    if impl.separator.is_auto:
        raise InvalidThresholdError(
            f"{impl.label}: threshold must be concrete here; use the threshold scan"
        )
    return build_separator(table, impl.separator)


class QaoaSimulator:
    """Precomputed evolution for one (cost table, implementation) pair.

    ``evolve`` returns full amplitudes. ``expectation`` is the optimizer's hot
    path; for the Grover mixer it runs on groups of basis states sharing a
    separator value instead of on basis states. This is exact: the start state
    is uniform and every operator then depends on ``x`` only through the
    separator value, so amplitudes stay constant on each group. Threshold
    separators leave just two groups.
    """

    def __init__(self, table: CostTable, impl: Implementation, ordering: str = STANDARD):
        if ordering not in ORDERINGS:
            raise ValueError(f"unknown ordering {ordering!r}; expected one of {ORDERINGS}")
        self.table = table
        self.impl = impl
        self.ordering = ordering
        self.n = table.n
        impl.mixer.validate_for(self.n)
        self.separator = resolve_separator(table, impl)
        self._mix = mixer_kernel(impl.mixer, self.n)
        self._values = table.values.astype(float)
        # separator diagonal takes few distinct integer values; phases are looked up
        sep_levels, self._sep_index = np.unique(self.separator.diag, return_inverse=True)
        self._sep_levels = sep_levels
        self._use_levels = impl.mixer.is_grover
        if self._use_levels:
            # group basis states by separator value: amplitudes are constant per group
            _, group, counts = np.unique(
                self.separator.diag, return_inverse=True, return_counts=True
            )
            self._lvl_weight = counts.astype(float)
            self._lvl_sep = sep_levels
            self._lvl_cost = np.bincount(group, weights=self._values) / counts
            ground = np.zeros(1 << self.n)
            ground[table.ground_states] = 1.0
            self._lvl_ground = np.bincount(group, weights=ground)

    def _rounds(self, betas: Sequence[float], gammas: Sequence[float]):
        if self.ordering == STANDARD:
            for beta, gamma in zip(betas, gammas):
                yield "sep", gamma
                yield "mix", beta
        else:
            for beta, gamma in zip(betas, gammas):
                yield "mix", beta
                yield "sep", gamma

    def evolve(self, schedule: AngleSchedule) -> np.ndarray:
        return self._evolve(schedule.betas, schedule.gammas)

    def _evolve(self, betas, gammas) -> np.ndarray:
        amps = np.full(1 << self.n, 2.0 ** (-self.n / 2), dtype=np.complex128)
        for op, angle in self._rounds(betas, gammas):
            if op == "sep":
                amps *= np.exp(-1j * angle * self._sep_levels)[self._sep_index]
            else:
                amps = self._mix(amps, angle)
        return amps

    def _evolve_levels(self, betas, gammas) -> np.ndarray:
        inv_sqrt = 2.0 ** (-self.n / 2)
        amps = np.full(self._lvl_weight.shape[0], inv_sqrt, dtype=np.complex128)
        w = self._lvl_weight
        for op, angle in self._rounds(betas, gammas):
            if op == "sep":
                amps *= np.exp(-1j * angle * self._lvl_sep)
            else:
                overlap = np.dot(w, amps) * inv_sqrt
                amps += (np.exp(-1j * angle) - 1.0) * overlap * inv_sqrt
        return amps

    def expectation(self, schedule: AngleSchedule) -> float:
        return self.expectation_vector(schedule.as_vector())

    def expectation_vector(self, angles: np.ndarray) -> float:
        """<H_C> for angles laid out as ``[beta_1..beta_p, gamma_1..gamma_p]``."""
        p = len(angles) // 2
        betas, gammas = angles[:p].tolist(), angles[p:].tolist()
        if self._use_levels:
            amps = self._evolve_levels(betas, gammas)
            probs = self._lvl_weight * (amps.real**2 + amps.imag**2)
            return float(np.dot(probs, self._lvl_cost))
        amps = self._evolve(betas, gammas)
        return float(np.dot(amps.real**2 + amps.imag**2, self._values))

    def level_metrics(self, schedule: AngleSchedule) -> tuple[float, float]:
        """(expectation, gsp) from the grouped evolution (Grover mixer only)."""
        if not self._use_levels:
            raise ValueError("grouped evolution needs the Grover mixer")
        amps = self._evolve_levels(schedule.betas, schedule.gammas)
        density = amps.real**2 + amps.imag**2
        return (
            float(np.dot(self._lvl_weight * density, self._lvl_cost)),
            float(np.dot(density, self._lvl_ground)),
        )

    def run(self, schedule: AngleSchedule) -> tuple[Statevector, MetricsRecord]:
        state = Statevector(self.n, self.evolve(schedule))
        return state, metrics_for(state, self.table, schedule.p)


def metrics_for(state: Statevector, table: CostTable, p: int) -> MetricsRecord:
    expectation = expectation_diagonal(state, table)
    if table.c_max <= 0:
        raise UndefinedRatioError("c_max = 0, approximation ratio undefined")
    return MetricsRecord(
        expectation=expectation,
        approximation_ratio=expectation / table.c_max,
        gsp=ground_state_probability(state, table),
        p=p,
    )


def run_qaoa(
    instance: SatInstance,
    impl: Implementation,
    schedule: AngleSchedule,
    *,
    table: CostTable | None = None,
    ordering: str = STANDARD,
    max_n: int = DEFAULT_MAX_N,
) -> tuple[Statevector, MetricsRecord]:
    """Evolve the uniform state through ``schedule.p`` rounds.

    The standard ordering applies the separator (gamma_r) then the mixer
    (beta_r) each round. ``ordering="literal-eq1"`` applies the mixer first.
    Pass a precomputed ``table`` to skip the brute-force enumeration.
    """
    check_size(instance.n, max_n)
    if table is None:
        table = brute_force_oracle(instance, max_n=max_n)
    if schedule.p == 0:
        state = uniform_state(instance.n, max_n)
        return state, metrics_for(state, table, 0)
    return QaoaSimulator(table, impl, ordering).run(schedule)
