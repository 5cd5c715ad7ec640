"""Objective-value and threshold phase separators.

Both are diagonal in the computational basis. The threshold separator marks
assignments with ``C(x) >= t`` (Heaviside step with ``theta(0) = 1``), so
``t = c_max`` marks exactly the ground states.

Labels: ``obj``, ``th:<t>`` and ``th:auto`` (threshold chosen by scanning).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidThresholdError, NumericInputError
from .sat import CostTable
from .statevector import Statevector


@dataclass(frozen=True)
class SeparatorSpec:
    """``kind`` is ``"obj"`` or ``"th"``; ``threshold is None`` on a ``"th"``
    separator means the threshold is picked by the optimizer's scan."""

    kind: str
    threshold: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("obj", "th"):
            raise InvalidThresholdError(f"unknown separator kind {self.kind!r}")
        if self.kind == "obj" and self.threshold is not None:
            raise InvalidThresholdError("objective separator takes no threshold")
        if self.threshold is not None and self.threshold < 1:
            raise InvalidThresholdError(f"threshold must be >= 1, got {self.threshold}")

    @classmethod
    def objective(cls) -> "SeparatorSpec":
        return cls("obj")

    @classmethod
    def thresh(cls, t: int | None = None) -> "SeparatorSpec":
        return cls("th", None if t is None else int(t))

    @property
    def is_threshold(self) -> bool:
        return self.kind == "th"

    @property
    def is_auto(self) -> bool:
        return self.kind == "th" and self.threshold is None

    @property
    def label(self) -> str:
        return format_separator(self)

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True, eq=False)
class SeparatorTable:
    spec: SeparatorSpec
    diag: np.ndarray
    marked_count: int | None = None


def parse_separator(label: str) -> SeparatorSpec:
    text = label.strip().lower()
    if text == "obj":
        return SeparatorSpec.objective()
    if text.startswith("th:"):
        arg = text[3:]
        if arg == "auto":
            return SeparatorSpec.thresh()
        try:
            return SeparatorSpec.thresh(int(arg))
        except ValueError as exc:
            raise InvalidThresholdError(f"cannot parse separator label {label!r}") from exc
    raise InvalidThresholdError(f"cannot parse separator label {label!r}")


def format_separator(spec: SeparatorSpec) -> str:
    if spec.kind == "obj":
        return "obj"
    return "th:auto" if spec.threshold is None else f"th:{spec.threshold}"


def build_separator(table: CostTable, spec: SeparatorSpec) -> SeparatorTable:
    if spec.kind == "obj":
        diag = table.values.astype(float)
        diag.setflags(write=False)
        return SeparatorTable(spec, diag)
    t = spec.threshold
    if t is None:
        raise InvalidThresholdError("th:auto must be resolved to a concrete threshold first")
    if not 1 <= t <= table.m:
        raise InvalidThresholdError(f"threshold {t} outside [1, {table.m}]")
    marked = table.values >= t
    diag = marked.astype(float)
    diag.setflags(write=False)
    return SeparatorTable(spec, diag, marked_count=int(marked.sum()))


def apply_separator(state: Statevector, sep: SeparatorTable, gamma: float) -> Statevector:
    """Multiply amplitude ``x`` by ``exp(-i gamma diag[x])`` in place."""
    if sep.diag.shape != state.amplitudes.shape:
        raise DimensionMismatchError(
            f"separator of size {sep.diag.shape[0]} does not match 2^{state.n}"
        )
    if not np.isfinite(gamma):
        raise NumericInputError(f"non-finite separator angle {gamma}")
    state.amplitudes *= np.exp(-1j * gamma * sep.diag)
    return state
