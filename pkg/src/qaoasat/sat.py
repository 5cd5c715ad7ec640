"""Max k-SAT instances: random generation, cost evaluation, exact enumeration
and DIMACS CNF interchange.

Assignments are encoded as integers, little-endian: bit ``i`` of ``x`` is the
truth value of variable ``i``. The same encoding indexes statevector
amplitudes, so ``CostTable.values[x]`` is the diagonal of the cost
Hamiltonian in the computational basis.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, TextIO, Union

import numpy as np

from .errors import (
    EmptyInstanceError,
    InvalidArityError,
    InvalidClauseError,
    MalformedInputError,
    MixedArityError,
    SizeGuardError,
)

#: Largest variable count the brute-force oracle and statevectors accept by default.
DEFAULT_MAX_N = 20

Assignment = Union[int, str, Sequence[int]]


@dataclass(frozen=True)
class Literal:
    variable: int
    negated: bool = False

    def to_dimacs(self) -> int:
        return -(self.variable + 1) if self.negated else self.variable + 1

    @classmethod
    def from_dimacs(cls, token: int) -> "Literal":
        return cls(abs(token) - 1, token < 0)


@dataclass(frozen=True)
class SatInstance:
    """A Max k-SAT problem with ``n`` variables and ``m`` width-``k`` clauses.

    ``seed`` records provenance for generated instances and does not take part
    in equality.
    """

    n: int
    k: int
    clauses: tuple[tuple[Literal, ...], ...]
    seed: int | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "clauses", tuple(tuple(clause) for clause in self.clauses)
        )
        if self.k < 1 or self.n < self.k:
            raise InvalidArityError(f"need n >= k >= 1, got n={self.n}, k={self.k}")
        if not self.clauses:
            raise EmptyInstanceError("instance has no clauses")
        for idx, clause in enumerate(self.clauses):
            if len(clause) != self.k:
                raise MixedArityError(
                    f"clause {idx} has {len(clause)} literals, expected {self.k}"
                )
            variables = [lit.variable for lit in clause]
            if len(set(variables)) != len(variables):
                raise InvalidClauseError(f"clause {idx} repeats a variable")
            for v in variables:
                if not 0 <= v < self.n:
                    raise InvalidClauseError(
                        f"clause {idx} references variable {v} outside [0, {self.n})"
                    )

    @property
    def m(self) -> int:
        return len(self.clauses)

    @property
    def alpha(self) -> Fraction:
        """Clause density m/n."""
        return Fraction(self.m, self.n)

    @classmethod
    def from_lists(
        cls, n: int, clauses: Iterable[Sequence[int]], seed: int | None = None
    ) -> "SatInstance":
        """Build from DIMACS-style signed 1-based integer clauses."""
        lits = [tuple(Literal.from_dimacs(int(t)) for t in c) for c in clauses]
        if not lits:
            raise EmptyInstanceError("instance has no clauses")
        widths = {len(c) for c in lits}
        if len(widths) != 1:
            raise MixedArityError(f"clause widths differ: {sorted(widths)}")
        return cls(n=n, k=widths.pop(), clauses=tuple(lits), seed=seed)

    def as_lists(self) -> list[list[int]]:
        return [[lit.to_dimacs() for lit in clause] for clause in self.clauses]


@dataclass(frozen=True, eq=False)
class CostTable:
    """Satisfied-clause counts for all ``2**n`` assignments."""

    n: int
    m: int
    values: np.ndarray
    c_max: int
    ground_states: np.ndarray

    @property
    def size(self) -> int:
        return self.values.shape[0]

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    def histogram(self) -> dict[int, int]:
        levels, counts = np.unique(self.values, return_counts=True)
        return {int(c): int(w) for c, w in zip(levels, counts)}


def generate_random_instance(
    n: int, k: int, alpha: float | Fraction, seed: int
) -> SatInstance:
    """Draw a random k-SAT instance with ``round(alpha * n)`` clauses.

    Each clause picks ``k`` distinct variables uniformly without replacement
    and negates each literal with probability 1/2. Duplicate clauses may occur.
    """
    if k < 1 or n < k:
        raise InvalidArityError(f"cannot draw {k} distinct variables out of {n}")
    if alpha <= 0:
        raise EmptyInstanceError(f"clause density must be positive, got {alpha}")
    # round() on float/Fraction is ties-to-even
    m = round(Fraction(alpha) * n)
    if m < 1:
        raise EmptyInstanceError(f"round(alpha*n) = 0 for alpha={alpha}, n={n}")
    rng = np.random.default_rng(seed)
    clauses = []
    for _ in range(m):
        variables = rng.choice(n, size=k, replace=False)
        signs = rng.integers(0, 2, size=k)
        clauses.append(
            tuple(Literal(int(v), bool(s)) for v, s in zip(variables, signs))
        )
    return SatInstance(n=n, k=k, clauses=tuple(clauses), seed=seed)


def _assignment_to_int(assignment: Assignment, n: int) -> int:
    if isinstance(assignment, (int, np.integer)):
        x = int(assignment)
    elif isinstance(assignment, str):
        # a binary numeral, most significant bit first
        if len(assignment) != n:
            raise MalformedInputError(f"assignment has {len(assignment)} bits, need {n}")
        x = int(assignment, 2)
    else:
        bits = list(assignment)
        if len(bits) != n:
            raise MalformedInputError(f"assignment has {len(bits)} bits, need {n}")
        x = sum(1 << i for i, b in enumerate(bits) if b)
    if not 0 <= x < (1 << n):
        raise MalformedInputError(f"assignment {x} out of range for n={n}")
    return x


def evaluate(instance: SatInstance, assignment: Assignment) -> int:
    """Number of clauses with at least one true literal.

    ``assignment`` is an integer (bit ``i`` = variable ``i``), a binary
    numeral string, or a sequence of ``n`` truth values indexed by variable.
    """
    x = _assignment_to_int(assignment, instance.n)
    count = 0
    for clause in instance.clauses:
        for lit in clause:
            if bool((x >> lit.variable) & 1) != lit.negated:
                count += 1
                break
    return count


def brute_force_oracle(instance: SatInstance, max_n: int = DEFAULT_MAX_N) -> CostTable:
    """Evaluate every assignment and collect the optimum."""
    n = instance.n
    if n > max_n:
        raise SizeGuardError(f"n={n} exceeds the enumeration cap {max_n}")
    x = np.arange(1 << n, dtype=np.int64)
    bits = [((x >> v) & 1).astype(bool) for v in range(n)]
    values = np.zeros(1 << n, dtype=np.int64)
    for clause in instance.clauses:
        sat = np.zeros(1 << n, dtype=bool)
        for lit in clause:
            sat |= ~bits[lit.variable] if lit.negated else bits[lit.variable]
        values += sat
    values.setflags(write=False)
    c_max = int(values.max())
    ground = np.flatnonzero(values == c_max)
    ground.setflags(write=False)
    return CostTable(n=n, m=instance.m, values=values, c_max=c_max, ground_states=ground)


def parse_dimacs(text: str | TextIO) -> SatInstance:
    """Read a DIMACS CNF document (string or text stream)."""
    if not isinstance(text, str):
        text = text.read()
    header: tuple[int, int] | None = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise MalformedInputError(f"line {lineno}: bad header {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError as exc:
                raise MalformedInputError(f"line {lineno}: bad header {line!r}") from exc
            continue
        if header is None:
            raise MalformedInputError(f"line {lineno}: clause before 'p cnf' header")
        for token in line.split():
            try:
                lit = int(token)
            except ValueError as exc:
                raise MalformedInputError(f"line {lineno}: bad token {token!r}") from exc
            if lit == 0:
                if not current:
                    raise MalformedInputError(f"line {lineno}: empty clause")
                clauses.append(current)
                current = []
            else:
                if abs(lit) > header[0]:
                    raise MalformedInputError(
                        f"line {lineno}: variable {abs(lit)} exceeds declared {header[0]}"
                    )
                current.append(lit)
    if header is None:
        raise MalformedInputError("missing 'p cnf' header")
    if current:
        raise MalformedInputError("last clause is not terminated by 0")
    n, m = header
    if len(clauses) != m:
        raise MalformedInputError(f"header declares {m} clauses, found {len(clauses)}")
    for idx, clause in enumerate(clauses):
        if len({abs(t) for t in clause}) != len(clause):
            raise InvalidClauseError(f"clause {idx} repeats a variable: {clause}")
    return SatInstance.from_lists(n, clauses)


def write_dimacs(instance: SatInstance) -> str:
    """Canonical DIMACS text; clause order is preserved."""
    out = io.StringIO()
    out.write("c\n")
    out.write(f"p cnf {instance.n} {instance.m}\n")
    for clause in instance.as_lists():
        out.write(" ".join(str(t) for t in clause) + " 0\n")
    return out.getvalue()
