"""Finite calculus of dichotomic measurements.

A :class:`MeasurementTable` tabulates ``f(n, k)``, the outcome of measurement
``n`` on state ``k`` (both 1-based). New measurements are built from table rows
with Boolean connectives, reading +1 as true and -1 as false. The diagonal
construction produces a measurement that no row of a square table reproduces,
and :func:`lawvere_check` runs the commuting-square argument for an arbitrary
outcome map ``alpha``.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence, Union


class Outcome(enum.IntEnum):
    PLUS = 1
    MINUS = -1

    def flip(self) -> "Outcome":
        return Outcome.MINUS if self is Outcome.PLUS else Outcome.PLUS

    @property
    def truth(self) -> bool:
        return self is Outcome.PLUS

    @classmethod
    def of(cls, value) -> "Outcome":
        """Coerce ``1``, ``-1``, ``'+'``, ``'-'`` or a bool into an outcome."""
        if isinstance(value, Outcome):
            return value
        if isinstance(value, bool):
            return cls.PLUS if value else cls.MINUS
        if isinstance(value, str):
            s = value.strip()
            if s in ("+", "+1", "1"):
                return cls.PLUS
            if s in ("-", "-1", "−", "−1"):
                return cls.MINUS
            raise ValueError(f"not an outcome: {value!r}")
        if value == 1:
            return cls.PLUS
        if value == -1:
            return cls.MINUS
        raise ValueError(f"not an outcome: {value!r}")

    def symbol(self) -> str:
        return "+" if self is Outcome.PLUS else "-"


PLUS = Outcome.PLUS
MINUS = Outcome.MINUS


class ShapeError(ValueError):
    """Table or measurement dimensions do not fit the operation."""


# --- provenance expressions -------------------------------------------------

@dataclass(frozen=True)
class Row:
    index: int

    def __str__(self) -> str:
        return f"m{self.index}"


@dataclass(frozen=True)
class Not:
    operand: "Expr"

    def __str__(self) -> str:
        return f"NOT({self.operand})"


@dataclass(frozen=True)
class Binary:
    op: str  # one of XOR, AND, OR
    left: "Expr"
    right: "Expr"

    def __str__(self) -> str:
        return f"{self.op}({self.left}, {self.right})"


@dataclass(frozen=True)
class Diagonal:
    """Cell-wise negated diagonal of the source table."""

    size: int

    def __str__(self) -> str:
        return f"DIAG[{self.size}]"


Expr = Union[Row, Not, Binary, Diagonal]

_BINARY_OPS: dict[str, Callable[[Outcome, Outcome], Outcome]] = {
    "XOR": lambda a, b: PLUS if a != b else MINUS,
    "AND": lambda a, b: PLUS if (a is PLUS and b is PLUS) else MINUS,
    "OR": lambda a, b: PLUS if (a is PLUS or b is PLUS) else MINUS,
}


# --- tables -----------------------------------------------------------------

@dataclass(frozen=True)
class MeasurementTable:
    """Outcome matrix with ``entries[n-1][k-1] == f(n, k)``."""

    entries: tuple[tuple[Outcome, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(Outcome.of(v) for v in row) for row in self.entries)
        if not rows or not rows[0]:
            raise ShapeError("a measurement table needs at least one row and one column")
        width = len(rows[0])
        for n, row in enumerate(rows, start=1):
            if len(row) != width:
                raise ShapeError(f"row {n} has {len(row)} states, expected {width}")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> "MeasurementTable":
        return cls(tuple(tuple(r) for r in rows))

    @property
    def n_measurements(self) -> int:
        return len(self.entries)

    @property
    def n_states(self) -> int:
        return len(self.entries[0])

    @property
    def is_square(self) -> bool:
        return self.n_measurements == self.n_states

    def _check_row(self, n: int) -> None:
        if not isinstance(n, int) or not 1 <= n <= self.n_measurements:
            raise IndexError(
                f"measurement index {n} out of range 1..{self.n_measurements}")

    def f(self, n: int, k: int) -> Outcome:
        self._check_row(n)
        if not 1 <= k <= self.n_states:
            raise IndexError(f"state index {k} out of range 1..{self.n_states}")
        return self.entries[n - 1][k - 1]

    def row(self, n: int) -> tuple[Outcome, ...]:
        self._check_row(n)
        return self.entries[n - 1]

    def measurement(self, n: int) -> "DerivedMeasurement":
        return DerivedMeasurement(self.row(n), Row(n))

    def diagonal(self) -> tuple[Outcome, ...]:
        if not self.is_square:
            raise ShapeError(
                f"table is {self.n_measurements}x{self.n_states}, diagonal needs a square table")
        return tuple(self.entries[k][k] for k in range(self.n_states))

    def with_row(self, outcomes: Sequence) -> "MeasurementTable":
        if len(outcomes) != self.n_states:
            raise ShapeError(f"new row has {len(outcomes)} states, expected {self.n_states}")
        return MeasurementTable(self.entries + (tuple(outcomes),))

    def with_state(self, outcomes: Sequence) -> "MeasurementTable":
        """Append a column (one outcome per existing measurement)."""
        if len(outcomes) != self.n_measurements:
            raise ShapeError(
                f"new state has {len(outcomes)} outcomes, expected {self.n_measurements}")
        return MeasurementTable(tuple(r + (Outcome.of(v),) for r, v in zip(self.entries, outcomes)))

    # -- literal formats --

    def to_text(self) -> str:
        return "\n".join("".join(v.symbol() for v in row) for row in self.entries) + "\n"

    def to_json(self) -> str:
        return json.dumps([[int(v) for v in row] for row in self.entries])

    @classmethod
    def parse_text(cls, text: str) -> "MeasurementTable":
        rows = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].replace(" ", "").replace("\t", "")
            if not line:
                continue
            bad = [c for c in line if c not in "+-"]
            if bad:
                raise ValueError(f"line {lineno}: unexpected character {bad[0]!r}")
            rows.append(tuple(PLUS if c == "+" else MINUS for c in line))
        try:
            return cls(tuple(rows))
        except ShapeError as exc:
            raise ValueError(str(exc)) from None

    @classmethod
    def parse_json(cls, text: str) -> "MeasurementTable":
        data = json.loads(text)
        if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
            raise ValueError("JSON table must be a list of lists")
        rows = []
        for n, r in enumerate(data, start=1):
            try:
                rows.append(tuple(Outcome.of(v) for v in r))
            except ValueError as exc:
                raise ValueError(f"row {n}: {exc}") from None
        try:
            return cls(tuple(rows))
        except ShapeError as exc:
            raise ValueError(str(exc)) from None

    @classmethod
    def parse(cls, text: str) -> "MeasurementTable":
        """Accept either the ``+``/``-`` grid or the JSON matrix form."""
        if text.lstrip().startswith("["):
            return cls.parse_json(text)
        return cls.parse_text(text)


@dataclass(frozen=True)
class DerivedMeasurement:
    outcomes: tuple[Outcome, ...]
    provenance: Expr = field(compare=False)

    def __len__(self) -> int:
        return len(self.outcomes)

    def __str__(self) -> str:
        return "".join(v.symbol() for v in self.outcomes)


def evaluate(expr: Expr, table: MeasurementTable) -> tuple[Outcome, ...]:
    """Evaluate a provenance tree cell-wise against ``table``."""
    if isinstance(expr, Row):
        return table.row(expr.index)
    if isinstance(expr, Not):
        return tuple(v.flip() for v in evaluate(expr.operand, table))
    if isinstance(expr, Binary):
        fn = _BINARY_OPS[expr.op]
        return tuple(fn(a, b) for a, b in zip(evaluate(expr.left, table),
                                              evaluate(expr.right, table)))
    if isinstance(expr, Diagonal):
        if table.n_measurements < expr.size or table.n_states != expr.size:
            raise ShapeError("diagonal provenance does not fit this table")
        return tuple(table.entries[k][k].flip() for k in range(expr.size))
    raise TypeError(f"unknown expression node {expr!r}")


# --- operations -------------------------------------------------------------

def combine(op: str, m1: DerivedMeasurement, m2: DerivedMeasurement) -> DerivedMeasurement:
    if op not in _BINARY_OPS:
        raise ValueError(f"unknown connective {op!r}")
    if len(m1) != len(m2):
        raise ShapeError(f"cannot combine measurements over {len(m1)} and {len(m2)} states")
    fn = _BINARY_OPS[op]
    return DerivedMeasurement(tuple(fn(a, b) for a, b in zip(m1.outcomes, m2.outcomes)),
                              Binary(op, m1.provenance, m2.provenance))


def xor_compose(t: MeasurementTable, i: int, j: int) -> DerivedMeasurement:
    """+1 exactly where rows ``i`` and ``j`` disagree."""
    return combine("XOR", t.measurement(i), t.measurement(j))


def and_compose(t: MeasurementTable, i: int, j: int) -> DerivedMeasurement:
    return combine("AND", t.measurement(i), t.measurement(j))


def or_compose(t: MeasurementTable, i: int, j: int) -> DerivedMeasurement:
    return combine("OR", t.measurement(i), t.measurement(j))


def negate(m: DerivedMeasurement) -> DerivedMeasurement:
    return DerivedMeasurement(tuple(v.flip() for v in m.outcomes), Not(m.provenance))


def diagonal_measurement(t: MeasurementTable) -> DerivedMeasurement:
    """The measurement that disagrees with row ``k`` on state ``k``, for every ``k``."""
    return DerivedMeasurement(tuple(v.flip() for v in t.diagonal()), Diagonal(t.n_states))


def find_matching_row(t: MeasurementTable, m: DerivedMeasurement) -> int | None:
    if len(m) != t.n_states:
        raise ShapeError(f"measurement covers {len(m)} states, table has {t.n_states}")
    for n, row in enumerate(t.entries, start=1):
        if row == m.outcomes:
            return n
    return None


def extend_with_diagonal(t: MeasurementTable, times: int = 1) -> list[MeasurementTable]:
    """Repeatedly add the escaping measurement as a new row.

    A new state column is added alongside each row so the table stays square
    and the construction can be repeated. Returns the successive tables.
    """
    if times < 0:
        raise ValueError("times must be non-negative")
    out = []
    cur = t
    for _ in range(times):
        g = diagonal_measurement(cur)
        grown = cur.with_row(g.outcomes)
        # the new state's column is arbitrary; copy the old diagonal, PLUS for the new row
        col = [cur.entries[n][n] for n in range(cur.n_measurements)] + [PLUS]
        cur = grown.with_state(col)
        out.append(cur)
    return out


# --- Lawvere commuting square -----------------------------------------------

AlphaLike = Union[Callable[[Outcome], Outcome], Mapping[Outcome, Outcome]]


def _as_map(alpha: AlphaLike) -> dict[Outcome, Outcome]:
    if isinstance(alpha, Mapping):
        return {Outcome.of(k): Outcome.of(v) for k, v in alpha.items()}
    return {v: Outcome.of(alpha(v)) for v in (PLUS, MINUS)}


IDENTITY = {PLUS: PLUS, MINUS: MINUS}
NEGATION = {PLUS: MINUS, MINUS: PLUS}


def constant(value) -> dict[Outcome, Outcome]:
    v = Outcome.of(value)
    return {PLUS: v, MINUS: v}


@dataclass(frozen=True)
class FixedPointReport:
    g: tuple[Outcome, ...]
    fixed_points: tuple[Outcome, ...]
    matching_rows: tuple[int, ...]
    # per measurement n: does f(n,n) == alpha(f(n,n))
    diagonal_equation: tuple[bool, ...]
    contradiction: bool

    def summary(self) -> str:
        if self.contradiction:
            return ("contradiction: alpha has no fixed point and g matches no row, "
                    "so no table f lists every measurement")
        if self.matching_rows:
            return (f"g equals row(s) {list(self.matching_rows)}; alpha fixes "
                    f"{[int(v) for v in self.fixed_points]}")
        return "g matches no row, but alpha has a fixed point so no contradiction is forced"


def lawvere_check(t: MeasurementTable, alpha: AlphaLike) -> FixedPointReport:
    amap = _as_map(alpha)
    diag = t.diagonal()
    g = tuple(amap[v] for v in diag)
    fixed = tuple(v for v in (PLUS, MINUS) if amap[v] is v)
    matches = tuple(n for n, row in enumerate(t.entries, start=1) if row == g)
    equation = tuple(amap[v] is v for v in diag)
    for n in matches:
        # commuting square: g(n) = f(n, n) forces f(n, n) to be a fixed point
        assert equation[n - 1], "row matched g without a fixed point"
    return FixedPointReport(g=g, fixed_points=fixed, matching_rows=matches,
                            diagonal_equation=equation,
                            contradiction=not fixed and not matches)
