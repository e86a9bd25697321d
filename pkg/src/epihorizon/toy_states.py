"""Information-bounded toy systems.

A single toy system carries one definite bit among ``x``, ``y``, ``z``. A
bipartite system carries two bits among ``x_A, z_A, x_B, z_B`` and the
correlation observables ``x_AB = x_A (+) x_B`` and ``z_AB``, where the
correlation is +1 when the two values differ.

Every proposition is an affine equation over GF(2) on the single-subsystem
bits (bit 0 for +1, bit 1 for -1). Entailment, the independent-bit count and
the XOR-consistency invariant all fall out of one small Gaussian elimination.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .observable_algebra import MINUS, PLUS, Outcome


class DomainError(ValueError):
    """Observable or proposition does not belong to the system asked about."""


SINGLE = "single"
BIPARTITE = "bipartite"

_INFO_BOUND = {SINGLE: 1, BIPARTITE: 2}


@dataclass(frozen=True, order=True)
class ObservableId:
    axis: str  # x, y or z
    scope: str  # A, B or AB

    def __post_init__(self):
        if self.axis not in ("x", "y", "z"):
            raise DomainError(f"unknown axis {self.axis!r}")
        if self.scope not in ("A", "B", "AB"):
            raise DomainError(f"unknown scope {self.scope!r}")
        if self.axis == "y" and self.scope != "A":
            raise DomainError("y observables exist for single systems only")

    @property
    def is_correlation(self) -> bool:
        return self.scope == "AB"

    @property
    def subsystems(self) -> tuple[str, ...]:
        return ("A", "B") if self.scope == "AB" else (self.scope,)

    def __str__(self) -> str:
        return f"{self.axis}_{self.scope}"

    @classmethod
    def parse(cls, text: str) -> "ObservableId":
        m = re.fullmatch(r"\s*([xyz])_?(AB|A|B)\s*", text)
        if not m:
            raise DomainError(f"cannot parse observable {text!r}")
        return cls(m.group(1), m.group(2))


def obs(text: str) -> ObservableId:
    return ObservableId.parse(text)


@dataclass(frozen=True)
class Proposition:
    observable: ObservableId
    value: Outcome
    condition: Optional[tuple[ObservableId, Outcome]] = None

    def __post_init__(self):
        object.__setattr__(self, "value", Outcome.of(self.value))
        if self.condition is not None:
            c_obs, c_val = self.condition
            if c_obs == self.observable:
                raise DomainError("a conditional proposition cannot be conditioned on its own observable")
            object.__setattr__(self, "condition", (c_obs, Outcome.of(c_val)))

    @property
    def is_direct(self) -> bool:
        return self.condition is None

    @property
    def premise(self) -> Optional["Proposition"]:
        if self.condition is None:
            return None
        return Proposition(*self.condition)

    def unconditioned(self) -> "Proposition":
        return Proposition(self.observable, self.value)

    def given(self, other: "Proposition") -> "Proposition":
        return Proposition(self.observable, self.value, (other.observable, other.value))

    def __str__(self) -> str:
        s = f"{self.observable}^{self.value.symbol()}"
        if self.condition is not None:
            s += f"|{self.condition[0]}^{self.condition[1].symbol()}"
        return s

    @classmethod
    def parse(cls, text: str) -> "Proposition":
        """Parse ``x_A^+``, ``z_B^-|x_A^-`` (``^`` optional)."""
        def one(part: str) -> tuple[ObservableId, Outcome]:
            m = re.fullmatch(r"\s*([xyz]_?(?:AB|A|B))\^?([+-])1?\s*", part)
            if not m:
                raise DomainError(f"cannot parse proposition {part!r}")
            return ObservableId.parse(m.group(1)), Outcome.of(m.group(2))

        head, _, cond = text.partition("|")
        o, v = one(head)
        return cls(o, v, one(cond) if cond else None)

    def to_dict(self) -> dict:
        d = {"observable": str(self.observable), "value": int(self.value)}
        if self.condition is not None:
            d["condition"] = {"observable": str(self.condition[0]),
                              "value": int(self.condition[1])}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Proposition":
        cond = d.get("condition")
        return cls(ObservableId.parse(d["observable"]), Outcome.of(d["value"]),
                   (ObservableId.parse(cond["observable"]), Outcome.of(cond["value"]))
                   if cond else None)


PropLike = Union[Proposition, str]


def prop(text: PropLike) -> Proposition:
    return text if isinstance(text, Proposition) else Proposition.parse(text)


# --- GF(2) encoding ---------------------------------------------------------

_BITS = {
    SINGLE: {("x", "A"): 1, ("y", "A"): 2, ("z", "A"): 4},
    BIPARTITE: {("x", "A"): 1, ("x", "B"): 2, ("z", "A"): 4, ("z", "B"): 8},
}


def _bit(v: Outcome) -> int:
    return 0 if v is PLUS else 1


def _from_bit(b: int) -> Outcome:
    return PLUS if b == 0 else MINUS


def _mask(system: str, o: ObservableId) -> tuple[int, int]:
    """(variable mask, affine offset) of an observable."""
    table = _BITS[system]
    if o.is_correlation:
        if system != BIPARTITE:
            raise DomainError(f"{o} needs a bipartite system")
        return table[(o.axis, "A")] | table[(o.axis, "B")], 1
    key = (o.axis, o.scope)
    if key not in table:
        raise DomainError(f"{o} is not an observable of a {system} system")
    return table[key], 0


def _equation(system: str, p: Proposition) -> tuple[int, int]:
    if p.condition is None:
        m, off = _mask(system, p.observable)
        return m, _bit(p.value) ^ off
    c_obs, c_val = p.condition
    if (system != BIPARTITE or p.observable.is_correlation or c_obs.is_correlation
            or p.observable.axis != c_obs.axis):
        raise DomainError(
            f"{p}: toy conditionals link the same axis on the two subsystems")
    # (b | a) on one axis is the correlation bit a (+) b
    return _mask(system, p.observable)[0] | _mask(system, c_obs)[0], _bit(p.value) ^ _bit(c_val)


def _effective(p: Proposition) -> ObservableId:
    """Observable whose information the proposition carries."""
    if p.condition is None:
        return p.observable
    return ObservableId(p.observable.axis, "AB")


class _Basis:
    """Row-echelon XOR basis of affine equations."""

    __slots__ = ("rows",)

    def __init__(self):
        self.rows: dict[int, tuple[int, int]] = {}

    def reduce(self, mask: int, rhs: int) -> tuple[int, int]:
        rows = self.rows
        while mask:
            hb = mask.bit_length() - 1
            r = rows.get(hb)
            if r is None:
                break
            mask ^= r[0]
            rhs ^= r[1]
        return mask, rhs

    def add(self, mask: int, rhs: int) -> bool:
        """Insert; True if independent. Raises on inconsistency."""
        mask, rhs = self.reduce(mask, rhs)
        if mask == 0:
            if rhs:
                raise DomainError("propositions are mutually inconsistent")
            return False
        self.rows[mask.bit_length() - 1] = (mask, rhs)
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)


def _basis(system: str, props: Iterable[Proposition]) -> _Basis:
    b = _Basis()
    for p in props:
        b.add(*_equation(system, p))
    return b


def compatible(o1: ObservableId, o2: ObservableId) -> bool:
    """Whether two toy observables can be definite together.

    Observables on a shared subsystem with different axes clash; a
    correlation clashes with a single-subsystem observable of the other axis
    but not with the other correlation (the clashes cancel pairwise).
    """
    if o1.axis == o2.axis:
        return True
    shared = set(o1.subsystems) & set(o2.subsystems)
    return len(shared) % 2 == 0


# --- states -----------------------------------------------------------------

@dataclass(frozen=True)
class EpistemicState:
    system: str
    propositions: tuple[Proposition, ...]  # oldest first
    info_bound: int = 0

    def __post_init__(self):
        if self.system not in _INFO_BOUND:
            raise DomainError(f"unknown system kind {self.system!r}")
        props = tuple(prop(p) for p in self.propositions)
        object.__setattr__(self, "propositions", props)
        if not self.info_bound:
            object.__setattr__(self, "info_bound", _INFO_BOUND[self.system])
        if self.info_bound < 1:
            raise DomainError("info_bound must be positive")
        basis = _basis(self.system, props)
        if basis.rank > self.info_bound:
            raise DomainError(
                f"{basis.rank} independent propositions exceed the bound of {self.info_bound}")
        axes: dict[str, str] = {}
        for p in props:
            if p.is_direct and not p.observable.is_correlation:
                seen = axes.setdefault(p.observable.scope, p.observable.axis)
                if seen != p.observable.axis:
                    raise DomainError(
                        f"subsystem {p.observable.scope} cannot have both {seen} and "
                        f"{p.observable.axis} definite")
        object.__setattr__(self, "_basis", basis)

    @classmethod
    def single(cls, *props: PropLike) -> "EpistemicState":
        return cls(SINGLE, tuple(prop(p) for p in props))

    @classmethod
    def bipartite(cls, *props: PropLike) -> "EpistemicState":
        return cls(BIPARTITE, tuple(prop(p) for p in props))

    @property
    def info_count(self) -> int:
        return self._basis.rank

    def observables(self) -> list[ObservableId]:
        if self.system == SINGLE:
            return [ObservableId(a, "A") for a in "xyz"]
        return [ObservableId(a, s) for a in "xz" for s in ("A", "B", "AB")]

    def definite(self) -> dict[ObservableId, Outcome]:
        """Every observable value the state entails."""
        out = {}
        for o in self.observables():
            v = infer(self, o)
            if v is not None:
                out[o] = v
        return out

    def conditionals(self) -> list[Proposition]:
        """Rewrite correlation knowledge as conditionals on direct propositions."""
        out = []
        for p in self.propositions:
            if not p.is_direct or p.observable.is_correlation or self.system != BIPARTITE:
                continue
            other = ObservableId(p.observable.axis, "B" if p.observable.scope == "A" else "A")
            reduced = EpistemicState(self.system, tuple(q for q in self.propositions if q != p),
                                     self.info_bound)
            if infer(reduced, other) is not None:
                continue
            v = infer(self, other)
            if v is not None:
                out.append(Proposition(other, v, (p.observable, p.value)))
        return out

    def __str__(self) -> str:
        return "(" + ", ".join(str(p) for p in self.propositions) + ")"

    def to_dict(self) -> dict:
        return {"system": self.system,
                "propositions": [p.to_dict() for p in self.propositions]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "EpistemicState":
        if not isinstance(d, dict) or "system" not in d:
            raise DomainError("state JSON needs a 'system' field")
        return cls(d["system"], tuple(Proposition.from_dict(p) for p in d.get("propositions", [])))


def _check_obs(state: EpistemicState, o: ObservableId) -> None:
    _mask(state.system, o)


def infer(state: EpistemicState, o: ObservableId) -> Optional[Outcome]:
    """Value of ``o`` entailed by the state, or None when undecidable."""
    if isinstance(o, str):
        o = ObservableId.parse(o)
    m, off = _mask(state.system, o)
    res, rhs = state._basis.reduce(m, 0)
    if res:
        return None
    return _from_bit(rhs ^ off)


def _entails(state: EpistemicState, p: Proposition, extra: tuple[Proposition, ...] = ()) -> bool:
    """Direct: the state fixes p's value. Conditional (b|a): state plus a fixes b."""
    props = state.propositions + extra
    if p.condition is not None:
        props = props + (Proposition(*p.condition),)
    try:
        b = _basis(state.system, props)
    except DomainError:
        return False
    m, off = _mask(state.system, p.observable)
    res, rhs = b.reduce(m, 0)
    return res == 0 and _from_bit(rhs ^ off) is p.value


@dataclass(frozen=True)
class MeasurementRecord:
    observable: ObservableId
    outcome: Outcome
    pre_state: EpistemicState
    post_state: EpistemicState
    forced: bool

    def to_dict(self) -> dict:
        return {"observable": str(self.observable), "outcome": int(self.outcome),
                "forced": self.forced, "pre_state": self.pre_state.to_dict(),
                "post_state": self.post_state.to_dict()}


def _draw(randomness) -> Outcome:
    return PLUS if randomness.random() < 0.5 else MINUS


def measure(state: EpistemicState, o: ObservableId, randomness) -> MeasurementRecord:
    """Measure ``o``; undecidable outcomes are uniform over +1/-1.

    Propositions incompatible with ``o`` are evicted first; if the bound is
    still exceeded the oldest remaining propositions go next.
    """
    if isinstance(o, str):
        o = ObservableId.parse(o)
    known = infer(state, o)
    if known is not None:
        return MeasurementRecord(o, known, state, state, True)
    outcome = _draw(randomness)
    kept = [p for p in state.propositions if compatible(_effective(p), o)]
    new = Proposition(o, outcome)
    while True:
        b = _basis(state.system, kept + [new])
        if b.rank <= state.info_bound:
            break
        kept.pop(0)
    post = EpistemicState(state.system, tuple(kept) + (new,), state.info_bound)
    return MeasurementRecord(o, outcome, state, post, False)


def entangled_state() -> EpistemicState:
    return EpistemicState.bipartite("x_AB^+", "z_AB^+")


def supports_counterfactual(state: EpistemicState, vary: PropLike, hold: PropLike) -> bool:
    """Does ``hold`` survive replacing ``vary`` by some other proposition?"""
    vary, hold = prop(vary), prop(hold)
    if not vary.is_direct or not _entails(state, vary):
        raise DomainError(f"{vary} is not a definite proposition of {state}")
    if not _entails(state, hold):
        raise DomainError(f"{hold} is not derivable from {state}")
    if hold.is_direct and hold.observable == vary.observable:
        return False
    if hold.condition == (vary.observable, vary.value):
        return False
    rest = tuple(p for p in state.propositions
                 if not (p.is_direct and p.observable == vary.observable))
    return _entails(EpistemicState(state.system, rest, state.info_bound), hold)
