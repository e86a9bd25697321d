"""Exact local hidden-variable calculus for two parties with two settings each.

Hidden states are the 16 deterministic assignments of values to
``(x_A, z_A, x_B, z_B)``, enumerated lexicographically with +1 before -1.
All arithmetic is exact: a model keeps integer weights over one common
denominator, so expectations and the CHSH value come out as Fractions.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from . import exact_lp
from .observable_algebra import Outcome
from .toy_states import DomainError, ObservableId

OBSERVABLES = ("x_A", "z_A", "x_B", "z_B")
LAMBDAS: tuple[tuple[int, int, int, int], ...] = tuple(itertools.product((1, -1), repeat=4))
PAIRS = (("x_A", "x_B"), ("x_A", "z_B"), ("z_A", "x_B"), ("z_A", "z_B"))
CHSH_SIGNS = (1, 1, 1, -1)

# 1-based lambda indices of the two closed forms
CLOSED_FORM_MINUS = (3, 4, 6, 8, 9, 11, 13, 14)
CLOSED_FORM_PLUS = (1, 2, 5, 7, 10, 12, 15, 16)


def lambda_state(index: int) -> dict[str, Outcome]:
    if not 1 <= index <= 16:
        raise IndexError(f"lambda index {index} out of range 1..16")
    return {o: Outcome(v) for o, v in zip(OBSERVABLES, LAMBDAS[index - 1])}


def _key(o) -> int:
    s = str(o) if isinstance(o, ObservableId) else str(o).strip()
    try:
        return OBSERVABLES.index(s)
    except ValueError:
        raise DomainError(f"unknown observable {o!r}; expected one of {OBSERVABLES}") from None


# sign of the product of each pair's values, per lambda
_PAIR_SIGNS = tuple(
    tuple(lam[_key(a)] * lam[_key(b)] for lam in LAMBDAS) for a, b in PAIRS)


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        return Fraction(v.strip())
    return Fraction(v)


class HiddenVariableModel:
    """Probability vector over the 16 deterministic assignments.

    Stored as non-negative integer weights over a common denominator.
    """

    __slots__ = ("weights", "denominator")

    def __init__(self, probabilities: Iterable):
        ps = [_frac(p) for p in probabilities]
        if len(ps) != 16:
            raise ValueError(f"expected 16 probabilities, got {len(ps)}")
        if any(p < 0 for p in ps):
            raise ValueError("probabilities must be non-negative")
        if sum(ps) != 1:
            raise ValueError(f"probabilities sum to {sum(ps)}, not 1")
        d = math.lcm(*(p.denominator for p in ps))
        self.weights = tuple(p.numerator * (d // p.denominator) for p in ps)
        self.denominator = d

    @classmethod
    def from_weights(cls, weights: Sequence[int]) -> "HiddenVariableModel":
        """Model proportional to the given non-negative integer weights."""
        w = tuple(int(v) for v in weights)
        if len(w) != 16 or any(v < 0 for v in w):
            raise ValueError("need 16 non-negative integer weights")
        total = sum(w)
        if total == 0:
            raise ValueError("weights sum to zero")
        self = object.__new__(cls)
        self.weights = w
        self.denominator = total
        return self

    @classmethod
    def point_mass(cls, index: int) -> "HiddenVariableModel":
        lambda_state(index)
        return cls.from_weights([1 if i == index - 1 else 0 for i in range(16)])

    @classmethod
    def uniform(cls) -> "HiddenVariableModel":
        return cls.from_weights([1] * 16)

    @property
    def probabilities(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(w, self.denominator) for w in self.weights)

    def p(self, index: int) -> Fraction:
        return Fraction(self.weights[index - 1], self.denominator)

    def __eq__(self, other):
        if not isinstance(other, HiddenVariableModel):
            return NotImplemented
        return all(a * other.denominator == b * self.denominator
                   for a, b in zip(self.weights, other.weights))

    def __hash__(self):
        return hash(self.probabilities)

    def __repr__(self):
        return f"HiddenVariableModel([{', '.join(str(p) for p in self.probabilities)}])"

    def to_json_list(self) -> list[str]:
        return [str(p) for p in self.probabilities]


@dataclass(frozen=True)
class CorrelationSet:
    """Values of <x_A x_B>, <x_A z_B>, <z_A x_B>, <z_A z_B>."""

    xx: Fraction
    xz: Fraction
    zx: Fraction
    zz: Fraction

    def __post_init__(self):
        for name in ("xx", "xz", "zx", "zz"):
            v = _frac(getattr(self, name))
            if not -1 <= v <= 1:
                raise ValueError(f"correlation {name} = {v} outside [-1, 1]")
            object.__setattr__(self, name, v)

    @classmethod
    def of(cls, values: Sequence) -> "CorrelationSet":
        if len(values) != 4:
            raise ValueError(f"need four correlations, got {len(values)}")
        return cls(*values)

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.xx, self.xz, self.zx, self.zz)

    def chsh(self) -> Fraction:
        return sum((s * v for s, v in zip(CHSH_SIGNS, self.as_tuple())), Fraction(0))


def marginal(model: HiddenVariableModel, assignment: Mapping) -> Fraction:
    want = [(_key(k), int(Outcome.of(v))) for k, v in assignment.items()]
    total = sum(w for w, lam in zip(model.weights, LAMBDAS)
                if all(lam[i] == v for i, v in want))
    return Fraction(total, model.denominator)


def _pair_index(pair) -> int:
    a, b = (str(o).strip() for o in pair)
    ia, ib = _key(a), _key(b)
    if not (a.endswith("_A") and b.endswith("_B")):
        raise DomainError(f"expectation needs an A observable then a B observable, got {a}, {b}")
    return PAIRS.index((OBSERVABLES[ia], OBSERVABLES[ib]))


def _numerator(model: HiddenVariableModel, k: int) -> int:
    return sum(s * w for s, w in zip(_PAIR_SIGNS[k], model.weights))


def expectation(model: HiddenVariableModel, pair) -> Fraction:
    return Fraction(_numerator(model, _pair_index(pair)), model.denominator)


def expectations(model: HiddenVariableModel) -> CorrelationSet:
    return CorrelationSet(*(Fraction(_numerator(model, k), model.denominator) for k in range(4)))


def chsh(model: HiddenVariableModel) -> Fraction:
    num = sum(s * _numerator(model, k) for k, s in enumerate(CHSH_SIGNS))
    return Fraction(num, model.denominator)


def chsh_closed_forms(model: HiddenVariableModel) -> tuple[Fraction, Fraction]:
    """``2 - 4 * (mass on CHSH = -2 states)`` and ``4 * (mass on +2 states) - 2``."""
    w, d = model.weights, model.denominator
    minus = sum(w[i - 1] for i in CLOSED_FORM_MINUS)
    plus = sum(w[i - 1] for i in CLOSED_FORM_PLUS)
    return Fraction(2 * d - 4 * minus, d), Fraction(4 * plus - 2 * d, d)


def chsh_variants(cs: CorrelationSet) -> list[Fraction]:
    """All eight CHSH combinations (odd number of minus signs)."""
    vals = cs.as_tuple()
    out = []
    for signs in itertools.product((1, -1), repeat=4):
        if signs[0] * signs[1] * signs[2] * signs[3] == -1:
            out.append(sum((s * v for s, v in zip(signs, vals)), Fraction(0)))
    return out


def satisfies_chsh(cs: CorrelationSet) -> bool:
    return all(abs(v) <= 2 for v in chsh_variants(cs))


def solve_feasibility(cs: CorrelationSet) -> Optional[HiddenVariableModel]:
    """Exact LP: the model matching ``cs`` whose smallest probability is largest.

    Variables are a common floor ``t`` and excesses ``q_i`` with ``p_i = t + q_i``.
    """
    # row 0: 16 t + sum q = 1; rows 1..4: sum_i s_ki (t + q_i) = E_k, and sum_i s_ki = 0
    A = [[16] + [1] * 16]
    for k in range(4):
        A.append([sum(_PAIR_SIGNS[k])] + list(_PAIR_SIGNS[k]))
    b = [1] + list(cs.as_tuple())
    c = [1] + [0] * 16
    res = exact_lp.solve(A, b, c)
    if res is None:
        return None
    x, _ = res
    return HiddenVariableModel([x[0] + q for q in x[1:]])


def feasible(correlations) -> Optional[HiddenVariableModel]:
    """A hidden-variable model reproducing the correlations, or None.

    The eight CHSH inequalities decide feasibility on their own for this
    scenario; the LP result is cross-checked against them.
    """
    cs = correlations if isinstance(correlations, CorrelationSet) else CorrelationSet.of(correlations)
    if not satisfies_chsh(cs):
        return None
    model = solve_feasibility(cs)
    if model is None:
        raise AssertionError(f"LP infeasible although all CHSH variants hold for {cs}")
    return model
