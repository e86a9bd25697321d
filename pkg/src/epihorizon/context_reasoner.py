"""Checking inference chains that mix measurement contexts.

Each :class:`InferenceStep` is a conditional certainty read off one basis
expansion of a two-qubit state. A :class:`ReasoningChain` links steps by using
each conclusion as the next premise. :func:`validate_chain` rejects a chain
when one agent would have to measure two bases, or when the premises it
treats as simultaneously definite exceed the information bound.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .quantum_engine import X, Z, Basis, QubitPairState, born, certain_conditionals, hardy_state
from .toy_states import (BIPARTITE, DomainError, EpistemicState, ObservableId, Proposition,
                         _Basis, _equation, entangled_state, infer, prop, supports_counterfactual)

INCOMPATIBLE = "incompatible-contexts"
INFO_BOUND = "information-bound-exceeded"
NOT_ENTAILED = "condition-not-entailed"


@dataclass(frozen=True)
class Context:
    """Measurements actually performed: agent name -> observable."""

    measured: tuple[tuple[str, ObservableId], ...]

    def __post_init__(self):
        pairs = tuple(sorted((str(a), o if isinstance(o, ObservableId) else ObservableId.parse(o))
                             for a, o in self.measured))
        agents = [a for a, _ in pairs]
        if len(set(agents)) != len(agents):
            raise DomainError(f"an agent measures twice in one context: {pairs}")
        for _, o in pairs:
            if o.is_correlation:
                raise DomainError(f"contexts hold single-qubit measurements, got {o}")
        qubits: dict[str, str] = {}
        for _, o in pairs:
            if qubits.setdefault(o.scope, o.axis) != o.axis:
                raise DomainError(f"qubit {o.scope} measured in two bases in one context")
        object.__setattr__(self, "measured", pairs)

    @classmethod
    def of(cls, mapping: dict) -> "Context":
        return cls(tuple(mapping.items()))

    def agents(self) -> dict[str, ObservableId]:
        return dict(self.measured)

    def to_dict(self) -> dict:
        return {a: str(o) for a, o in self.measured}


def compatible_contexts(c1: Context, c2: Context) -> bool:
    """No agent is assigned two different observables."""
    a1, a2 = c1.agents(), c2.agents()
    return all(a2[a] == o for a, o in a1.items() if a in a2)


@dataclass(frozen=True)
class InferenceStep:
    id: str
    context: Context
    premise: Proposition
    conclusion: Proposition
    source: tuple[Basis, Basis]

    def __post_init__(self):
        object.__setattr__(self, "premise", prop(self.premise))
        object.__setattr__(self, "conclusion", prop(self.conclusion))
        if not self.premise.is_direct:
            raise DomainError(f"step {self.id}: premise must be unconditioned")
        src = self.source
        if isinstance(src, str):
            src = src.split(",")
        try:
            a, b = src
            src = (a if isinstance(a, Basis) else Basis.parse(str(a)),
                   b if isinstance(b, Basis) else Basis.parse(str(b)))
        except (TypeError, ValueError) as exc:
            raise DomainError(f"step {self.id}: malformed source {self.source!r}: {exc}") from None
        object.__setattr__(self, "source", src)

    def to_dict(self) -> dict:
        return {"id": self.id, "context": self.context.to_dict(), "premise": str(self.premise),
                "conclusion": str(self.conclusion), "source": [str(b) for b in self.source]}

    @classmethod
    def from_dict(cls, d: dict) -> "InferenceStep":
        for key in ("id", "context", "premise", "conclusion", "source"):
            if key not in d:
                raise DomainError(f"step is missing field {key!r}")
        ctx = {}
        for agent, o in d["context"].items():
            # "A": "x" means agent A measures x on qubit A
            ctx[agent] = ObservableId(o, agent) if o in ("x", "z") else ObservableId.parse(o)
        return cls(str(d["id"]), Context.of(ctx), prop(d["premise"]), prop(d["conclusion"]),
                   d["source"])


@dataclass(frozen=True)
class ReasoningChain:
    steps: tuple[InferenceStep, ...]
    fused_conclusion: Optional[Proposition] = None

    def __post_init__(self):
        steps = tuple(self.steps)
        object.__setattr__(self, "steps", steps)
        if self.fused_conclusion is None and steps:
            fused = steps[-1].conclusion.unconditioned().given(steps[0].premise)
            object.__setattr__(self, "fused_conclusion", fused)
        elif self.fused_conclusion is not None:
            object.__setattr__(self, "fused_conclusion", prop(self.fused_conclusion))


@dataclass(frozen=True)
class Violation:
    steps: tuple[str, str]
    reason: str
    # further violations found by the later checks, in check order
    also: tuple[tuple[tuple[str, str], str], ...] = ()

    @property
    def reasons(self) -> tuple[str, ...]:
        return (self.reason,) + tuple(r for _, r in self.also)


@dataclass(frozen=True)
class Verdict:
    valid: bool
    violation: Optional[Violation] = None
    detail: str = ""

    def __post_init__(self):
        if self.valid != (self.violation is None):
            raise ValueError("a verdict is valid exactly when it has no violation")

    def to_dict(self) -> dict:
        d = {"valid": self.valid, "detail": self.detail}
        if self.violation is not None:
            d["violation"] = {"steps": list(self.violation.steps),
                              "reason": self.violation.reason,
                              "also": [{"steps": list(s), "reason": r}
                                       for s, r in self.violation.also]}
        return d


VALID = Verdict(True)


def validate_step(step: InferenceStep, engine_state: QubitPairState) -> Verdict:
    if step.conclusion.condition != (step.premise.observable, step.premise.value):
        return Verdict(False, Violation((step.id, step.id), NOT_ENTAILED),
                       f"{step.conclusion} is not conditioned on the premise {step.premise}")
    try:
        certain = certain_conditionals(engine_state, step.source)
    except ValueError as exc:
        raise DomainError(f"step {step.id}: {exc}") from None
    if step.conclusion in certain:
        return VALID
    dist = born(engine_state, step.source)
    return Verdict(False, Violation((step.id, step.id), NOT_ENTAILED),
                   f"{step.conclusion} is not certain in the "
                   f"{step.source[0]}{step.source[1]} expansion "
                   f"(certain: {', '.join(map(str, certain)) or 'none'}; "
                   f"outcome probabilities {tuple(round(p, 12) for p in dist.probabilities)})")


def _premise_count(premises: list[Proposition]) -> int:
    """Independent bits needed to hold every premise as definite at once."""
    b = _Basis()
    count = 0
    for p in premises:
        m, rhs = b.reduce(*_equation(BIPARTITE, p))
        if m:
            b.rows[m.bit_length() - 1] = (m, rhs)
            count += 1
    return count


def validate_chain(chain: ReasoningChain, engine_state: QubitPairState, info_bound: int = 2) -> Verdict:
    steps = chain.steps
    if not steps:
        raise DomainError("cannot validate an empty chain")
    ids = [s.id for s in steps]
    if len(set(ids)) != len(ids):
        raise DomainError(f"duplicate step ids in {ids}")

    for s in steps:
        v = validate_step(s, engine_state)
        if not v.valid:
            return v

    # linkage: each conclusion becomes the next premise
    for prev, nxt in zip(steps, steps[1:]):
        if prev.conclusion.unconditioned() != nxt.premise:
            return Verdict(False, Violation((prev.id, nxt.id), NOT_ENTAILED),
                           f"{nxt.id} assumes {nxt.premise}, but {prev.id} concludes {prev.conclusion}")
    expected = steps[-1].conclusion.unconditioned().given(steps[0].premise)
    if chain.fused_conclusion != expected:
        return Verdict(False, Violation((steps[0].id, steps[-1].id), NOT_ENTAILED),
                       f"the chain yields {expected}, not {chain.fused_conclusion}")

    found: list[tuple[tuple[str, str], str, str]] = []

    # (a) contexts of all fused steps must be jointly realisable
    for j in range(len(steps)):
        hit = next((i for i in range(j) if not compatible_contexts(steps[i].context, steps[j].context)),
                   None)
        if hit is not None:
            clash = [a for a, o in steps[hit].context.agents().items()
                     if a in steps[j].context.agents() and steps[j].context.agents()[a] != o]
            found.append(((steps[hit].id, steps[j].id), INCOMPATIBLE,
                          f"agent {clash[0]} measures {steps[hit].context.agents()[clash[0]]} in "
                          f"{steps[hit].id} but {steps[j].context.agents()[clash[0]]} in {steps[j].id}"))
            break

    # (b) premises the chain treats as definite together must fit the bound
    premises: list[Proposition] = []
    origin: list[str] = []
    for s in steps:
        if s.premise not in premises:
            premises.append(s.premise)
            origin.append(s.id)
        n = _premise_count(premises)
        if n > info_bound:
            first = next((origin[i] for i, p in enumerate(premises)
                          if p.observable.scope == s.premise.observable.scope
                          and p.observable != s.premise.observable), origin[0])
            found.append(((first, s.id), INFO_BOUND,
                          f"{s.id} needs {', '.join(map(str, premises))} definite at once: "
                          f"{n} bits, but one horizon holds at most {info_bound}"))
            break

    if not found:
        return VALID
    (pair, reason, detail), rest = found[0], found[1:]
    return Verdict(False, Violation(pair, reason, tuple((p, r) for p, r, _ in rest)),
                   "; ".join(d for _, _, d in found))


def parse_chain(data) -> tuple[ReasoningChain, int]:
    """Chain file: a list of steps, or {"steps": [...], "fused_conclusion"?, "info_bound"?}."""
    if isinstance(data, str):
        data = json.loads(data)
    bound = 2
    fused = None
    if isinstance(data, dict):
        bound = int(data.get("info_bound", 2))
        fused = data.get("fused_conclusion")
        data = data.get("steps")
    if not isinstance(data, list):
        raise DomainError("chain must be a JSON list of steps")
    steps = []
    for i, d in enumerate(data):
        try:
            steps.append(InferenceStep.from_dict(d))
        except (DomainError, ValueError, TypeError, AttributeError) as exc:
            raise DomainError(f"step {i}: {exc}") from None
    return ReasoningChain(tuple(steps), prop(fused) if fused else None), bound


# --- the three worked arguments ---------------------------------------------

def _ctx(**agents: str) -> Context:
    return Context.of({a: ObservableId.parse(o) for a, o in agents.items()})


def hardy_chain() -> ReasoningChain:
    """Steps (i)-(iii): x_A^- gives z_B^-, which gives z_A^+, which gives x_B^+.

    In step (ii) A's z outcome is counterfactual, so only B's measurement is
    part of that context.
    """
    return ReasoningChain((
        InferenceStep("i", _ctx(A="x_A", B="z_B"), prop("x_A^-"), prop("z_B^-|x_A^-"), (X, Z)),
        InferenceStep("ii", _ctx(B="z_B"), prop("z_B^-"), prop("z_A^+|z_B^-"), (Z, Z)),
        InferenceStep("iii", _ctx(A="z_A", B="x_B"), prop("z_A^+"), prop("x_B^+|z_A^+"), (Z, X)),
    ), prop("x_B^+|x_A^-"))


def fr_chain() -> ReasoningChain:
    """A sees -1, so F_B saw -1, so F_A saw +1, so B will see +1.

    The friends measure z on their qubits; A and B measure x on the
    friends' labs, which is the x basis of the same qubits.
    """
    return ReasoningChain((
        InferenceStep("A->F_B", _ctx(A="x_A", F_B="z_B"), prop("x_A^-"), prop("z_B^-|x_A^-"), (X, Z)),
        InferenceStep("F_B->F_A", _ctx(F_B="z_B", F_A="z_A"), prop("z_B^-"), prop("z_A^+|z_B^-"), (Z, Z)),
        InferenceStep("F_A->B", _ctx(F_A="z_A", B="x_B"), prop("z_A^+"), prop("x_B^+|z_A^+"), (Z, X)),
    ), prop("x_B^+|x_A^-"))


@dataclass
class Trace:
    name: str
    lines: list[str] = field(default_factory=list)
    steps: list[dict] = field(default_factory=list)
    step_verdicts: list[Verdict] = field(default_factory=list)
    chain_verdict: Optional[Verdict] = None
    facts: dict = field(default_factory=dict)

    def say(self, line: str) -> None:
        self.lines.append(line)

    def to_dict(self) -> dict:
        return {"name": self.name, "lines": self.lines, "steps": self.steps,
                "step_verdicts": [v.to_dict() for v in self.step_verdicts],
                "chain_verdict": self.chain_verdict.to_dict() if self.chain_verdict else None,
                "facts": self.facts}


def _exact_born(p: float) -> str:
    return str(Fraction(p).limit_denominator(1000))


def _run_chain(trace: Trace, chain: ReasoningChain, state: QubitPairState, bound: int = 2) -> None:
    for s in chain.steps:
        v = validate_step(s, state)
        trace.steps.append(s.to_dict())
        trace.step_verdicts.append(v)
        trace.say(f"step {s.id}: {s.premise} => {s.conclusion} "
                  f"[{s.source[0]}{s.source[1]} expansion] -> {'valid' if v.valid else 'INVALID'}")
    verdict = validate_chain(chain, state, bound)
    trace.chain_verdict = verdict
    trace.say(f"fused claim {chain.fused_conclusion}: "
              + ("valid" if verdict.valid else
                 f"rejected ({', '.join(verdict.violation.reasons)} at "
                 f"{verdict.violation.steps[0]}/{verdict.violation.steps[1]}): {verdict.detail}"))
    p = born(state, (X, X)).p(-1, -1)
    trace.facts["p_x_minus_x_minus"] = p
    trace.facts["p_x_minus_x_minus_exact"] = _exact_born(p)
    trace.say(f"Born rule: P(x_A^-, x_B^-) = {_exact_born(p)} ({p:.12f})")


def hardy_demo() -> Trace:
    t = Trace("hardy")
    _run_chain(t, hardy_chain(), hardy_state())
    return t


def fr_demo() -> Trace:
    t = Trace("fr")
    t.say("friends F_A, F_B measure z; A, B measure x on the labs; "
          "each agent's horizon holds at most two bits")
    _run_chain(t, fr_chain(), hardy_state())
    return t


def epr_demo() -> Trace:
    t = Trace("epr")
    s0 = entangled_state()
    known = {o: infer(s0, ObservableId.parse(o)) for o in ("x_A", "x_B")}
    t.say(f"start {s0}: " + ", ".join(f"{o} is {'undetermined' if v is None else v.symbol()}"
                                       for o, v in known.items()))
    conditional = EpistemicState.bipartite("x_A^+", "x_AB^+")
    direct = EpistemicState.bipartite("x_A^+", "x_B^-")
    t.say(f"after A measures x_A = +1: {conditional}, read as "
          f"{', '.join(map(str, conditional.conditionals()))}")
    cf_conditional = supports_counterfactual(conditional, "x_A^+", "x_B^-|x_A^+")
    cf_direct = supports_counterfactual(direct, "x_A^+", "x_B^-")
    t.facts["counterfactual_conditional_state"] = cf_conditional
    t.facts["counterfactual_direct_state"] = cf_direct
    t.say(f"{conditional}: varying x_A^+ keeps x_B^-|x_A^+ -> {cf_conditional}")
    t.say(f"{direct}: varying x_A^+ keeps x_B^- -> {cf_direct}")
    # the EPR step appeals to both conditionals at once
    both = [prop("x_A^+"), prop("z_A^+")]
    n = _premise_count(both + [prop("x_B^-|x_A^+"), prop("z_B^-|z_A^+")])
    t.facts["bits_needed_for_both_conditionals"] = n
    t.say(f"holding x_B^-|x_A^+ and z_B^-|z_A^+ together needs {n} bits (> 2)")
    return t
