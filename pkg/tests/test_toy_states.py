import itertools
import random

import numpy as np
import pytest

from epihorizon.observable_algebra import MINUS, PLUS
from epihorizon.toy_states import (DomainError, EpistemicState, ObservableId, Proposition, compatible,
                                   entangled_state, infer, measure, obs, prop,
                                   supports_counterfactual)

BIPARTITE_OBS = [obs(s) for s in ("x_A", "x_B", "x_AB", "z_A", "z_B", "z_AB")]


class FixedDraw:
    """Randomness source whose draws decide +1 (< 0.5) or -1."""

    def __init__(self, *outcomes):
        self.values = [0.0 if o > 0 else 0.9 for o in outcomes]

    def random(self):
        return self.values.pop(0)


def brute_force_infer(state, o):
    """Oracle: enumerate all assignments of the elementary bits."""
    names = ["x", "y", "z"] if state.system == "single" else ["x_A", "x_B", "z_A", "z_B"]

    def value(assign, ob):
        if ob.scope == "AB":
            a, b = assign[f"{ob.axis}_A"], assign[f"{ob.axis}_B"]
            return 1 if a != b else -1
        return assign[ob.axis] if state.system == "single" else assign[str(ob)]

    seen = set()
    for vals in itertools.product((1, -1), repeat=len(names)):
        assign = dict(zip(names, vals))
        ok = True
        for p in state.propositions:
            if p.condition is None:
                ok &= value(assign, p.observable) == p.value
            else:
                # same-axis conditional read as its correlation bit
                c_obs, c_val = p.condition
                ok &= (value(assign, p.observable) * value(assign, c_obs)
                       == int(p.value) * int(c_val))
        if ok:
            seen.add(value(assign, o))
    assert seen, "state has no model"
    return seen.pop() if len(seen) == 1 else None


def test_parse_roundtrip():
    p = prop("x_B^-|x_A^+")
    assert p.observable == obs("x_B") and p.value is MINUS
    assert p.condition == (obs("x_A"), PLUS)
    assert str(p) == "x_B^-|x_A^+"
    assert Proposition.from_dict(p.to_dict()) == p
    with pytest.raises(DomainError):
        prop("w_A^+")


def test_infer_examples():
    assert infer(EpistemicState.bipartite("z_B^+", "z_AB^+"), obs("z_A")) is MINUS
    assert infer(EpistemicState.bipartite("x_AB^+", "z_AB^+"), obs("x_A")) is None
    assert infer(EpistemicState.bipartite("x_A^+"), obs("x_A")) is PLUS


def test_infer_scope_error():
    with pytest.raises(DomainError):
        infer(EpistemicState.single("z_A^+"), obs("x_B"))
    with pytest.raises(DomainError):
        infer(EpistemicState.single("z_A^+"), obs("x_AB"))


@pytest.mark.parametrize("props", [
    (), ("x_A^+",), ("x_AB^+", "z_AB^+"), ("z_B^-", "z_AB^+"), ("x_A^+", "z_B^-"),
    ("x_A^+", "x_B^-|x_A^+"), ("x_A^-", "x_AB^-"), ("z_AB^-", "x_B^+"),
])
def test_infer_matches_enumeration(props):
    state = EpistemicState.bipartite(*props)
    for o in BIPARTITE_OBS:
        assert infer(state, o) == brute_force_infer(state, o)


def test_state_invariants_rejected():
    with pytest.raises(DomainError):
        EpistemicState.bipartite("x_A^+", "z_B^+", "x_AB^+")  # three bits
    with pytest.raises(DomainError):
        EpistemicState.bipartite("x_A^+", "z_A^+")  # two axes on A
    with pytest.raises(DomainError):
        EpistemicState.bipartite("x_A^+", "x_B^+", "x_AB^+")  # x_AB must be -1
    with pytest.raises(DomainError):
        EpistemicState.single("x_A^+", "z_A^+")
    # a consistent but redundant triple is only two independent bits
    assert EpistemicState.bipartite("x_A^+", "x_B^+", "x_AB^-").info_count == 2


def test_conditional_rewrite_has_same_information():
    a = EpistemicState.bipartite("x_A^+", "x_AB^+")
    b = EpistemicState.bipartite("x_A^+", "x_B^-|x_A^+")
    assert a.info_count == b.info_count == 2
    assert a.definite() == b.definite()
    assert a.conditionals() == [prop("x_B^-|x_A^+")]


def test_measure_destroys_x_correlation():
    rec = measure(entangled_state(), obs("z_B"), FixedDraw(+1))
    assert not rec.forced
    assert rec.post_state.propositions == (prop("z_AB^+"), prop("z_B^+"))
    assert set(rec.post_state.propositions) == {prop("z_B^+"), prop("z_AB^+")}
    assert infer(rec.post_state, obs("z_A")) is MINUS
    assert infer(rec.post_state, obs("x_AB")) is None


def test_measure_forced():
    s = EpistemicState.bipartite("x_A^+", "x_AB^+")
    rec = measure(s, obs("x_A"), FixedDraw())
    assert rec.forced and rec.outcome is PLUS and rec.post_state == s


def test_measure_single_system_uniform():
    # 10^5 independent draws, frequency of +1 within 0.5 +- 0.01
    rng = np.random.default_rng(2024)
    s = EpistemicState.single("z_A^+")
    plus = 0
    n = 100_000
    for _ in range(n):
        rec = measure(s, obs("x_A"), rng)
        assert rec.post_state.propositions == (Proposition(obs("x_A"), rec.outcome),)
        plus += rec.outcome is PLUS
    assert abs(plus / n - 0.5) <= 0.01


def test_measure_seeded_outcome_is_reproducible():
    s = EpistemicState.single("z_A^+")
    outs = [measure(s, obs("x_A"), np.random.default_rng(seed)).outcome for seed in range(200)]
    again = [measure(s, obs("x_A"), np.random.default_rng(seed)).outcome for seed in range(200)]
    assert outs == again
    assert {PLUS, MINUS} == set(outs)


def test_measure_accepts_stdlib_random():
    rec = measure(entangled_state(), obs("x_A"), random.Random(3))
    assert rec.post_state.info_count == 2


def test_y_axis_single_only():
    s = EpistemicState.single("y_A^+")
    assert infer(s, obs("y_A")) is PLUS
    assert infer(s, obs("x_A")) is None
    with pytest.raises(DomainError):
        ObservableId("y", "B")
    with pytest.raises(DomainError):
        infer(entangled_state(), obs("y_A"))


def test_compatibility_relation():
    assert compatible(obs("z_B"), obs("z_AB"))
    assert not compatible(obs("z_B"), obs("x_AB"))
    assert compatible(obs("x_AB"), obs("z_AB"))
    assert compatible(obs("x_A"), obs("z_B"))
    assert not compatible(obs("x_A"), obs("z_A"))


def test_entangled_state():
    s = entangled_state()
    assert len(s.propositions) == 2
    assert infer(s, obs("x_A")) is None


@pytest.mark.parametrize("seed", range(50))
def test_entangled_z_measurement_anticorrelates(seed):
    rec = measure(entangled_state(), obs("z_B"), np.random.default_rng(seed))
    post = rec.post_state
    assert infer(post, obs("z_A")) == rec.outcome.flip()
    for o in ("x_A", "x_B", "x_AB"):
        assert infer(post, obs(o)) is None


def test_random_trajectories_respect_bound_and_idempotence():
    rng = np.random.default_rng(11)
    choices = BIPARTITE_OBS
    for _ in range(300):
        state = entangled_state()
        for _ in range(30):
            o = choices[rng.integers(len(choices))]
            rec = measure(state, o, rng)
            post = rec.post_state
            assert post.info_count <= 2
            again = measure(post, o, rng)
            assert again.forced and again.outcome == rec.outcome and again.post_state == post
            vals = [infer(post, obs(n)) for n in ("x_A", "x_B", "x_AB")]
            if None not in vals:
                assert vals[2] == (PLUS if vals[0] != vals[1] else MINUS)
            state = post


def test_supports_counterfactual():
    assert supports_counterfactual(EpistemicState.bipartite("x_A^+", "x_B^-"), "x_A^+", "x_B^-")
    assert not supports_counterfactual(EpistemicState.bipartite("x_A^+", "x_AB^+"), "x_A^+",
                                       "x_B^-|x_A^+")
    assert not supports_counterfactual(EpistemicState.bipartite("x_A^+", "x_AB^+"), "x_A^+", "x_B^-")
    assert not supports_counterfactual(EpistemicState.bipartite("x_A^+"), "x_A^+", "x_A^+")
    with pytest.raises(DomainError):
        supports_counterfactual(EpistemicState.bipartite("x_A^+"), "x_A^+", "z_B^+")


def test_state_json_roundtrip():
    s = EpistemicState.bipartite("x_A^+", "x_B^-|x_A^+")
    assert EpistemicState.from_dict(s.to_dict()) == s
    assert s.to_dict() == {"system": "bipartite", "propositions": [
        {"observable": "x_A", "value": 1},
        {"observable": "x_B", "value": -1, "condition": {"observable": "x_A", "value": 1}}]}
