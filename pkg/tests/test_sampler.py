import math
import random

import pytest

from spanrule.sampler import (SamplerError, SamplerState, entropy,
                              next_example, peek_example)


def test_entropy_uniform_binary():
    assert entropy([0.5, 0.5]) == pytest.approx(math.log(2))


def test_entropy_degenerate():
    assert entropy([1.0, 0.0]) == 0.0


def test_entropy_skewed():
    assert entropy([0.9, 0.1]) == pytest.approx(0.3251, abs=1e-4)


def test_entropy_rejects_negative():
    with pytest.raises(SamplerError):
        entropy([1.2, -0.2])


def test_entropy_rejects_unnormalized():
    with pytest.raises(SamplerError):
        entropy([0.4, 0.4])


def test_next_picks_most_uncertain():
    state = SamplerState(seed=0)
    assert next_example({"a": [0.9, 0.1], "b": [0.6, 0.4]}, state) == "b"
    assert state.shown == {"b"}


def test_next_skips_shown():
    state = SamplerState(seed=0, shown={"b"})
    assert next_example({"a": [0.9, 0.1], "b": [0.6, 0.4]}, state) == "a"


def test_pool_exhausted():
    state = SamplerState(seed=0, shown={"a"})
    with pytest.raises(SamplerError, match="exhausted"):
        next_example({"a": [0.5, 0.5]}, state)


def test_uniform_tiebreak_is_seeded():
    posteriors = {f"d{i}": [0.5, 0.5] for i in range(30)}
    seq1 = []
    state = SamplerState(seed=7)
    for _ in range(10):
        seq1.append(next_example(posteriors, state))
    state2 = SamplerState(seed=7)
    seq2 = [next_example(posteriors, state2) for _ in range(10)]
    assert seq1 == seq2
    state3 = SamplerState(seed=8)
    seq3 = [next_example(posteriors, state3) for _ in range(10)]
    assert seq1 != seq3  # overwhelmingly likely under a different seed


def test_brute_force_argmax_agreement():
    rng = random.Random(42)
    for _ in range(300):
        n = rng.randint(1, 20)
        posteriors = {}
        for i in range(n):
            p = rng.random()
            posteriors[f"d{i}"] = [p, 1.0 - p]
        state = SamplerState(seed=rng.randint(0, 10**6))
        pick = peek_example(posteriors, state)
        best = max(entropy(p) for p in posteriors.values())
        assert entropy(posteriors[pick]) >= best - 1e-12


def test_peek_does_not_mutate():
    state = SamplerState(seed=1)
    posteriors = {"a": [0.5, 0.5], "b": [0.5, 0.5]}
    first = peek_example(posteriors, state)
    assert peek_example(posteriors, state) == first
    assert state.shown == set()
    assert state.draws == 0


def test_random_policy_and_state_roundtrip():
    state = SamplerState(policy="random", seed=3)
    posteriors = {f"d{i}": [0.9, 0.1] for i in range(5)}
    picks = [next_example(posteriors, state) for _ in range(3)]
    restored = SamplerState.from_dict(state.to_dict())
    assert restored == state
    assert len(set(picks)) == 3  # never re-serves a shown uid


def test_entropy_eps_policy_only_serves_pool():
    state = SamplerState(policy="entropy_eps", seed=9)
    posteriors = {"a": [0.5, 0.5], "b": [0.8, 0.2]}
    uid = next_example(posteriors, state, uncovered={"b"})
    assert uid in posteriors
