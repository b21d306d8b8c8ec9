from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ocsg.model import (
    LIMIT_OBJECTIVES,
    ModelSemanticError,
    ModelSyntaxError,
    Objective,
    OcSsg,
    PureMemorylessStrategy,
    Ssg,
    State,
    Transition,
    fix_strategies,
    oc_to_reward_ssg,
    parse_model,
    print_model,
    transition_to_state_rewards,
    validate,
)
from ocsg import oracle

from grids import random_games


def test_parse_minimal_ssg():
    game = parse_model("ssg rewards=states\nstate a owner=max reward=0\ntrans a -> a\n")
    assert isinstance(game, Ssg)
    assert game.ids() == ("a",)
    assert game.state("a").transitions == (Transition("a"),)


def test_parse_bad_probability_sum_reports_fraction():
    text = """ssg rewards=states
state r owner=rand reward=0
state x owner=rand reward=0
trans r -> x p=1/2
trans r -> r p=1/3
trans x -> x p=1/1
"""
    with pytest.raises(ModelSemanticError) as err:
        parse_model(text)
    assert "5/6" in str(err.value)


def test_parse_five_state_example(five_state_game):
    assert isinstance(five_state_game, OcSsg)
    assert len(five_state_game.states) == 5
    assert sum(len(s.transitions) for s in five_state_game.states) == 7


def test_syntax_error_has_position():
    with pytest.raises(ModelSyntaxError) as err:
        parse_model("ssg rewards=states\nstate a owner=boss reward=0\n")
    assert err.value.line == 2
    assert err.value.column > 1


@pytest.mark.parametrize(
    "line,needle",
    [
        ("trans a -> b", "dangling"),
        ("trans a -> a reward=1", "unexpected reward"),
    ],
)
def test_semantic_errors(line, needle):
    text = f"ssg rewards=states\nstate a owner=max reward=0\n{line}\n"
    with pytest.raises(ModelSemanticError) as err:
        parse_model(text)
    assert needle in str(err.value)


def test_missing_delta_rejected():
    with pytest.raises(ModelSemanticError) as err:
        parse_model("ocssg\nstate a owner=max\ntrans a -> a\n")
    assert "missing delta" in str(err.value)


def test_missing_probability_rejected():
    with pytest.raises(ModelSemanticError) as err:
        parse_model("ocssg\nstate a owner=rand\ntrans a -> a delta=0\n")
    assert "missing probability" in str(err.value)


def test_duplicate_state_rejected():
    text = "ssg rewards=states\nstate a owner=max reward=0\nstate a owner=min reward=0\ntrans a -> a\n"
    with pytest.raises(ModelSemanticError) as err:
        parse_model(text)
    assert "duplicate" in str(err.value)


def test_validate_no_successor():
    game = Ssg((State("a", "max", reward=0),), reward_location="states")
    assert any("no successor" in v for v in validate(game))


def test_validate_zero_probability_edge():
    game = Ssg(
        (
            State(
                "r",
                "rand",
                reward=0,
                transitions=(Transition("r", prob=Fraction(0)), Transition("r", prob=Fraction(1))),
            ),
        ),
        reward_location="states",
    )
    assert any("positivity" in v for v in validate(game))


def test_validate_well_formed_empty(five_state_game):
    assert validate(five_state_game) == []


def test_round_trip_fixed_examples(five_state_game, fair_walk):
    for game in (five_state_game, fair_walk):
        assert parse_model(print_model(game)) == game


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_round_trip_random_models(data):
    n = data.draw(st.integers(min_value=1, max_value=4))
    loc = data.draw(st.sampled_from(["states", "transitions", "ocssg"]))
    seed = data.draw(st.integers(min_value=0, max_value=2**32 - 1))
    game = random_games(1, sizes=(n,), seed=seed, reward_location="states" if loc == "ocssg" else loc)[0]
    if loc == "ocssg":
        game = OcSsg(
            tuple(
                State(
                    s.id,
                    s.owner,
                    transitions=tuple(
                        Transition(t.target, prob=t.prob, delta=((len(s.id) + 2 * k) % 3) - 1)
                        for k, t in enumerate(s.transitions)
                    ),
                )
                for s in game.states
            )
        )
    assert parse_model(print_model(game)) == game


def test_probabilities_printed_in_lowest_terms():
    game = Ssg(
        (
            State(
                "r",
                "rand",
                reward=0,
                transitions=(Transition("r", prob=Fraction(2, 4)), Transition("r", prob=Fraction(4, 8))),
            ),
        ),
        reward_location="states",
    )
    assert "p=1/2" in print_model(game)


def test_oc_to_reward_ssg_preserves_shape(five_state_game):
    rewards = oc_to_reward_ssg(five_state_game)
    assert rewards.reward_location == "transitions"
    assert len(rewards.states) == len(five_state_game.states)
    for before, after in zip(five_state_game.states, rewards.states):
        assert len(before.transitions) == len(after.transitions)
        for tb, ta in zip(before.transitions, after.transitions):
            assert ta.reward == tb.delta
            assert ta.delta is None


def test_oc_to_reward_appendix_rewards(five_state_game):
    rewards = oc_to_reward_ssg(five_state_game)
    v = rewards.state("v")
    assert [t.reward for t in v.transitions] == [0, -1]
    assert [t.reward for t in rewards.state("back").transitions] == [0, 1]


def test_transition_to_state_rewards_counts():
    game = oc_to_reward_ssg(parse_model("ocssg\nstate a owner=rand\ntrans a -> a p=1/1 delta=-1\n"))
    moved = transition_to_state_rewards(game)
    assert moved.reward_location == "states"
    assert len(moved.states) == 2
    aux = [s for s in moved.states if s.id != "a"][0]
    assert aux.reward == -1
    assert moved.state("a").reward == 0


def test_transition_to_state_rewards_preserves_values():
    # Exact objective-value preservation at original states, oracle on both sides.
    for game in random_games(12, sizes=(2, 3, 4), seed=5150, reward_location="transitions"):
        moved = transition_to_state_rewards(game)
        for objective in LIMIT_OBJECTIVES:
            before = oracle.enumerate_solve(game, objective).values
            after = oracle.enumerate_solve(moved, objective).values
            for sid in game.ids():
                assert after[sid] == before[sid], (sid, objective.kind)


def test_fix_strategies_substitutes_choice(five_state_game):
    chain = fix_strategies(five_state_game, min_strategy=PureMemorylessStrategy("min", {"v": 1}))
    assert chain.is_chain()
    v = chain.state("v")
    assert len(v.transitions) == 1
    assert v.transitions[0].target == "low"
    assert v.transitions[0].prob == 1


def test_objective_validation():
    with pytest.raises(ValueError):
        Objective.term(0)
    with pytest.raises(ValueError):
        Objective.reach(())
    with pytest.raises(ValueError):
        Objective("nonsense")
    assert Objective.term(3).j == 3
