from fractions import Fraction

import pytest

from ocsg import chain as chain_mod
from ocsg import oracle, ssg
from ocsg.model import (
    LIMINF_MINUS_INF,
    LIMINF_PLUS_INF,
    LIMIT_OBJECTIVES,
    MEAN_GT,
    PureMemorylessStrategy,
    Ssg,
    State,
    Transition,
    parse_model,
)
from ocsg.reduce import condon_to_limit

from grids import random_games

FAIR_COIN_CONDON = parse_model(
    "ssg rewards=states\n"
    "state s owner=rand reward=0\nstate t owner=rand reward=0\nstate u owner=rand reward=0\n"
    "trans s -> t p=1/2\ntrans s -> u p=1/2\ntrans t -> t p=1/1\ntrans u -> u p=1/1\n"
)


def test_best_response_on_player_free_game_is_mdp_solve():
    game = parse_model(
        "ssg rewards=transitions\nstate s owner=rand\ntrans s -> s p=1/1 reward=-1\n"
    )
    result = ssg.best_response(game, PureMemorylessStrategy("min", {}), LIMINF_MINUS_INF)
    assert result.values == {"s": 1}


def test_best_response_appendix_min_back(five_state_game):
    from ocsg.model import oc_to_reward_ssg

    game = oc_to_reward_ssg(five_state_game)
    fixed = PureMemorylessStrategy("min", {"v": 0})  # v -> back
    result = ssg.best_response(game, fixed, LIMINF_MINUS_INF)
    assert result.values["v"] == 1


def test_best_response_round_trip_stabilises_on_two_state_games():
    for game in random_games(20, sizes=(2,), seed=246):
        if not game.owner_ids("min"):
            continue
        pi0 = PureMemorylessStrategy("min", {sid: 0 for sid in game.owner_ids("min")})
        r1 = ssg.best_response(game, pi0, LIMINF_MINUS_INF)
        sigma = r1.witness_max or PureMemorylessStrategy("max", {})
        r2 = ssg.best_response(game, sigma, LIMINF_MINUS_INF)
        pi1 = r2.witness_min or pi0
        r3 = ssg.best_response(game, pi1, LIMINF_MINUS_INF)
        sigma2 = r3.witness_max or sigma
        r4 = ssg.best_response(game, sigma2, LIMINF_MINUS_INF)
        assert r4.values == r3.values


def test_player_free_game_equals_chain_tail_value():
    game = parse_model(
        "ssg rewards=transitions\nstate a owner=rand\nstate b owner=rand\n"
        "trans a -> b p=1/2 reward=1\ntrans a -> a p=1/2 reward=-1\ntrans b -> b p=1/1 reward=-1\n"
    )
    solve = ssg.solve_limit_ssg(game, LIMINF_MINUS_INF)
    assert solve.result.values == chain_mod.chain_tail_value(game, LIMINF_MINUS_INF)


def test_condon_fair_coin_limit_values():
    reduced = condon_to_limit(FAIR_COIN_CONDON, "s", "t", "u")
    minus = ssg.solve_limit_ssg(reduced, LIMINF_MINUS_INF).result.values["s"]
    plus = ssg.solve_limit_ssg(reduced, LIMINF_PLUS_INF).result.values["s"]
    assert minus == 1  # reach-t value 1/2 >= 1/2
    assert plus == 0  # reach-t' value 1/2 is not > 1/2


def test_solve_matches_oracle_with_mixed_owners():
    for game in random_games(40, sizes=(3, 4), seed=10101):
        for objective in LIMIT_OBJECTIVES:
            solve = ssg.solve_limit_ssg(game, objective)
            reference = oracle.enumerate_solve(game, objective)
            assert solve.result.values == reference.values, objective.kind


def test_mutual_best_response_certificate():
    for game in random_games(10, sizes=(3,), seed=20202):
        for objective in (LIMINF_MINUS_INF, MEAN_GT):
            solve = ssg.solve_limit_ssg(game, objective)
            against_min = ssg.best_response(game, solve.min_witness, objective)
            against_max = ssg.best_response(game, solve.max_witness, objective)
            assert against_min.values == solve.result.values
            assert against_max.values == solve.result.values


def test_values_are_rational_in_unit_interval():
    for game in random_games(10, sizes=(4,), seed=30303):
        solve = ssg.solve_limit_ssg(game, LIMINF_MINUS_INF)
        for value in solve.result.values.values():
            assert isinstance(value, Fraction)
            assert 0 <= value <= 1


def _with_extra_edge(game, sid, target):
    states = []
    for s in game.states:
        if s.id != sid:
            states.append(s)
            continue
        states.append(State(s.id, s.owner, reward=s.reward, transitions=s.transitions + (Transition(target),)))
    return Ssg(tuple(states), reward_location=game.reward_location)


def test_edge_monotonicity():
    # Extra options help Max and hurt Min, never the other way around.
    for game in random_games(12, sizes=(3,), seed=40404):
        base = ssg.solve_limit_ssg(game, LIMINF_MINUS_INF).result.values
        for sid in game.controlled_ids():
            owner = game.state(sid).owner
            for target in game.ids():
                richer = _with_extra_edge(game, sid, target)
                values = ssg.solve_limit_ssg(richer, LIMINF_MINUS_INF).result.values
                for state_id in game.ids():
                    if owner == "max":
                        assert values[state_id] >= base[state_id]
                    else:
                        assert values[state_id] <= base[state_id]


def test_decide_threshold_edges():
    game = FAIR_COIN_CONDON
    reduced = condon_to_limit(game, "s", "t", "u")
    assert ssg.decide_threshold(reduced, LIMINF_MINUS_INF, "s", Fraction(0), ">=") is True
    assert ssg.decide_threshold(reduced, LIMINF_MINUS_INF, "s", Fraction(1), ">") is False
    assert ssg.decide_threshold(reduced, LIMINF_MINUS_INF, "s", Fraction(1, 2), ">") is True


def test_decide_threshold_validates_input():
    with pytest.raises(ValueError):
        ssg.decide_threshold(FAIR_COIN_CONDON, LIMINF_MINUS_INF, "s", Fraction(2), ">")
    with pytest.raises(ValueError):
        ssg.decide_threshold(FAIR_COIN_CONDON, LIMINF_MINUS_INF, "s", Fraction(1, 2), "<")


def _random_rough_game(rng, n):
    # Probabilities with ragged denominators, rewards on transitions.
    ids = [chr(ord("a") + i) for i in range(n)]
    states = []
    for sid in ids:
        owner = rng.choice(("max", "min", "rand"))
        width = rng.choice((1, 2, 3))
        targets = [rng.choice(ids) for _ in range(width)] if owner == "rand" else rng.sample(ids, min(width, n))
        if owner == "rand":
            weights = [rng.randint(1, 6) for _ in targets]
            total = sum(weights)
            probs = [Fraction(w, total) for w in weights]
        else:
            probs = [None] * len(targets)
        trans = tuple(
            Transition(t, prob=p, reward=rng.choice((-1, 0, 1))) for t, p in zip(targets, probs)
        )
        states.append(State(sid, owner, transitions=trans))
    return Ssg(tuple(states), reward_location="transitions")


def test_solve_matches_oracle_off_grid_probabilities():
    import random

    rng = random.Random(90210)
    for _ in range(25):
        game = _random_rough_game(rng, rng.choice((3, 4)))
        for objective in LIMIT_OBJECTIVES:
            solve = ssg.solve_limit_ssg(game, objective)
            reference = oracle.enumerate_solve(game, objective)
            assert solve.result.values == reference.values, objective.kind


def test_enumeration_and_improvement_agree_when_both_run():
    # solve_limit_ssg already asserts agreement internally on small games;
    # spot-check the returned method labels stay sane.
    game = random_games(1, sizes=(3,), seed=50505)[0]
    solve = ssg.solve_limit_ssg(game, LIMINF_MINUS_INF)
    assert solve.method in ("improvement", "enumeration")
