"""Exact solvers for one-counter and reward-labelled simple stochastic games."""

from .model import (
    LIMINF_GT_MINUS_INF,
    LIMINF_LT_PLUS_INF,
    LIMINF_MINUS_INF,
    LIMINF_PLUS_INF,
    LIMIT_OBJECTIVES,
    MEAN_GT,
    MEAN_LEQ,
    FiniteMemoryStrategy,
    Objective,
    OcSsg,
    PureMemorylessStrategy,
    SolveResult,
    Ssg,
    State,
    Transition,
    ModelError,
    ModelSemanticError,
    ModelSyntaxError,
    fix_strategies,
    oc_to_reward_ssg,
    parse_model,
    print_model,
    transition_to_state_rewards,
    validate,
)

__all__ = [
    "FiniteMemoryStrategy",
    "LIMINF_GT_MINUS_INF",
    "LIMINF_LT_PLUS_INF",
    "LIMINF_MINUS_INF",
    "LIMINF_PLUS_INF",
    "LIMIT_OBJECTIVES",
    "MEAN_GT",
    "MEAN_LEQ",
    "ModelError",
    "ModelSemanticError",
    "ModelSyntaxError",
    "Objective",
    "OcSsg",
    "PureMemorylessStrategy",
    "SolveResult",
    "Ssg",
    "State",
    "Transition",
    "fix_strategies",
    "oc_to_reward_ssg",
    "parse_model",
    "print_model",
    "transition_to_state_rewards",
    "validate",
]
