"""Exact solvers for generalized mean-payoff stochastic games and MDPs."""

from .game import (
    GameInstance,
    GameValidationError,
    MarkovChain,
    Owner,
    RewardFunction,
    StochasticGame,
    StrategyError,
    TransducerStrategy,
    validate_game,
)
from .games import (
    SizeGuardError,
    almost_sure_meansup,
    game_value_fm,
    game_value_inf_meaninf,
    value_threshold_query,
)
from .mdp import (
    mdp_value_fm,
    mdp_value_inf,
    synthesize_randomized_memoryless,
    winning_ecs_finite,
    winning_mecs_infinite,
)

__version__ = "0.1.0"

__all__ = [
    "GameInstance",
    "GameValidationError",
    "MarkovChain",
    "Owner",
    "RewardFunction",
    "SizeGuardError",
    "StochasticGame",
    "StrategyError",
    "TransducerStrategy",
    "almost_sure_meansup",
    "game_value_fm",
    "game_value_inf_meaninf",
    "mdp_value_fm",
    "mdp_value_inf",
    "synthesize_randomized_memoryless",
    "validate_game",
    "value_threshold_query",
    "winning_ecs_finite",
    "winning_mecs_infinite",
]
