"""Node strategies for the priority tree"""

from .base_strategy import BaseStrategy, Outcome, StrategyRegistry
from .n_strategy import CycleResult, NStrategy
from .p_strategy import PStrategy
from .r_strategy import RStrategy


def default_registry() -> StrategyRegistry:
    registry = StrategyRegistry()
    for strategy in (NStrategy(), RStrategy(), PStrategy()):
        registry.register(strategy)
    return registry


__all__ = [
    "BaseStrategy", "CycleResult", "NStrategy", "Outcome", "PStrategy", "RStrategy",
    "StrategyRegistry", "default_registry",
]
