"""Base strategy class shared by the P, R and N node strategies"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from enum import Enum
from typing import TYPE_CHECKING, Dict, List, Optional

from ..functionals import is_expansionary
from ..state import NodeState, Requirement

if TYPE_CHECKING:
    from ..construction import PriorityConstruction

logger = logging.getLogger(__name__)


class Outcome(str, Enum):
    CONTINUE = "cont"
    STOP = "stop"


class BaseStrategy(ABC):
    requirement: Requirement

    def __init__(self, name: str):
        self.name = name
        self.logger = logging.getLogger(f"strategy.{name}")
        self.execution_count = 0
        self.stop_count = 0

    @abstractmethod
    def act(self, ns: NodeState, ctx: "PriorityConstruction", s: int) -> Outcome:
        pass

    def act_with_metrics(self, ns: NodeState, ctx: "PriorityConstruction", s: int) -> Outcome:
        self.execution_count += 1
        outcome = self.act(ns, ctx, s)
        if outcome is Outcome.STOP:
            self.stop_count += 1
        return outcome

    def observe_length(self, ns: NodeState, ell: Optional[int]) -> bool:
        """Record ℓ for this α-stage; expansionary values join the node's history"""
        expansionary = is_expansionary(ell, ns.ell_history)
        ns.last_ell = ell
        ns.last_expansionary = expansionary
        if expansionary:
            ns.ell_history.append(ell)
        return expansionary

    def log_execution(self, operation: str, success: bool, details: Optional[Dict] = None):
        log_data = {"strategy": self.name, "operation": operation, "success": success, "details": details or {}}
        level = logging.DEBUG if success else logging.WARNING
        self.logger.log(level, f"{'✅' if success else '⚠️'} Strategy {self.name} {operation}",
                        extra={"structured_log": log_data})


class StrategyRegistry:
    def __init__(self):
        self._strategies: Dict[Requirement, BaseStrategy] = {}
        self._logger = logging.getLogger("strategy_registry")

    def register(self, strategy: BaseStrategy) -> bool:
        if isinstance(strategy, BaseStrategy):
            self._strategies[strategy.requirement] = strategy
            self._logger.debug(f"Registered strategy: {strategy.name}")
            return True
        return False

    def get(self, requirement: Requirement) -> Optional[BaseStrategy]:
        return self._strategies.get(requirement)

    def list_strategies(self) -> List[str]:
        return [s.name for s in self._strategies.values()]
