"""Base adversary class and the registry of named behaviours"""

from __future__ import annotations

import logging
import uuid
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Union

from ..core_sets import BinarySegment
from ..functionals import Role
from ..state import ConstructionView

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class AxiomEmission:
    role: Role
    index: int
    segment: BinarySegment
    x: int
    y: int


@dataclass(frozen=True, slots=True)
class JournalEmission:
    index: int
    element: int


Emission = Union[AxiomEmission, JournalEmission]


class BaseAdversary(ABC):
    """
    One behaviour driving one functional (Ψ_e, Φ_e or Θ_e). step() sees the construction
    only through a ConstructionView and returns what it wants enumerated; the stage loop
    applies it. Emissions must be a function of (view, seed, stage, own history).
    """

    roles: tuple = (Role.PSI, Role.PHI, Role.THETA)

    def __init__(self, name: str, role: Role, index: int, seed: int = 0, params: Optional[Dict[str, Any]] = None):
        if role not in self.roles:
            raise ValueError(f"{name} cannot drive {role.value}")
        self.adversary_id = str(uuid.uuid4())
        self.name = name
        self.role = role
        self.index = index
        self.seed = seed
        self.params = dict(params or {})
        self.logger = logging.getLogger(f"adversary.{name}")
        self.execution_count = 0
        self.emission_count = 0

    @abstractmethod
    def step(self, view: ConstructionView, s: int, budget: int) -> List[Emission]:
        pass

    def log_execution(self, operation: str, success: bool, details: Optional[Dict] = None):
        log_data = {
            "adversary_id": self.adversary_id, "adversary_name": self.name, "role": self.role.value,
            "index": self.index, "operation": operation, "success": success, "details": details or {},
        }
        level = logging.DEBUG if success else logging.WARNING
        self.logger.log(level, f"{'✅' if success else '❌'} Adversary {self.name}[{self.index}] {operation}",
                        extra={"structured_log": log_data})

    def step_with_metrics(self, view: ConstructionView, s: int, budget: int) -> List[Emission]:
        self.execution_count += 1
        emissions = self.step(view, s, budget)[:budget]
        self.emission_count += len(emissions)
        if emissions:
            self.log_execution("step", True, {"stage": s, "emissions": len(emissions)})
        return emissions


AdversaryFactory = Callable[..., BaseAdversary]


class AdversaryRegistry:
    def __init__(self):
        self._factories: Dict[str, AdversaryFactory] = {}
        self._logger = logging.getLogger("adversary_registry")

    def register(self, name: str, factory: AdversaryFactory) -> bool:
        if not callable(factory):
            return False
        self._factories[name] = factory
        self._logger.debug(f"Registered adversary: {name}")
        return True

    def get(self, name: str) -> Optional[AdversaryFactory]:
        return self._factories.get(name)

    def list_adversaries(self) -> List[str]:
        return sorted(self._factories)

    def create(self, name: str, role: Role, index: int, seed: int, params: Dict[str, Any]) -> BaseAdversary:
        factory = self._factories.get(name)
        if factory is None:
            raise KeyError(name)
        return factory(role=role, index=index, seed=seed, params=params)


adversary_registry = AdversaryRegistry()
