"""Stage loop of the priority construction: adversaries first, then nodes from the root down"""

from __future__ import annotations

import logging
from typing import IO, Dict, List, Optional, Tuple

from .adversaries import AdversaryBinding, JournalEmission, build_bindings
from .config import RunConfig
from .core_sets import BinarySegment, ChangeKind
from .errors import ConfigError, InconsistentAxiom, JournalError
from .functionals import Role, toy_k_script
from .state import AnyState, ConstructionState, ConstructionView, NodeState, Requirement
from .strategies import Outcome, StrategyRegistry, default_registry
from .trace import DropRecord, Trace, TraceHeader

logger = logging.getLogger(__name__)


def k_schedule(config: RunConfig) -> Dict[int, List[int]]:
    """Stage -> odd elements entering K at that stage"""
    script = toy_k_script(config.k_toy_limit) if config.k_mode == "toy" else config.k_script
    schedule: Dict[int, List[int]] = {}
    for element, stage in script:
        schedule.setdefault(stage, []).append(element)
    return {stage: sorted(set(elements)) for stage, elements in schedule.items()}


class PriorityConstruction:
    """Owns the construction state and the trace; strategies act through its helpers"""

    def __init__(self, config: RunConfig, sink: Optional[IO[str]] = None,
                 registry: Optional[StrategyRegistry] = None):
        self.config = config
        self.state = ConstructionState(config.max_depth)
        self.trace = Trace(sink)
        self.strategies = registry or default_registry()
        self.bindings: List[AdversaryBinding] = build_bindings(config)
        self.k_schedule = k_schedule(config)
        self.initializations = 0
        self.drops = 0
        self.state.D.add_listener(self.trace.emit)
        self.trace.emit(TraceHeader(config.seed, config.max_depth, config.horizon))

    # -- helpers used by strategies ---------------------------------------

    def event(self, ns: NodeState, item: str, **payload):
        return self.trace.event(self.state.stage, ns.depth, ns.epoch, item, **payload)

    def change(self, x: int, kind: ChangeKind, s: int):
        return self.state.D.apply_change(x, kind, s)

    def restore(self, sigma: BinarySegment, s: int, ns: NodeState) -> List[Tuple[int, ChangeKind]]:
        changes = self.state.D.restore_to(sigma, s)
        for x, kind in changes:
            owner = self.state.agitator_owner.get(x)
            if owner is not None and kind is ChangeKind.EXTRACT:
                self.event(ns, "RMK2", d=x, owner=owner[0], x=owner[1])
        return changes

    def register_agitator(self, value: int, e: int, x: int) -> None:
        self.state.agitator_owner[value] = (e, x)

    def initialize_node(self, depth: int, s: int, cause: str) -> None:
        ns = self.state.nodes[depth]
        ns.initialize()
        self.initializations += 1
        self.event(ns, "INIT", cause=cause)

    def initialize_below(self, depth: int, s: int, cause: str) -> None:
        for deeper in range(depth + 1, self.state.max_depth):
            self.initialize_node(deeper, s, cause)

    # -- the stage loop ---------------------------------------------------

    def _apply_emissions(self, emissions, s: int) -> None:
        state = self.state
        for emission in emissions:
            if isinstance(emission, JournalEmission):
                try:
                    entry = state.w(emission.index).enumerate(emission.element, s)
                except JournalError as e:
                    self._drop(s, "W", emission.index, emission.element, "journal")
                    logger.warning(f"⚠️  Dropped W_{emission.index} enumeration: {e}")
                    continue
                if entry is not None:
                    self.trace.emit(entry)
                continue
            try:
                axiom = state.store.add_axiom(emission.role, emission.index, emission.segment, emission.x, emission.y, s)
            except InconsistentAxiom as e:
                self._drop(s, emission.role.value, emission.index, emission.x, "inconsistent")
                logger.warning(f"⚠️  Dropped axiom: {e}", extra={"structured_log": {
                    "stage": s, "role": emission.role.value, "index": emission.index, "x": emission.x}})
                continue
            if axiom.role is Role.PSI:
                state.note_number(axiom.use)
            elif axiom.role is Role.THETA:
                state.note_code(axiom.use)
            self.trace.emit(axiom)

    def _drop(self, s: int, role: str, index: int, x: int, reason: str) -> None:
        self.drops += 1
        self.trace.emit(DropRecord(s, role, index, x, reason))

    def run_stage(self, s: int) -> int:
        """Run stage s; returns the number of node actions"""
        if s < 1:
            raise ValueError(f"stages start at 1, got {s}")
        state = self.state
        state.stage = s

        for element in self.k_schedule.get(s, ()):
            entry = state.K.enumerate(element, s)
            if entry is not None:
                self.trace.emit(entry)

        view = ConstructionView(state)
        for binding in self.bindings:
            for behaviour in binding.behaviours:
                self._apply_emissions(behaviour.step_with_metrics(view, s, binding.budget), s)

        actions = 0
        depth = 0
        while depth < state.max_depth and depth < s:
            ns: AnyState = state.nodes[depth]
            strategy = self.strategies.get(ns.node.requirement)
            outcome = strategy.act_with_metrics(ns, self, s)
            actions += 1
            if ns.node.requirement is Requirement.P:
                self.event(ns, "ACT", out=outcome.value)
            else:
                self.event(ns, "ACT", out=outcome.value, ell=ns.last_ell, exp=ns.last_expansionary)
            if outcome is Outcome.STOP:
                break
            depth += 1
        return actions

    def run(self) -> "PriorityConstruction":
        logger.info(f"🚀 Running construction: depth {self.config.max_depth}, horizon {self.config.horizon}, seed {self.config.seed}")
        for s in range(1, self.config.horizon + 1):
            self.run_stage(s)
        logger.info(f"✅ Construction finished: {len(self.trace)} trace records, "
                    f"{self.initializations} initializations, {self.drops} dropped emissions")
        return self


def run_construction(config: RunConfig, sink: Optional[IO[str]] = None) -> Tuple[ConstructionState, Trace]:
    if config.horizon < 1 or config.max_depth < 1:
        raise ConfigError("horizon and maxDepth must both be at least 1")
    construction = PriorityConstruction(config, sink).run()
    return construction.state, construction.trace
