"""Silent, laggard and scripted behaviours"""

from __future__ import annotations

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..functionals import Role
from ..state import ConstructionView
from .base_adversary import AxiomEmission, BaseAdversary, Emission, JournalEmission
from .faithful import FAITHFUL


class SilentAdversary(BaseAdversary):
    def __init__(self, role: Role = Role.PSI, index: int = 0, seed: int = 0, params: Optional[Dict[str, Any]] = None):
        super().__init__("silent", role, index, seed, params)

    def step(self, view: ConstructionView, s: int, budget: int) -> List[Emission]:
        return []


class LaggardAdversary(BaseAdversary):
    """The faithful behaviour for its role, woken only at stages divisible by `every`"""

    def __init__(self, role: Role = Role.PSI, index: int = 0, seed: int = 0, params: Optional[Dict[str, Any]] = None):
        super().__init__(f"laggard-{role.value.lower()}", role, index, seed, params)
        self.every = max(1, int(self.params.get("every", 3)))
        self.inner = FAITHFUL[role](role=role, index=index, seed=seed, params=params)

    def step(self, view: ConstructionView, s: int, budget: int) -> List[Emission]:
        if s % self.every:
            return []
        return self.inner.step(view, s, budget)


class ScriptStep(BaseModel):
    """
    One scheduled move. An axiom step sends inputs x..x+span-1 to y on the live oracle
    cut at `use` (D for Ψ, W_e for Φ, A for Θ); without y each input gets the target's
    current bit. A w step enumerates x..x+span-1 into W_e instead.
    """

    model_config = ConfigDict(extra="forbid")

    stage: int = Field(ge=1)
    x: int = Field(ge=0)
    span: int = Field(default=1, ge=1)
    y: Optional[Literal[0, 1]] = None
    use: int = Field(default=0, ge=0)
    kind: Literal["axiom", "w"] = "axiom"
    role: Optional[Role] = None


class ScriptedAdversary(BaseAdversary):
    """
    Replays a fixed schedule of moves from params["script"]. Steps carrying a role only
    drive that functional, so one script can serve all three behaviours of an index.
    """

    def __init__(self, role: Role = Role.PSI, index: int = 0, seed: int = 0, params: Optional[Dict[str, Any]] = None):
        super().__init__("scripted", role, index, seed, params)
        try:
            steps = [ScriptStep.model_validate(raw) for raw in self.params.get("script", [])]
        except ValidationError as e:
            raise ValueError(f"bad script step: {e}") from e
        if any(step.kind == "w" and step.role is Role.THETA for step in steps):
            raise ValueError("Θ has no journal to enumerate into")
        self.schedule: Dict[int, List[ScriptStep]] = {}
        for step in steps:
            if role is Role.THETA and step.kind == "w":
                continue
            if step.role is None or step.role is role:
                self.schedule.setdefault(step.stage, []).append(step)

    def _oracle_and_target(self, view: ConstructionView):
        e = self.index
        if self.role is Role.PSI:
            return view.D, view.W(e)
        if self.role is Role.PHI:
            return view.W(e), view.D
        return view.A, view.D

    def step(self, view: ConstructionView, s: int, budget: int) -> List[Emission]:
        oracle, target = self._oracle_and_target(view)
        out: List[Emission] = []
        for step in self.schedule.get(s, ()):
            inputs = range(step.x, step.x + step.span)
            if step.kind == "w":
                out.extend(JournalEmission(self.index, x) for x in inputs)
                continue
            segment = oracle.segment(step.use)
            for x in inputs:
                y = step.y if step.y is not None else target.bit(x)
                out.append(AxiomEmission(self.role, self.index, segment, x, y))
        if len(out) > budget:
            self.log_execution("budget", False, {"stage": s, "scheduled": len(out), "budget": budget})
        return out[:budget]
