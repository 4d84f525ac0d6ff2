"""P_e: D ≠ Θ_e^A, met by a single witness"""

from __future__ import annotations

from ..core_sets import ChangeKind
from ..functionals import Role
from ..state import PState, Preservation, Requirement
from .base_strategy import BaseStrategy, Outcome


class PStrategy(BaseStrategy):
    requirement = Requirement.P

    def __init__(self):
        super().__init__("P")

    def act(self, ns: PState, ctx, s: int) -> Outcome:
        if ns.satisfied:
            ctx.event(ns, "P1", w=ns.witness)
            return Outcome.CONTINUE

        state = ctx.state
        if ns.witness is None:
            ns.witness = state.fresh_number(ns.node)
            ctx.event(ns, "P2", w=ns.witness)

        result = state.store.evaluate(Role.THETA, ns.index, state.A, ns.witness, s)
        if result is None:
            ctx.event(ns, "P3", w=ns.witness)
            return Outcome.CONTINUE

        y, use = result
        tau = state.A.segment(use)
        if y == 0:
            ctx.change(ns.witness, ChangeKind.ENUMERATE, s)
        ns.satisfied = True
        ns.preserved = Preservation(ns.witness, use, s, y)
        ctx.event(ns, "P4" if y == 1 else "P5", w=ns.witness, y=y, use=use, tau=tau)
        self.log_execution("satisfied", True, {"node": ns.node.label, "witness": ns.witness, "output": y})
        ctx.initialize_below(ns.depth, s, cause=f"P{4 if y == 1 else 5}")
        return Outcome.STOP
