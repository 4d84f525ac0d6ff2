"""R_e: if Φ_e^{W_e} = D then K ≤_T W_e, via Γ^{W_e} = K guarded by agitators"""

from __future__ import annotations

from typing import List

from ..core_sets import BinarySegment, ChangeKind
from ..functionals import AgreementKind, Role
from ..state import AgitatorState, GammaEntry, Requirement, RState
from .base_strategy import BaseStrategy, Outcome

EMPTY = BinarySegment(0)


class RStrategy(BaseStrategy):
    requirement = Requirement.R

    def __init__(self):
        super().__init__("R")

    def act(self, ns: RState, ctx, s: int) -> Outcome:
        state = ctx.state
        e = ns.index
        D, W = state.D, state.w(e)

        ell = state.agreement(AgreementKind.R, e, s)
        expansionary = self.observe_length(ns, ell)
        top = ns.max_value()
        if not expansionary or (top is not None and ell < top):
            ctx.event(ns, "R1", ell=ell, exp=expansionary, top=top)
            return Outcome.CONTINUE

        self._release_agitators(ns, ctx, s)

        # Γ entries whose W-snapshot moved are gone, and so is everything above them
        ns.gamma.truncate(ns.gamma.live_prefix(W))
        wrong = ns.gamma.first_wrong(state.K, len(ns.gamma))
        if wrong is not None:
            entry = ns.gamma.entries[wrong]
            agitator = ns.agitators.get(entry.x)
            d = agitator.value if agitator else None
            if d is not None and D.change_count(d) == 0:
                ctx.change(d, ChangeKind.ENUMERATE, s)
                agitator.state = AgitatorState.ENUMERATED
                ctx.event(ns, "RENUM", x=entry.x, d=d)
                return Outcome.STOP
            ctx.event(ns, "RENUM", x=entry.x, d=d, blocked=1)
            self.log_execution("enumerate", False, {"node": ns.node.label, "x": entry.x, "agitator": d})
            return Outcome.CONTINUE

        self._extend_gamma(ns, ctx, s, ell)
        return Outcome.CONTINUE

    def _release_agitators(self, ns: RState, ctx, s: int) -> None:
        """Item R2: even agitators sitting in D come out, odd ones stay; both free the tail"""
        state = ctx.state
        D = state.D
        hit: List[int] = []
        for value in D.members:
            owner = state.agitator_owner.get(value)
            if owner is None or owner[0] != ns.index:
                continue
            agitator = ns.agitators.get(owner[1])
            if agitator is not None and agitator.value == value:
                hit.append(owner[1])
        if not hit:
            return

        hit.sort()
        extracted, kept = [], []
        for x in hit:
            d = ns.agitators[x].value
            if x % 2 == 0 and D.change_count(d) == 1:
                ctx.change(d, ChangeKind.EXTRACT, s)
                extracted.append(d)
            else:
                kept.append(d)
        lowest = hit[0]
        for x in [x for x in ns.agitators if x >= lowest]:
            ns.clear_agitator(x, AgitatorState.UNDEFINED)
        ns.gamma.truncate(lowest)
        ctx.event(ns, "R2", x=lowest, extracted=extracted, kept=kept)

    def _extend_gamma(self, ns: RState, ctx, s: int, ell: int) -> None:
        """Item R3 over y ≤ x < ℓ. After the first input left undefined, only agitators are picked."""
        state = ctx.state
        W = state.w(ns.index)
        y = len(ns.gamma)
        ctx.event(ns, "R3", y=y, ell=ell)
        gap = False
        for x in range(y, ell):
            agitator = ns.agitator(x)
            if state.K.bit(x):
                ns.clear_agitator(x, AgitatorState.OBSOLETE)
                if not gap:
                    ns.gamma.define(GammaEntry(x, 1, 0, EMPTY, s))
                    ctx.event(ns, "R3a", x=x, v=1, use=0, snap=EMPTY)
                continue
            if agitator.value is None:
                d = state.fresh_number(ns.node)
                ns.define_agitator(x, d)
                ctx.register_agitator(d, ns.index, x)
                ctx.event(ns, "R3b", x=x, d=d)
                gap = True
                continue
            if gap:
                continue
            result = state.store.evaluate(Role.PHI, ns.index, W, agitator.value, s)
            if result is None:
                gap = True
                continue
            use = result[1]
            snapshot = W.segment(use)
            ns.gamma.define(GammaEntry(x, 0, use, snapshot, s))
            agitator.state = AgitatorState.ACTIVE
            ctx.event(ns, "R3c", x=x, v=0, use=use, snap=snapshot, d=agitator.value)
