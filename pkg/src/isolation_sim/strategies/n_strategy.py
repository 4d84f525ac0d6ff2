"""N_e: if W_e = Ψ_e^D then W_e ≤_T A, or a diagonalizing computation is found and kept"""

from __future__ import annotations

from enum import Enum
from typing import Dict, Optional, Tuple

from ..core_sets import ChangeKind
from ..functionals import AgreementKind, Role
from ..state import AgitatorState, Cycle, CyclePhase, DeltaEntry, DiagPair, NState, Requirement
from .base_strategy import BaseStrategy, Outcome


class CycleResult(str, Enum):
    CONTINUE = "cont"
    DC_FOUND = "dc"


class NStrategy(BaseStrategy):
    requirement = Requirement.N

    def __init__(self):
        super().__init__("N")

    def act(self, ns: NState, ctx, s: int) -> Outcome:
        state = ctx.state
        e = ns.index
        ell = state.agreement(AgreementKind.N, e, s)
        expansionary = self.observe_length(ns, ell)
        try:
            return self._act(ns, ctx, s, ell, expansionary)
        finally:
            ns.last_stage = s
            ns.agitator_snapshot = self._agitator_values(ns, ctx)

    def _agitator_values(self, ns: NState, ctx) -> Dict[Tuple[int, int], int]:
        """d_{i,x} for i < e and x < 2(e - i), the agitators whose movement initializes α"""
        values = {}
        for i in range(ns.index):
            r = ctx.state.r_state(i)
            if r is None:
                continue
            for x in range(2 * (ns.index - i)):
                agitator = r.agitators.get(x)
                if agitator is not None and agitator.value is not None:
                    values[(i, x)] = agitator.value
        return values

    def _act(self, ns: NState, ctx, s: int, ell: Optional[int], expansionary: bool) -> Outcome:
        state = ctx.state
        D = state.D
        s_star = ns.last_stage

        # N1: an agitator of a higher R-node changed membership since s*
        if s_star is not None:
            for (i, x), d in ns.agitator_snapshot.items():
                if D.membership(d, s_star) != D.bit(d):
                    ctx.event(ns, "N1", i=i, x=x, d=d, since=s_star)
                    ctx.initialize_node(ns.depth, s, cause="N1")
                    ctx.initialize_below(ns.depth, s, cause="N1")
                    return Outcome.STOP

        # N2: least phase-2 cycle whose Υ changed since s*
        if s_star is not None:
            for cycle in ns.cycles:
                if cycle.phase not in (CyclePhase.PHASE2, CyclePhase.ACCOMPLISHED):
                    continue
                before, now = cycle.upsilon(D, s_star), cycle.upsilon(D)
                if before != now:
                    ctx.event(ns, "N2", k=cycle.k, before=before, now=now)
                    ns.drop_cycles_above(cycle.k)
                    ctx.initialize_below(ns.depth, s, cause="N2")
                    break

        # N3: least cycle with Υ empty is accomplished; D goes back to dc(k) if it drifted
        for cycle in ns.cycles:
            if cycle.phase not in (CyclePhase.PHASE2, CyclePhase.ACCOMPLISHED) or cycle.upsilon(D):
                continue
            first = cycle.phase is CyclePhase.PHASE2
            cycle.phase = CyclePhase.ACCOMPLISHED
            restored = unrestorable = 0
            if not cycle.dc.agrees_with(D):
                if D.restorable_to(cycle.dc, acting_stage=s):
                    restored = len(ctx.restore(cycle.dc, s, ns))
                else:
                    unrestorable = 1
                    self.log_execution("restore", False, {"node": ns.node.label, "k": cycle.k})
            ctx.event(ns, "N3", k=cycle.k, x=cycle.dc_input, dc=cycle.dc, first=first,
                      restored=restored, unrestorable=unrestorable)
            return Outcome.CONTINUE

        # N4
        cycle = ns.cycle(ns.working_cycle())
        result = self.run_cycle(ns, cycle, ctx, s, ell, expansionary)
        if result is CycleResult.CONTINUE:
            return Outcome.CONTINUE
        self._enter_phase2(ns, cycle, ctx, s)
        return Outcome.STOP

    def run_cycle(self, ns: NState, cycle: Cycle, ctx, s: int, ell: Optional[int], expansionary: bool) -> CycleResult:
        """Items C1 and C2 of cyc(k)"""
        if not expansionary:
            ctx.event(ns, "C1", k=cycle.k, ell=ell)
            return CycleResult.CONTINUE

        state = ctx.state
        D, A, W = state.D, state.A, state.w(ns.index)
        cycle.phase = CyclePhase.PHASE1
        delta = cycle.delta
        live = delta.live_prefix(A)
        wrong_index = delta.first_wrong(W, live)

        if wrong_index is not None:
            wrong = delta.entries[wrong_index]
            # C2b: Δ(x)↓ ≠ W(x); its pair's σ becomes the diagonalizing computation
            sigma = wrong.pair.sigma
            changes = ctx.restore(sigma, s, ns)
            cycle.dc, cycle.dc_input = sigma, wrong.y
            ctx.event(ns, "C2", k=cycle.k, x=wrong.y, div=0)
            ctx.event(ns, "C2b", k=cycle.k, x=wrong.y, sig=sigma, changes=len(changes))
            return CycleResult.DC_FOUND

        x = live
        delta.truncate(x)
        ctx.event(ns, "C2", k=cycle.k, x=x, div=1)
        for y in range(x, s):
            pair = delta.pairs.get(y)
            if pair is not None and D.restorable_to(pair.sigma, acting_stage=s):
                tau = A.segment(pair.tau.length)
                new_pair = DiagPair(y, pair.sigma, tau)
                delta.define(DeltaEntry(y, W.bit(y), new_pair, s))
                ctx.event(ns, "C2a.i", k=cycle.k, y=y, v=W.bit(y), use=tau.length, tau=tau, sig=pair.sigma)
                continue
            result = state.store.evaluate(Role.PSI, ns.index, D, y, s)
            if result is None or result[0] != W.bit(y):
                break
            z = state.fresh_code_use()
            sigma, tau = D.segment(result[1]), A.segment(z)
            delta.define(DeltaEntry(y, W.bit(y), DiagPair(y, sigma, tau), s))
            ctx.event(ns, "C2a.ii", k=cycle.k, y=y, v=W.bit(y), use=z, tau=tau, sig=sigma)
        return CycleResult.CONTINUE

    def _enter_phase2(self, ns: NState, cycle: Cycle, ctx, s: int) -> None:
        state = ctx.state
        D = state.D
        e = ns.index
        d_star: Dict[int, int] = {}
        for i in range(e):
            r = state.r_state(i)
            x = 2 * (e - i)
            agitator = r.agitators.get(x) if r is not None else None
            if agitator is None or agitator.value is None:
                continue
            d = agitator.value
            if agitator.state is AgitatorState.ACTIVE:
                if D.change_count(d) == 0:
                    ctx.change(d, ChangeKind.ENUMERATE, s)
                    agitator.state = AgitatorState.ENUMERATED
                    d_star[i] = d
                else:
                    ctx.event(ns, "N4-skip", i=i, x=x, d=d)
                    if D.bit(d):
                        d_star[i] = d
            elif agitator.state is AgitatorState.DEFINED:
                r.clear_agitator(x, AgitatorState.UNDEFINED)
                ctx.event(ns, "N4-clear", i=i, x=x, d=d)
            elif agitator.state is AgitatorState.ENUMERATED:
                d_star[i] = d

        cycle.d_star = d_star
        cycle.phase = CyclePhase.PHASE2
        ns.cyc_count += 1
        ctx.event(ns, "N4", k=cycle.k, cyc=ns.cyc_count, ups=cycle.upsilon(D), dstar=[d_star[i] for i in sorted(d_star)])
        self.log_execution("phase2", True, {"node": ns.node.label, "k": cycle.k, "cyc_count": ns.cyc_count})
        ctx.initialize_below(ns.depth, s, cause="N4")
