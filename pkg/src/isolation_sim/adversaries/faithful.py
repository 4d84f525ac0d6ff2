"""Faithful adversaries: keep their functional correct so the matching node keeps expanding"""

from __future__ import annotations

from typing import Any, Dict, Iterable, List, Optional, Set

from ..config import settings
from ..core_sets import BinarySegment
from ..functionals import Role
from ..state import ConstructionView
from .base_adversary import AxiomEmission, BaseAdversary, Emission, JournalEmission


class _Coverage:
    """
    Inputs a faithful behaviour keeps answered, and whether the last step got through all
    of them. A step that ran out of budget, or found its oracle moved, redoes the lot;
    otherwise only inputs that are new since the last step are visited.
    """

    def __init__(self):
        self.stage = -1
        self.done: Set[int] = set()
        self.complete = True

    def inputs(self, s: int, extra: Iterable[int] = ()) -> List[int]:
        return sorted(set(range(s + 1)).union(extra))

    def fresh(self, s: int, extra: Iterable[int] = ()) -> List[int]:
        start = self.stage + 1
        return sorted(set(range(start, s + 1)).union(x for x in extra if x not in self.done))

    def finish(self, s: int, visited: Iterable[int], complete: bool, reset: bool) -> None:
        if reset:
            self.done = set()
        self.done.update(visited)
        self.stage = s
        self.complete = complete


class FaithfulPsiAdversary(BaseAdversary):
    """
    Keeps Ψ_e^D = W_e on x ≤ s. Whenever D moves below the use of x's computation the
    old axiom dies and x is re-axiomatized on D ↾ (max(s, max D) + 1). A revived x may be
    attacked: it enters W_e and the new axiom outputs 1, so a later restoration of D
    back to the old σ exposes a Δ disagreement.
    """

    roles = (Role.PSI,)

    def __init__(self, role: Role = Role.PSI, index: int = 0, seed: int = 0, params: Optional[Dict[str, Any]] = None):
        super().__init__("faithful-psi", role, index, seed, params)
        self.attack_limit = int(self.params.get("attack_limit", settings.default_attack_limit))
        self.attack_after = int(self.params.get("attack_after", 0))
        self.attacks_used = 0
        self._seen: Set[int] = set()
        self._coverage = _Coverage()
        self._d_version = -1

    def step(self, view: ConstructionView, s: int, budget: int) -> List[Emission]:
        e = self.index
        W = view.W(e)
        top = view.D.max_member()
        sigma = view.D.segment(max(s, top if top is not None else 0) + 1)

        full = not self._coverage.complete or view.D.version != self._d_version
        inputs = self._coverage.inputs(s) if full else self._coverage.fresh(s)
        out: List[Emission] = []
        visited: List[int] = []
        complete = True
        for x in inputs:
            if len(out) >= budget:
                complete = False
                break
            visited.append(x)
            if view.evaluate(Role.PSI, e, view.D, x) is not None:
                self._seen.add(x)
                continue
            y = W.bit(x)
            if y == 0 and x in self._seen and self.attacks_used < self.attack_limit and s >= self.attack_after:
                out.append(JournalEmission(e, x))
                self.attacks_used += 1
                y = 1
                self.log_execution("attack", True, {"stage": s, "x": x})
            out.append(AxiomEmission(Role.PSI, e, sigma, x, y))
            self._seen.add(x)
        self._coverage.finish(s, visited, complete, reset=full)
        self._d_version = view.D.version
        return out


class _PendingOracle:
    """W_e together with markers about to be enumerated in the same step"""

    def __init__(self, base, pending: Set[int]):
        self._base = base
        self._pending = pending

    def bit(self, p: int) -> int:
        return 1 if p in self._pending else self._base.bit(p)

    def ones_below(self, n: int) -> List[int]:
        extra = [p for p in self._pending if p < n]
        if not extra:
            return self._base.ones_below(n)
        return sorted(set(self._base.ones_below(n)).union(extra))


class FaithfulPhiAdversary(BaseAdversary):
    """
    Keeps Φ_e^{W_e} = D on d ≤ s and on every agitator R_e has picked. Each d's
    computation reads W_e up to a private marker position m_d (which is 0 in W_e); when
    D(d) changes, m_d is enumerated into W_e, killing the computation, and d gets a new
    marker.
    """

    roles = (Role.PHI,)

    def __init__(self, role: Role = Role.PHI, index: int = 0, seed: int = 0, params: Optional[Dict[str, Any]] = None):
        super().__init__("faithful-phi", role, index, seed, params)
        self._next_marker = int(self.params.get("marker_base", settings.default_marker_base))
        self._marker: Dict[int, int] = {}
        self._coverage = _Coverage()
        self._d_version = -1
        # W_e's version once this behaviour's own enumerations land
        self._w_version = -1

    def _new_marker(self) -> int:
        m = self._next_marker
        self._next_marker += 1
        return m

    def step(self, view: ConstructionView, s: int, budget: int) -> List[Emission]:
        e = self.index
        W = view.W(e)
        picks = view.picks(f"R{e}")
        full = (
            not self._coverage.complete
            or view.D.version != self._d_version
            or W.version != self._w_version
        )
        inputs = self._coverage.inputs(s, picks) if full else self._coverage.fresh(s, picks)
        out: List[Emission] = []
        pending: Set[int] = set()
        complete = True

        if full:
            for d in inputs:
                if len(out) >= budget:
                    complete = False
                    break
                result = view.evaluate(Role.PHI, e, W, d)
                if result is None or result[0] == view.D.bit(d):
                    continue
                m = self._marker.get(d)
                if m is not None and not W.bit(m) and m not in pending:
                    pending.add(m)
                    out.append(JournalEmission(e, m))

        oracle = _PendingOracle(W, pending)
        visited: List[int] = []
        for d in inputs:
            if len(out) >= budget:
                complete = False
                break
            visited.append(d)
            if view.evaluate(Role.PHI, e, oracle, d) is not None:
                continue
            m = self._marker.get(d)
            if m is None or m in pending or W.bit(m):
                m = self._marker[d] = self._new_marker()
            segment = BinarySegment(m + 1, frozenset(oracle.ones_below(m + 1)))
            out.append(AxiomEmission(Role.PHI, e, segment, d, view.D.bit(d)))

        self._coverage.finish(s, visited, complete, reset=full)
        self._d_version = view.D.version
        self._w_version = W.version + len(pending)
        return out


class FaithfulThetaAdversary(BaseAdversary):
    """Keeps Θ_e^A(x) = D(x) for x ≤ s and for P_e's witnesses, re-axiomatizing on A ↾ (code frontier + 1)"""

    roles = (Role.THETA,)

    def __init__(self, role: Role = Role.THETA, index: int = 0, seed: int = 0, params: Optional[Dict[str, Any]] = None):
        super().__init__("faithful-theta", role, index, seed, params)
        self._coverage = _Coverage()
        self._a_version = -1

    def step(self, view: ConstructionView, s: int, budget: int) -> List[Emission]:
        e = self.index
        tau = view.A.segment(view.code_frontier + 1)
        witnesses = view.picks(f"P{e}")
        full = not self._coverage.complete or view.A.version != self._a_version
        inputs = self._coverage.inputs(s, witnesses) if full else self._coverage.fresh(s, witnesses)
        out: List[Emission] = []
        visited: List[int] = []
        complete = True
        for x in inputs:
            if len(out) >= budget:
                complete = False
                break
            visited.append(x)
            if view.evaluate(Role.THETA, e, view.A, x) is None:
                out.append(AxiomEmission(Role.THETA, e, tau, x, view.D.bit(x)))
        self._coverage.finish(s, visited, complete, reset=full)
        self._a_version = view.A.version
        return out


FAITHFUL = {
    Role.PSI: FaithfulPsiAdversary,
    Role.PHI: FaithfulPhiAdversary,
    Role.THETA: FaithfulThetaAdversary,
}
