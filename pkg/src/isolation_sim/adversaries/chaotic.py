"""Seeded random adversary; its emissions may contradict earlier axioms and get dropped"""

from __future__ import annotations

from typing import Any, Dict, List, Optional

import numpy as np

from ..functionals import Role
from ..state import ConstructionView
from .base_adversary import AxiomEmission, BaseAdversary, Emission, JournalEmission

ROLE_CODES = {Role.PSI: 0, Role.PHI: 1, Role.THETA: 2}


class ChaoticAdversary(BaseAdversary):
    """
    Emits up to `rate` axioms per stage on random prefixes of the current oracle with
    random outputs; the Ψ and Φ roles also enumerate a random x ≤ s into W_e with
    probability `w_rate`. The generator is reseeded from (seed, e, role, stage), so a
    stage's emissions depend only on the visible state and that key.
    """

    def __init__(self, role: Role = Role.PSI, index: int = 0, seed: int = 0, params: Optional[Dict[str, Any]] = None):
        super().__init__("chaotic", role, index, seed, params)
        self.rate = int(self.params.get("rate", 4))
        self.w_rate = float(self.params.get("w_rate", 0.1))

    def step(self, view: ConstructionView, s: int, budget: int) -> List[Emission]:
        e = self.index
        rng = np.random.default_rng([abs(self.seed), e, ROLE_CODES[self.role], s])
        if self.role is Role.THETA:
            oracle, frontier = view.A, view.code_frontier
        elif self.role is Role.PHI:
            oracle, frontier = view.W(e), view.number_frontier
        else:
            oracle, frontier = view.D, view.number_frontier

        out: List[Emission] = []
        for _ in range(int(rng.integers(0, self.rate + 1))):
            x = int(rng.integers(0, s + 1))
            length = int(rng.integers(0, frontier + 2))
            y = int(rng.integers(0, 2))
            out.append(AxiomEmission(self.role, e, oracle.segment(length), x, y))
        if self.role is not Role.THETA and rng.random() < self.w_rate:
            out.append(JournalEmission(e, int(rng.integers(0, s + 1))))
        return out[:budget]
