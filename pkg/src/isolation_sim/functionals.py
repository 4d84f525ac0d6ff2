"""Turing functionals as consistent axiom stores, c.e. journals, and agreement lengths"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from sortedcontainers import SortedList

from .core_sets import BinarySegment, ChangeHistory, Oracle
from .errors import InconsistentAxiom, JournalError

logger = logging.getLogger(__name__)


class Role(str, Enum):
    PSI = "Psi"
    PHI = "Phi"
    THETA = "Theta"


class AgreementKind(str, Enum):
    N = "N"
    R = "R"


def format_ones(segment: BinarySegment) -> str:
    return ",".join(str(p) for p in segment.sorted_ones()) or "-"


@dataclass(frozen=True, slots=True)
class Axiom:
    role: Role
    index: int
    segment: BinarySegment
    x: int
    y: int
    enumerated_at: int

    @property
    def use(self) -> int:
        return self.segment.length

    def to_line(self) -> str:
        return (
            f"AXM {self.role.value} {self.index} {self.segment.length} {format_ones(self.segment)} "
            f"{self.x} {self.y} {self.enumerated_at}"
        )


class AxiomStore:
    """
    Every Ψ_e, Φ_e and Θ_e as an append-only set of axioms (σ, x, y). Two axioms on the
    same input with comparable segments must agree. Axioms that can never match again
    (the oracle has moved past them for good) are pruned from the lookup list only.
    """

    def __init__(self):
        self._all: Dict[Tuple[Role, int, int], List[Axiom]] = {}
        self._live: Dict[Tuple[Role, int, int], List[Axiom]] = {}
        self._count = 0

    def __len__(self) -> int:
        return self._count

    def add_axiom(self, role: Role, e: int, segment: BinarySegment, x: int, y: int, s: int) -> Axiom:
        if y not in (0, 1):
            raise InconsistentAxiom(f"output {y} is not a bit")
        key = (role, e, x)
        for existing in self._all.get(key, ()):
            if existing.y != y and existing.segment.comparable(segment):
                raise InconsistentAxiom(
                    f"{role.value}_{e}({x}) = {y} on {segment.length} bits contradicts axiom from stage {existing.enumerated_at}",
                    clash=existing,
                )
        axiom = Axiom(role, e, segment, x, y, s)
        self._all.setdefault(key, []).append(axiom)
        self._live.setdefault(key, []).append(axiom)
        self._count += 1
        return axiom

    def evaluate(self, role: Role, e: int, oracle: Oracle, x: int, s: Optional[int] = None) -> Optional[Tuple[int, int]]:
        """(output, use) of the earliest-enumerated axiom enumerated by s that matches the oracle"""
        live = self._live.get((role, e, x))
        if not live:
            return None
        prune = getattr(oracle, "permanently_disagrees", None)
        dead: List[int] = []
        result = None
        for i, axiom in enumerate(live):
            if s is not None and axiom.enumerated_at > s:
                continue
            if axiom.segment.agrees_with(oracle):
                result = (axiom.y, axiom.use)
                break
            if prune is not None and prune(axiom.segment):
                dead.append(i)
        for i in reversed(dead):
            del live[i]
        return result

    def axioms(self, role: Role, e: int) -> Iterator[Axiom]:
        for (r, index, _), axioms in self._all.items():
            if r is role and index == e:
                yield from axioms

    def axioms_for(self, role: Role, e: int, x: int) -> Sequence[Axiom]:
        return tuple(self._all.get((role, e, x), ()))


@dataclass(frozen=True, slots=True)
class JournalEntry:
    journal: str
    element: int
    stage: int

    def to_line(self) -> str:
        return f"CEJ {self.journal} {self.element} {self.stage}"


class CeJournal:
    """A c.e. set given by its enumeration: W_e, or K when restricted to odd elements"""

    monotone = True

    def __init__(self, name: str, odd_only: bool = False):
        self.name = name
        self.odd_only = odd_only
        self.entries: List[JournalEntry] = []
        self._entered: Dict[int, int] = {}
        self._members = SortedList()

    def enumerate(self, x: int, s: int) -> Optional[JournalEntry]:
        """Add x at stage s; None when x is already in"""
        if x < 0:
            raise JournalError(f"{self.name}: elements are natural numbers, got {x}")
        if self.odd_only and x % 2 == 0:
            raise JournalError(f"{self.name} holds only odd numbers, got {x}")
        if x in self._entered:
            return None
        if self.entries and s < self.entries[-1].stage:
            raise JournalError(f"{self.name}: stage {s} precedes stage {self.entries[-1].stage}")
        entry = JournalEntry(self.name, x, s)
        self.entries.append(entry)
        self._entered[x] = s
        self._members.add(x)
        return entry

    def __contains__(self, x: int) -> bool:
        return x in self._entered

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def version(self) -> int:
        return len(self.entries)

    def max_member(self) -> Optional[int]:
        return self._members[-1] if self._members else None

    def bit(self, x: int) -> int:
        return 1 if x in self._entered else 0

    def member_at(self, x: int, s: int) -> int:
        entered = self._entered.get(x)
        return 1 if entered is not None and entered <= s else 0

    def entered_at(self, x: int) -> Optional[int]:
        return self._entered.get(x)

    def ones_below(self, n: int) -> List[int]:
        return list(self._members.irange(maximum=n - 1)) if n > 0 else []

    def segment(self, n: int) -> BinarySegment:
        return BinarySegment.of(self, n)

    def permanently_disagrees(self, segment: BinarySegment) -> bool:
        return any(p not in segment.ones for p in self.ones_below(segment.length))


def agreement_length(
    kind: AgreementKind,
    e: int,
    D: ChangeHistory,
    W: CeJournal,
    store: AxiomStore,
    s: Optional[int] = None,
    known: Optional[int] = None,
) -> Optional[int]:
    """
    Largest y with agreement at every x ≤ y, or None when x = 0 already fails.
    N-nodes compare W_e with Ψ_e^D, R-nodes compare D with Φ_e^{W_e}. A known ℓ,
    computed against the same D and W, lets the scan resume above it.
    """
    if kind is AgreementKind.N:
        role, oracle, target = Role.PSI, D, W
    else:
        role, oracle, target = Role.PHI, W, D
    ell = known
    x = 0 if known is None else known + 1
    while True:
        result = store.evaluate(role, e, oracle, x, s)
        if result is None or result[0] != target.bit(x):
            return ell
        ell = x
        x += 1


class AgreementTracker:
    """
    Agreement lengths remembered per (kind, e) with the D and W versions they were read
    against. New axioms only lengthen an agreement, so while both sets hold still the
    next query resumes where the last one stopped.
    """

    def __init__(self):
        self._known: Dict[Tuple[AgreementKind, int], Tuple[int, int, Optional[int]]] = {}

    def length(
        self, kind: AgreementKind, e: int, D: ChangeHistory, W: CeJournal, store: AxiomStore, s: Optional[int] = None
    ) -> Optional[int]:
        key = (kind, e)
        stamp = self._known.get(key)
        known = None
        if stamp is not None and stamp[0] == D.version and stamp[1] == W.version:
            known = stamp[2]
        ell = agreement_length(kind, e, D, W, store, s, known=known)
        self._known[key] = (D.version, W.version, ell)
        return ell


def is_expansionary(ell: Optional[int], history: Sequence[int]) -> bool:
    """ℓ exists and beats every ℓ recorded at earlier expansionary stages"""
    # history only grows strictly, so its last entry is its maximum
    return ell is not None and (not history or ell > history[-1])


def collatz_stopping_time(n: int) -> int:
    steps = 0
    while n != 1:
        n = n // 2 if n % 2 == 0 else 3 * n + 1
        steps += 1
    return steps


def toy_k_script(limit: int) -> List[Tuple[int, int]]:
    """A small halting-style enumeration: 2e+1 enters K at stage 1 + stopping time of e+1"""
    script = [(2 * e + 1, 1 + collatz_stopping_time(e + 1)) for e in range(limit)]
    return sorted(script, key=lambda item: (item[1], item[0]))
