"""The d.c.e. set D as a change journal, binary segments, and the Lachlan set A derived from D"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Protocol, Sequence, Set, Tuple

from sortedcontainers import SortedList

from .errors import StaleStage, ThirdChange, Unrestorable, WrongKind

logger = logging.getLogger(__name__)


class ChangeKind(str, Enum):
    ENUMERATE = "Enumerate"
    EXTRACT = "Extract"


def pair_code(x: int, s: int) -> int:
    """Cantor code x* = <x, s> of an element and the stage it first entered D"""
    return (x + s) * (x + s + 1) // 2 + s


def unpair_code(code: int) -> Tuple[int, int]:
    w = (math.isqrt(8 * code + 1) - 1) // 2
    s = code - w * (w + 1) // 2
    return w - s, s


class Oracle(Protocol):
    def bit(self, p: int) -> int: ...

    def ones_below(self, n: int) -> List[int]: ...


@dataclass(frozen=True, slots=True)
class BinarySegment:
    """A finite 0/1 string stored sparsely as its length and the positions holding 1"""

    length: int
    ones: FrozenSet[int] = frozenset()

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("segment length must be non-negative")
        if any(p < 0 or p >= self.length for p in self.ones):
            raise ValueError(f"one-positions {sorted(self.ones)} fall outside length {self.length}")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BinarySegment":
        bits = list(bits)
        return cls(len(bits), frozenset(p for p, b in enumerate(bits) if b))

    @classmethod
    def from_string(cls, text: str) -> "BinarySegment":
        return cls.from_bits(int(c) for c in text)

    @classmethod
    def of(cls, oracle: Oracle, n: int) -> "BinarySegment":
        """oracle ↾ n"""
        return cls(n, frozenset(oracle.ones_below(n)))

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, p: int) -> int:
        if p < 0 or p >= self.length:
            raise IndexError(p)
        return 1 if p in self.ones else 0

    @property
    def bits(self) -> Tuple[int, ...]:
        return tuple(1 if p in self.ones else 0 for p in range(self.length))

    def sorted_ones(self) -> List[int]:
        return sorted(self.ones)

    def restricted(self, n: int) -> "BinarySegment":
        n = min(n, self.length)
        return BinarySegment(n, frozenset(p for p in self.ones if p < n))

    def is_prefix_of(self, other: "BinarySegment") -> bool:
        return self.length <= other.length and self.ones == {p for p in other.ones if p < self.length}

    def comparable(self, other: "BinarySegment") -> bool:
        shorter, longer = (self, other) if self.length <= other.length else (other, self)
        return shorter.is_prefix_of(longer)

    def agrees_with(self, oracle: Oracle) -> bool:
        """True iff this segment is a prefix of the oracle's characteristic sequence"""
        below = oracle.ones_below(self.length)
        return len(below) == len(self.ones) and all(p in self.ones for p in below)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


class SegmentOracle:
    """A finite segment read as an oracle that is 0 beyond its length"""

    def __init__(self, segment: BinarySegment):
        self.segment = segment
        self._ones = SortedList(segment.ones)

    def bit(self, p: int) -> int:
        return 1 if p in self.segment.ones else 0

    def ones_below(self, n: int) -> List[int]:
        return list(self._ones.irange(maximum=n - 1)) if n > 0 else []

    def permanently_disagrees(self, segment: BinarySegment) -> bool:
        return False


@dataclass(frozen=True, slots=True)
class ChangeEvent:
    element: int
    stage: int
    kind: ChangeKind

    def to_line(self) -> str:
        return f"CHG {self.stage} {self.element} {self.kind.value}"


@dataclass(frozen=True, slots=True)
class LachlanEntry:
    stage: int
    code: int
    element: int
    first_stage: int

    def to_line(self) -> str:
        return f"LCH {self.stage} {self.code} {self.element} {self.first_stage}"


class LachlanView:
    """A: codes of extracted elements, each tagged with the stage it entered. Codes only enter."""

    monotone = True

    def __init__(self):
        self.entries: List[LachlanEntry] = []
        self._codes = SortedList()
        self._entered: Dict[int, int] = {}

    def _enter(self, entry: LachlanEntry) -> None:
        self.entries.append(entry)
        self._codes.add(entry.code)
        self._entered[entry.code] = entry.stage

    def __contains__(self, code: int) -> bool:
        return code in self._entered

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def version(self) -> int:
        return len(self.entries)

    def max_member(self) -> Optional[int]:
        return self._codes[-1] if self._codes else None

    def bit(self, code: int) -> int:
        return 1 if code in self._entered else 0

    def member_at(self, code: int, s: int) -> int:
        entered = self._entered.get(code)
        return 1 if entered is not None and entered <= s else 0

    def ones_below(self, n: int) -> List[int]:
        return list(self._codes.irange(maximum=n - 1)) if n > 0 else []

    def codes_at(self, s: int) -> Set[int]:
        return {e.code for e in self.entries if e.stage <= s}

    def segment(self, n: int) -> BinarySegment:
        return BinarySegment.of(self, n)

    def permanently_disagrees(self, segment: BinarySegment) -> bool:
        # A only grows, so a code of A where the segment has 0 never goes away
        return any(p not in segment.ones for p in self.ones_below(segment.length))


class ChangeHistory:
    """
    D as a journal of Enumerate/Extract events. Each element changes at most twice,
    Enumerate first, so membership at stage s is the number of events up to s mod 2.
    The history is mutated in place by the single writer (the stage loop); every
    extraction pushes the element's code into the attached LachlanView.
    """

    def __init__(self):
        self.events: List[ChangeEvent] = []
        self._by_element: Dict[int, List[ChangeEvent]] = {}
        self._members = SortedList()
        self.lachlan = LachlanView()
        self._listeners: List[Callable[[object], None]] = []

    def add_listener(self, listener: Callable[[object], None]) -> None:
        """Listeners receive every ChangeEvent and LachlanEntry as it happens"""
        self._listeners.append(listener)

    def _notify(self, record: object) -> None:
        for listener in self._listeners:
            listener(record)

    @property
    def last_stage(self) -> int:
        return self.events[-1].stage if self.events else 0

    @property
    def version(self) -> int:
        """Bumped by every change; equal versions mean equal sets"""
        return len(self.events)

    def apply_change(self, x: int, kind: ChangeKind, s: int) -> ChangeEvent:
        if x < 0:
            raise ValueError(f"elements are natural numbers, got {x}")
        if self.events and s < self.events[-1].stage:
            raise StaleStage(f"stage {s} precedes last recorded stage {self.events[-1].stage}", x, s)
        history = self._by_element.get(x, [])
        if len(history) >= 2:
            raise ThirdChange(f"element {x} already changed at stages {[e.stage for e in history]}", x, s)
        if history and history[-1].stage >= s:
            raise StaleStage(f"element {x} already changed at stage {history[-1].stage}", x, s)
        member = len(history) % 2 == 1
        if kind is ChangeKind.ENUMERATE and member:
            raise WrongKind(f"cannot enumerate {x}: already in D", x, s)
        if kind is ChangeKind.EXTRACT and not member:
            raise WrongKind(f"cannot extract {x}: not in D", x, s)

        event = ChangeEvent(x, s, kind)
        self.events.append(event)
        self._by_element.setdefault(x, []).append(event)
        if kind is ChangeKind.ENUMERATE:
            self._members.add(x)
        else:
            self._members.remove(x)
        self._notify(event)

        if kind is ChangeKind.EXTRACT:
            first = history[0].stage
            entry = LachlanEntry(s, pair_code(x, first), x, first)
            self.lachlan._enter(entry)
            self._notify(entry)
        return event

    # -- queries ---------------------------------------------------------

    def change_count(self, x: int, s: Optional[int] = None) -> int:
        history = self._by_element.get(x, ())
        if s is None:
            return len(history)
        return sum(1 for e in history if e.stage <= s)

    def membership(self, x: int, s: Optional[int] = None) -> int:
        return self.change_count(x, s) % 2

    def first_stage(self, x: int) -> Optional[int]:
        history = self._by_element.get(x)
        return history[0].stage if history else None

    def bit(self, x: int) -> int:
        return 1 if x in self._members else 0

    def ones_below(self, n: int) -> List[int]:
        return list(self._members.irange(maximum=n - 1)) if n > 0 else []

    @property
    def members(self) -> List[int]:
        return list(self._members)

    def max_member(self) -> Optional[int]:
        return self._members[-1] if self._members else None

    def elements(self) -> List[int]:
        """Every element that ever entered D"""
        return list(self._by_element)

    def segment(self, n: int) -> BinarySegment:
        return BinarySegment.of(self, n)

    def _disagreements(self, sigma: BinarySegment, s: Optional[int]) -> List[int]:
        if s is None or s >= self.last_stage:
            current = set(self.ones_below(sigma.length))
            return sorted(current.symmetric_difference(sigma.ones))
        candidates = set(sigma.ones) | {x for x in self._by_element if x < sigma.length}
        return sorted(x for x in candidates if self.membership(x, s) != sigma[x])

    def restorable_to(self, sigma: BinarySegment, s: Optional[int] = None, acting_stage: Optional[int] = None) -> bool:
        """
        False iff some x < |σ| disagrees with σ and has already changed twice. With
        acting_stage, an element that already changed at that stage also blocks, since
        it cannot change again before the next stage.
        """
        for x in self._disagreements(sigma, s):
            if self.change_count(x, s) >= 2:
                return False
            if acting_stage is not None and self._changed_at(x, acting_stage):
                return False
        return True

    def _changed_at(self, x: int, s: int) -> bool:
        history = self._by_element.get(x)
        return bool(history) and history[-1].stage == s

    def permanently_disagrees(self, segment: BinarySegment) -> bool:
        return not self.restorable_to(segment)

    def restore_to(self, sigma: BinarySegment, s: int) -> List[Tuple[int, ChangeKind]]:
        """Apply the minimal change set, in increasing x, that makes D_s ↾ |σ| = σ"""
        disagreements = self._disagreements(sigma, None)
        stuck = [x for x in disagreements if self.change_count(x) >= 2 or self._changed_at(x, s)]
        if stuck:
            raise Unrestorable(f"D cannot be restored to {sigma}: {stuck} cannot change again", stuck[0], s)
        changes: List[Tuple[int, ChangeKind]] = []
        for x in disagreements:
            kind = ChangeKind.EXTRACT if self.bit(x) else ChangeKind.ENUMERATE
            self.apply_change(x, kind, s)
            changes.append((x, kind))
        return changes

    def lachlan_codes_at(self, s: int) -> Set[int]:
        """A_s recomputed from the raw journal"""
        codes = set()
        for x, history in self._by_element.items():
            if len(history) == 2 and history[1].stage <= s:
                codes.add(pair_code(x, history[0].stage))
        return codes

    def lines(self) -> Sequence[str]:
        return [e.to_line() for e in self.events]
