"""Mutable construction state: the priority tree's node states, Γ/Δ graphs, and the shared sets"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Callable, Dict, List, Mapping, Optional, Tuple, Union

from sortedcontainers import SortedList

from .core_sets import BinarySegment, ChangeHistory, Oracle, pair_code
from .functionals import AgreementKind, AgreementTracker, AxiomStore, CeJournal, Role
from .trace import K_JOURNAL

logger = logging.getLogger(__name__)


class Requirement(str, Enum):
    N = "N"
    R = "R"
    P = "P"


@dataclass(frozen=True, slots=True)
class Node:
    """A node of the unary priority tree is its depth: 3e → N_e, 3e+1 → R_e, 3e+2 → P_e"""

    depth: int

    @property
    def requirement(self) -> Requirement:
        return (Requirement.N, Requirement.R, Requirement.P)[self.depth % 3]

    @property
    def index(self) -> int:
        return self.depth // 3

    @property
    def label(self) -> str:
        return f"{self.requirement.value}{self.index}"


class NodeState:
    def __init__(self, node: Node):
        self.node = node
        self.epoch = 0
        self.ell_history: List[int] = []
        self.last_ell: Optional[int] = None
        self.last_expansionary = False

    @property
    def depth(self) -> int:
        return self.node.depth

    @property
    def index(self) -> int:
        return self.node.index

    def initialize(self) -> None:
        self.epoch += 1
        self.ell_history = []
        self.last_ell = None
        self.last_expansionary = False
        self._clear()

    def _clear(self) -> None:
        pass


# -- P -------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Preservation:
    witness: int
    use: int
    stage: int
    output: int


class PState(NodeState):
    def __init__(self, node: Node):
        super().__init__(node)
        self._clear()

    def _clear(self) -> None:
        self.witness: Optional[int] = None
        self.satisfied = False
        self.preserved: Optional[Preservation] = None


# -- R -------------------------------------------------------------------


class AgitatorState(str, Enum):
    UNDEFINED = "undefined"
    DEFINED = "defined"
    ACTIVE = "active"
    ENUMERATED = "enumerated"
    OBSOLETE = "obsolete"


@dataclass(slots=True)
class Agitator:
    owner: int
    x: int
    state: AgitatorState = AgitatorState.UNDEFINED
    value: Optional[int] = None


@dataclass(frozen=True, slots=True)
class GammaEntry:
    x: int
    value: int
    use: int
    snapshot: BinarySegment
    defined_at: int


class _GuardedGraph:
    """
    Entries on a downward-closed domain 0..n-1, each guarded by a snapshot of one oracle.
    Scans are remembered against the oracle's version, so a repeated query only reads
    the entries added since.
    """

    symbol = "?"

    def __init__(self, owner: int):
        self.owner = owner
        self.entries: List = []
        # (oracle, version, live, checked)
        self._live: Optional[Tuple[object, int, int, int]] = None
        # (values, version, checked, first wrong index)
        self._wrong: Optional[Tuple[object, int, int, Optional[int]]] = None

    def __len__(self) -> int:
        return len(self.entries)

    @staticmethod
    def _input(entry) -> int:
        raise NotImplementedError

    @staticmethod
    def _guard(entry) -> BinarySegment:
        raise NotImplementedError

    def _append(self, entry) -> None:
        if self._input(entry) != len(self.entries):
            raise ValueError(
                f"{self.symbol}_{self.owner} domain must stay downward closed: "
                f"next input is {len(self.entries)}, got {self._input(entry)}"
            )
        self.entries.append(entry)

    def truncate(self, n: int) -> None:
        del self.entries[n:]
        if self._live is not None:
            oracle, version, live, checked = self._live
            self._live = (oracle, version, min(live, n), min(checked, n))
        if self._wrong is not None:
            values, version, checked, index = self._wrong
            self._wrong = (values, version, min(checked, n), index if index is not None and index < n else None)

    def live_prefix(self, oracle: Oracle) -> int:
        """Number of leading entries whose guard is still a prefix of the oracle"""
        version = getattr(oracle, "version", None)
        start = 0
        cached = self._live
        if version is not None and cached is not None and cached[0] is oracle and cached[1] == version:
            _, _, live, checked = cached
            if live < checked:
                return live
            start = live
        live, checked = len(self.entries), len(self.entries)
        for i in range(start, len(self.entries)):
            if not self._guard(self.entries[i]).agrees_with(oracle):
                live, checked = i, i + 1
                break
        if version is not None:
            self._live = (oracle, version, live, checked)
        return live

    def first_wrong(self, values: Oracle, upto: int) -> Optional[int]:
        """Least i < upto whose entry's value differs from values at the entry's input"""
        version = getattr(values, "version", None)
        start = 0
        cached = self._wrong
        if version is not None and cached is not None and cached[0] is values and cached[1] == version:
            _, _, checked, index = cached
            if index is not None or checked >= upto:
                return index if index is not None and index < upto else None
            start = checked
        found = None
        for i in range(start, min(upto, len(self.entries))):
            entry = self.entries[i]
            if entry.value != values.bit(self._input(entry)):
                found = i
                break
        if version is not None:
            checked = found + 1 if found is not None else min(upto, len(self.entries))
            self._wrong = (values, version, checked, found)
        return found


class GammaGraph(_GuardedGraph):
    """Γ^{W_e}: entry x guarded by its W-snapshot"""

    symbol = "Γ"

    @staticmethod
    def _input(entry: GammaEntry) -> int:
        return entry.x

    @staticmethod
    def _guard(entry: GammaEntry) -> BinarySegment:
        return entry.snapshot

    def define(self, entry: GammaEntry) -> None:
        self._append(entry)


class RState(NodeState):
    def __init__(self, node: Node):
        super().__init__(node)
        self._clear()

    def _clear(self) -> None:
        self.agitators: Dict[int, Agitator] = {}
        self.gamma = GammaGraph(self.node.index)
        self._values = SortedList()

    def agitator(self, x: int) -> Agitator:
        found = self.agitators.get(x)
        if found is None:
            found = self.agitators[x] = Agitator(self.node.index, x)
        return found

    def define_agitator(self, x: int, value: int) -> Agitator:
        a = self.agitator(x)
        if a.value is not None:
            self._values.remove(a.value)
        a.value, a.state = value, AgitatorState.DEFINED
        self._values.add(value)
        return a

    def clear_agitator(self, x: int, state: AgitatorState) -> None:
        a = self.agitator(x)
        if a.value is not None:
            self._values.remove(a.value)
        a.value, a.state = None, state

    def max_value(self) -> Optional[int]:
        return self._values[-1] if self._values else None

    def valued(self) -> List[Agitator]:
        return [a for a in self.agitators.values() if a.value is not None]


# -- N -------------------------------------------------------------------


class CyclePhase(str, Enum):
    INITIALIZED = "initialized"
    PHASE1 = "phase1"
    PHASE2 = "phase2"
    ACCOMPLISHED = "accomplished"


@dataclass(frozen=True, slots=True)
class DiagPair:
    y: int
    sigma: BinarySegment
    tau: BinarySegment


@dataclass(frozen=True, slots=True)
class DeltaEntry:
    y: int
    value: int
    pair: DiagPair
    defined_at: int

    @property
    def use(self) -> int:
        return self.pair.tau.length


class DeltaGraph(_GuardedGraph):
    """Δ^A for one cycle: entries on 0..n-1, plus the latest diagonalizing pair per input"""

    symbol = "Δ"

    def __init__(self, owner: int):
        super().__init__(owner)
        self.pairs: Dict[int, DiagPair] = {}

    @staticmethod
    def _input(entry: DeltaEntry) -> int:
        return entry.y

    @staticmethod
    def _guard(entry: DeltaEntry) -> BinarySegment:
        return entry.pair.tau

    def define(self, entry: DeltaEntry) -> None:
        self._append(entry)
        self.pairs[entry.y] = entry.pair


class Cycle:
    def __init__(self, owner: int, k: int):
        self.owner = owner
        self.k = k
        self.phase = CyclePhase.INITIALIZED
        self.delta = DeltaGraph(owner)
        self.dc: Optional[BinarySegment] = None
        self.dc_input: Optional[int] = None
        # i -> d_i*, the agitator value recorded when the cycle entered phase 2
        self.d_star: Dict[int, int] = {}

    def upsilon(self, D: ChangeHistory, s: Optional[int] = None) -> List[int]:
        """Υ_k: indices i whose recorded d_i* is in D (at stage s, or now)"""
        return sorted(i for i, d in self.d_star.items() if D.membership(d, s))


class NState(NodeState):
    def __init__(self, node: Node):
        super().__init__(node)
        self._clear()

    def _clear(self) -> None:
        self.cycles: List[Cycle] = []
        self.cyc_count = 0
        # s*: the previous α-stage since the last initialization, and the agitator values read then
        self.last_stage: Optional[int] = None
        self.agitator_snapshot: Dict[Tuple[int, int], int] = {}

    def cycle(self, k: int) -> Cycle:
        while len(self.cycles) <= k:
            self.cycles.append(Cycle(self.node.index, len(self.cycles)))
        return self.cycles[k]

    def drop_cycles_above(self, k: int) -> None:
        del self.cycles[k + 1:]

    def working_cycle(self) -> int:
        for cycle in self.cycles:
            if cycle.phase in (CyclePhase.INITIALIZED, CyclePhase.PHASE1):
                return cycle.k
        return len(self.cycles)


AnyState = Union[PState, RState, NState]


def make_node_state(depth: int) -> AnyState:
    node = Node(depth)
    return {Requirement.N: NState, Requirement.R: RState, Requirement.P: PState}[node.requirement](node)


class ConstructionState:
    """Everything the stage loop owns: D (with A), the axiom store, the journals and node states"""

    def __init__(self, max_depth: int):
        self.stage = 0
        self.D = ChangeHistory()
        self.store = AxiomStore()
        self.K = CeJournal(K_JOURNAL, odd_only=True)
        self.W: Dict[int, CeJournal] = {}
        self.nodes: List[AnyState] = [make_node_state(depth) for depth in range(max_depth)]
        self.agitator_owner: Dict[int, Tuple[int, int]] = {}
        self.agreements = AgreementTracker()
        # node label -> every fresh number that node picked, in order
        self.picks: Dict[str, List[int]] = {}
        self._high_water = 0
        self._code_high_water = 0
        self.D.add_listener(self._note_change)

    @property
    def A(self):
        return self.D.lachlan

    @property
    def max_depth(self) -> int:
        return len(self.nodes)

    def w(self, e: int) -> CeJournal:
        journal = self.W.get(e)
        if journal is None:
            journal = self.W[e] = CeJournal(str(e))
        return journal

    def r_state(self, i: int) -> Optional[RState]:
        depth = 3 * i + 1
        return self.nodes[depth] if depth < len(self.nodes) else None  # type: ignore[return-value]

    def agreement(self, kind: AgreementKind, e: int, s: Optional[int] = None) -> Optional[int]:
        return self.agreements.length(kind, e, self.D, self.w(e), self.store, s)

    # -- fresh numbers ---------------------------------------------------

    def _note_change(self, record: object) -> None:
        element = getattr(record, "element", None)
        if element is not None and getattr(record, "code", None) is None:
            self.note_number(element)
            first = self.D.first_stage(element)
            self.note_code(pair_code(element, first))

    def note_number(self, n: int) -> None:
        if n > self._high_water:
            self._high_water = n

    def note_code(self, n: int) -> None:
        if n > self._code_high_water:
            self._code_high_water = n

    @property
    def number_frontier(self) -> int:
        return max(self._high_water, self.stage)

    @property
    def code_frontier(self) -> int:
        return self._code_high_water

    def fresh_number(self, owner: Optional[Node] = None) -> int:
        value = max(self._high_water, self.stage) + 1
        self._high_water = value
        if owner is not None:
            self.picks.setdefault(owner.label, []).append(value)
        return value

    def fresh_code_use(self) -> int:
        value = self._code_high_water + 1
        self._code_high_water = value
        return value


class ReadOnlyOracle:
    """Query-only face of D, A or a journal"""

    __slots__ = ("_target",)

    def __init__(self, target):
        self._target = target

    @property
    def version(self) -> int:
        return self._target.version

    def bit(self, p: int) -> int:
        return self._target.bit(p)

    def ones_below(self, n: int) -> List[int]:
        return self._target.ones_below(n)

    def max_member(self) -> Optional[int]:
        return self._target.max_member()

    def segment(self, n: int) -> BinarySegment:
        return BinarySegment.of(self._target, n)

    def permanently_disagrees(self, segment: BinarySegment) -> bool:
        return self._target.permanently_disagrees(segment)


class ConstructionView:
    """
    What an adversary may see of the construction. It holds read-only faces of the sets
    and getters for the frontiers, never the state itself, so nothing reached through it
    can change the construction.
    """

    def __init__(self, state: ConstructionState):
        self.stage = state.stage
        self.D = ReadOnlyOracle(state.D)
        self.A = ReadOnlyOracle(state.A)
        self.K = ReadOnlyOracle(state.K)
        self._journals: Mapping[int, CeJournal] = MappingProxyType(state.W)
        self._frontiers: Callable[[], Tuple[int, int]] = lambda: (state.number_frontier, state.code_frontier)
        self._picks: Callable[[str], Tuple[int, ...]] = lambda label: tuple(state.picks.get(label, ()))
        self._evaluate = state.store.evaluate

    @property
    def number_frontier(self) -> int:
        return self._frontiers()[0]

    @property
    def code_frontier(self) -> int:
        return self._frontiers()[1]

    def picks(self, label: str) -> Tuple[int, ...]:
        """Fresh numbers picked so far by the node with this label, e.g. "R0" or "P1" """
        return self._picks(label)

    def W(self, e: int) -> ReadOnlyOracle:
        journal = self._journals.get(e)
        return ReadOnlyOracle(journal if journal is not None else CeJournal(str(e)))

    def evaluate(self, role: Role, e: int, oracle: Oracle, x: int) -> Optional[Tuple[int, int]]:
        return self._evaluate(role, e, oracle, x, self.stage)
