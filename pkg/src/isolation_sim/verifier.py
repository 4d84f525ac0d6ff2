"""
Independent re-derivation of the construction's invariants from a trace and its run config.

Nothing here touches engine state: D, A, the journals, the axioms, Γ and Δ are rebuilt
from the trace records by brute force, and every check reports PASS, FAIL (with a
locus) or INFO (not falsified at the horizon).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from pydantic import BaseModel, Field, model_validator

from .config import RunConfig
from .core_sets import BinarySegment, ChangeEvent, ChangeKind, LachlanEntry, pair_code
from .errors import TraceFormatError
from .functionals import Axiom, JournalEntry, Role
from .trace import K_JOURNAL, EventRecord, Record, TraceHeader, parse_line

logger = logging.getLogger(__name__)


class CheckStatus(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INFO = "INFO"


def _token(value: Any) -> str:
    return "_".join(str(value).split()) or "-"


class Locus(BaseModel):
    stage: Optional[int] = None
    node: Optional[int] = None
    element: Optional[int] = None
    expected: Optional[str] = None
    actual: Optional[str] = None

    def to_fields(self) -> str:
        return " ".join(f"{k}={_token(v)}" for k, v in self.model_dump().items() if v is not None)


class CheckResult(BaseModel):
    name: str
    status: CheckStatus
    locus: Optional[Locus] = None
    message: str = ""
    statistics: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _failures_have_locus(self) -> "CheckResult":
        if self.status is CheckStatus.FAIL and self.locus is None:
            raise ValueError(f"failing check {self.name} needs a counterexample locus")
        return self

    def to_line(self) -> str:
        parts = [f"CHK {self.name} {self.status.value}"]
        if self.locus is not None:
            parts.append(self.locus.to_fields())
        if self.message:
            parts.append(f"msg={_token(self.message)}")
        return " ".join(p for p in parts if p)


class VerifierReport(BaseModel):
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def failed(self) -> bool:
        return any(c.status is CheckStatus.FAIL for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def check(self, name: str) -> Optional[CheckResult]:
        return next((c for c in self.checks if c.name == name), None)

    def to_lines(self) -> List[str]:
        return [c.to_line() for c in self.checks]

    def summary_table(self) -> str:
        rows = ["check\tstatus\tlocus\tmessage"]
        for c in self.checks:
            rows.append(f"{c.name}\t{c.status.value}\t{c.locus.to_fields() if c.locus else '-'}\t{c.message or '-'}")
        return "\n".join(rows) + "\n"


def _pass(name: str, message: str = "", **statistics) -> CheckResult:
    return CheckResult(name=name, status=CheckStatus.PASS, message=message, statistics=statistics)


def _fail(name: str, locus: Locus, message: str, **statistics) -> CheckResult:
    return CheckResult(name=name, status=CheckStatus.FAIL, locus=locus, message=message, statistics=statistics)


def parse_records(lines: Iterable[str]) -> Tuple[List[Record], Optional[TraceFormatError]]:
    """Parse as far as the trace is well formed; the first malformed line stops parsing"""
    records: List[Record] = []
    for n, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        try:
            records.append(parse_line(line, n))
        except TraceFormatError as e:
            return records, e
    return records, None


# -- brute-force replay of the sets and the node-built functionals ------------


def _agrees(segment: BinarySegment, members: Set[int]) -> bool:
    return all(p in members for p in segment.ones) and sum(1 for m in members if m < segment.length) == len(segment.ones)


@dataclass
class _CycleReplay:
    phase: str = "initialized"
    delta: Dict[int, Tuple[int, BinarySegment]] = field(default_factory=dict)
    dc: Optional[BinarySegment] = None
    dc_input: Optional[int] = None
    last_c2: int = 0


class TraceReplay:
    """Rebuilds D, A, W_e, K, the axioms, Γ and Δ record by record"""

    def __init__(self):
        self.counts: Dict[int, int] = {}
        self.first: Dict[int, int] = {}
        self.D: Set[int] = set()
        self.A: Set[int] = set()
        self.journals: Dict[str, Dict[int, int]] = {}
        self.axioms: Dict[Tuple[Role, int, int], List[Axiom]] = {}
        self.gamma: Dict[int, Dict[int, Tuple[int, BinarySegment]]] = {}
        self.cycles: Dict[int, Dict[int, _CycleReplay]] = {}
        self.p_claims: Dict[int, EventRecord] = {}
        self.expansionary: Dict[int, List[int]] = {}
        self.epochs: Dict[int, int] = {}

    def journal(self, name: str) -> Set[int]:
        return set(self.journals.get(name, {}))

    def cycle(self, depth: int, k: int) -> _CycleReplay:
        return self.cycles.setdefault(depth, {}).setdefault(k, _CycleReplay())

    def evaluate(self, role: Role, e: int, members: Set[int], x: int) -> Optional[Tuple[int, int]]:
        for axiom in self.axioms.get((role, e, x), ()):
            if _agrees(axiom.segment, members):
                return axiom.y, axiom.use
        return None

    def evaluate_on_segment(self, role: Role, e: int, sigma: BinarySegment, x: int) -> Optional[int]:
        for axiom in self.axioms.get((role, e, x), ()):
            if axiom.segment.is_prefix_of(sigma):
                return axiom.y
        return None

    def live_gamma(self, depth: int) -> List[Tuple[int, int]]:
        W = self.journal(str(depth // 3))
        entries = self.gamma.get(depth, {})
        live, x = [], 0
        while x in entries and _agrees(entries[x][1], W):
            live.append((x, entries[x][0]))
            x += 1
        return live

    def live_delta(self, cycle: _CycleReplay) -> List[Tuple[int, int]]:
        live, y = [], 0
        while y in cycle.delta and _agrees(cycle.delta[y][1], self.A):
            live.append((y, cycle.delta[y][0]))
            y += 1
        return live

    def apply(self, record: Record) -> None:
        if isinstance(record, ChangeEvent):
            x = record.element
            self.counts[x] = self.counts.get(x, 0) + 1
            self.first.setdefault(x, record.stage)
            if record.kind is ChangeKind.ENUMERATE:
                self.D.add(x)
            else:
                self.D.discard(x)
            if self.counts[x] == 2:
                self.A.add(pair_code(x, self.first[x]))
        elif isinstance(record, JournalEntry):
            self.journals.setdefault(record.journal, {}).setdefault(record.element, record.stage)
        elif isinstance(record, Axiom):
            self.axioms.setdefault((record.role, record.index, record.x), []).append(record)
        elif isinstance(record, EventRecord):
            self._apply_event(record)

    def _apply_event(self, r: EventRecord) -> None:
        depth = r.node
        if r.item == "INIT":
            self.gamma.pop(depth, None)
            self.cycles.pop(depth, None)
            self.p_claims.pop(depth, None)
            self.expansionary.pop(depth, None)
            self.epochs[depth] = r.epoch
        elif r.item == "R2":
            self._truncate(self.gamma.get(depth, {}), r.as_int("x"))
        elif r.item == "R3":
            self._truncate(self.gamma.get(depth, {}), r.as_int("y"))
        elif r.item in ("R3a", "R3c"):
            self.gamma.setdefault(depth, {})[r.as_int("x")] = (r.as_int("v"), r.segment("snap"))
        elif r.item == "C2":
            cycle = self.cycle(depth, r.as_int("k"))
            cycle.phase, cycle.last_c2 = "phase1", r.stage
            if r.as_int("div") == 1:
                self._truncate(cycle.delta, r.as_int("x"))
        elif r.item in ("C2a.i", "C2a.ii"):
            self.cycle(depth, r.as_int("k")).delta[r.as_int("y")] = (r.as_int("v"), r.segment("tau"))
        elif r.item == "C2b":
            cycle = self.cycle(depth, r.as_int("k"))
            cycle.dc, cycle.dc_input = r.segment("sig"), r.as_int("x")
        elif r.item == "N2":
            k = r.as_int("k")
            for j in [j for j in self.cycles.get(depth, {}) if j > k]:
                del self.cycles[depth][j]
        elif r.item == "N3":
            cycle = self.cycle(depth, r.as_int("k"))
            cycle.phase, cycle.dc, cycle.dc_input = "accomplished", r.segment("dc"), r.as_int("x")
        elif r.item == "N4":
            self.cycle(depth, r.as_int("k")).phase = "phase2"
        elif r.item in ("P4", "P5"):
            self.p_claims[depth] = r
        elif r.item == "ACT" and r.as_int("exp") == 1:
            self.expansionary.setdefault(depth, []).append(r.stage)

    @staticmethod
    def _truncate(entries: Dict[int, Any], lowest: Optional[int]) -> None:
        if lowest is None:
            return
        for key in [key for key in entries if key >= lowest]:
            del entries[key]


# -- checks -------------------------------------------------------------------


def check_dce(records: Sequence[Record]) -> CheckResult:
    history: Dict[int, List[ChangeEvent]] = {}
    for r in records:
        if not isinstance(r, ChangeEvent):
            continue
        previous = history.setdefault(r.element, [])
        expected = ChangeKind.ENUMERATE if len(previous) % 2 == 0 else ChangeKind.EXTRACT
        if len(previous) >= 2:
            return _fail("dce", Locus(stage=r.stage, element=r.element, expected="at most 2 changes",
                                      actual=f"change {len(previous) + 1}"), "third change")
        if r.kind is not expected:
            return _fail("dce", Locus(stage=r.stage, element=r.element, expected=expected.value,
                                      actual=r.kind.value), "wrong change kind")
        if previous and r.stage <= previous[-1].stage:
            return _fail("dce", Locus(stage=r.stage, element=r.element, expected=f"stage > {previous[-1].stage}",
                                      actual=str(r.stage)), "stages not increasing")
        previous.append(r)
    twice = sum(1 for h in history.values() if len(h) == 2)
    return _pass("dce", elements=len(history), changed_twice=twice)


def check_lachlan(records: Sequence[Record]) -> CheckResult:
    """A recomputed from the change journal must match the traced entries stage by stage"""
    first: Dict[int, int] = {}
    recomputed: Dict[int, List[int]] = {}
    traced: Dict[int, List[int]] = {}
    element_of: Dict[int, int] = {}
    seen: Set[int] = set()
    for r in records:
        if isinstance(r, ChangeEvent):
            if r.kind is ChangeKind.ENUMERATE and r.element not in first:
                first[r.element] = r.stage
            elif r.kind is ChangeKind.EXTRACT and r.element in first:
                code = pair_code(r.element, first[r.element])
                if code not in seen:
                    seen.add(code)
                    element_of[code] = r.element
                    recomputed.setdefault(r.stage, []).append(code)
        elif isinstance(r, LachlanEntry):
            traced.setdefault(r.stage, []).append(r.code)
            element_of.setdefault(r.code, r.element)

    for stage in sorted(set(recomputed) | set(traced)):
        want, got = sorted(recomputed.get(stage, [])), sorted(traced.get(stage, []))
        if want != got:
            diff = sorted(set(want).symmetric_difference(got))
            return _fail("lachlan", Locus(stage=stage, element=element_of.get(diff[0]) if diff else None,
                                          expected=",".join(map(str, want)) or "-",
                                          actual=",".join(map(str, got)) or "-"),
                         "Lachlan entries differ from the recomputed set")
    return _pass("lachlan", codes=sum(len(v) for v in recomputed.values()))


def closed_form_bounds(e_max: int) -> Tuple[List[int], List[int]]:
    """F(e) and G(e) from F(0) = 1, G(e) = (e+1)(2^e+1)F(e), F(e+1) = 2G(e)+e+1"""
    F, G = [1], []
    for e in range(e_max + 1):
        G.append((e + 1) * (2 ** e + 1) * F[e])
        F.append(2 * G[e] + e + 1)
    return F[: e_max + 1], G


def check_bounds(records: Sequence[Record], config: RunConfig) -> CheckResult:
    depth_count = config.max_depth
    inits = [0] * depth_count
    cycles: Dict[Tuple[int, int], int] = {}
    for r in records:
        if not isinstance(r, EventRecord) or r.node >= depth_count:
            continue
        if r.item == "INIT":
            inits[r.node] += 1
        elif r.item == "N4":
            cycles[(r.node, r.epoch)] = cycles.get((r.node, r.epoch), 0) + 1

    e_max = (depth_count - 1) // 3
    def observed(depth: int) -> Optional[int]:
        return 1 + inits[depth] if depth < depth_count else None

    f = [observed(3 * e) for e in range(e_max + 1)]
    g = [observed(3 * e + 1) for e in range(e_max + 1)]
    h = [observed(3 * e + 2) for e in range(e_max + 1)]
    max_cyc = [max((c for (d, _), c in cycles.items() if d == 3 * e), default=0) for e in range(e_max + 1)]
    F, G = closed_form_bounds(e_max)
    literal_exceeded = [e for e in range(e_max + 1) if f[e] > 2 ** (e * e)]
    stats = dict(f=f, g=g, h=h, max_cyc=max_cyc, closed_f=F, closed_g=G, literal_closed_form_exceeded=literal_exceeded)

    if f[0] != 1:
        return _fail("bounds", Locus(node=0, expected="f'(0)=1", actual=str(f[0])), "root N-node initialized", **stats)
    for (depth, epoch), count in sorted(cycles.items()):
        e = depth // 3
        if count > 2 ** e:
            return _fail("bounds", Locus(node=depth, expected=f"cycCount<={2 ** e}", actual=str(count)),
                         f"too many cycles entered phase 2 in epoch {epoch}", **stats)
    for e in range(e_max + 1):
        if f[e] > F[e]:
            return _fail("bounds", Locus(node=3 * e, expected=f"f'<={F[e]}", actual=str(f[e])), "closed form for f", **stats)
        if g[e] is None:
            continue
        if g[e] > (e + 1) * (max_cyc[e] + 1) * f[e]:
            return _fail("bounds", Locus(node=3 * e + 1, expected=f"g'<={(e + 1) * (max_cyc[e] + 1) * f[e]}",
                                         actual=str(g[e])), "recurrence for g", **stats)
        if g[e] > G[e]:
            return _fail("bounds", Locus(node=3 * e + 1, expected=f"g'<={G[e]}", actual=str(g[e])), "closed form for g", **stats)
        if h[e] is None:
            continue
        if h[e] != g[e]:
            return _fail("bounds", Locus(node=3 * e + 2, expected=f"h'={g[e]}", actual=str(h[e])), "h' differs from g'", **stats)
        if e + 1 <= e_max and f[e + 1] > 2 * h[e] + e + 1:
            return _fail("bounds", Locus(node=3 * (e + 1), expected=f"f'<={2 * h[e] + e + 1}", actual=str(f[e + 1])),
                         "recurrence for f", **stats)
    return _pass("bounds", **stats)


def check_agreements(records: Sequence[Record]) -> CheckResult:
    replay = TraceReplay()
    pending_gamma: Set[int] = set()
    pending_delta: Dict[int, int] = {}
    checked = {"gamma": 0, "delta": 0, "restorations": 0}
    for r in records:
        replay.apply(r)
        if not isinstance(r, EventRecord):
            continue
        if r.item == "R3":
            pending_gamma.add(r.node)
        elif r.item == "C2" and r.as_int("div") == 1:
            pending_delta[r.node] = r.as_int("k")
        elif r.item == "N3":
            checked["restorations"] += 1
            dc = r.segment("dc")
            if r.as_int("unrestorable") == 1 or not _agrees(dc, replay.D):
                return _fail("agreements", Locus(stage=r.stage, node=r.node, element=r.as_int("x"),
                                                 expected=str(dc), actual="D moved off dc"),
                             "D does not extend dc(k) after accomplishment", **checked)
        elif r.item == "ACT":
            if r.node in pending_gamma:
                pending_gamma.discard(r.node)
                checked["gamma"] += 1
                K = replay.journal(K_JOURNAL)
                for x, value in replay.live_gamma(r.node):
                    if value != (1 if x in K else 0):
                        return _fail("agreements", Locus(stage=r.stage, node=r.node, element=x,
                                                         expected=str(1 if x in K else 0), actual=str(value)),
                                     "Γ disagrees with K", **checked)
            if r.node in pending_delta:
                k = pending_delta.pop(r.node)
                checked["delta"] += 1
                W = replay.journal(str(r.node // 3))
                for y, value in replay.live_delta(replay.cycle(r.node, k)):
                    if value != (1 if y in W else 0):
                        return _fail("agreements", Locus(stage=r.stage, node=r.node, element=y,
                                                         expected=str(1 if y in W else 0), actual=str(value)),
                                     "Δ disagrees with W", **checked)
    return _pass("agreements", **checked)


def check_outcomes(records: Sequence[Record], config: RunConfig) -> CheckResult:
    replay = TraceReplay()
    for r in records:
        replay.apply(r)

    verdicts: Dict[str, str] = {}
    informational = False
    for depth in range(config.max_depth):
        e = depth // 3
        label = ("N", "R", "P")[depth % 3] + str(e)
        if depth % 3 == 2:
            claim = replay.p_claims.get(depth)
            if claim is None:
                verdicts[label] = "never-converged"
                continue
            w, use, tau = claim.as_int("w"), claim.as_int("use"), claim.segment("tau")
            theta = replay.evaluate(Role.THETA, e, replay.A, w)
            d_bit = 1 if w in replay.D else 0
            if theta is None or theta[0] != d_bit:
                verdicts[label] = "diagonal-holds"
            elif not _agrees(tau, replay.A):
                verdicts[label] = "injured"
                informational = True
            else:
                return _fail("outcomes", Locus(stage=claim.stage, node=depth, element=w,
                                               expected=f"D(w)!={theta[0]}", actual=str(d_bit)),
                             "P diagonal fails with A ↾ use unchanged", verdicts=verdicts)
        elif depth % 3 == 0:
            verdict = _n_outcome(replay, depth, e)
            if verdict.startswith("OVERLAP"):
                return _fail("outcomes", Locus(node=depth, expected="one branch", actual=verdict.split(":")[1]),
                             "N outcome branches overlap", verdicts=verdicts)
            if verdict.startswith("FAIL"):
                y = int(verdict.split(":")[1])
                return _fail("outcomes", Locus(node=depth, element=y, expected="Δ(y)=W(y)", actual="Δ(y)!=W(y)"),
                             "Δ wrong although α expanded after W changed", verdicts=verdicts)
            verdicts[label] = verdict
            informational = informational or verdict in ("no-expansion", "pending")

    status = CheckStatus.INFO if informational else CheckStatus.PASS
    return CheckResult(name="outcomes", status=status, statistics={"verdicts": verdicts})


def _n_outcome(replay: TraceReplay, depth: int, e: int) -> str:
    """
    Which way N_e is met at the horizon. The branches are read off independently and
    must exclude each other: a diagonalizing computation that still stands, a working
    cycle whose live Δ agrees with W_e, or no expansionary stage in the final epoch.
    """
    W = replay.journal(str(e))
    cycles = replay.cycles.get(depth, {})
    diagonalized = False
    for k in sorted(cycles):
        cycle = cycles[k]
        if cycle.phase != "accomplished" or cycle.dc is None or not _agrees(cycle.dc, replay.D):
            continue
        value = replay.evaluate_on_segment(Role.PSI, e, cycle.dc, cycle.dc_input)
        if value is not None and value != (1 if cycle.dc_input in W else 0):
            diagonalized = True
            break

    working = next((cycles[k] for k in sorted(cycles) if cycles[k].phase in ("initialized", "phase1")), None)
    live = replay.live_delta(working) if working is not None else []
    wrong = next((y for y, v in live if v != (1 if y in W else 0)), None)
    expanded = bool(replay.expansionary.get(depth))

    branches = [name for name, holds in (
        ("diagonalized", diagonalized),
        ("delta-agrees", bool(live) and wrong is None),
        ("no-expansion", not expanded),
    ) if holds]
    if len(branches) > 1:
        return "OVERLAP:" + ",".join(branches)
    if diagonalized:
        return "diagonalized"
    if wrong is None:
        return "delta-agrees" if expanded else "no-expansion"
    changed_at = replay.journals.get(str(e), {}).get(wrong, 0)
    if working.last_c2 >= changed_at:
        return f"FAIL:{wrong}"
    return "pending"


def check_agitators(records: Sequence[Record]) -> CheckResult:
    """
    Replays every R-node's agitators d_{e,x} within each epoch and checks that each item
    naming one names the value it holds: R3b only on an undefined agitator, R3c, RENUM
    and N4-clear on the current value, and R2 releasing exactly the agitators in D from
    its lowest index up.
    """
    values: Dict[int, Dict[int, int]] = {}
    D: Set[int] = set()
    definitions: Dict[Tuple[int, int, int], int] = {}
    for r in records:
        if isinstance(r, ChangeEvent):
            if r.kind is ChangeKind.ENUMERATE:
                D.add(r.element)
            else:
                D.discard(r.element)
            continue
        if not isinstance(r, EventRecord):
            continue
        if r.item == "INIT":
            values.pop(r.node, None)
            continue
        if r.item == "R3b":
            x, d = r.as_int("x"), r.as_int("d")
            current = values.setdefault(r.node, {})
            if x in current:
                return _fail("agitators", Locus(stage=r.stage, node=r.node, element=d, expected=f"d_{x} undefined",
                                                actual=f"d_{x}={current[x]}"), "agitator redefined while it holds a value")
            current[x] = d
            key = (r.node, r.epoch, x)
            definitions[key] = definitions.get(key, 0) + 1
        elif r.item == "R3a":
            values.get(r.node, {}).pop(r.as_int("x"), None)
        elif r.item in ("R3c", "RENUM", "N4-clear"):
            if r.item == "RENUM" and r.as_int("blocked") == 1:
                continue
            depth = 3 * r.as_int("i") + 1 if r.item == "N4-clear" else r.node
            x, d = r.as_int("x"), r.as_int("d")
            current = values.get(depth, {})
            if current.get(x) != d:
                return _fail("agitators", Locus(stage=r.stage, node=depth, element=d,
                                                expected=f"d_{x}={current.get(x, '-')}", actual=f"d_{x}={d}"),
                             f"{r.item} names a value the agitator does not hold")
            if r.item == "N4-clear":
                del current[x]
        elif r.item == "R2":
            lowest = r.as_int("x")
            extracted, kept = r.as_ints("extracted"), r.as_ints("kept")
            current = values.get(r.node, {})
            holder = {d: x for x, d in current.items()}
            for d in extracted + kept:
                if holder.get(d) is None or holder[d] < lowest:
                    return _fail("agitators", Locus(stage=r.stage, node=r.node, element=d,
                                                    expected=f"an agitator at x>={lowest}", actual="none"),
                                 "R2 releases a value no agitator holds")
            if extracted + kept and min(holder[d] for d in extracted + kept) != lowest:
                return _fail("agitators", Locus(stage=r.stage, node=r.node, expected=f"x={lowest}",
                                                actual=f"x={min(holder[d] for d in extracted + kept)}"),
                             "R2 index is not the lowest released agitator")
            for d in kept:
                if d not in D:
                    return _fail("agitators", Locus(stage=r.stage, node=r.node, element=d, expected="in D",
                                                    actual="not in D"), "kept agitator is not in D")
            for d in extracted:
                if d in D:
                    return _fail("agitators", Locus(stage=r.stage, node=r.node, element=d, expected="not in D",
                                                    actual="in D"), "extracted agitator is still in D")
            for x in [x for x in current if x >= lowest]:
                del current[x]
    return _pass("agitators", definitions=sum(definitions.values()),
                 max_definitions=max(definitions.values(), default=0),
                 unsettled=sum(len(v) for v in values.values()))


def check_provenance(records: Sequence[Record]) -> CheckResult:
    """
    Every extraction from D is made inside some node's action, and that action says why:
    an R-node released the element in R2, or an N-node restored D in C2b or N3.
    P-nodes only ever enumerate.
    """
    pending: List[ChangeEvent] = []
    items: List[EventRecord] = []
    counts = {"released": 0, "restored": 0}
    for r in records:
        if isinstance(r, ChangeEvent) and r.kind is ChangeKind.EXTRACT:
            pending.append(r)
            continue
        if not isinstance(r, EventRecord):
            continue
        if r.item != "ACT":
            items.append(r)
            continue
        for change in pending:
            locus = Locus(stage=change.stage, node=r.node, element=change.element)
            if r.node % 3 == 2:
                locus.expected, locus.actual = "R2 or an N restoration", "P-node"
                return _fail("provenance", locus, "extraction made by a P-node", **counts)
            if r.node % 3 == 1:
                ok = any(i.item == "R2" and i.node == r.node and change.element in i.as_ints("extracted") for i in items)
                counts["released"] += ok
            else:
                ok = any(i.item in ("C2b", "N3") and i.node == r.node for i in items)
                counts["restored"] += ok
            if not ok:
                locus.expected, locus.actual = ("R2" if r.node % 3 == 1 else "C2b or N3"), "-"
                return _fail("provenance", locus, "extraction without a reason in its action", **counts)
        pending, items = [], []
    if pending:
        change = pending[0]
        return _fail("provenance", Locus(stage=change.stage, element=change.element, expected="an acting node",
                                         actual="none"), "extraction outside any node action", **counts)
    return _pass("provenance", **counts)


def replay_check(lines: Sequence[str], config: RunConfig) -> CheckResult:
    from .construction import run_construction

    lines = [line.rstrip("\n") for line in lines if line.strip()]
    header = parse_line(lines[0], 1) if lines and lines[0].startswith("HDR") else None
    _, trace = run_construction(config)
    expected = trace.lines
    if isinstance(header, TraceHeader) and header.seed != config.seed:
        same = expected == lines
        return CheckResult(name="replay", status=CheckStatus.INFO,
                           message=f"trace seed {header.seed} differs from config seed {config.seed}; "
                                   f"{'identical' if same else 'differences expected'}")
    for n, (want, got) in enumerate(zip(expected, lines), start=1):
        if want != got:
            return _fail("replay", Locus(element=n, expected=want, actual=got), "trace differs from re-execution")
    if len(expected) != len(lines):
        n = min(len(expected), len(lines)) + 1
        return _fail("replay", Locus(element=n, expected=f"{len(expected)} lines", actual=f"{len(lines)} lines"),
                     "trace length differs from re-execution")
    return _pass("replay", lines=len(lines))


def verify_trace(lines: Sequence[str], config: RunConfig, replay: bool = True) -> VerifierReport:
    records, error = parse_records(lines)
    checks: List[CheckResult] = []
    if error is not None:
        checks.append(_fail("parse", Locus(element=error.line_number), str(error)))
    checks.append(check_dce(records))
    checks.append(check_lachlan(records))
    checks.append(check_bounds(records, config))
    checks.append(check_agreements(records))
    checks.append(check_outcomes(records, config))
    checks.append(check_agitators(records))
    checks.append(check_provenance(records))
    if replay:
        checks.append(replay_check(lines, config))
    report = VerifierReport(checks=checks)
    for check in report.checks:
        if check.status is CheckStatus.FAIL:
            logger.error(f"❌ {check.to_line()}")
    return report
