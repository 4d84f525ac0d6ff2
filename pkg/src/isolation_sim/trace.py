"""Line-delimited trace records: writing them during a run and parsing them back for verification"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import IO, Any, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from .core_sets import BinarySegment, ChangeEvent, ChangeKind, LachlanEntry
from .errors import TraceFormatError
from .functionals import Axiom, JournalEntry, Role, format_ones

logger = logging.getLogger(__name__)

K_JOURNAL = "K"


def format_value(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, BinarySegment):
        return f"{value.length}:{format_ones(value)}"
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return ",".join(str(v) for v in items) or "-"
    return str(value)


def parse_ones(text: str) -> List[int]:
    return [] if text == "-" else [int(p) for p in text.split(",")]


def parse_segment(text: str) -> BinarySegment:
    length, _, ones = text.partition(":")
    return BinarySegment(int(length), frozenset(parse_ones(ones or "-")))


@dataclass(frozen=True, slots=True)
class TraceHeader:
    seed: int
    max_depth: int
    horizon: int

    def to_line(self) -> str:
        return f"HDR seed={self.seed} maxDepth={self.max_depth} horizon={self.horizon}"


@dataclass(frozen=True, slots=True)
class DropRecord:
    stage: int
    role: str
    index: int
    x: int
    reason: str

    def to_line(self) -> str:
        return f"DROP {self.stage} {self.role} {self.index} {self.x} {self.reason}"


@dataclass(frozen=True, slots=True)
class EventRecord:
    """One fired item of one node action: `EVT stage node epoch item key=value…`"""

    stage: int
    node: int
    epoch: int
    item: str
    payload: Tuple[Tuple[str, str], ...] = ()

    def to_line(self) -> str:
        fields = " ".join(f"{k}={v}" for k, v in self.payload)
        head = f"EVT {self.stage} {self.node} {self.epoch} {self.item}"
        return f"{head} {fields}" if fields else head

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        for k, v in self.payload:
            if k == key:
                return v
        return default

    def as_int(self, key: str) -> Optional[int]:
        value = self.get(key)
        return None if value is None or value == "-" else int(value)

    def as_ints(self, key: str) -> List[int]:
        value = self.get(key)
        return [] if value is None else parse_ones(value)

    def segment(self, key: str) -> Optional[BinarySegment]:
        value = self.get(key)
        return None if value is None or value == "-" else parse_segment(value)


Record = Union[TraceHeader, ChangeEvent, LachlanEntry, Axiom, JournalEntry, DropRecord, EventRecord]


class Trace:
    """Collects trace lines in order and optionally streams them to a text sink"""

    def __init__(self, sink: Optional[IO[str]] = None):
        self.lines: List[str] = []
        self._sink = sink

    def __len__(self) -> int:
        return len(self.lines)

    def emit(self, record: Any) -> None:
        line = record.to_line()
        self.lines.append(line)
        if self._sink is not None:
            self._sink.write(line + "\n")

    def event(self, stage: int, node: int, epoch: int, item: str, **payload: Any) -> EventRecord:
        record = EventRecord(stage, node, epoch, item, tuple((k, format_value(v)) for k, v in payload.items()))
        self.emit(record)
        return record

    def text(self) -> str:
        return "".join(line + "\n" for line in self.lines)


def _kv(tokens: Sequence[str], line_number: int) -> Tuple[Tuple[str, str], ...]:
    pairs = []
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep or not key:
            raise TraceFormatError(f"expected key=value, got {token!r}", line_number)
        pairs.append((key, value))
    return tuple(pairs)


def parse_line(line: str, line_number: int = 0) -> Record:
    tokens = line.split()
    if not tokens:
        raise TraceFormatError("empty line", line_number)
    tag, rest = tokens[0], tokens[1:]
    try:
        if tag == "CHG" and len(rest) == 3:
            return ChangeEvent(int(rest[1]), int(rest[0]), ChangeKind(rest[2]))
        if tag == "LCH" and len(rest) == 4:
            return LachlanEntry(int(rest[0]), int(rest[1]), int(rest[2]), int(rest[3]))
        if tag == "AXM" and len(rest) == 7:
            segment = BinarySegment(int(rest[2]), frozenset(parse_ones(rest[3])))
            return Axiom(Role(rest[0]), int(rest[1]), segment, int(rest[4]), int(rest[5]), int(rest[6]))
        if tag == "CEJ" and len(rest) == 3:
            return JournalEntry(rest[0], int(rest[1]), int(rest[2]))
        if tag == "DROP" and len(rest) >= 5:
            return DropRecord(int(rest[0]), rest[1], int(rest[2]), int(rest[3]), " ".join(rest[4:]))
        if tag == "EVT" and len(rest) >= 4:
            return EventRecord(int(rest[0]), int(rest[1]), int(rest[2]), rest[3], _kv(rest[4:], line_number))
        if tag == "HDR":
            fields = dict(_kv(rest, line_number))
            return TraceHeader(int(fields["seed"]), int(fields["maxDepth"]), int(fields["horizon"]))
    except (ValueError, KeyError) as e:
        raise TraceFormatError(f"malformed {tag} record: {e}", line_number) from e
    raise TraceFormatError(f"unknown or short record {line!r}", line_number)


def parse_trace(lines: Iterable[str]) -> List[Record]:
    records = []
    for n, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if line.strip():
            records.append(parse_line(line, n))
    return records


def iter_events(records: Iterable[Record]) -> Iterator[EventRecord]:
    return (r for r in records if isinstance(r, EventRecord))
