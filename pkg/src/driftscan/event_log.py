"""Event log data model, XES/CSV (de)serialization and sliding windows.

Traces are indexed from 0 everywhere: ``window_at(log, 0, 4)`` holds the
first four traces of the log.
"""

from __future__ import annotations

import csv
import io
import os
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import BinaryIO, Union
from xml.etree import ElementTree as ET

from .exceptions import LogParseError, WindowBoundsError

__all__ = [
    "Event",
    "Trace",
    "EventLog",
    "SlidingWindow",
    "parse_log",
    "serialize_log",
    "read_log",
    "write_log",
    "window_at",
    "extract_dfr",
    "trace_dfr",
]

Source = Union[bytes, str, os.PathLike, BinaryIO]

FORMATS = ("xes", "csv")


@dataclass(frozen=True)
class Event:
    activity: str
    case_id: str
    timestamp: int | None = None  # ms since epoch

    def __post_init__(self):
        if not isinstance(self.activity, str) or not self.activity:
            raise ValueError("event activity must be a nonempty string")


@dataclass(frozen=True)
class Trace:
    id: str
    events: tuple[Event, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        last = None
        for ev in self.events:
            if ev.case_id != self.id:
                raise ValueError(
                    f"event of case {ev.case_id!r} placed in trace {self.id!r}"
                )
            if ev.timestamp is not None:
                if last is not None and ev.timestamp < last:
                    raise ValueError(f"trace {self.id!r}: timestamps decrease")
                last = ev.timestamp

    @classmethod
    def from_activities(cls, case_id: str, activities: Iterable[str], start=None, step=1):
        """Build a trace from bare labels; timestamps are ``start + k*step`` when
        ``start`` is given."""
        events = []
        for k, a in enumerate(activities):
            ts = None if start is None else start + k * step
            events.append(Event(a, case_id, ts))
        return cls(case_id, tuple(events))

    @property
    def activities(self) -> tuple[str, ...]:
        return tuple(e.activity for e in self.events)

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)


class EventLog(Sequence):
    """Immutable ordered collection of traces."""

    __slots__ = ("_traces",)

    def __init__(self, traces: Iterable[Trace] = ()):
        self._traces = tuple(traces)

    @classmethod
    def from_activities(cls, sequences: Iterable[Iterable[str]], prefix="case_"):
        """Convenience constructor: one trace per activity sequence, ids ``prefix0``,
        ``prefix1``, ..."""
        return cls(
            Trace.from_activities(f"{prefix}{k}", seq) for k, seq in enumerate(sequences)
        )

    @property
    def traces(self) -> tuple[Trace, ...]:
        return self._traces

    def __len__(self):
        return len(self._traces)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return EventLog(self._traces[item])
        return self._traces[item]

    def __iter__(self) -> Iterator[Trace]:
        return iter(self._traces)

    def __eq__(self, other):
        if not isinstance(other, EventLog):
            return NotImplemented
        return self._traces == other._traces

    def __hash__(self):
        return hash(self._traces)

    def __add__(self, other):
        return EventLog(self._traces + tuple(other))

    def __repr__(self):
        return f"EventLog(<{len(self)} traces>)"

    def activity_sequences(self) -> list[tuple[str, ...]]:
        return [t.activities for t in self._traces]


@dataclass(frozen=True)
class SlidingWindow:
    """Read-only view on traces ``start .. start+size-1`` of ``log``."""

    log: EventLog
    start: int
    size: int

    def __post_init__(self):
        _check_bounds(len(self.log), self.start, self.size)

    @property
    def traces(self) -> tuple[Trace, ...]:
        return self.log.traces[self.start : self.start + self.size]

    @property
    def end(self) -> int:
        """Index one past the last trace in the window."""
        return self.start + self.size

    def slide(self) -> SlidingWindow:
        return SlidingWindow(self.log, self.start + 1, self.size)

    def __len__(self):
        return self.size

    def __iter__(self):
        return iter(self.traces)

    def __getitem__(self, item):
        return self.traces[item]


def _check_bounds(log_size, i, n):
    if n < 1:
        raise WindowBoundsError(f"window size must be >= 1, got {n}")
    if i < 0:
        raise WindowBoundsError(f"window start must be >= 0, got {i}")
    if i + n > log_size:
        raise WindowBoundsError(
            f"window [{i}, {i + n}) exceeds log of {log_size} traces"
        )


def window_at(log: EventLog, i: int, n: int) -> SlidingWindow:
    return SlidingWindow(log, i, n)


def trace_dfr(activities: Sequence[str]) -> frozenset[tuple[str, str]]:
    return frozenset(zip(activities, activities[1:]))


def extract_dfr(traces: Iterable) -> frozenset[tuple[str, str]]:
    """Directly-follows pairs over a window (or any iterable of traces or
    activity sequences)."""
    pairs = set()
    for t in traces:
        acts = t.activities if isinstance(t, Trace) else tuple(t)
        pairs.update(zip(acts, acts[1:]))
    return frozenset(pairs)


# ---------------------------------------------------------------------------
# timestamps

def _parse_timestamp(text: str) -> int:
    text = text.strip()
    if text.lstrip("-").isdigit():
        return int(text)
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    delta = dt - datetime(1970, 1, 1, tzinfo=timezone.utc)
    return (delta.days * 86_400 + delta.seconds) * 1000 + delta.microseconds // 1000


def _format_timestamp(ms: int) -> str:
    dt = datetime.fromtimestamp(ms // 1000, tz=timezone.utc)
    dt = dt.replace(microsecond=(ms % 1000) * 1000)
    return dt.isoformat(timespec="milliseconds")


def _synthesize_timestamps(traces: list[Trace]) -> list[Trace]:
    """Give every event a per-log monotone counter when no timestamp was read."""
    if any(e.timestamp is not None for t in traces for e in t.events):
        return traces
    counter = 0
    out = []
    for t in traces:
        events = []
        for e in t.events:
            events.append(Event(e.activity, e.case_id, counter))
            counter += 1
        out.append(Trace(t.id, tuple(events)))
    return out


# ---------------------------------------------------------------------------
# parsing

def _read_bytes(source: Source) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return fh.read()
    return source.read()


def parse_log(source: Source, format: str = "xes") -> EventLog:
    """Parse an event log from raw bytes, a path or a binary file object."""
    if format not in FORMATS:
        raise ValueError(f"unknown log format {format!r}; expected one of {FORMATS}")
    data = _read_bytes(source)
    traces = _parse_xes(data) if format == "xes" else _parse_csv(data)
    if not traces:
        raise LogParseError("log contains no traces")
    return EventLog(_synthesize_timestamps(traces))


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _parse_xes(data: bytes) -> list[Trace]:
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, col = exc.position
        raise LogParseError(f"malformed XML: {exc}", f"line {line}, column {col}") from None
    if _local(root.tag) != "log":
        raise LogParseError("root element is not <log>", f"<{_local(root.tag)}>")
    traces = []
    for t_idx, t_el in enumerate(c for c in root if _local(c.tag) == "trace"):
        case_id = None
        for attr in t_el:
            if _local(attr.tag) == "string" and attr.get("key") == "concept:name":
                case_id = attr.get("value")
        if case_id is None:
            case_id = f"trace_{t_idx}"
        events = []
        for e_idx, e_el in enumerate(c for c in t_el if _local(c.tag) == "event"):
            activity = ts = None
            for attr in e_el:
                tag, key = _local(attr.tag), attr.get("key")
                if tag == "string" and key == "concept:name":
                    activity = attr.get("value")
                elif tag == "date" and key == "time:timestamp":
                    try:
                        ts = _parse_timestamp(attr.get("value", ""))
                    except ValueError:
                        raise LogParseError(
                            f"bad timestamp {attr.get('value')!r}",
                            f"trace {t_idx} event {e_idx}",
                        ) from None
            if not activity:
                raise LogParseError(
                    "event without concept:name", f"trace {t_idx} event {e_idx}"
                )
            events.append(Event(activity, case_id, ts))
        traces.append(_make_trace(case_id, events, f"trace {t_idx}"))
    return traces


def _make_trace(case_id, events, where) -> Trace:
    if all(e.timestamp is not None for e in events):
        events = sorted(events, key=lambda e: e.timestamp)  # stable
    try:
        return Trace(case_id, tuple(events))
    except ValueError as exc:
        raise LogParseError(str(exc), where) from None


def _parse_csv(data: bytes) -> list[Trace]:
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise LogParseError(f"not UTF-8: {exc}") from None
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise LogParseError("empty CSV", "line 1") from None
    header = [h.strip() for h in header]
    missing = [c for c in ("case_id", "activity") if c not in header]
    if missing:
        raise LogParseError(f"missing required column(s) {missing}", "line 1")
    ci, ai = header.index("case_id"), header.index("activity")
    ti = header.index("timestamp") if "timestamp" in header else None
    grouped: dict[str, list[Event]] = {}
    for row in reader:
        lineno = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise LogParseError(
                f"expected {len(header)} fields, got {len(row)}", f"line {lineno}"
            )
        case_id, activity = row[ci], row[ai]
        if not activity:
            raise LogParseError("empty activity", f"line {lineno}")
        ts = None
        if ti is not None and row[ti].strip():
            try:
                ts = _parse_timestamp(row[ti])
            except ValueError:
                raise LogParseError(f"bad timestamp {row[ti]!r}", f"line {lineno}") from None
        grouped.setdefault(case_id, []).append(Event(activity, case_id, ts))
    return [_make_trace(cid, evs, f"case {cid!r}") for cid, evs in grouped.items()]


# ---------------------------------------------------------------------------
# serialization

def serialize_log(log: EventLog, format: str = "xes") -> bytes:
    if format == "xes":
        return _serialize_xes(log)
    if format == "csv":
        return _serialize_csv(log)
    raise ValueError(f"unknown log format {format!r}; expected one of {FORMATS}")


def _serialize_xes(log: EventLog) -> bytes:
    root = ET.Element("log", {"xes.version": "1.0"})
    for trace in log:
        t_el = ET.SubElement(root, "trace")
        ET.SubElement(t_el, "string", {"key": "concept:name", "value": trace.id})
        for ev in trace.events:
            e_el = ET.SubElement(t_el, "event")
            ET.SubElement(e_el, "string", {"key": "concept:name", "value": ev.activity})
            if ev.timestamp is not None:
                ET.SubElement(
                    e_el,
                    "date",
                    {"key": "time:timestamp", "value": _format_timestamp(ev.timestamp)},
                )
    ET.indent(root)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True) + b"\n"


def _serialize_csv(log: EventLog) -> bytes:
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["case_id", "activity", "timestamp"])
    for trace in log:
        for ev in trace.events:
            ts = "" if ev.timestamp is None else _format_timestamp(ev.timestamp)
            writer.writerow([ev.case_id, ev.activity, ts])
    return buf.getvalue().encode("utf-8")


def _infer_format(path) -> str:
    ext = os.path.splitext(os.fspath(path))[1].lower().lstrip(".")
    if ext not in FORMATS:
        raise ValueError(f"cannot infer log format from {os.fspath(path)!r}")
    return ext


def read_log(path, format: str | None = None) -> EventLog:
    return parse_log(path, format or _infer_format(path))


def write_log(log: EventLog, path, format: str | None = None) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_log(log, format or _infer_format(path)))
