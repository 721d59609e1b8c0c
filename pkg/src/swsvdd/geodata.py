"""Data model and CSV ingestion for well logs, time-depth relationships, and
seismic attribute traces.

All CSV formats use UTF-8, a `.` decimal separator, and accept both `\\n` and
`\\r\\n` line endings. Depths are in meters, times in milliseconds. All types
are immutable after construction and safe to share between threads; parsers
are pure functions of their input streams.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateTrace,
    IncompleteTrace,
    InsufficientData,
    MalformedLog,
    MalformedModel,
    MalformedTrace,
    ParseError,
)


def _as_float_array(values: Iterable[float], what: str) -> np.ndarray:
    arr = np.array(values, dtype=float)  # copies, so the caller's array stays writable
    arr.flags.writeable = False
    return arr


def _parse_float(token: str, where: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"non-numeric field {token!r} in {where}") from None


@dataclass(frozen=True)
class WellLog:
    """Depth-indexed property log for one well.

    Depths must be strictly increasing, values finite, and there must be at
    least two samples.
    """

    well_id: str
    depths: np.ndarray
    values: np.ndarray
    property_name: str = "SW"

    def __post_init__(self):
        object.__setattr__(self, "depths", _as_float_array(self.depths, "depths"))
        object.__setattr__(self, "values", _as_float_array(self.values, "values"))
        if self.depths.shape != self.values.shape or self.depths.ndim != 1:
            raise MalformedLog(f"well {self.well_id}: depths/values shape mismatch")
        if len(self.depths) < 2:
            raise InsufficientData(
                f"well {self.well_id}: need at least 2 samples, got {len(self.depths)}")
        if not np.all(np.isfinite(self.depths)) or not np.all(np.isfinite(self.values)):
            raise MalformedLog(f"well {self.well_id}: non-finite sample")
        if not np.all(np.diff(self.depths) > 0):
            raise MalformedLog(f"well {self.well_id}: depths not strictly increasing")

    def __len__(self) -> int:
        return len(self.depths)

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.depths.tolist(), self.values.tolist()))


@dataclass(frozen=True)
class TimeDepthModel:
    """Monotone depth -> two-way-time mapping known at one well location."""

    well_id: str
    depths: np.ndarray
    times: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "depths", _as_float_array(self.depths, "depths"))
        object.__setattr__(self, "times", _as_float_array(self.times, "times"))
        if self.depths.shape != self.times.shape or self.depths.ndim != 1:
            raise MalformedModel(f"well {self.well_id}: depths/times shape mismatch")
        if len(self.depths) < 2:
            raise InsufficientData(
                f"well {self.well_id}: need at least 2 knots, got {len(self.depths)}")
        if not np.all(np.isfinite(self.depths)) or not np.all(np.isfinite(self.times)):
            raise MalformedModel(f"well {self.well_id}: non-finite knot")
        if not np.all(np.diff(self.depths) > 0):
            raise MalformedModel(f"well {self.well_id}: depths not strictly increasing")
        if not np.all(np.diff(self.times) > 0):
            raise MalformedModel(f"well {self.well_id}: times not strictly increasing")

    @property
    def depth_min(self) -> float:
        return float(self.depths[0])

    @property
    def depth_max(self) -> float:
        return float(self.depths[-1])

    @property
    def knots(self) -> list[tuple[float, float]]:
        return list(zip(self.depths.tolist(), self.times.tolist()))


@dataclass(frozen=True)
class SeismicTrace:
    """All attribute series recorded at one (inline, crossline) position.

    Every attribute shares the trace's time axis t0 + dt * k; dt is nominally
    2.0 ms for field data.
    """

    inline: int
    crossline: int
    t0: float
    dt: float
    values: dict[str, np.ndarray]

    def __post_init__(self):
        if self.dt <= 0:
            raise MalformedTrace(
                f"trace ({self.inline},{self.crossline}): dt must be > 0, got {self.dt}")
        if not self.values:
            raise MalformedTrace(f"trace ({self.inline},{self.crossline}): no attributes")
        frozen = {}
        n = None
        for name, vals in self.values.items():
            arr = _as_float_array(vals, name)
            if n is None:
                n = len(arr)
            elif len(arr) != n:
                raise MalformedTrace(
                    f"trace ({self.inline},{self.crossline}): attribute {name!r} has "
                    f"{len(arr)} samples, expected {n}")
            if not np.all(np.isfinite(arr)):
                raise MalformedTrace(
                    f"trace ({self.inline},{self.crossline}): non-finite value in {name!r}")
            frozen[name] = arr
        object.__setattr__(self, "values", frozen)

    @property
    def n_samples(self) -> int:
        return len(next(iter(self.values.values())))

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * (self.n_samples - 1)

    @property
    def key(self) -> tuple[int, int]:
        return (self.inline, self.crossline)


@dataclass(frozen=True)
class TraceCollection:
    """A set of traces with unique (inline, crossline) keys, each carrying the
    same ordered attribute list."""

    traces: dict[tuple[int, int], SeismicTrace]
    attribute_names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "attribute_names", tuple(self.attribute_names))
        for key, tr in self.traces.items():
            if key != tr.key:
                raise MalformedTrace(f"trace keyed {key} reports position {tr.key}")
            missing = [a for a in self.attribute_names if a not in tr.values]
            if missing:
                raise IncompleteTrace(f"trace {key} missing attributes {missing}")

    def __len__(self) -> int:
        return len(self.traces)

    def __iter__(self):
        return iter(sorted(self.traces.values(), key=lambda t: t.key))

    def get(self, inline: int, crossline: int) -> SeismicTrace | None:
        return self.traces.get((inline, crossline))

    @property
    def inlines(self) -> list[int]:
        return sorted({il for il, _ in self.traces})

    @property
    def crosslines(self) -> list[int]:
        return sorted({xl for _, xl in self.traces})


# --- parsers ---

def _read_rows(stream: IO[str], expected_header: Sequence[str], what: str,
               ragged: bool = False) -> list[list[str]]:
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(f"{what}: empty input") from None
    header = [h.strip() for h in header]
    if ragged:
        if header[:len(expected_header)] != list(expected_header):
            raise ParseError(
                f"{what}: expected header starting {','.join(expected_header)!r}, "
                f"got {','.join(header)!r}")
    elif header != list(expected_header):
        raise ParseError(f"{what}: expected header {','.join(expected_header)!r}, "
                         f"got {','.join(header)!r}")
    return [row for row in reader if row]


def parse_well_log(stream: IO[str], property_name: str = "SW",
                   well_id: str = "") -> WellLog:
    """Parse a `depth,value` CSV into a WellLog. Rows keep file order."""
    rows = _read_rows(stream, ("depth", "value"), "well log")
    if len(rows) < 2:
        raise InsufficientData(f"well log: need at least 2 rows, got {len(rows)}")
    depths, values = [], []
    for i, row in enumerate(rows):
        if len(row) != 2:
            raise ParseError(f"well log row {i + 2}: expected 2 fields, got {len(row)}")
        depths.append(_parse_float(row[0], f"well log row {i + 2}"))
        values.append(_parse_float(row[1], f"well log row {i + 2}"))
    return WellLog(well_id=well_id, depths=np.array(depths), values=np.array(values),
                   property_name=property_name)


def parse_time_depth(stream: IO[str], well_id: str = "") -> TimeDepthModel:
    """Parse a `depth,time` CSV into a TimeDepthModel."""
    rows = _read_rows(stream, ("depth", "time"), "time-depth model")
    if len(rows) < 2:
        raise InsufficientData(f"time-depth model: need at least 2 knots, got {len(rows)}")
    depths, times = [], []
    for i, row in enumerate(rows):
        if len(row) != 2:
            raise ParseError(f"time-depth row {i + 2}: expected 2 fields, got {len(row)}")
        depths.append(_parse_float(row[0], f"time-depth row {i + 2}"))
        times.append(_parse_float(row[1], f"time-depth row {i + 2}"))
    return TimeDepthModel(well_id=well_id, depths=np.array(depths), times=np.array(times))


def parse_traces(stream: IO[str], attribute_names: Sequence[str]) -> TraceCollection:
    """Parse trace rows `inline,crossline,t0,dt,attr,v0,v1,...` into a
    TraceCollection.

    One row holds one attribute of one trace; rows may come in any order.
    Every (inline, crossline) position must supply every requested attribute
    exactly once.
    """
    attribute_names = tuple(attribute_names)
    rows = _read_rows(stream, ("inline", "crossline", "t0", "dt", "attr"),
                      "traces", ragged=True)
    seen: dict[tuple[int, int], dict[str, tuple[float, float, np.ndarray]]] = {}
    for i, row in enumerate(rows):
        where = f"traces row {i + 2}"
        if len(row) < 6:
            raise ParseError(f"{where}: expected at least 6 fields, got {len(row)}")
        try:
            il, xl = int(row[0]), int(row[1])
        except ValueError:
            raise ParseError(f"{where}: non-integer inline/crossline") from None
        t0 = _parse_float(row[2], where)
        dt = _parse_float(row[3], where)
        attr = row[4].strip()
        vals = np.array([_parse_float(v, where) for v in row[5:]])
        per_trace = seen.setdefault((il, xl), {})
        if attr in per_trace:
            raise DuplicateTrace(f"duplicate row for trace ({il},{xl}) attribute {attr!r}")
        per_trace[attr] = (t0, dt, vals)

    traces: dict[tuple[int, int], SeismicTrace] = {}
    for key in sorted(seen):
        per_trace = seen[key]
        missing = [a for a in attribute_names if a not in per_trace]
        if missing:
            raise IncompleteTrace(f"trace {key} missing attributes {missing}")
        t0s = {meta[0] for meta in per_trace.values()}
        dts = {meta[1] for meta in per_trace.values()}
        if len(t0s) > 1 or len(dts) > 1:
            raise MalformedTrace(f"trace {key}: inconsistent t0/dt across attribute rows")
        traces[key] = SeismicTrace(
            inline=key[0], crossline=key[1],
            t0=t0s.pop(), dt=dts.pop(),
            values={a: per_trace[a][2] for a in attribute_names})
    return TraceCollection(traces=traces, attribute_names=attribute_names)


# --- serializers (inverse of the parsers; floats round-trip exactly) ---

def _fmt(x: float) -> str:
    return repr(float(x))


def write_well_log(log: WellLog, stream: IO[str]) -> None:
    stream.write("depth,value\n")
    for d, v in zip(log.depths, log.values):
        stream.write(f"{_fmt(d)},{_fmt(v)}\n")


def write_time_depth(td: TimeDepthModel, stream: IO[str]) -> None:
    stream.write("depth,time\n")
    for d, t in zip(td.depths, td.times):
        stream.write(f"{_fmt(d)},{_fmt(t)}\n")


def write_traces(collection: TraceCollection, stream: IO[str]) -> None:
    stream.write("inline,crossline,t0,dt,attr,values\n")
    for trace in collection:
        for attr in collection.attribute_names:
            vals = ",".join(_fmt(v) for v in trace.values[attr])
            stream.write(f"{trace.inline},{trace.crossline},"
                         f"{_fmt(trace.t0)},{_fmt(trace.dt)},{attr},{vals}\n")
