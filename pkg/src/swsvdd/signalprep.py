"""Convert well logs to the time domain, resample band-limited seismic traces
to the log sampling interval, and fuse both into per-well integrated datasets.

Well logs sample at 0.15 ms once converted to time; seismic traces sample at
2 ms. Seismic attributes are brought onto the log grid with a natural cubic
spline (second derivative zero at both ends); the time-depth relationship is
applied as a piecewise-linear map between its knots. All functions here are
pure; per-well integration can run in parallel without shared state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    InsufficientData,
    NoOverlap,
    OutOfRange,
    ParseError,
    TooShortForSpline,
)
from .geodata import SeismicTrace, TimeDepthModel, WellLog

# Sampling interval of well logs in time, in milliseconds.
LOG_DT_MS = 0.15

# Tolerance used when snapping window edges onto sample grids, in ms.
GRID_EPS_MS = 1e-9


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled signal: values[k] is at time t0 + dt * k (ms)."""

    t0: float
    dt: float
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        if self.dt <= 0:
            raise InsufficientData(f"series {self.name!r}: dt must be > 0, got {self.dt}")
        if len(arr) < 2:
            raise InsufficientData(f"series {self.name!r}: need at least 2 samples")
        if not np.all(np.isfinite(arr)):
            raise InsufficientData(f"series {self.name!r}: non-finite sample")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * (len(self.values) - 1)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.values))


@dataclass(frozen=True)
class IntegratedDataset:
    """Per-well, time-aligned attribute vectors plus water saturation on the
    0.15 ms grid.

    `features` is an (n_rows, n_features) matrix; `sw` holds saturation in
    [0, 1]. `n_sw_clamped` counts interpolation overshoots that were clamped
    back into [0, 1].
    """

    well_id: str
    feature_names: tuple[str, ...]
    times: np.ndarray
    features: np.ndarray
    sw: np.ndarray
    n_sw_clamped: int = 0

    def __post_init__(self):
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        times = np.array(self.times, dtype=float)
        features = np.array(self.features, dtype=float)
        sw = np.array(self.sw, dtype=float)
        for arr in (times, features, sw):
            arr.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "sw", sw)
        n = len(times)
        if features.shape != (n, len(self.feature_names)) or sw.shape != (n,):
            raise InsufficientData(
                f"well {self.well_id}: inconsistent row shapes "
                f"({features.shape}, {sw.shape}, {n} times)")
        if n >= 2:
            spacing = np.diff(times)
            if np.any(np.abs(spacing - LOG_DT_MS) > GRID_EPS_MS):
                raise InsufficientData(
                    f"well {self.well_id}: time spacing deviates from {LOG_DT_MS} ms")
        if np.any(sw < 0.0) or np.any(sw > 1.0):
            raise InsufficientData(f"well {self.well_id}: sw outside [0, 1]")

    def __len__(self) -> int:
        return len(self.times)


def _uniform_grid(t_start: float, t_end: float, dt: float) -> np.ndarray:
    """Grid {t_start + k*dt} restricted to [t_start, t_end]."""
    n = int(math.floor((t_end - t_start) / dt + GRID_EPS_MS)) + 1
    return t_start + dt * np.arange(max(n, 0))


def aligned_index_range(t_start: float, t_end: float, dt: float) -> tuple[int, int]:
    """First and last integer k with t_start <= k*dt <= t_end (edge-snapped).

    Returns (k0, k1) with k1 < k0 when no grid point fits in the window.
    """
    k0 = math.ceil((t_start - GRID_EPS_MS) / dt)
    k1 = math.floor((t_end + GRID_EPS_MS) / dt)
    return k0, k1


def depth_to_time(log: WellLog, td: TimeDepthModel) -> TimeSeries:
    """Convert a depth-domain log to a uniformly sampled time-domain series.

    Each sample's time comes from piecewise-linear interpolation of the
    time-depth knots; the result is then resampled (linearly) onto a uniform
    0.15 ms grid spanning the converted range.

    Raises OutOfRange when the log leaves the time-depth model's depth range.
    """
    if log.depths[0] < td.depth_min - GRID_EPS_MS or log.depths[-1] > td.depth_max + GRID_EPS_MS:
        raise OutOfRange(
            f"well {log.well_id}: log depths [{log.depths[0]}, {log.depths[-1]}] m "
            f"outside time-depth range [{td.depth_min}, {td.depth_max}] m")
    sample_times = np.interp(log.depths, td.depths, td.times)
    grid = _uniform_grid(float(sample_times[0]), float(sample_times[-1]), LOG_DT_MS)
    if len(grid) < 2:
        raise InsufficientData(
            f"well {log.well_id}: converted span {sample_times[-1] - sample_times[0]:.4g} ms "
            f"is shorter than one {LOG_DT_MS} ms sample")
    values = np.interp(grid, sample_times, log.values)
    return TimeSeries(t0=float(grid[0]), dt=LOG_DT_MS, values=values,
                      name=log.property_name)


def _natural_spline(series: TimeSeries) -> CubicSpline:
    if len(series) < 4:
        raise TooShortForSpline(
            f"series {series.name!r}: cubic spline needs >= 4 samples, got {len(series)}")
    return CubicSpline(series.times, series.values, bc_type="natural")


def spline_resample(series: TimeSeries, dt_target: float) -> TimeSeries:
    """Resample a series with a natural cubic spline through its samples.

    The output grid is {t0, t0 + dt_target, ...} inside [t0, t_end]; values at
    the original sample times are reproduced exactly.
    """
    if dt_target <= 0:
        raise InsufficientData(f"dt_target must be > 0, got {dt_target}")
    spline = _natural_spline(series)
    grid = _uniform_grid(series.t0, series.t_end, dt_target)
    return TimeSeries(t0=series.t0, dt=dt_target, values=spline(grid), name=series.name)


def integrate_at_well(trace: SeismicTrace, sw_series: TimeSeries,
                      feature_names: Sequence[str], well_id: str = "") -> IntegratedDataset:
    """Fuse the attribute trace at a well with its converted saturation log.

    Rows live on the common time window of the two inputs, on the absolute
    0.15 ms grid (times that are integer multiples of 0.15 ms), which pins the
    sub-sample phase regardless of where either window starts. Attributes are
    evaluated with the natural cubic spline through the trace samples;
    saturation is interpolated linearly and clamped to [0, 1] (clamp count is
    reported on the result).
    """
    feature_names = tuple(feature_names)
    missing = [f for f in feature_names if f not in trace.values]
    if missing:
        raise OutOfRange(f"trace {trace.key} does not carry attributes {missing}")
    start = max(trace.t0, sw_series.t0)
    end = min(trace.t_end, sw_series.t_end)
    if start > end:
        raise NoOverlap(
            f"well {well_id}: attribute window [{trace.t0}, {trace.t_end}] ms and "
            f"saturation window [{sw_series.t0}, {sw_series.t_end}] ms do not overlap")
    k0, k1 = aligned_index_range(start, end, LOG_DT_MS)
    if k1 < k0:
        raise NoOverlap(
            f"well {well_id}: overlap [{start}, {end}] ms contains no "
            f"{LOG_DT_MS} ms grid point")
    grid = LOG_DT_MS * np.arange(k0, k1 + 1)
    columns = []
    for name in feature_names:
        attr = TimeSeries(t0=trace.t0, dt=trace.dt, values=trace.values[name], name=name)
        columns.append(_natural_spline(attr)(grid))
    features = np.column_stack(columns) if columns else np.empty((len(grid), 0))
    sw = np.interp(grid, sw_series.times, sw_series.values)
    clamped = int(np.count_nonzero((sw < 0.0) | (sw > 1.0)))
    sw = np.clip(sw, 0.0, 1.0)
    return IntegratedDataset(well_id=well_id, feature_names=feature_names,
                             times=grid, features=features, sw=sw,
                             n_sw_clamped=clamped)


# --- optional CSV dump of integrated datasets (`time,<attrs...>,sw`) ---

def write_integrated(ds: IntegratedDataset, stream: IO[str]) -> None:
    header = ",".join(("time",) + ds.feature_names + ("sw",))
    stream.write(header + "\n")
    for k in range(len(ds)):
        cells = [repr(float(ds.times[k]))]
        cells += [repr(float(v)) for v in ds.features[k]]
        cells.append(repr(float(ds.sw[k])))
        stream.write(",".join(cells) + "\n")


def parse_integrated(stream: IO[str], well_id: str = "") -> IntegratedDataset:
    import csv

    reader = csv.reader(stream)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("integrated dataset: empty input") from None
    if len(header) < 2 or header[0] != "time" or header[-1] != "sw":
        raise ParseError("integrated dataset: expected header time,<features...>,sw")
    feature_names = tuple(header[1:-1])
    times, rows, sw = [], [], []
    for i, row in enumerate(reader):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"integrated row {i + 2}: expected {len(header)} fields")
        try:
            nums = [float(x) for x in row]
        except ValueError:
            raise ParseError(f"integrated row {i + 2}: non-numeric field") from None
        times.append(nums[0])
        rows.append(nums[1:-1])
        sw.append(nums[-1])
    return IntegratedDataset(well_id=well_id, feature_names=feature_names,
                             times=np.array(times),
                             features=np.array(rows, dtype=float).reshape(len(times), len(feature_names)),
                             sw=np.array(sw))
