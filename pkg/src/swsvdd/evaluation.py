"""Labeling, leave-one-well-out splits, the g-metric mean, timing, and the
classifier comparison harness.

The minority class LOW is the positive class throughout: sensitivity measures
how well the minority is detected, which is exactly where plain supervised
classifiers fall over on imbalanced data. The one-class model trains on the
LOW rows of every well except the held-out one and is blind-tested on the
held-out well's LOW rows plus the HIGH rows of all wells.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateWell,
    NoSuchWell,
    RangeError,
    TableError,
    UndefinedMetric,
)
from .kernels import KernelConfig
from .labels import ClassLabel
from .signalprep import IntegratedDataset
from . import svdd


def threshold_label(sw: float, tau: float) -> ClassLabel:
    """HIGH when sw >= tau, LOW otherwise (the boundary goes to HIGH)."""
    if not (0.0 <= sw <= 1.0):
        raise RangeError(f"sw must be in [0, 1], got {sw}")
    if not (0.0 < tau < 1.0):
        raise RangeError(f"tau must be in (0, 1), got {tau}")
    return ClassLabel.HIGH if sw >= tau else ClassLabel.LOW


@dataclass(frozen=True)
class LabeledWell:
    """One well's feature rows with their threshold labels."""

    well_id: str
    feature_names: tuple[str, ...]
    X: np.ndarray
    is_low: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        is_low = np.array(self.is_low, dtype=bool)
        X.flags.writeable = False
        is_low.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "is_low", is_low)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        if X.shape != (len(is_low), len(self.feature_names)):
            raise RangeError(f"well {self.well_id}: row/label/feature shape mismatch")

    @property
    def n_low(self) -> int:
        return int(self.is_low.sum())

    @property
    def n_high(self) -> int:
        return int((~self.is_low).sum())


def label_dataset(ds: IntegratedDataset, tau: float,
                  feature_subset: Sequence[str] | None = None) -> LabeledWell:
    """Label every integrated row by thresholding its saturation value.

    ``feature_subset`` restricts (and orders) the feature columns, e.g. to the
    relevance-selected attributes.
    """
    if not (0.0 < tau < 1.0):
        raise RangeError(f"tau must be in (0, 1), got {tau}")
    names = tuple(feature_subset) if feature_subset is not None else ds.feature_names
    missing = [n for n in names if n not in ds.feature_names]
    if missing:
        raise NoSuchWell(f"well {ds.well_id}: unknown features {missing}")
    cols = [ds.feature_names.index(n) for n in names]
    return LabeledWell(well_id=ds.well_id, feature_names=names,
                       X=ds.features[:, cols], is_low=ds.sw < tau)


@dataclass(frozen=True)
class LowoSplit:
    """Leave-one-well-out split: train on the minority rows of the other
    wells, test on the held-out minority plus every well's majority rows."""

    held_out: str
    train_X: np.ndarray
    test_X: np.ndarray
    test_is_low: np.ndarray


def build_lowo_split(wells: Sequence[LabeledWell], held_out: str) -> LowoSplit:
    ids = [w.well_id for w in wells]
    if held_out not in ids:
        raise NoSuchWell(f"held-out well {held_out!r} not among {ids}")
    train_parts = []
    for w in wells:
        if w.well_id == held_out:
            continue
        if w.n_low == 0:
            raise DegenerateWell(f"training well {w.well_id!r} has no LOW rows")
        train_parts.append(w.X[w.is_low])
    test_parts = []
    test_low_flags = []
    for w in wells:
        if w.well_id == held_out and w.n_low > 0:
            test_parts.append(w.X[w.is_low])
            test_low_flags.append(np.ones(w.n_low, dtype=bool))
    for w in wells:
        if w.n_high > 0:
            test_parts.append(w.X[~w.is_low])
            test_low_flags.append(np.zeros(w.n_high, dtype=bool))
    train_X = np.vstack(train_parts)
    test_X = np.vstack(test_parts)
    test_is_low = np.concatenate(test_low_flags)
    return LowoSplit(held_out=held_out, train_X=train_X, test_X=test_X,
                     test_is_low=test_is_low)


@dataclass(frozen=True)
class ConfusionCounts:
    """Binary confusion counts with LOW as the positive class."""

    tp: int
    fn: int
    tn: int
    fp: int

    def __post_init__(self):
        if min(self.tp, self.fn, self.tn, self.fp) < 0:
            raise UndefinedMetric("confusion counts must be non-negative")

    @classmethod
    def from_masks(cls, true_is_low: np.ndarray, pred_is_low: np.ndarray) -> "ConfusionCounts":
        true_is_low = np.asarray(true_is_low, dtype=bool)
        pred_is_low = np.asarray(pred_is_low, dtype=bool)
        if true_is_low.shape != pred_is_low.shape:
            raise UndefinedMetric("prediction/truth length mismatch")
        return cls(tp=int(np.sum(true_is_low & pred_is_low)),
                   fn=int(np.sum(true_is_low & ~pred_is_low)),
                   tn=int(np.sum(~true_is_low & ~pred_is_low)),
                   fp=int(np.sum(~true_is_low & pred_is_low)))


def g_metric(c: ConfusionCounts) -> float:
    """Geometric mean of sensitivity and specificity, sqrt(tpr * tnr)."""
    if c.tp + c.fn == 0 or c.tn + c.fp == 0:
        raise UndefinedMetric(f"a class is empty in {c}")
    tpr = c.tp / (c.tp + c.fn)
    tnr = c.tn / (c.tn + c.fp)
    return math.sqrt(tpr * tnr)


@dataclass(frozen=True)
class ExperimentReport:
    """One blind test: a classifier evaluated against one held-out well."""

    held_out_well: str
    g_metric: float
    execution_seconds: float
    confusion: ConfusionCounts
    classifier_name: str
    hyperparameters: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "hyperparameters", dict(self.hyperparameters))
        if self.execution_seconds < 0:
            raise RangeError("execution time cannot be negative")
        if abs(self.g_metric - g_metric(self.confusion)) > 1e-12:
            raise UndefinedMetric(
                f"report g {self.g_metric!r} disagrees with its confusion counts")


class SvddOneClassClassifier:
    """One-class hypersphere classifier; trains on minority rows only."""

    trains_on_minority_only = True

    def __init__(self, kernel: KernelConfig, C: float,
                 tol: float = svdd.DEFAULT_TOL, max_iter: int = svdd.DEFAULT_MAX_ITER):
        self.kernel = kernel
        self.C = C
        self.tol = tol
        self.max_iter = max_iter
        self.model: svdd.SvddModel | None = None
        self.report: svdd.TrainReport | None = None

    @property
    def name(self) -> str:
        return "svdd"

    @property
    def hyperparameters(self) -> dict[str, str]:
        return {"kernel": self.kernel.describe(), "C": repr(self.C)}

    def fit(self, X: np.ndarray) -> None:
        self.model, self.report = svdd.train(X, self.kernel, self.C,
                                             tol=self.tol, max_iter=self.max_iter)

    def predict_is_low(self, X: np.ndarray) -> np.ndarray:
        assert self.model is not None, "fit before predict"
        return svdd.is_inside(self.model, X)


class NearestCentroidClassifier:
    """Two-class nearest-centroid baseline so the comparison table has a
    second column; trains on both classes of the training wells."""

    trains_on_minority_only = False

    def __init__(self):
        self.centroid_low: np.ndarray | None = None
        self.centroid_high: np.ndarray | None = None

    @property
    def name(self) -> str:
        return "nearest-centroid"

    @property
    def hyperparameters(self) -> dict[str, str]:
        return {}

    def fit(self, X: np.ndarray, is_low: np.ndarray) -> None:
        X = np.asarray(X, dtype=float)
        is_low = np.asarray(is_low, dtype=bool)
        if not is_low.any() or is_low.all():
            raise DegenerateWell("nearest-centroid baseline needs both classes")
        self.centroid_low = X[is_low].mean(axis=0)
        self.centroid_high = X[~is_low].mean(axis=0)

    def predict_is_low(self, X: np.ndarray) -> np.ndarray:
        assert self.centroid_low is not None, "fit before predict"
        X = np.asarray(X, dtype=float)
        d_low = np.einsum("ij,ij->i", X - self.centroid_low, X - self.centroid_low)
        d_high = np.einsum("ij,ij->i", X - self.centroid_high, X - self.centroid_high)
        return d_low < d_high


def run_experiment(wells: Sequence[LabeledWell], held_out: str,
                   classifier) -> ExperimentReport:
    """Blind-test one classifier on one held-out well.

    The reported wall clock covers training plus prediction only; data
    preparation happens before the timer starts.
    """
    split = build_lowo_split(wells, held_out)
    if classifier.trains_on_minority_only:
        start = time.perf_counter()
        classifier.fit(split.train_X)
        pred = classifier.predict_is_low(split.test_X)
        seconds = time.perf_counter() - start
    else:
        train_X = np.vstack([w.X for w in wells if w.well_id != held_out])
        train_is_low = np.concatenate(
            [w.is_low for w in wells if w.well_id != held_out])
        start = time.perf_counter()
        classifier.fit(train_X, train_is_low)
        pred = classifier.predict_is_low(split.test_X)
        seconds = time.perf_counter() - start
    confusion = ConfusionCounts.from_masks(split.test_is_low, pred)
    return ExperimentReport(held_out_well=held_out,
                            g_metric=g_metric(confusion),
                            execution_seconds=seconds,
                            confusion=confusion,
                            classifier_name=classifier.name,
                            hyperparameters=classifier.hyperparameters)


AVERAGE_ROW = "Average Performance"

_VALUE_FORMATS = {"g_metric": "{:.2f}", "seconds": "{:.3f}"}


@dataclass(frozen=True)
class ComparisonTable:
    """Per-well rows plus an arithmetic-mean row, one column per classifier."""

    value_name: str
    wells: tuple[str, ...]
    classifiers: tuple[str, ...]
    cells: np.ndarray  # (n_wells, n_classifiers)

    def _fmt(self, x: float) -> str:
        return _VALUE_FORMATS.get(self.value_name, "{:g}").format(x)

    def rows(self) -> list[list[str]]:
        out = [["Well Name", *self.classifiers]]
        for i, well in enumerate(self.wells):
            out.append([well, *(self._fmt(v) for v in self.cells[i])])
        means = self.cells.mean(axis=0)
        out.append([AVERAGE_ROW, *(self._fmt(v) for v in means)])
        return out

    def to_csv(self) -> str:
        return "\n".join(",".join(row) for row in self.rows()) + "\n"

    def to_text(self) -> str:
        rows = self.rows()
        widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
        lines = []
        for r in rows:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
        return "\n".join(lines) + "\n"


def comparison_table(reports: Sequence[ExperimentReport],
                     value: str = "g_metric") -> ComparisonTable:
    """Arrange per-well reports into a wells-by-classifiers table.

    ``value`` selects the reported number: "g_metric" or "seconds". Every
    classifier must cover the same set of wells; duplicate (well, classifier)
    reports are averaged.
    """
    if value not in ("g_metric", "seconds"):
        raise TableError(f"unknown table value {value!r}")
    if not reports:
        raise TableError("no reports to tabulate")
    classifiers: list[str] = []
    per: dict[tuple[str, str], list[float]] = {}
    well_sets: dict[str, set[str]] = {}
    for r in reports:
        if r.classifier_name not in classifiers:
            classifiers.append(r.classifier_name)
        v = r.g_metric if value == "g_metric" else r.execution_seconds
        per.setdefault((r.held_out_well, r.classifier_name), []).append(v)
        well_sets.setdefault(r.classifier_name, set()).add(r.held_out_well)
    reference = well_sets[classifiers[0]]
    for name, ws in well_sets.items():
        if ws != reference:
            raise TableError(
                f"classifier {name!r} covers wells {sorted(ws)}, "
                f"expected {sorted(reference)}")
    wells = tuple(sorted(reference))
    cells = np.array([[float(np.mean(per[(w, c)])) for c in classifiers]
                      for w in wells])
    return ComparisonTable(value_name=value, wells=wells,
                           classifiers=tuple(classifiers), cells=cells)


def reports_csv(reports: Sequence[ExperimentReport]) -> str:
    """Flat per-experiment CSV: well,classifier,g_metric,seconds,tp,fn,tn,fp."""
    lines = ["well,classifier,g_metric,seconds,tp,fn,tn,fp"]
    for r in reports:
        c = r.confusion
        lines.append(f"{r.held_out_well},{r.classifier_name},{r.g_metric!r},"
                     f"{r.execution_seconds:.3f},{c.tp},{c.fn},{c.tn},{c.fp}")
    return "\n".join(lines) + "\n"
