"""Minimum-volume hypersphere data description (SVDD) in kernel space.

Training maximizes the dual

    L(alpha) = sum_i alpha_i k(x_i, x_i) - sum_ij alpha_i alpha_j k(x_i, x_j)

subject to sum_i alpha_i = 1 and 0 <= alpha_i <= C, following Tax & Duin,
"Support Vector Data Description", Machine Learning 54(1), 2004. The solver is
deterministic pairwise coordinate ascent (SMO-style): each step picks the
maximally KKT-violating pair, solves the one-dimensional quadratic exactly,
and clips to the box. Points with alpha > 0 are support vectors; unbounded
ones (alpha < C) sit on the sphere, bounded ones (alpha = C) fall outside.

A test point's squared distance to the sphere center is

    score(x) = k(x, x) - 2 sum_i alpha_i k(x_i, x) + sum_ij alpha_i alpha_j k(x_i, x_j)

and the point is accepted (classified LOW, the minority/target class) when
score(x) < R^2, strictly: boundary points count as outliers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    DimError,
    EmptyTraining,
    InfeasibleC,
    ModelFormatError,
    NumError,
)
from .kernels import KernelConfig, gram_matrix, kernel_cross
from .labels import ClassLabel

# Strict-boundary margin: score must be below r_squared by at least this
# much to count as inside the sphere.
BOUNDARY_EPS = 1e-12

# alpha_i <= SV_KEEP_FRACTION * C is treated as numerically zero.
SV_KEEP_FRACTION = 1e-8

# alpha_i >= C * (1 - BOUND_REL_TOL) is treated as sitting at the box cap.
BOUND_REL_TOL = 1e-9

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 100_000


@dataclass(frozen=True)
class SvddModel:
    """Trained hypersphere: support vectors with their coefficients, the
    kernel, the squared radius, and the feature standardization applied to
    every input.

    ``support_vectors`` are stored in standardized coordinates; ``score``
    applies ``(x - mean) / std`` before any kernel evaluation. ``self_term``
    caches sum_ij alpha_i alpha_j k(x_i, x_j).
    """

    kernel: KernelConfig
    support_vectors: np.ndarray
    alphas: np.ndarray
    r_squared: float
    C: float
    self_term: float
    feature_names: tuple[str, ...]
    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        for name in ("support_vectors", "alphas", "mean", "std"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        m, p = self.support_vectors.shape
        if self.alphas.shape != (m,):
            raise DimError("alphas and support_vectors disagree on count")
        if self.mean.shape != (p,) or self.std.shape != (p,):
            raise DimError("standardization vectors disagree with dimension")
        if m < 1:
            raise EmptyTraining("model has no support vectors")
        if abs(float(self.alphas.sum()) - 1.0) > 1e-9:
            raise NumError(f"support coefficients sum to {self.alphas.sum()!r}, not 1")
        if np.any(self.alphas <= 0) or np.any(self.alphas > self.C * (1 + 1e-12)):
            raise NumError("support coefficients outside (0, C]")
        if not (self.r_squared >= 0 and np.isfinite(self.r_squared)):
            raise NumError(f"r_squared must be finite and >= 0, got {self.r_squared}")
        if not (self.self_term >= 0 and np.isfinite(self.self_term)):
            raise NumError(f"self_term must be finite and >= 0, got {self.self_term}")

    @property
    def n_support(self) -> int:
        return len(self.alphas)

    @property
    def n_features(self) -> int:
        return self.support_vectors.shape[1]

    def score(self, x: np.ndarray) -> float:
        return score(self, x)

    def classify(self, x: np.ndarray) -> ClassLabel:
        return classify(self, x)


@dataclass(frozen=True)
class TrainReport:
    """Solver diagnostics for one training run."""

    iterations: int
    final_objective: float
    n_support: int
    n_bounded: int
    converged: bool

    def __post_init__(self):
        if self.n_support < 1:
            raise EmptyTraining("training produced no support vectors")
        if not np.isfinite(self.final_objective):
            raise NumError("final objective is not finite")


def _solve_pairwise(G: np.ndarray, C: float, tol: float,
                    max_iter: int) -> tuple[np.ndarray, bool, int]:
    """Maximize the dual by max-violating-pair coordinate ascent.

    Keeps sum(alpha) = 1 exactly: every update moves mass delta from one
    coordinate to another, snapping to the box bounds it hits. The objective
    increase per step is delta * violation - delta^2 * eta >= 0, so ascent is
    monotone by construction (asserted below).
    """
    n = G.shape[0]
    alpha = np.full(n, 1.0 / n)
    diag = np.diag(G).copy()
    grad = diag - 2.0 * (G @ alpha)  # dL/dalpha
    iterations = 0
    converged = False
    while iterations < max_iter:
        can_up = alpha < C
        can_dn = alpha > 0.0
        if not can_up.any() or not can_dn.any():
            converged = True
            break
        gi = np.where(can_up, grad, -np.inf)
        gj = np.where(can_dn, grad, np.inf)
        i = int(np.argmax(gi))
        j = int(np.argmin(gj))
        violation = gi[i] - gj[j]
        if violation < tol:
            converged = True
            break
        eta = diag[i] + diag[j] - 2.0 * G[i, j]
        step = violation / (2.0 * eta) if eta > 1e-15 else np.inf
        cap_i = C - alpha[i]
        cap_j = alpha[j]
        delta = min(step, cap_i, cap_j)
        assert delta * (violation - delta * eta) >= -1e-12, "dual ascent went downhill"
        if delta == cap_i:  # i hits the cap
            alpha[i] = C
            alpha[j] = cap_j - cap_i
        elif delta == cap_j:  # j hits zero
            alpha[j] = 0.0
            alpha[i] = alpha[i] + cap_j
        else:
            alpha[i] += delta
            alpha[j] -= delta
        grad -= 2.0 * delta * (G[:, i] - G[:, j])
        iterations += 1
    np.clip(alpha, 0.0, C, out=alpha)
    return alpha, converged, iterations


def radius_squared(support_vectors: np.ndarray, alphas: np.ndarray,
                   cfg: KernelConfig, C: float) -> float:
    """Squared radius from the support-vector scores.

    Uses the maximum score over unbounded support vectors (0 < alpha < C),
    which all sit on the sphere at the optimum. When every support vector is
    bounded, falls back to the maximum over all of them.
    """
    support_vectors = np.atleast_2d(np.asarray(support_vectors, dtype=float))
    alphas = np.asarray(alphas, dtype=float)
    if len(alphas) < 1:
        raise EmptyTraining("radius needs at least one support vector")
    K = kernel_cross(cfg, support_vectors, support_vectors)
    self_term = float(alphas @ (K @ alphas))
    scores = np.diag(K) - 2.0 * (K @ alphas) + self_term
    unbounded = alphas < C * (1.0 - BOUND_REL_TOL)
    pool = scores[unbounded] if unbounded.any() else scores
    return max(float(pool.max()), 0.0)


def train(X: np.ndarray, cfg: KernelConfig, C: float,
          tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
          feature_names: Sequence[str] | None = None,
          standardize: bool = True) -> tuple[SvddModel, TrainReport]:
    """Fit the hypersphere to the rows of X.

    Features are standardized to zero mean and unit variance using the
    training statistics (stored in the model and applied to every scored
    point) unless ``standardize`` is False, in which case the identity
    transform is stored. C * n must be at least 1, otherwise the constraint
    sum(alpha) = 1 cannot be met.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n, p = X.shape
    if n == 0:
        raise EmptyTraining("no training rows")
    if C * n < 1.0 - 1e-12:
        raise InfeasibleC(
            f"C = {C} with n = {n} gives C*n = {C * n:.4g} < 1; "
            f"sum(alpha) = 1 is infeasible")
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if feature_names is None:
        feature_names = tuple(f"f{i}" for i in range(p))
    feature_names = tuple(feature_names)
    if len(feature_names) != p:
        raise DimError(f"{len(feature_names)} feature names for {p} columns")

    if standardize:
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        std = np.where(std == 0.0, 1.0, std)
    else:
        mean = np.zeros(p)
        std = np.ones(p)
    Z = (X - mean) / std

    G = gram_matrix(cfg, Z)
    if not np.all(np.isfinite(G)):
        raise NumError("kernel matrix contains non-finite entries")

    alpha, converged, iterations = _solve_pairwise(G, C, tol, max_iter)
    final_objective = float(alpha @ np.diag(G) - alpha @ (G @ alpha))

    keep = alpha > SV_KEEP_FRACTION * C
    if not keep.any():
        keep = alpha == alpha.max()
    sv_alpha = alpha[keep]
    sv_alpha = sv_alpha / sv_alpha.sum()
    # Renormalization can nudge capped coefficients past C; push the excess
    # back onto the interior ones.
    for _ in range(4):
        over = sv_alpha > C
        if not over.any():
            break
        excess = float((sv_alpha[over] - C).sum())
        sv_alpha[over] = C
        under = ~over
        sv_alpha[under] += excess * sv_alpha[under] / sv_alpha[under].sum()
    Z_sv = Z[keep]

    K_sv = kernel_cross(cfg, Z_sv, Z_sv)
    self_term = max(float(sv_alpha @ (K_sv @ sv_alpha)), 0.0)
    sv_scores = np.diag(K_sv) - 2.0 * (K_sv @ sv_alpha) + self_term
    bounded = sv_alpha >= C * (1.0 - BOUND_REL_TOL)
    pool = sv_scores[~bounded] if (~bounded).any() else sv_scores
    r_squared = max(float(pool.max()), 0.0)

    model = SvddModel(kernel=cfg, support_vectors=Z_sv, alphas=sv_alpha,
                      r_squared=r_squared, C=C, self_term=self_term,
                      feature_names=feature_names, mean=mean, std=std)
    report = TrainReport(iterations=iterations, final_objective=final_objective,
                         n_support=int(keep.sum()), n_bounded=int(bounded.sum()),
                         converged=converged)
    return model, report


def score_many(model: SvddModel, X: np.ndarray) -> np.ndarray:
    """Squared center distance for each row of X (standardization applied)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.n_features:
        raise DimError(f"expected {model.n_features} features, got {X.shape[1]}")
    Z = (X - model.mean) / model.std
    K = kernel_cross(model.kernel, Z, model.support_vectors)
    if model.kernel.family == "polynomial":
        k_self = (np.einsum("ij,ij->i", Z, Z) + 1.0) ** model.kernel.degree
    else:
        k_self = np.ones(len(Z))
    return k_self - 2.0 * (K @ model.alphas) + model.self_term


def score(model: SvddModel, x: np.ndarray) -> float:
    """Squared distance between one point and the sphere center."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimError("score expects a 1-D vector")
    return float(score_many(model, x[None, :])[0])


def is_inside(model: SvddModel, X: np.ndarray) -> np.ndarray:
    """Boolean mask of rows strictly inside the sphere (score < R^2)."""
    return score_many(model, X) < model.r_squared - BOUNDARY_EPS


def classify(model: SvddModel, x: np.ndarray) -> ClassLabel:
    """LOW (target, accepted) when strictly inside the sphere, else HIGH.

    The inequality is strict, so points on the boundary, including the
    unbounded support vectors themselves, classify as outliers (HIGH).
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimError("classify expects a 1-D vector")
    return ClassLabel.LOW if bool(is_inside(model, x[None, :])[0]) else ClassLabel.HIGH


MODEL_FORMAT_VERSION = 1


def save_model(model: SvddModel, path: str | Path) -> None:
    """Write the model as a self-describing JSON document.

    Floats are serialized with full round-trip precision, so a reloaded model
    scores identically bit for bit.
    """
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "kernel": model.kernel.to_dict(),
        "C": model.C,
        "r_squared": model.r_squared,
        "self_term": model.self_term,
        "feature_names": list(model.feature_names),
        "mean": model.mean.tolist(),
        "std": model.std.tolist(),
        "alphas": model.alphas.tolist(),
        "support_vectors": model.support_vectors.tolist(),
    }
    Path(path).write_text(json.dumps(doc, indent=1), encoding="utf-8")


def load_model(path: str | Path) -> SvddModel:
    """Read a model written by save_model."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"{path}: not a valid model file ({exc})") from None
    if not isinstance(doc, dict):
        raise ModelFormatError(f"{path}: expected a JSON object")
    version = doc.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"{path}: unsupported format version {version!r}")
    try:
        model = SvddModel(
            kernel=KernelConfig.from_dict(doc["kernel"]),
            support_vectors=np.array(doc["support_vectors"], dtype=float),
            alphas=np.array(doc["alphas"], dtype=float),
            r_squared=float(doc["r_squared"]),
            C=float(doc["C"]),
            self_term=float(doc["self_term"]),
            feature_names=tuple(doc["feature_names"]),
            mean=np.array(doc["mean"], dtype=float),
            std=np.array(doc["std"], dtype=float),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: missing or malformed field ({exc})") from None
    except (DimError, NumError, EmptyTraining) as exc:
        raise ModelFormatError(f"{path}: inconsistent model contents ({exc})") from None
    return model
