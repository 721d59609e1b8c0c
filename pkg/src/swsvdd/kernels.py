"""Kernel functions and Gram matrix construction for the hypersphere model.

Three families are supported:

* ``gaussian``  k(x, y) = exp(-||x - y||^2 / s^2)
* ``erbf``      k(x, y) = exp(-||x - y|| / s)      (exponential / Laplacian RBF)
* ``polynomial``k(x, y) = (x . y + 1)^d

The Gaussian family is often written exp(-a * ||x - y||^2); this module uses
the width convention a = 1 / s^2, so a published width of s = 3.0 plugs in
directly. ``KernelConfig.gaussian`` accepts either ``width`` or ``alpha``
(exclusive) for callers that prefer the other convention.

Polynomial inputs should be standardized first; the dot product is raised to
the d-th power and overflows for large raw magnitudes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .errors import DimError, NumError

GAUSSIAN = "gaussian"
POLYNOMIAL = "polynomial"
ERBF = "erbf"

_FAMILIES = (GAUSSIAN, POLYNOMIAL, ERBF)
_MAX_DEGREE = 10


@dataclass(frozen=True)
class KernelConfig:
    """Kernel family plus its parameter (width s, or degree d)."""

    family: str
    width: float | None = None
    degree: int | None = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}; "
                             f"expected one of {_FAMILIES}")
        if self.family in (GAUSSIAN, ERBF):
            if self.width is None or not (self.width > 0):
                raise ValueError(f"{self.family} kernel needs width > 0, got {self.width}")
            if self.degree is not None:
                raise ValueError(f"{self.family} kernel takes no degree")
        else:
            if self.width is not None:
                raise ValueError("polynomial kernel takes no width")
            if self.degree is None or not (1 <= int(self.degree) <= _MAX_DEGREE):
                raise ValueError(
                    f"polynomial degree must be in [1, {_MAX_DEGREE}], got {self.degree}")
            object.__setattr__(self, "degree", int(self.degree))

    @classmethod
    def gaussian(cls, width: float | None = None, *, alpha: float | None = None) -> "KernelConfig":
        """Gaussian kernel from a width s, or from alpha = 1 / s^2 (exclusive)."""
        if (width is None) == (alpha is None):
            raise ValueError("give exactly one of width or alpha")
        if alpha is not None:
            if not alpha > 0:
                raise ValueError(f"alpha must be > 0, got {alpha}")
            width = 1.0 / np.sqrt(alpha)
        return cls(family=GAUSSIAN, width=float(width))

    @classmethod
    def erbf(cls, width: float) -> "KernelConfig":
        return cls(family=ERBF, width=float(width))

    @classmethod
    def polynomial(cls, degree: int) -> "KernelConfig":
        return cls(family=POLYNOMIAL, degree=degree)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"family": self.family}
        if self.width is not None:
            out["width"] = self.width
        if self.degree is not None:
            out["degree"] = self.degree
        return out

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "KernelConfig":
        return cls(family=d.get("family", ""), width=d.get("width"),
                   degree=d.get("degree"))

    def describe(self) -> str:
        if self.family == POLYNOMIAL:
            return f"{self.family}(d={self.degree})"
        return f"{self.family}(s={self.width:g})"


def _check_matrix(X: np.ndarray, what: str) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if not np.all(np.isfinite(X)):
        raise NumError(f"{what}: non-finite input")
    return X


def kernel_cross(cfg: KernelConfig, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Kernel values between every row of A and every row of B: (len(A), len(B))."""
    A = _check_matrix(A, "kernel A")
    B = _check_matrix(B, "kernel B")
    if A.shape[1] != B.shape[1]:
        raise DimError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    dots = A @ B.T
    if cfg.family == POLYNOMIAL:
        return (dots + 1.0) ** cfg.degree
    sq_a = np.einsum("ij,ij->i", A, A)
    sq_b = np.einsum("ij,ij->i", B, B)
    d2 = np.maximum(sq_a[:, None] + sq_b[None, :] - 2.0 * dots, 0.0)
    if cfg.family == GAUSSIAN:
        return np.exp(-d2 / (cfg.width * cfg.width))
    return np.exp(-np.sqrt(d2) / cfg.width)


def kernel_eval(cfg: KernelConfig, x: np.ndarray, y: np.ndarray) -> float:
    """Kernel value for a single pair of vectors."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1:
        raise DimError("kernel_eval expects 1-D vectors")
    if x.shape != y.shape:
        raise DimError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    return float(kernel_cross(cfg, x[None, :], y[None, :])[0, 0])


def gram_matrix(cfg: KernelConfig, X: np.ndarray) -> np.ndarray:
    """Dense kernel matrix G[i, j] = k(x_i, x_j), exactly symmetric.

    Each unordered pair is evaluated once and mirrored; for the RBF families
    the diagonal is pinned to exactly 1.
    """
    X = _check_matrix(X, "gram input")
    G = kernel_cross(cfg, X, X)
    upper = np.triu(G, k=1)
    G = upper + upper.T + np.diag(np.diag(G))
    if cfg.family in (GAUSSIAN, ERBF):
        np.fill_diagonal(G, 1.0)
    return G
