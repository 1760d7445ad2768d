"""Moment data: Hankel assembly, PSD and rank diagnostics, flat extensions."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._io import read_json
from .errors import (
    DegreeBudgetExceeded,
    InconsistentPrefix,
    NonPositiveMass,
    NotHankel,
    ParseError,
)
from .spectra import symmetric_eigenvalues

#: Default relative rank tolerance (singular values below tau * sigma_max are zero).
DEFAULT_TAU = 1e-8

_HANKEL_RTOL = 1e-9


def hankel(y: Sequence[float], n: Optional[int] = None) -> np.ndarray:
    """``(n+1) x (n+1)`` matrix with entries ``y[i + j]``."""
    y = np.asarray(y, dtype=float)
    if n is None:
        n = (len(y) - 1) // 2
    if 2 * n + 1 > len(y):
        raise ValueError(f"M_{n} needs {2 * n + 1} moments, got {len(y)}")
    idx = np.add.outer(np.arange(n + 1), np.arange(n + 1))
    return y[idx]


@dataclass(frozen=True)
class MomentData:
    """Moments ``y_0 .. y_{2n}`` normalised to ``y_0 = 1``; ``mass`` keeps the
    original ``y_0``."""

    moments: tuple[float, ...]
    mass: float = field(default=1.0, compare=False)

    def __post_init__(self):
        y = tuple(float(v) for v in self.moments)
        if len(y) % 2 == 0:
            raise ParseError(f"need an odd number (2n+1) of moments, got {len(y)}")
        if not all(math.isfinite(v) for v in y):
            raise ParseError("moments must be finite")
        if not y[0] > 0:
            raise NonPositiveMass(f"y_0 must be positive, got {y[0]}")
        mass = y[0] * self.mass
        if y[0] != 1.0:
            y = tuple(v / y[0] for v in y)
        object.__setattr__(self, "moments", y)
        object.__setattr__(self, "mass", mass)

    @property
    def degree(self) -> int:
        return (len(self.moments) - 1) // 2

    @property
    def matrix(self) -> np.ndarray:
        return hankel(self.moments)

    def truncate(self, n: int) -> "MomentData":
        if not 0 <= n <= self.degree:
            raise ValueError(f"cannot truncate degree {self.degree} to {n}")
        return MomentData(self.moments[: 2 * n + 1])

    @classmethod
    def from_matrix(cls, matrix) -> "MomentData":
        M = np.asarray(matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
            raise ParseError("moment matrix must be square and non-empty")
        if not np.all(np.isfinite(M)):
            raise ParseError("moment matrix entries must be finite")
        n = M.shape[0] - 1
        y = np.empty(2 * n + 1)
        for s in range(2 * n + 1):
            i = max(0, s - n)
            y[s] = M[i, s - i]
        floor = 1e-15 * float(np.abs(M).max())
        for i in range(n + 1):
            for j in range(n + 1):
                a, b = M[i, j], y[i + j]
                if abs(a - b) > _HANKEL_RTOL * max(abs(a), abs(b)) + floor:
                    raise NotHankel(f"entry ({i},{j})={a!r} differs from y_{i + j}={b!r}")
        return cls(tuple(y))

    def to_json(self) -> str:
        return json.dumps({"moments": list(self.moments)})


def moments_from_dict(data) -> MomentData:
    if not isinstance(data, dict):
        raise ParseError("moment file must be a JSON object")
    unknown = set(data) - {"moments", "matrix"}
    if unknown:
        raise ParseError(f"unknown field(s) {sorted(unknown)}")
    if ("moments" in data) == ("matrix" in data):
        raise ParseError('give exactly one of "moments" or "matrix"')

    def number(v):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"expected a number, got {v!r}")
        return float(v)

    if "moments" in data:
        if not isinstance(data["moments"], list):
            raise ParseError('"moments" must be a list')
        return MomentData(tuple(number(v) for v in data["moments"]))
    rows = data["matrix"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ParseError('"matrix" must be a list of rows')
    if any(len(r) != len(rows) for r in rows):
        raise ParseError("moment matrix must be square")
    return MomentData.from_matrix([[number(v) for v in r] for r in rows])


def load_moments(source) -> MomentData:
    """Read ``{"moments": [...]}`` or ``{"matrix": [[...]]}`` from a path,
    ``"-"`` or a stream."""
    return moments_from_dict(read_json(source))


@dataclass(frozen=True)
class PSDReport:
    min_eig: float
    ok: bool
    threshold: float

    @property
    def indefinite(self) -> bool:
        """Accepted, but with slightly negative eigenvalues."""
        return self.ok and self.min_eig < 0


def _matrix_of(M) -> np.ndarray:
    return M.matrix if isinstance(M, MomentData) else np.asarray(M, dtype=float)


def psd_check(M, tol: float = DEFAULT_TAU) -> PSDReport:
    """``ok`` iff ``min_eig >= -tol * max(1, ||M||_inf)``."""
    A = _matrix_of(M)
    eig = symmetric_eigenvalues(A)
    threshold = tol * max(1.0, float(np.abs(A).sum(axis=1).max()))
    min_eig = float(eig[0])
    return PSDReport(min_eig, min_eig >= -threshold, threshold)


def project_psd(M) -> np.ndarray:
    """Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped to 0).

    Needs eigenvectors, so this uses LAPACK rather than the in-house
    eigenvalue-only kernel.
    """
    A = _matrix_of(M)
    w, V = np.linalg.eigh(0.5 * (A + A.T))
    return (V * np.clip(w, 0.0, None)) @ V.T


def numerical_rank(A, tau: float = DEFAULT_TAU) -> tuple[int, np.ndarray]:
    """Number of singular values above ``tau * sigma_max``, plus the singular
    values (absolute eigenvalues, descending)."""
    sigma = np.sort(np.abs(symmetric_eigenvalues(A)))[::-1]
    if sigma.size == 0 or sigma[0] == 0:
        return 0, sigma
    return int(np.count_nonzero(sigma > tau * sigma[0])), sigma


@dataclass(frozen=True)
class RankReport:
    rank_n: int
    rank_n_plus_1: int
    tau: float
    flat: bool
    min_eig: float
    n: int

    @property
    def r(self) -> int:
        return self.rank_n


def flatness(Mn: MomentData, Mn1: MomentData, tau: float = DEFAULT_TAU) -> RankReport:
    """Compare numerical ranks of ``M_n`` and ``M_{n+1}``.

    Equal ranks certify a flat extension, i.e. a representing measure with
    exactly ``rank_n`` atoms.
    """
    n = Mn.degree
    if Mn1.degree != n + 1:
        raise InconsistentPrefix(f"expected degrees n and n+1, got {n} and {Mn1.degree}")
    if Mn1.moments[: 2 * n + 1] != Mn.moments:
        raise InconsistentPrefix("M_n and M_{n+1} disagree on y_0..y_2n")
    rank_n, _ = numerical_rank(Mn.matrix, tau)
    big = Mn1.matrix
    rank_n1, _ = numerical_rank(big, tau)
    min_eig = float(symmetric_eigenvalues(big)[0])
    return RankReport(rank_n, rank_n1, tau, rank_n == rank_n1, min_eig, n)


def flatness_at(data: MomentData, n: int, tau: float = DEFAULT_TAU) -> RankReport:
    """:func:`flatness` for the prefixes of one moment sequence."""
    if n + 1 > data.degree:
        raise ValueError(f"flatness at n={n} needs moments up to degree {2 * n + 2}")
    return flatness(data.truncate(n), data.truncate(n + 1), tau)


class MomentOracle:
    """Integration oracle ``<p, q> = p^T M q`` on power-basis coefficient vectors.

    Exact for products up to degree ``2n`` but conditioned like the Hankel
    matrix, which grows exponentially with ``n``.
    """

    def __init__(self, matrix, scale: Optional[float] = None):
        self.matrix = np.asarray(matrix, dtype=float)
        self.size = self.matrix.shape[0]
        self.degree = 2 * (self.size - 1)
        if scale is None:
            scale = 1.0
            if self.size > 1:
                m0, m1, m2 = self.matrix[0, 0], self.matrix[0, 1], self.matrix[1, 1]
                var = m2 / m0 - (m1 / m0) ** 2
                scale = 2.0 * math.sqrt(var) if var > 0 else 1.0
        self.scale = scale

    @classmethod
    def from_data(cls, data: MomentData, n: Optional[int] = None) -> "MomentOracle":
        if n is not None:
            data = data.truncate(n)
        return cls(data.matrix)

    def one(self) -> np.ndarray:
        e = np.zeros(self.size)
        e[0] = 1.0
        return e

    def mulx(self, p: np.ndarray) -> np.ndarray:
        if p[-1] != 0.0:
            raise DegreeBudgetExceeded(self.size, self.size - 1)
        out = np.empty_like(p)
        out[0] = 0.0
        out[1:] = p[:-1]
        return out

    def inner(self, p: np.ndarray, q: np.ndarray) -> float:
        return float(p @ self.matrix @ q)

    def inner_many(self, p: np.ndarray, basis: np.ndarray) -> np.ndarray:
        return basis @ (self.matrix @ p)
