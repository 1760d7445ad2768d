"""Eigenvalues of symmetric tridiagonal matrices.

The roots of the degree-n monic orthogonal polynomial are the eigenvalues of
the n x n Jacobi matrix, so everything downstream funnels through
:func:`tridiagonal_eigenvalues`. The kernel is an implicit QL iteration with
Wilkinson shifts, eigenvalues only. A Householder reduction is provided so
dense symmetric matrices (moment matrices) can reuse the same kernel.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NoConvergence, NonSimpleRoots
from .orthopoly import JacobiMatrix, Recurrence, eval_monic

_EPS = sys.float_info.epsilon

#: Relative gap below which two sorted roots are treated as coincident.
SIMPLICITY_GAP = 1e-13


def tridiagonal_eigenvalues(
    diagonal: Sequence[float],
    offdiagonal: Sequence[float],
    rel_tol: float = 1e-12,
) -> np.ndarray:
    """All eigenvalues of a symmetric tridiagonal matrix, sorted ascending.

    Zero off-diagonal entries are allowed; the matrix then splits into
    independent blocks. An off-diagonal entry is deflated once it is below
    machine precision relative to its two diagonal neighbours, or below
    ``rel_tol**2 * ||T||`` in absolute terms, which keeps every eigenvalue
    within ``rel_tol * ||T||`` of the exact one.

    Raises :class:`NoConvergence` after ``50 * n`` QL sweeps in total.
    """
    d = [float(v) for v in diagonal]
    n = len(d)
    if len(offdiagonal) != max(n - 1, 0):
        raise ValueError(
            f"offdiagonal must have length {max(n - 1, 0)}, got {len(offdiagonal)}"
        )
    if n == 0:
        return np.empty(0)
    e = [float(v) for v in offdiagonal] + [0.0]

    norm = 0.0
    for i in range(n):
        row = abs(d[i]) + abs(e[i]) + (abs(e[i - 1]) if i > 0 else 0.0)
        norm = max(norm, row)
    floor = rel_tol * rel_tol * norm
    cap = 50 * n
    sweeps = 0

    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= _EPS * (abs(d[m]) + abs(d[m + 1])) or abs(e[m]) <= floor:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > cap:
                raise NoConvergence(l, cap)
            # Wilkinson shift from the leading 2x2 block of the unreduced part.
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            split = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    split = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if split:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    d.sort()
    return np.array(d)


def householder_tridiagonalize(A) -> tuple[np.ndarray, np.ndarray]:
    """Reduce a dense symmetric matrix to tridiagonal form by Householder
    reflections. Returns ``(diagonal, offdiagonal)``; the spectrum is
    preserved exactly up to rounding."""
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    for k in range(n - 2):
        x = A[k + 1:, k]
        xnorm = np.linalg.norm(x)
        if xnorm == 0.0:
            continue
        v = x.copy()
        v[0] += math.copysign(xnorm, x[0])
        v /= np.linalg.norm(v)
        A[k + 1:, :] -= 2.0 * np.outer(v, v @ A[k + 1:, :])
        A[:, k + 1:] -= 2.0 * np.outer(A[:, k + 1:] @ v, v)
    return np.diag(A).copy(), np.diag(A, 1).copy()


def symmetric_eigenvalues(A, rel_tol: float = 1e-12) -> np.ndarray:
    """Sorted eigenvalues of a dense symmetric matrix."""
    d, e = householder_tridiagonalize(A)
    return tridiagonal_eigenvalues(d, e, rel_tol)


@dataclass(frozen=True)
class RootList:
    """Sorted, simple roots ``x_1 < ... < x_n`` of a degree-n polynomial."""

    degree: int
    roots: tuple[float, ...]

    def __post_init__(self):
        roots = tuple(float(x) for x in self.roots)
        object.__setattr__(self, "roots", roots)
        if len(roots) != self.degree:
            raise ValueError(f"expected {self.degree} roots, got {len(roots)}")
        if len(roots) > 1:
            scale = max(1.0, max(abs(roots[0]), abs(roots[-1])))
            gaps = np.diff(roots)
            if gaps.min() <= SIMPLICITY_GAP * scale:
                k = int(gaps.argmin())
                raise NonSimpleRoots(
                    f"roots {k} and {k + 1} are not separated: gap={gaps[k]:.3g}"
                )

    def __len__(self):
        return self.degree

    def __iter__(self):
        return iter(self.roots)

    def __getitem__(self, i):
        return self.roots[i]

    def as_array(self) -> np.ndarray:
        return np.array(self.roots)


def eigenvalues(J: JacobiMatrix, rel_tol: float = 1e-12) -> RootList:
    """Roots of ``P_n`` as the eigenvalues of its Jacobi matrix."""
    values = tridiagonal_eigenvalues(J.diagonal, J.offdiagonal, rel_tol)
    return RootList(len(values), tuple(values))


def residual_check(rec: Recurrence, roots: RootList) -> float:
    """Largest relative residual ``|P_n(x_i)|`` over the computed roots.

    Each residual is normalised by the largest ``|P_n|`` on the stencil
    ``x_i - h, x_i, x_i + h`` with ``h = 1e-6 * width``; a correct root gives
    a value near rounding level while a misplaced one gives O(1).
    """
    n = roots.degree
    if n == 0:
        return 0.0
    if n > rec.degree:
        raise ValueError(f"recurrence has degree {rec.degree}, roots have {n}")
    x = roots.as_array()
    width = x[-1] - x[0] if n > 1 else max(abs(x[0]), 1.0)
    h = 1e-6 * width
    centre = np.abs(eval_monic(rec, n, x))
    left = np.abs(eval_monic(rec, n, x - h))
    right = np.abs(eval_monic(rec, n, x + h))
    scale = np.maximum(np.maximum(left, right), centre)
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(scale > 0, centre / scale, 0.0)
    return float(rel.max())
