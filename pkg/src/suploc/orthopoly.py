"""Three-term recurrence coefficients of monic orthogonal polynomials.

The Stieltjes procedure builds ``P_0, P_1, ...`` on the fly from an
integration oracle and reads off

    alpha_j = <x P_j, P_j> / zeta_j,     beta_j = zeta_j / zeta_{j-1},

with ``zeta_j = <P_j, P_j>`` and ``P_{j+1} = (x - alpha_j) P_j - beta_j P_{j-1}``.

An oracle is any object exposing

* ``degree`` -- highest degree of ``p * q`` it integrates exactly,
* ``one()`` -- the representation of the constant polynomial 1,
* ``mulx(p)`` -- the representation of ``x * p``,
* ``inner(p, q)`` -- the integral of ``p * q``,
* ``scale`` -- a length scale of the support (used for rank decisions).

and optionally ``inner_many(p, B)`` returning ``<p, B[k]>`` for the rows of
``B`` in one call.

Representations must support ``+``, ``-`` and scalar ``*`` (numpy arrays).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DegreeBudgetExceeded, DegreeOutOfRange, LostPositivity


@dataclass(frozen=True)
class Recurrence:
    """Recurrence coefficients of ``P_0 .. P_n``.

    ``alphas`` holds alpha_0..alpha_{n-1}, ``betas`` holds beta_1..beta_{n-1}
    and ``zeta`` holds the squared norms zeta_0..zeta_{n-1}. For very high
    degrees on narrow supports ``zeta`` may underflow to zero even though the
    coefficients themselves are fine; ``alphas``/``betas`` never depend on it.

    ``rank`` is set when the oracle turned out to be degenerate: the
    functional is then supported on exactly ``rank`` points and the recurrence
    stops at degree ``rank``.
    """

    alphas: tuple[float, ...]
    betas: tuple[float, ...]
    zeta: tuple[float, ...]
    rank: Optional[int] = None

    def __post_init__(self):
        for name in ("alphas", "betas", "zeta"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        n = len(self.alphas)
        if len(self.betas) != max(n - 1, 0) or len(self.zeta) != n:
            raise ValueError(
                f"inconsistent lengths: {n} alphas, {len(self.betas)} betas, "
                f"{len(self.zeta)} norms"
            )
        if any(not b > 0 for b in self.betas):
            raise ValueError("recurrence betas must be positive")

    @property
    def degree(self) -> int:
        return len(self.alphas)

    @property
    def a_inf(self) -> float:
        """Largest orthonormal off-diagonal coefficient ``sqrt(beta_j)`` seen."""
        return math.sqrt(max(self.betas)) if self.betas else 0.0

    @property
    def conditioning(self) -> float:
        """``zeta_{n-1} / zeta_0``; tiny values flag a hard moment problem."""
        return self.zeta[-1] / self.zeta[0] if self.zeta else 1.0

    def truncate(self, n: int) -> "Recurrence":
        """Coefficients for degree ``n``; the recurrence is prefix-stable."""
        if not 0 < n <= self.degree:
            raise DegreeOutOfRange(f"cannot truncate degree {self.degree} to {n}")
        return Recurrence(self.alphas[:n], self.betas[: n - 1], self.zeta[:n])

    def to_json(self) -> str:
        return json.dumps(
            {"alpha": list(self.alphas), "beta": list(self.betas), "zeta": list(self.zeta)}
        )

    @classmethod
    def from_json(cls, text: str) -> "Recurrence":
        data = json.loads(text)
        return cls(tuple(data["alpha"]), tuple(data["beta"]), tuple(data["zeta"]))


@dataclass(frozen=True)
class JacobiMatrix:
    """Symmetric tridiagonal matrix with diagonal alpha and off-diagonal sqrt(beta)."""

    diagonal: tuple[float, ...]
    offdiagonal: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "diagonal", tuple(float(v) for v in self.diagonal))
        object.__setattr__(self, "offdiagonal", tuple(float(v) for v in self.offdiagonal))
        if len(self.offdiagonal) != max(len(self.diagonal) - 1, 0):
            raise ValueError("offdiagonal must be one shorter than diagonal")
        if any(not v > 0 for v in self.offdiagonal):
            raise ValueError("Jacobi off-diagonal entries must be positive")

    @property
    def size(self) -> int:
        return len(self.diagonal)

    def to_dense(self) -> np.ndarray:
        off = np.array(self.offdiagonal)
        return np.diag(self.diagonal) + np.diag(off, 1) + np.diag(off, -1)


def _project_out(oracle, R, basis: list):
    """Remove the components of ``R`` along the orthonormal ``basis``."""
    if not basis:
        return R
    B = np.asarray(basis)
    if hasattr(oracle, "inner_many"):
        c = oracle.inner_many(R, B)
    else:
        c = np.array([oracle.inner(R, b) for b in basis])
    return R - c @ B


def stieltjes(
    oracle, n: int, rank_tol: Optional[float] = None, reorthogonalize: bool = True
) -> Recurrence:
    """Recurrence coefficients up to degree ``n`` from an integration oracle.

    The polynomials are carried in the oracle's own representation and updated
    by ``(P, Q) <- ((x - alpha) P - beta Q, P)``. After each step both are
    divided by ``sqrt(zeta_j)``; the update is homogeneous so the coefficients
    are unchanged, but the values stay O(1) instead of decaying like
    ``cap(supp)^j``.

    If ``rank_tol`` is given, a step with ``beta_j <= rank_tol * scale**2``
    (or a non-positive norm) is read as the functional having rank ``j``: the
    recurrence is returned truncated at degree ``j`` with ``rank=j``.
    Otherwise a non-positive or non-finite norm raises :class:`LostPositivity`.

    With ``reorthogonalize`` each new polynomial is projected (twice) against
    all previous ones. This changes nothing in exact arithmetic but stops
    rounding errors from re-growing components that have already converged,
    e.g. an atom far outside an interval, which otherwise shows up again as a
    spurious duplicate root a few dozen degrees later.
    """
    if n < 1:
        raise ValueError("degree must be at least 1")
    if oracle.degree < 2 * n - 1:
        raise DegreeBudgetExceeded(2 * n - 1, oracle.degree)

    collapse = None if rank_tol is None else rank_tol * oracle.scale**2
    alphas: list[float] = []
    betas: list[float] = []
    zetas: list[float] = []
    log_zeta = 0.0

    P = oracle.one()
    Q = P * 0.0
    beta = 0.0
    basis: list = []
    for j in range(n):
        z = float(oracle.inner(P, P))
        degenerate = not (math.isfinite(z) and z > 0)
        if j >= 1 and collapse is not None and (degenerate or z <= collapse):
            return Recurrence(alphas, betas, zetas, rank=j)
        if degenerate:
            raise LostPositivity(j, z)
        if j == 0:
            log_zeta = math.log(z)
        else:
            # previous P was normalised, so zeta_j / zeta_{j-1} is just z
            beta = z
            betas.append(beta)
            log_zeta += math.log(beta)
        zetas.append(math.exp(log_zeta))

        xP = oracle.mulx(P)
        alpha = float(oracle.inner(xP, P)) / z
        if not math.isfinite(alpha):
            raise LostPositivity(j, z)
        alphas.append(alpha)
        if j == n - 1:
            break
        f = 1.0 / math.sqrt(z)
        R = (xP - alpha * P - beta * Q) * f
        if reorthogonalize:
            basis.append(P * f)
            R = _project_out(oracle, _project_out(oracle, R, basis), basis)
        P, Q = R, P * f
    return Recurrence(alphas, betas, zetas)


def jacobi(rec: Recurrence) -> JacobiMatrix:
    return JacobiMatrix(rec.alphas, tuple(math.sqrt(b) for b in rec.betas))


def eval_monic(rec: Recurrence, k: int, points) -> np.ndarray:
    """Evaluate ``P_k`` at ``points`` by the forward recurrence."""
    if not 0 <= k <= rec.degree:
        raise DegreeOutOfRange(f"P_{k} needs degree <= {rec.degree}")
    x = np.asarray(points, dtype=float)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for j in range(k):
        b = rec.betas[j - 1] if j >= 1 else 0.0
        prev, cur = cur, (x - rec.alphas[j]) * cur - b * prev
    return cur


def monic_coefficients(rec: Recurrence, k: int) -> np.ndarray:
    """Power-basis coefficients of ``P_k``, lowest degree first."""
    if not 0 <= k <= rec.degree:
        raise DegreeOutOfRange(f"P_{k} needs degree <= {rec.degree}")
    prev = np.zeros(k + 1)
    cur = np.zeros(k + 1)
    cur[0] = 1.0
    for j in range(k):
        b = rec.betas[j - 1] if j >= 1 else 0.0
        shifted = np.roll(cur, 1)
        shifted[0] = 0.0
        prev, cur = cur, shifted - rec.alphas[j] * cur - b * prev
    return cur


def recurrence_from_sequences(alphas: Sequence[float], betas: Sequence[float]) -> Recurrence:
    """Build a :class:`Recurrence` from known coefficients (norms from zeta_0 = 1)."""
    zeta = [1.0]
    for b in betas:
        zeta.append(zeta[-1] * b)
    return Recurrence(tuple(alphas), tuple(betas), tuple(zeta[: len(alphas)]))
