"""Ground-truth measures: finitely many atoms plus uniform densities on intervals.

Two independent integration routes are provided. :func:`moments` evaluates
``y_k = int x^k dmu`` in closed form; :class:`QuadratureOracle` represents
polynomials by their values at Gauss-Legendre nodes (one rule per interval)
plus the atoms, which stays accurate at degrees where the monomial basis is
hopeless.
"""

from __future__ import annotations

import enum
import functools
import json
import math
from dataclasses import dataclass, field
from typing import IO, Optional, Sequence, Union

import numpy as np

from .errors import DegreeBudgetExceeded, ParseError, SpecError
from .spectra import tridiagonal_eigenvalues

#: Default cap on ``deg p + deg q`` for :func:`inner_product`.
MAX_INNER_DEGREE = 1000


class Regime(str, enum.Enum):
    FLAT = "flat"
    SINGLE = "single"
    OUTSIDE = "outside"
    GENERAL = "general"


@dataclass(frozen=True)
class AtomPart:
    position: float
    weight: float

    def __post_init__(self):
        if not (math.isfinite(self.position) and math.isfinite(self.weight)):
            raise SpecError("atom position and weight must be finite")
        if not self.weight > 0:
            raise SpecError(f"atom weight must be positive, got {self.weight}")


@dataclass(frozen=True)
class IntervalPart:
    """Mass ``weight`` spread uniformly over ``[lower, upper]``."""

    lower: float
    upper: float
    weight: float
    density: str = "uniform"

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.lower, self.upper, self.weight)):
            raise SpecError("interval bounds and weight must be finite")
        if not self.lower < self.upper:
            raise SpecError(f"interval needs lower < upper, got [{self.lower}, {self.upper}]")
        if not self.weight > 0:
            raise SpecError(f"interval weight must be positive, got {self.weight}")
        if self.density != "uniform":
            raise SpecError(f"unsupported density shape {self.density!r}")

    @property
    def length(self) -> float:
        return self.upper - self.lower

    @property
    def level(self) -> float:
        """Pointwise density value."""
        return self.weight / self.length


@dataclass(frozen=True)
class MeasureSpec:
    """A probability measure ``sum_i w_i delta_{x_i} + sum_j w_j U[a_j, b_j]``.

    Weights are rescaled to total mass one on construction; the original total
    is kept in ``mass``. ``bound`` defaults to the smallest B with
    ``supp mu`` inside ``[-B, B]``.
    """

    atoms: tuple[AtomPart, ...] = ()
    intervals: tuple[IntervalPart, ...] = ()
    bound: Optional[float] = None
    mass: float = field(init=False, default=1.0)

    def __post_init__(self):
        atoms = tuple(self.atoms)
        intervals = tuple(self.intervals)
        if not atoms and not intervals:
            raise SpecError("a measure needs at least one component")
        total = math.fsum(a.weight for a in atoms) + math.fsum(i.weight for i in intervals)
        atoms = tuple(
            sorted((AtomPart(a.position, a.weight / total) for a in atoms), key=lambda a: a.position)
        )
        intervals = tuple(
            sorted(
                (IntervalPart(i.lower, i.upper, i.weight / total, i.density) for i in intervals),
                key=lambda i: i.lower,
            )
        )
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "intervals", intervals)
        object.__setattr__(self, "mass", total)

        extent = max([abs(a.position) for a in atoms] + [max(-i.lower, i.upper) for i in intervals])
        if self.bound is None:
            object.__setattr__(self, "bound", float(extent))
        elif not extent <= self.bound:
            raise SpecError(f"support reaches {extent}, outside bound {self.bound}")

        comps = self.components()
        for (l0, u0), (l1, u1) in zip(comps, comps[1:]):
            if not l1 > u0:
                raise SpecError(f"components [{l0}, {u0}] and [{l1}, {u1}] overlap or touch")

    def components(self) -> list[tuple[float, float]]:
        """Connected components of the support as closed ``(lower, upper)``
        pairs (atoms are degenerate pairs), sorted."""
        comps = [(a.position, a.position) for a in self.atoms]
        comps += [(i.lower, i.upper) for i in self.intervals]
        return sorted(comps)

    def support(self) -> tuple[list[float], list[tuple[float, float]]]:
        return [a.position for a in self.atoms], [(i.lower, i.upper) for i in self.intervals]

    @property
    def hull(self) -> tuple[float, float]:
        comps = self.components()
        return comps[0][0], max(u for _, u in comps)

    @property
    def density_floor(self) -> float:
        """Smallest density level over the intervals (``inf`` without intervals)."""
        return min((i.level for i in self.intervals), default=math.inf)

    @property
    def regime(self) -> Regime:
        if not self.intervals:
            return Regime.FLAT
        if len(self.intervals) == 1:
            return Regime.SINGLE
        lo, hi = self.intervals[0].lower, self.intervals[-1].upper
        if any(lo < a.position < hi for a in self.atoms):
            return Regime.GENERAL
        return Regime.OUTSIDE


def separation_distance(spec: MeasureSpec) -> float:
    """Smallest gap between two distinct components; ``inf`` for a single one."""
    comps = spec.components()
    if len(comps) < 2:
        return math.inf
    return min(l1 - u0 for (_, u0), (l1, _) in zip(comps, comps[1:]))


def _interval_moments(a: float, b: float, max_degree: int) -> np.ndarray:
    """``(b^{k+1} - a^{k+1}) / ((k+1)(b-a))`` for k = 0..max_degree."""
    k = np.arange(max_degree + 1)
    if a >= 0 or b <= 0:
        # same sign: the geometric sum sum_i a^i b^{k-i} has no cancellation
        out = np.empty(max_degree + 1)
        pa = np.ones(max_degree + 1)
        pa[1:] = np.cumprod(np.full(max_degree, a))
        pb = np.ones(max_degree + 1)
        pb[1:] = np.cumprod(np.full(max_degree, b))
        for j in range(max_degree + 1):
            out[j] = math.fsum(pa[: j + 1] * pb[j::-1])
        return out / (k + 1)
    return (b ** (k + 1) - a ** (k + 1)) / ((k + 1) * (b - a))


def moments(spec: MeasureSpec, max_degree: int) -> np.ndarray:
    """Exact moments ``y_0 .. y_max_degree``."""
    if max_degree < 0:
        raise ValueError("max_degree must be non-negative")
    k = np.arange(max_degree + 1)
    terms = [a.weight * np.power(a.position, k, dtype=float) for a in spec.atoms]
    terms += [i.weight * _interval_moments(i.lower, i.upper, max_degree) for i in spec.intervals]
    y = np.array([math.fsum(col) for col in zip(*terms)])
    y[0] = 1.0
    return y


@functools.lru_cache(maxsize=256)
def _gauss_legendre(m: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    j = np.arange(1, m)
    b = j / np.sqrt(4.0 * j * j - 1.0)
    x = tridiagonal_eigenvalues(np.zeros(m), b)

    def orthonormal(x):
        # p_0..p_m and p_m' for the probability measure dx/2 on [-1, 1]
        prev, cur = np.zeros_like(x), np.ones_like(x)
        dprev, dcur = np.zeros_like(x), np.zeros_like(x)
        sq = np.ones_like(x)
        for k in range(m):
            bk = b[k - 1] if k >= 1 else 0.0
            bn = (k + 1) / math.sqrt(4.0 * (k + 1) ** 2 - 1.0)
            nxt = (x * cur - bk * prev) / bn
            dnxt = (cur + x * dcur - bk * dprev) / bn
            prev, cur, dprev, dcur = cur, nxt, dcur, dnxt
            if k + 1 < m:
                sq += cur * cur
        return cur, dcur, sq

    pm, dpm, _ = orthonormal(x)
    x = x - pm / dpm
    x = 0.5 * (x - x[::-1])
    _, _, sq = orthonormal(x)
    w = 1.0 / sq
    w = 0.5 * (w + w[::-1])
    return tuple(x), tuple(w / math.fsum(w))


def gauss_legendre(m: int) -> tuple[np.ndarray, np.ndarray]:
    """``m``-point Gauss-Legendre rule for the probability measure ``dx/2`` on
    ``[-1, 1]``: nodes ascending, weights summing to one, exact to degree
    ``2m - 1``."""
    if m < 1:
        raise ValueError("need at least one node")
    x, w = _gauss_legendre(int(m))
    return np.array(x), np.array(w)


class QuadratureOracle:
    """Discrete measure that integrates polynomials of degree ``<= degree``
    exactly against a :class:`MeasureSpec`.

    Polynomials are represented by their values at ``nodes``.
    """

    def __init__(self, nodes, weights, degree: int, scale: Optional[float] = None):
        self.nodes = np.asarray(nodes, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        self.degree = int(degree)
        if scale is None:
            spread = float(self.nodes.max() - self.nodes.min())
            scale = spread if spread > 0 else max(abs(float(self.nodes[0])), 1.0)
        self.scale = scale

    @classmethod
    def from_spec(cls, spec: MeasureSpec, degree: int) -> "QuadratureOracle":
        m = degree // 2 + 1
        t, lam = gauss_legendre(m)
        nodes, weights = [], []
        for part in spec.intervals:
            mid = 0.5 * (part.lower + part.upper)
            half = 0.5 * part.length
            nodes.append(mid + half * t)
            weights.append(part.weight * lam)
        if spec.atoms:
            nodes.append(np.array([a.position for a in spec.atoms]))
            weights.append(np.array([a.weight for a in spec.atoms]))
        lo, hi = spec.hull
        spread = hi - lo
        scale = spread if spread > 0 else max(abs(lo), 1.0)
        return cls(np.concatenate(nodes), np.concatenate(weights), degree, scale)

    def one(self) -> np.ndarray:
        return np.ones_like(self.nodes)

    def mulx(self, p: np.ndarray) -> np.ndarray:
        return self.nodes * p

    def inner(self, p: np.ndarray, q: np.ndarray) -> float:
        return float(np.dot(self.weights * p, q))

    def inner_many(self, p: np.ndarray, basis: np.ndarray) -> np.ndarray:
        return basis @ (self.weights * p)

    def values(self, coeffs: Sequence[float]) -> np.ndarray:
        """Values of a power-basis polynomial (lowest degree first) at the nodes."""
        return np.polynomial.polynomial.polyval(self.nodes, np.asarray(coeffs, dtype=float))


def _degree(coeffs) -> int:
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    return len(c) - 1


def inner_product(
    spec: MeasureSpec,
    p: Sequence[float],
    q: Sequence[float],
    backend: str = "analytic",
    budget: int = MAX_INNER_DEGREE,
) -> float:
    """``int p q dmu`` for power-basis coefficient vectors (lowest degree first).

    ``backend="analytic"`` expands the product and applies :func:`moments`;
    ``backend="quadrature"`` evaluates both factors on a rule exact for the
    product degree.
    """
    dp, dq = _degree(p), _degree(q)
    if dp < 0 or dq < 0:
        return 0.0
    deg = dp + dq
    if deg > budget:
        raise DegreeBudgetExceeded(deg, budget)
    p = np.asarray(p, dtype=float)[: dp + 1]
    q = np.asarray(q, dtype=float)[: dq + 1]
    if backend == "analytic":
        prod = np.zeros(deg + 1)
        full = np.polynomial.polynomial.polymul(p, q)  # may drop an underflowed top term
        prod[: full.size] = full
        return math.fsum(prod * moments(spec, deg))
    if backend == "quadrature":
        oracle = QuadratureOracle.from_spec(spec, deg)
        return oracle.inner(oracle.values(p), oracle.values(q))
    raise ValueError(f"unknown backend {backend!r}")


# -- JSON ---------------------------------------------------------------------

_TOP_KEYS = {"atoms", "intervals", "bound"}
_ATOM_KEYS = {"x", "w"}
_INTERVAL_KEYS = {"a", "b", "w", "density"}


def _check_keys(obj, allowed, required, where):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ParseError(f"{where}: unknown field(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ParseError(f"{where}: missing field(s) {sorted(missing)}")


def spec_from_dict(data: dict) -> MeasureSpec:
    _check_keys(data, _TOP_KEYS, set(), "measure spec")
    atoms, intervals = [], []
    try:
        for k, a in enumerate(data.get("atoms", [])):
            _check_keys(a, _ATOM_KEYS, _ATOM_KEYS, f"atoms[{k}]")
            atoms.append(AtomPart(float(a["x"]), float(a["w"])))
        for k, i in enumerate(data.get("intervals", [])):
            _check_keys(i, _INTERVAL_KEYS, {"a", "b", "w"}, f"intervals[{k}]")
            intervals.append(
                IntervalPart(float(i["a"]), float(i["b"]), float(i["w"]), i.get("density", "uniform"))
            )
        bound = data.get("bound")
        return MeasureSpec(tuple(atoms), tuple(intervals), None if bound is None else float(bound))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise ParseError(str(exc)) from exc


def spec_to_dict(spec: MeasureSpec) -> dict:
    return {
        "atoms": [{"x": a.position, "w": a.weight} for a in spec.atoms],
        "intervals": [
            {"a": i.lower, "b": i.upper, "w": i.weight, "density": i.density}
            for i in spec.intervals
        ],
        "bound": spec.bound,
    }


def load_spec(source: Union[str, IO[str]]) -> MeasureSpec:
    """Read a measure spec from a path, ``"-"`` (stdin) or an open stream."""
    from ._io import read_json

    return spec_from_dict(read_json(source))


def dump_spec(spec: MeasureSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2)
