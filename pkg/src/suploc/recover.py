"""Support localisation from the zeros of orthogonal polynomials.

Roots of ``P_N`` that have an ``epsilon``-close neighbour form bulks which
approximate the continuous part of the support; isolated roots are atom
candidates. Which candidates survive depends on the regime:

* ``single``: one interval spanning all clustered roots, isolated roots
  outside it are atoms.
* ``outside``: bulks split at gaps ``>= epsilon``; isolated roots inside the
  hull of the bulks are pollution, those outside are atoms.
* ``general``: two-root clusters report their midpoint as an atom, and an
  isolated root is kept only if ``P_{N+1}`` has a root within
  ``rho = eps^2 / (eps + sqrt(2) a_inf)`` of it.

Finitely atomic inputs are caught first by a rank test and answered with the
eigenvalues of the Jacobi matrix of the rank.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import InputError, NonPSD
from .measure import MeasureSpec, QuadratureOracle, Regime
from .momentio import DEFAULT_TAU, MomentData, MomentOracle, flatness_at, psd_check, project_psd
from .orthopoly import Recurrence, jacobi, stieltjes
from .spectra import RootList, eigenvalues

LOW_DEGREE = "LowDegree"
REGIME_MISMATCH = "RegimeMismatch"
INDEFINITE = "Indefinite"
DEGREE_CAPPED = "DegreeCapped"


@dataclass(frozen=True)
class ClassifiedRoots:
    isolated: tuple[float, ...]
    clustered: tuple[float, ...]
    pairs: tuple[tuple[float, float], ...]

    @property
    def paired(self) -> set[float]:
        return {x for p in self.pairs for x in p}


def _chains(points: Sequence[float], epsilon: float) -> list[list[float]]:
    """Split sorted points wherever consecutive ones are ``>= epsilon`` apart."""
    out: list[list[float]] = []
    for x in points:
        if out and x - out[-1][-1] < epsilon:
            out[-1].append(x)
        else:
            out.append([x])
    return out


def classify(roots: Union[RootList, Sequence[float]], epsilon: float) -> ClassifiedRoots:
    """Split roots into isolated and clustered ones (strict ``< epsilon``).

    ``pairs`` lists the clusters made of exactly two roots, i.e. roots whose
    only close neighbour has no other close neighbour.
    """
    if not epsilon > 0:
        raise InputError(f"epsilon must be positive, got {epsilon}")
    xs = [float(x) for x in roots]
    if any(b < a for a, b in zip(xs, xs[1:])):
        raise InputError("roots must be sorted")
    chains = _chains(xs, epsilon)
    isolated = tuple(c[0] for c in chains if len(c) == 1)
    clustered = tuple(x for c in chains if len(c) > 1 for x in c)
    pairs = tuple((c[0], c[1]) for c in chains if len(c) == 2)
    return ClassifiedRoots(isolated, clustered, pairs)


def bulks_to_intervals(clustered: Sequence[float], epsilon: float) -> list[tuple[float, float]]:
    """Greedy split of sorted clustered roots at gaps ``>= epsilon``; each bulk
    is reported by its extreme roots."""
    return [(c[0], c[-1]) for c in _chains(sorted(clustered), epsilon)]


def rho_threshold(epsilon: float, a_inf: float) -> float:
    """Matching radius for consecutive-degree roots: ``eps^2 / (eps + sqrt(2) a_inf)``."""
    if not epsilon > 0:
        raise InputError(f"epsilon must be positive, got {epsilon}")
    if a_inf < 0:
        raise InputError(f"a_inf must be non-negative, got {a_inf}")
    return epsilon * epsilon / (epsilon + math.sqrt(2.0) * a_inf)


@dataclass(frozen=True)
class SupportEstimate:
    """Recovered support. ``absorbed`` holds isolated roots lying inside a
    reported interval (neither atoms nor pollution); ``consistent`` compares
    with the estimate two degrees higher (``None`` if that was not possible)."""

    epsilon: float
    regime: Regime
    degree: int
    atoms: tuple[float, ...] = ()
    intervals: tuple[tuple[float, float], ...] = ()
    pollution: tuple[float, ...] = ()
    absorbed: tuple[float, ...] = ()
    warnings: tuple[str, ...] = ()
    consistent: Optional[bool] = None
    flat_degree: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "regime": self.regime.value,
            "degree": self.degree,
            "atoms": list(self.atoms),
            "intervals": [list(iv) for iv in self.intervals],
            "pollution": list(self.pollution),
            "absorbed": list(self.absorbed),
            "warnings": list(self.warnings),
            "consistent": self.consistent,
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def agrees_with(self, other: "SupportEstimate") -> bool:
        """Same numbers of atoms and intervals, matched within ``epsilon``."""
        if len(self.atoms) != len(other.atoms) or len(self.intervals) != len(other.intervals):
            return False
        eps = self.epsilon
        atoms_ok = all(abs(a - b) < eps for a, b in zip(self.atoms, other.atoms))
        ivs_ok = all(
            abs(a[0] - b[0]) < eps and abs(a[1] - b[1]) < eps
            for a, b in zip(self.intervals, other.intervals)
        )
        return atoms_ok and ivs_ok


def _inside(x: float, intervals) -> bool:
    return any(lo <= x <= hi for lo, hi in intervals)


def _gap_evidence(roots: Sequence[float], bulks) -> bool:
    """True if two consecutive bulks have at most one root between them,
    i.e. the roots see a gap in the support rather than a sparse interior."""
    xs = np.asarray(roots)
    for (_, u0), (l1, _) in zip(bulks, bulks[1:]):
        if np.count_nonzero((xs > u0) & (xs < l1)) <= 1:
            return True
    return False


def analyze_roots(
    roots: Sequence[float],
    epsilon: float,
    regime: Regime,
    next_roots: Optional[Sequence[float]] = None,
    a_inf: float = 0.0,
) -> tuple[Regime, list[float], list[tuple[float, float]], list[float], list[float], list[str]]:
    """Classify the roots of ``P_N`` under ``regime``.

    Returns ``(regime, atoms, intervals, pollution, absorbed, warnings)``;
    the regime may come back downgraded. ``next_roots`` (the roots of
    ``P_{N+1}``) are needed for the general regime.
    """
    regime = Regime(regime)
    cls = classify(roots, epsilon)
    warnings: list[str] = []
    if not cls.clustered:
        warnings.append(LOW_DEGREE)
    bulks = bulks_to_intervals(cls.clustered, epsilon)

    if regime is Regime.SINGLE and _gap_evidence(roots, bulks):
        warnings.append(REGIME_MISMATCH)
        regime = Regime.OUTSIDE

    atoms: list[float] = []
    pollution: list[float] = []
    absorbed: list[float] = []

    if regime is Regime.SINGLE:
        intervals = [(bulks[0][0], bulks[-1][1])] if bulks else []
        for x in cls.isolated:
            (absorbed if _inside(x, intervals) else atoms).append(x)
    elif regime is Regime.OUTSIDE:
        intervals = bulks
        lo = bulks[0][0] if bulks else math.inf
        hi = bulks[-1][1] if bulks else -math.inf
        for x in cls.isolated:
            if _inside(x, intervals):
                absorbed.append(x)
            elif lo < x < hi:
                pollution.append(x)
            else:
                atoms.append(x)
    elif regime is Regime.GENERAL:
        if next_roots is None:
            raise InputError("the general regime needs the roots of P_{N+1}")
        intervals = [
            (c[0], c[-1]) for c in _chains(cls.clustered, epsilon) if len(c) >= 3
        ]
        atoms.extend(0.5 * (p + q) for p, q in cls.pairs)
        rho = rho_threshold(epsilon, a_inf)
        nxt = np.asarray(next_roots, dtype=float)
        for x in cls.isolated:
            if _inside(x, intervals):
                absorbed.append(x)
            elif nxt.size and float(np.min(np.abs(nxt - x))) < rho:
                atoms.append(x)
            else:
                pollution.append(x)
        atoms.sort()
    else:
        raise InputError(f"regime {regime.value!r} is not a root-classification regime")
    return regime, atoms, intervals, pollution, absorbed, warnings


def _spacing_gap(roots: Sequence[float], clustered: Sequence[float]) -> bool:
    """True if some spacing inside the hull of the clustered roots exceeds
    twice the widest spacing a single uniform interval spanning that hull
    would produce (about ``pi * L / (2 N)`` at its centre)."""
    if len(clustered) < 2:
        return False
    lo, hi = clustered[0], clustered[-1]
    xs = np.asarray([x for x in roots if lo <= x <= hi])
    if xs.size < 2:
        return False
    return float(np.max(np.diff(xs))) > math.pi * (hi - lo) / len(roots)


def _auto_regime(roots: Sequence[float], epsilon: float) -> Regime:
    """Single interval unless the roots show a gap in the support; the
    atoms-outside assumption cannot be checked from roots, so a gap sends
    the estimate to the general regime."""
    cls = classify(roots, epsilon)
    bulks = bulks_to_intervals(cls.clustered, epsilon)
    if _gap_evidence(roots, bulks) or _spacing_gap(roots, cls.clustered):
        return Regime.GENERAL
    return Regime.SINGLE


def _roots(rec: Recurrence, n: int) -> RootList:
    return eigenvalues(jacobi(rec.truncate(n)))


def _flat_estimate(rec: Recurrence, rank: int, epsilon: float, degree: int) -> SupportEstimate:
    atoms = _roots(rec, rank).roots if rank > 0 else ()
    return SupportEstimate(
        epsilon, Regime.FLAT, degree, atoms=tuple(atoms), flat_degree=max(1, rank - 1)
    )


def _estimate_from(rec: Recurrence, n: int, epsilon: float, regime, available: int) -> SupportEstimate:
    """Estimate at degree ``n`` from a recurrence of degree ``available``."""
    roots = _roots(rec, n)
    if regime == "auto":
        regime = _auto_regime(roots.roots, epsilon)
    regime = Regime(regime)
    next_roots = None
    if regime is Regime.GENERAL:
        next_roots = _roots(rec, n + 1).roots
    a_inf = rec.truncate(min(n + 1, available)).a_inf
    used, atoms, intervals, pollution, absorbed, warnings = analyze_roots(
        roots.roots, epsilon, regime, next_roots, a_inf
    )
    return SupportEstimate(
        epsilon,
        used,
        n,
        tuple(atoms),
        tuple(intervals),
        tuple(pollution),
        tuple(absorbed),
        tuple(warnings),
    )


def suploc(
    source: Union[MeasureSpec, MomentData],
    epsilon: float,
    degree: int,
    regime: Union[Regime, str] = "auto",
    tau: float = DEFAULT_TAU,
    check_consistency: bool = True,
) -> SupportEstimate:
    """Estimate the support of a measure from its first ``2 * degree`` moments.

    ``source`` is either a :class:`MeasureSpec` (integrated by Gauss-Legendre
    quadrature, stable at any degree) or :class:`MomentData` (integrated
    through the Hankel matrix; ``degree`` is capped by the data). ``regime`` is
    one of ``single``, ``outside``, ``general``, ``flat`` or ``auto``. The
    rank test always runs first; ``flat`` only means no root classification
    is attempted when the test fails (the degree-``N`` roots are reported as
    atoms then).
    """
    if not epsilon > 0:
        raise InputError(f"epsilon must be positive, got {epsilon}")
    if degree < 1:
        raise InputError(f"degree must be at least 1, got {degree}")
    if regime != "auto":
        regime = Regime(regime)
    extra = 1 if regime in ("auto", Regime.GENERAL) else 0
    want = degree + extra + (2 if check_consistency else 0)
    warnings: list[str] = []

    if isinstance(source, MeasureSpec):
        steps = max(want, degree + 2)
        oracle = QuadratureOracle.from_spec(source, 2 * steps + 1)
        rec = stieltjes(oracle, steps, rank_tol=tau)
        if rec.rank is not None and rec.rank - 1 <= degree:
            return _flat_estimate(rec, rec.rank, epsilon, degree)
        if rec.rank is not None:
            # fewer atoms than polynomials requested, but more than N+1
            degree = min(degree, rec.rank)
        available = rec.degree
    elif isinstance(source, MomentData):
        data = source
        psd = psd_check(data, tau)
        if not psd.ok:
            raise NonPSD(psd.min_eig, psd.threshold)
        matrix = data.matrix
        if psd.indefinite:
            warnings.append(INDEFINITE)
            matrix = project_psd(matrix)
        for n in range(1, min(degree, data.degree - 1) + 1):
            report = flatness_at(data, n, tau)
            if report.flat:
                r = report.rank_n
                rec = stieltjes(MomentOracle.from_data(data, r), r) if r > 0 else None
                est = _flat_estimate(rec, r, epsilon, degree)
                return SupportEstimate(
                    est.epsilon, est.regime, est.degree, est.atoms, flat_degree=n
                )
        available = min(want, data.degree)
        cap = data.degree - extra
        if degree > cap:
            warnings.append(DEGREE_CAPPED)
            degree = max(cap, 1)
        rec = stieltjes(MomentOracle(matrix), available)
    else:
        raise InputError(f"cannot recover from {type(source).__name__}")

    if regime is Regime.FLAT:
        roots = _roots(rec, degree).roots
        return SupportEstimate(
            epsilon, Regime.FLAT, degree, tuple(roots), warnings=tuple(warnings + [REGIME_MISMATCH])
        )

    est = _estimate_from(rec, degree, epsilon, regime, rec.degree)
    consistent = None
    n2 = degree + 2
    if check_consistency and n2 + (1 if est.regime is Regime.GENERAL else 0) <= rec.degree:
        other = _estimate_from(rec, n2, epsilon, est.regime, rec.degree)
        consistent = est.agrees_with(other)
    return SupportEstimate(
        est.epsilon,
        est.regime,
        est.degree,
        est.atoms,
        est.intervals,
        est.pollution,
        est.absorbed,
        tuple(warnings) + est.warnings,
        consistent,
    )


def suploc_adaptive(
    source: Union[MeasureSpec, MomentData],
    epsilon: float,
    max_degree: int,
    regime: Union[Regime, str] = "auto",
    min_degree: int = 10,
    step: int = 2,
    tau: float = DEFAULT_TAU,
) -> SupportEstimate:
    """Raise ``N`` from ``min_degree`` until the estimate reports at least one
    interval and is stable two degrees higher; falls back to the estimate at
    ``max_degree``."""
    est = None
    for n in range(min_degree, max_degree + 1, step):
        est = suploc(source, epsilon, n, regime, tau)
        if est.regime is Regime.FLAT:
            return est
        if est.consistent and est.intervals:
            return est
    if est is None or est.degree != max_degree:
        est = suploc(source, epsilon, max_degree, regime, tau)
    return est
