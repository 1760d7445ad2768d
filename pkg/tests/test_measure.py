import io
import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from suploc.errors import DegreeBudgetExceeded, ParseError, SpecError
from suploc.measure import (
    AtomPart,
    IntervalPart,
    MeasureSpec,
    QuadratureOracle,
    Regime,
    dump_spec,
    gauss_legendre,
    inner_product,
    load_spec,
    moments,
    separation_distance,
    spec_from_dict,
)


def exact_moments(atoms, intervals, k_max):
    """Rational-arithmetic oracle for the moments of a normalised measure."""
    atoms = [(Fraction(x), Fraction(w)) for x, w in atoms]
    intervals = [(Fraction(a), Fraction(b), Fraction(w)) for a, b, w in intervals]
    total = sum(w for _, w in atoms) + sum(w for *_, w in intervals)
    out = []
    for k in range(k_max + 1):
        y = sum(w * x**k for x, w in atoms)
        y += sum(w * (b ** (k + 1) - a ** (k + 1)) / ((k + 1) * (b - a)) for a, b, w in intervals)
        out.append(y / total)
    return out


def test_uniform_and_delta_examples():
    uniform = MeasureSpec((), (IntervalPart(-1, 1, 1.0),))
    assert moments(uniform, 2).tolist() == pytest.approx([1, 0, 1 / 3], abs=1e-16)
    delta = MeasureSpec((AtomPart(0.5, 1.0),))
    assert moments(delta, 2).tolist() == [1.0, 0.5, 0.25]
    pair = MeasureSpec((AtomPart(-1, 0.5), AtomPart(1, 0.5)))
    assert moments(pair, 4).tolist() == [1, 0, 1, 0, 1]


@pytest.mark.parametrize(
    "atoms, intervals",
    [
        ([(1.5, 0.05)], [(-1, 1, 0.95)]),
        ([(0.0, 0.1)], [(-1, -0.25, 0.45), (0.25, 1, 0.45)]),
        ([(-0.5, 0.4)], [(0.125, 1.5, 0.6)]),
        ([], [(-2.0, -0.5, 1.0)]),
    ],
)
def test_moments_match_rational_oracle(atoms, intervals):
    spec = MeasureSpec(
        tuple(AtomPart(x, w) for x, w in atoms), tuple(IntervalPart(a, b, w) for a, b, w in intervals)
    )
    got = moments(spec, 30)
    want = exact_moments(atoms, intervals, 30)
    for g, w in zip(got, want):
        assert abs(g - float(w)) <= 1e-14 * max(1.0, abs(float(w)))


def test_normalisation_records_mass():
    spec = MeasureSpec((AtomPart(0.0, 2.0),), (IntervalPart(1, 2, 6.0),))
    assert spec.mass == 8.0
    assert spec.atoms[0].weight == 0.25 and spec.intervals[0].weight == 0.75
    assert spec.intervals[0].level == 0.75


@pytest.mark.parametrize(
    "build",
    [
        lambda: MeasureSpec(),
        lambda: MeasureSpec((AtomPart(0.0, -1.0),)),
        lambda: MeasureSpec((), (IntervalPart(1.0, 1.0, 1.0),)),
        lambda: MeasureSpec((), (IntervalPart(0, 1, 1.0), IntervalPart(1, 2, 1.0))),
        lambda: MeasureSpec((AtomPart(0.5, 1.0),), (IntervalPart(0, 1, 1.0),)),
        lambda: MeasureSpec((AtomPart(3.0, 1.0),), bound=2.0),
        lambda: MeasureSpec((), (IntervalPart(0, 1, 1.0, "beta"),)),
        lambda: MeasureSpec((AtomPart(math.nan, 1.0),)),
    ],
)
def test_invalid_specs(build):
    with pytest.raises(SpecError):
        build()


def test_regime_and_geometry():
    one = MeasureSpec((AtomPart(1.5, 0.1),), (IntervalPart(-1, 1, 0.9),))
    outside = MeasureSpec((AtomPart(2.0, 0.1),), (IntervalPart(-1, -0.3, 0.4), IntervalPart(0.3, 1, 0.5)))
    general = MeasureSpec((AtomPart(0.0, 0.1),), (IntervalPart(-1, -0.3, 0.4), IntervalPart(0.3, 1, 0.5)))
    flat = MeasureSpec((AtomPart(0.0, 1.0),))
    assert [s.regime for s in (flat, one, outside, general)] == [
        Regime.FLAT,
        Regime.SINGLE,
        Regime.OUTSIDE,
        Regime.GENERAL,
    ]
    assert separation_distance(one) == pytest.approx(0.5)
    assert separation_distance(general) == pytest.approx(0.3)
    assert separation_distance(flat) == math.inf
    assert one.hull == (-1, 1.5) and one.bound == 1.5
    assert one.density_floor == pytest.approx(0.45)


@pytest.mark.parametrize("m", [1, 2, 3, 10, 33, 80])
def test_gauss_legendre_matches_numpy(m):
    x, w = gauss_legendre(m)
    x_ref, w_ref = np.polynomial.legendre.leggauss(m)
    assert np.max(np.abs(x - x_ref)) < 1e-14
    assert np.max(np.abs(w - w_ref / 2)) < 1e-14
    assert math.fsum(w) == pytest.approx(1.0, abs=1e-15)


def test_quadrature_oracle_is_exact_to_its_degree():
    spec = MeasureSpec((AtomPart(1.5, 0.05),), (IntervalPart(-1, 1, 0.95),))
    deg = 21
    oracle = QuadratureOracle.from_spec(spec, deg)
    y = moments(spec, deg)
    for k in range(deg + 1):
        assert oracle.inner(oracle.nodes**k, oracle.one()) == pytest.approx(y[k], abs=1e-14)


def test_inner_product_backends_agree():
    spec = MeasureSpec((AtomPart(0.3, 0.2),), (IntervalPart(-1, 0, 0.8),))
    p, q = [1.0, -2.0, 0.5], [0.0, 1.0, 0.0, 1.0]
    a = inner_product(spec, p, q, "analytic")
    b = inner_product(spec, p, q, "quadrature")
    assert a == pytest.approx(b, rel=1e-13)
    assert inner_product(spec, [0.0], q) == 0.0
    with pytest.raises(DegreeBudgetExceeded):
        inner_product(spec, [0] * 600 + [1], [0] * 600 + [1])
    with pytest.raises(ValueError):
        inner_product(spec, p, q, "magic")


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.floats(-2, 2), min_size=1, max_size=4),
    st.lists(st.floats(-2, 2), min_size=1, max_size=4),
)
def test_property_inner_product_symmetric_and_positive(p, q):
    spec = MeasureSpec((AtomPart(1.3, 0.3),), (IntervalPart(-1, 0.5, 0.7),))
    assert inner_product(spec, p, q) == pytest.approx(inner_product(spec, q, p), abs=1e-12)
    assert inner_product(spec, p, p, "quadrature") >= -1e-14


def test_json_round_trip_and_errors():
    spec = MeasureSpec((AtomPart(1.5, 1.0),), (IntervalPart(-1, 1, 19.0),))
    again = load_spec(io.StringIO(dump_spec(spec)))
    assert again.atoms == spec.atoms and again.intervals == spec.intervals
    with pytest.raises(ParseError):
        spec_from_dict({"atoms": [], "weird": 1})
    with pytest.raises(ParseError):
        spec_from_dict({"atoms": [{"x": 1.0}]})
    with pytest.raises(ParseError):
        spec_from_dict({"atoms": [{"x": "a", "w": 1}]})
    with pytest.raises(ParseError):
        load_spec(io.StringIO("{not json"))
    data = json.loads(dump_spec(spec))
    assert data["intervals"][0]["density"] == "uniform"
