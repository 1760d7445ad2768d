"""Mixed measures shared by several test modules."""

from suploc.measure import AtomPart, IntervalPart, MeasureSpec


def _m(atoms=(), intervals=()):
    return MeasureSpec(
        tuple(AtomPart(x, w) for x, w in atoms),
        tuple(IntervalPart(a, b, w) for a, b, w in intervals),
    )


CORPUS = {
    "interval_atom_right": _m([(1.5, 0.05)], [(-1, 1, 0.95)]),
    "two_intervals_atom_gap": _m([(0.0, 0.1)], [(-1, -1 / 3, 0.45), (1 / 3, 1, 0.45)]),
    "interval_atoms_both_sides": _m([(1.0, 0.1), (-1.6, 0.1)], [(-1, 0.5, 0.8)]),
    "centred_interval_two_atoms": _m([(-1.0, 0.15), (1.0, 0.15)], [(-0.5, 0.5, 0.7)]),
    "shifted_one_interval_cell": _m([(1.8, 0.1)], [(-0.7, 1.3, 0.9)]),
    "two_interval_cell": _m([(2.0, 0.1)], [(-1, -1 / 3, 0.45), (1 / 3, 1, 0.45)]),
    "unit_interval_atom_left": _m([(-0.5, 0.4)], [(0, 1, 0.6)]),
    "three_intervals_atom": _m([(1.3, 0.1)], [(-1, -0.6, 0.3), (-0.2, 0.2, 0.3), (0.6, 1, 0.3)]),
    "atom_between_intervals": _m([(0.4, 0.2)], [(-1.2, -0.2, 0.5), (0.8, 1.4, 0.3)]),
    "symmetric_atoms_outside": _m([(-1.25, 0.05), (1.25, 0.05)], [(-1, 1, 0.9)]),
}
