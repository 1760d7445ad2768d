"""Parameter sweeps over the one- and two-interval test families.

A cell ``(a, c, r)`` places the continuous part on ``[c - r, c + r]`` (split
into ``[c - r, c - r/3]`` and ``[c + r/3, c + r]`` for two intervals) and a
single atom at ``a + c + r``, so ``a`` is the distance from the atom to the
continuous support.
"""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._io import read_json
from .errors import InputError, NumericalError, ParseError, SpecError
from .measure import AtomPart, IntervalPart, MeasureSpec, Regime, moments
from .metrics import SupportSet, atom_success, hausdorff, interval_iou
from .momentio import DEFAULT_TAU, MomentData
from .recover import REGIME_MISMATCH, suploc

SCENARIOS = ("one_interval", "two_intervals")
DEFAULT_C_GRID = (-0.3, 0.0, 0.3)
DEFAULT_ATOM_WEIGHT = 0.1

CSV_COLUMNS = (
    "a",
    "c",
    "r",
    "N",
    "epsilon",
    "regime",
    "atom_success",
    "n_false_atoms",
    "iou",
    "hausdorff",
    "n_pollution",
    "warnings",
)


@dataclass(frozen=True)
class SweepConfig:
    a: tuple[float, ...]
    r: tuple[float, ...]
    degrees: tuple[int, ...]
    c: tuple[float, ...] = DEFAULT_C_GRID
    epsilon: float = 1e-2
    scenario: str = "one_interval"
    regime: Optional[str] = None
    seed: int = 0
    noise_sigma: float = 0.0
    atom_weight: float = DEFAULT_ATOM_WEIGHT
    tau: float = DEFAULT_TAU

    def __post_init__(self):
        for name in ("a", "c", "r", "degrees"):
            if not getattr(self, name):
                raise ParseError(f"sweep grid {name!r} must be nonempty")
        if self.scenario not in SCENARIOS:
            raise ParseError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if not self.epsilon > 0:
            raise ParseError("epsilon must be positive")
        if not self.noise_sigma >= 0:
            raise ParseError("noise_sigma must be non-negative")
        if not 0 < self.atom_weight < 1:
            raise ParseError("atom_weight must lie in (0, 1)")
        if any(int(n) != n or n < 1 for n in self.degrees):
            raise ParseError("degrees must be positive integers")
        if self.regime is None:
            default = "single" if self.scenario == "one_interval" else "outside"
            object.__setattr__(self, "regime", default)
        if self.regime != "auto" and self.regime not in {m.value for m in Regime}:
            raise ParseError(f"unknown regime {self.regime!r}")


_CONFIG_KEYS = {
    "a", "c", "r", "degrees", "epsilon", "scenario", "regime",
    "seed", "noise_sigma", "atom_weight", "tau",
}


def config_from_dict(data: dict) -> SweepConfig:
    if not isinstance(data, dict):
        raise ParseError("sweep config must be a JSON object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ParseError(f"unknown sweep field(s) {sorted(unknown)}")
    missing = {"a", "r", "degrees"} - set(data)
    if missing:
        raise ParseError(f"missing sweep field(s) {sorted(missing)}")
    kw = dict(data)
    try:
        for name in ("a", "c", "r"):
            if name in kw:
                kw[name] = tuple(float(v) for v in kw[name])
        kw["degrees"] = tuple(int(v) for v in kw["degrees"])
        for name in ("epsilon", "noise_sigma", "atom_weight", "tau"):
            if name in kw:
                kw[name] = float(kw[name])
        if "seed" in kw:
            kw["seed"] = int(kw["seed"])
        return SweepConfig(**kw)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise ParseError(f"bad sweep config: {exc}") from exc


def load_config(source) -> SweepConfig:
    return config_from_dict(read_json(source))


def cell_spec(scenario: str, a: float, c: float, r: float, atom_weight: float = DEFAULT_ATOM_WEIGHT) -> MeasureSpec:
    """Ground-truth measure of one sweep cell."""
    rest = 1.0 - atom_weight
    atom = (AtomPart(a + c + r, atom_weight),)
    if scenario == "one_interval":
        return MeasureSpec(atom, (IntervalPart(c - r, c + r, rest),))
    if scenario == "two_intervals":
        return MeasureSpec(
            atom,
            (IntervalPart(c - r, c - r / 3, rest / 2), IntervalPart(c + r / 3, c + r, rest / 2)),
        )
    raise SpecError(f"unknown scenario {scenario!r}")


def noisy_moments(spec: MeasureSpec, degree: int, sigma: float, rng: np.random.Generator) -> MomentData:
    """Moments up to ``2 * degree`` with each ``y_k`` (k >= 1) shifted by
    independent uniform noise on ``[-sigma, sigma]``."""
    y = moments(spec, 2 * degree)
    if sigma > 0:
        y = y.copy()
        y[1:] += rng.uniform(-sigma, sigma, size=y.size - 1)
    return MomentData(tuple(y))


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return "nan" if math.isnan(x) else repr(x)
    return str(x)


def run_cell(cfg: SweepConfig, a: float, c: float, r: float, n: int, rng: np.random.Generator) -> dict:
    row = {"a": a, "c": c, "r": r, "N": n, "epsilon": cfg.epsilon, "regime": cfg.regime}
    try:
        spec = cell_spec(cfg.scenario, a, c, r, cfg.atom_weight)
    except SpecError:
        # degenerate geometry (e.g. r -> 0): report, do not crash
        row.update(
            atom_success=False, n_false_atoms=0, iou=math.nan, hausdorff=math.nan,
            n_pollution=0, warnings=REGIME_MISMATCH,
        )
        return row
    source = spec if cfg.noise_sigma == 0 else noisy_moments(spec, n + 3, cfg.noise_sigma, rng)
    try:
        est = suploc(source, cfg.epsilon, n, cfg.regime, cfg.tau)
    except (NumericalError, InputError) as exc:
        row.update(
            atom_success=False, n_false_atoms=0, iou=math.nan, hausdorff=math.nan,
            n_pollution=0, warnings=type(exc).__name__,
        )
        return row
    truth = SupportSet.from_spec(spec)
    found = SupportSet.from_estimate(est)
    match = atom_success([a + c + r], est.atoms, cfg.epsilon)
    row.update(
        regime=est.regime.value,
        atom_success=match.overall,
        n_false_atoms=len(match.false_positives),
        iou=interval_iou(truth.intervals, found.intervals),
        hausdorff=hausdorff(truth, found) if not found.is_empty() else math.inf,
        n_pollution=len(est.pollution),
        warnings=";".join(est.warnings),
    )
    return row


def run_sweep(cfg: SweepConfig) -> list[dict]:
    """All cells in ``a, c, r, N`` order; deterministic given ``cfg.seed``."""
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for a in cfg.a:
        for c in cfg.c:
            for r in cfg.r:
                for n in cfg.degrees:
                    rows.append(run_cell(cfg, a, c, r, n, rng))
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([_fmt(row[k]) for k in CSV_COLUMNS])
    return buf.getvalue()


def read_csv(source) -> list[dict]:
    if hasattr(source, "read"):
        text = source.read()
    else:
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read {source}: {exc}") from exc
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ParseError(f"unexpected CSV header {reader.fieldnames}")
    rows = []
    for rec in reader:
        rows.append(
            {
                "a": float(rec["a"]),
                "c": float(rec["c"]),
                "r": float(rec["r"]),
                "N": int(rec["N"]),
                "atom_success": rec["atom_success"] == "true",
                "iou": float(rec["iou"]),
            }
        )
    return rows


@dataclass
class CellSummary:
    a: float
    r: float
    success_rate: dict = field(default_factory=dict)
    mean_iou: dict = field(default_factory=dict)

    def min_degree(self, table: dict, threshold: float) -> Optional[int]:
        ok = [n for n, v in sorted(table.items()) if v >= threshold]
        return ok[0] if ok else None


def summarize(rows: list[dict]) -> list[CellSummary]:
    """Average atom success and IoU over ``c`` for every ``(a, r, N)``."""
    groups: dict = defaultdict(lambda: defaultdict(list))
    for row in rows:
        groups[(row["a"], row["r"])][row["N"]].append(row)
    out = []
    for (a, r), by_n in sorted(groups.items()):
        s = CellSummary(a, r)
        for n, cells in sorted(by_n.items()):
            s.success_rate[n] = float(np.mean([c["atom_success"] for c in cells]))
            ious = [c["iou"] for c in cells if not math.isnan(c["iou"])]
            s.mean_iou[n] = float(np.mean(ious)) if ious else math.nan
        out.append(s)
    return out


def report_csv(rows: list[dict], threshold: float = 0.8) -> str:
    """Per ``(a, r)``: smallest ``N`` with success rate ``>= threshold`` and
    smallest ``N`` with mean IoU ``>= threshold`` (empty if never reached),
    plus both averages at the largest ``N``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("a", "r", "min_N_atom", "min_N_iou", "N_max", "success_rate", "mean_iou"))
    for s in summarize(rows):
        n_max = max(s.success_rate)
        n_atom = s.min_degree(s.success_rate, threshold)
        n_iou = s.min_degree(s.mean_iou, threshold)
        w.writerow(
            (
                _fmt(s.a),
                _fmt(s.r),
                "" if n_atom is None else n_atom,
                "" if n_iou is None else n_iou,
                n_max,
                _fmt(s.success_rate[n_max]),
                _fmt(s.mean_iou[n_max]),
            )
        )
    return buf.getvalue()
