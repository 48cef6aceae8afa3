"""Grid evaluation of all measures over the model family and desiderata checks.

Every measure is evaluated on the *expected* contingency table of each model.
The desiderata say that a measure (oriented so higher is better) should

* rise as ``useful_clusters`` approaches ``num_classes`` from below and fall
  once it is at or above it (P1.1 / P1.2),
* fall as noise clusters are added (P2),
* fall as ``eps1`` or ``eps2`` grows (P3.1 / P3.2).

A violation is tallied once per monotone sequence of the varied parameter
(all other parameters fixed); individual failing steps are kept as well.
"""

from __future__ import annotations

import itertools
import json
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import stats

from .classic_measures import MEASURES, MeasureVector, all_measures
from .errors import InvalidParameterError
from .model_family import ModelParams, build_joint, validate
from .tables import expected_pair_counts, expected_table, pair_counts_from_table

# differences within this band count as zero and fail a strict test
STRICT_TOL = 1e-12

PAIR_CONVENTIONS = ("expected", "plugin")
PARAM_NAMES = ("useful_clusters", "noise_clusters", "eps1", "eps2")

DEFAULT_USEFUL = tuple(range(2, 12))
DEFAULT_NOISE = tuple(range(0, 7))
DEFAULT_EPS1 = tuple(float(Fraction(i, 15)) for i in range(4))
DEFAULT_EPS2 = (0.0, 0.1, 0.2, 0.3)
DEFAULT_SWEEP = tuple(float(Fraction(i, 20)) for i in range(17))


def parse_number(value) -> float:
    """Accept floats, ints and rational strings such as ``"1/15"``."""
    if isinstance(value, str):
        return float(Fraction(value.strip()))
    return float(value)


@dataclass(frozen=True)
class GridSpec:
    num_classes: int = 5
    n: int = 500
    useful: tuple[int, ...] = DEFAULT_USEFUL
    noise: tuple[int, ...] = DEFAULT_NOISE
    eps1: tuple[float, ...] = DEFAULT_EPS1
    eps2: tuple[float, ...] = DEFAULT_EPS2

    def problems(self) -> list[str]:
        out = []
        if self.num_classes < 1:
            out.append("num_classes must be >= 1")
        if self.n < 2:
            out.append("n must be >= 2")
        for name in ("useful", "noise", "eps1", "eps2"):
            values = getattr(self, name)
            if not values:
                out.append(f"{name} list is empty")
            elif any(b <= a for a, b in zip(values, values[1:])):
                out.append(f"{name} values must be strictly ascending")
        if self.useful and self.useful[0] < 1:
            out.append("useful cluster counts must be >= 1")
        if self.noise and self.noise[0] < 0:
            out.append("noise cluster counts must be >= 0")
        for name in ("eps1", "eps2"):
            values = getattr(self, name)
            if values and not (values[0] >= 0 and values[-1] < 1):
                out.append(f"{name} values must lie in [0, 1)")
        return out

    def check(self) -> None:
        problems = self.problems()
        if problems:
            raise InvalidParameterError(problems)

    @classmethod
    def from_dict(cls, data: dict) -> GridSpec:
        known = {"num_classes", "n", "useful", "noise", "eps1", "eps2"}
        unknown = set(data) - known
        if unknown:
            raise InvalidParameterError([f"unknown grid-spec keys: {sorted(unknown)}"])
        kwargs = {}
        for key in ("num_classes", "n"):
            if key in data:
                kwargs[key] = int(data[key])
        for key in ("useful", "noise"):
            if key in data:
                kwargs[key] = tuple(int(v) for v in data[key])
        for key in ("eps1", "eps2"):
            if key in data:
                kwargs[key] = tuple(parse_number(v) for v in data[key])
        spec = cls(**kwargs)
        spec.check()
        return spec

    def to_dict(self) -> dict:
        return {
            "num_classes": self.num_classes,
            "n": self.n,
            "useful": list(self.useful),
            "noise": list(self.noise),
            "eps1": list(self.eps1),
            "eps2": list(self.eps2),
        }


def enumerate_valid(spec: GridSpec) -> list[ModelParams]:
    """Valid models of the grid in lexicographic (useful, noise, eps1, eps2) order."""
    spec.check()
    combos = (
        ModelParams(spec.num_classes, ku, kn, e1, e2)
        for ku, kn, e1, e2 in itertools.product(spec.useful, spec.noise, spec.eps1, spec.eps2)
    )
    return [p for p in combos if not validate(p)]


def evaluate_model(params: ModelParams, n: int, pair_convention: str = "expected") -> MeasureVector:
    """All measures for the expected table of one model.

    ``pair_convention="expected"`` uses the expectation of the pair table
    under i.i.d. sampling; ``"plugin"`` derives pair counts from the
    (fractional) expected contingency table.
    """
    joint = build_joint(params)
    table = expected_table(joint, n)
    if pair_convention == "expected":
        pairs = expected_pair_counts(joint, n)
    elif pair_convention == "plugin":
        pairs = pair_counts_from_table(table)
    else:
        raise ValueError(f"unknown pair convention {pair_convention!r}; use one of {PAIR_CONVENTIONS}")
    return all_measures(table, pairs)


def _evaluate_args(args):
    return evaluate_model(*args)


@dataclass(frozen=True)
class GridRow:
    params: ModelParams
    measures: MeasureVector

    @property
    def key(self) -> tuple:
        p = self.params
        return (p.useful_clusters, p.noise_clusters, p.eps1, p.eps2)


@dataclass(frozen=True)
class GridResult:
    spec: GridSpec
    rows: tuple[GridRow, ...]
    pair_convention: str = "expected"
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {row.key: row for row in self.rows})

    def __len__(self) -> int:
        return len(self.rows)

    def get(self, useful, noise, eps1, eps2) -> GridRow | None:
        return self._index.get((useful, noise, eps1, eps2))

    def values(self, measure: str) -> np.ndarray:
        return np.array([row.measures[measure] for row in self.rows])


def evaluate_grid(spec: GridSpec | None = None, pair_convention: str = "expected", workers: int | None = None) -> GridResult:
    """Evaluate every valid model of ``spec``.

    With ``workers > 1`` models are evaluated in a process pool; results are
    always returned in enumeration order, so output does not depend on it.
    """
    spec = spec or GridSpec()
    combos = enumerate_valid(spec)
    jobs = [(p, spec.n, pair_convention) for p in combos]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            measures = list(pool.map(_evaluate_args, jobs, chunksize=32))
    else:
        measures = [_evaluate_args(j) for j in jobs]
    return GridResult(spec, tuple(GridRow(p, m) for p, m in zip(combos, measures)), pair_convention)


def oriented(measure: str, value: float) -> float:
    """Flip ``q0`` so that larger is better for every measure."""
    return -value if measure == "q0" else value


@dataclass(frozen=True)
class Violation:
    measure: str
    prop: str
    fixed: tuple[tuple[str, float], ...]
    step: tuple[float, float]
    delta: float

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "property": self.prop,
            "fixed": dict(self.fixed),
            "from": self.step[0],
            "to": self.step[1],
            "delta": self.delta,
        }


@dataclass(frozen=True)
class PropertyCheck:
    """Outcome of one desideratum for every measure.

    ``sequences`` is the number of sequences examined (the denominator),
    ``failed`` the number of sequences with at least one failing step per
    measure and ``instances`` the number of failing steps.
    """

    prop: str
    varied: str
    sequences: int
    failed: dict[str, int]
    instances: dict[str, int]
    violations: dict[str, tuple[Violation, ...]]

    def to_dict(self, include_violations: bool = True) -> dict:
        out = {
            "property": self.prop,
            "varied": self.varied,
            "sequences": self.sequences,
            "failed_sequences": dict(self.failed),
            "failed_steps": dict(self.instances),
        }
        if include_violations:
            out["violations"] = {m: [v.to_dict() for v in vs] for m, vs in self.violations.items()}
        return out


def _sequences(result: GridResult, varied: str):
    """Yield (fixed-params, [rows in ascending order of ``varied``]) pairs."""
    idx = PARAM_NAMES.index(varied)
    axes = [result.spec.useful, result.spec.noise, result.spec.eps1, result.spec.eps2]
    others = [a for i, a in enumerate(axes) if i != idx]
    other_names = [nm for i, nm in enumerate(PARAM_NAMES) if i != idx]
    for fixed in itertools.product(*others):
        rows = []
        for v in axes[idx]:
            key = list(fixed)
            key.insert(idx, v)
            row = result.get(*key)
            if row is not None:
                rows.append(row)
        if len(rows) >= 2:
            yield tuple(zip(other_names, fixed)), rows


def _step_value(row: GridRow, varied: str):
    return row.key[PARAM_NAMES.index(varied)]


def _check(result: GridResult, varied: str, props: Sequence[str], rule) -> dict[str, PropertyCheck]:
    """Run a monotonicity rule over every sequence.

    ``rule(a, b)`` returns ``(prop_name, direction)`` for a step of the
    varied parameter from ``a`` to ``b``, or None to skip the step.
    ``props`` lists every name the rule can return.
    """
    sequences = {prop: 0 for prop in props}
    failed = {prop: {m: 0 for m in MEASURES} for prop in props}
    instances = {prop: {m: 0 for m in MEASURES} for prop in props}
    found: dict[str, dict[str, list]] = {prop: {m: [] for m in MEASURES} for prop in props}

    for fixed, rows in _sequences(result, varied):
        seen_props = set()
        bad: dict[tuple[str, str], bool] = {}
        for r0, r1 in zip(rows, rows[1:]):
            a, b = _step_value(r0, varied), _step_value(r1, varied)
            verdict = rule(a, b)
            if verdict is None:
                continue
            prop, direction = verdict
            seen_props.add(prop)
            for m in MEASURES:
                delta = oriented(m, r1.measures[m]) - oriented(m, r0.measures[m])
                if not direction * delta > STRICT_TOL:
                    instances[prop][m] += 1
                    found[prop][m].append(Violation(m, prop, fixed, (a, b), delta))
                    bad[(prop, m)] = True
        for prop in seen_props:
            sequences[prop] += 1
            for m in MEASURES:
                if bad.get((prop, m)):
                    failed[prop][m] += 1
    return {
        prop: PropertyCheck(
            prop,
            varied,
            sequences[prop],
            failed[prop],
            instances[prop],
            {m: tuple(vs) for m, vs in found[prop].items()},
        )
        for prop in sorted(failed)
    }


def _merge(prop: str, parts: Sequence[PropertyCheck], result: GridResult) -> PropertyCheck:
    # a sequence fails P1 if it fails either half
    violations = {m: tuple(v for part in parts for v in part.violations[m]) for m in MEASURES}
    failed = {m: len({v.fixed for v in violations[m]}) for m in MEASURES}
    sequences = sum(1 for _ in _sequences(result, parts[0].varied))
    return PropertyCheck(
        prop,
        parts[0].varied,
        sequences,
        failed,
        {m: len(violations[m]) for m in MEASURES},
        violations,
    )


def check_p1(result: GridResult) -> dict[str, PropertyCheck]:
    """Useful-cluster desideratum; returns checks keyed ``P1``, ``P1.1``, ``P1.2``."""
    C = result.spec.num_classes

    def rule(a, b):
        if b <= C:
            return ("P1.1", +1)
        if a >= C:
            return ("P1.2", -1)
        return None

    parts = _check(result, "useful_clusters", ("P1.1", "P1.2"), rule)
    out = dict(parts)
    out["P1"] = _merge("P1", list(parts.values()), result)
    return {k: out[k] for k in sorted(out)}


def check_p2(result: GridResult) -> PropertyCheck:
    checks = _check(result, "noise_clusters", ("P2",), lambda a, b: ("P2", -1))
    return checks["P2"]


def check_p3(result: GridResult) -> dict[str, PropertyCheck]:
    out = {}
    out.update(_check(result, "eps1", ("P3.1",), lambda a, b: ("P3.1", -1)))
    out.update(_check(result, "eps2", ("P3.2",), lambda a, b: ("P3.2", -1)))
    return out


@dataclass(frozen=True)
class ViolationReport:
    pair_convention: str
    checks: dict[str, PropertyCheck]

    def failed(self, prop: str, measure: str) -> int:
        return self.checks[prop].failed[measure]

    def to_dict(self, include_violations: bool = True) -> dict:
        return {
            "pair_convention": self.pair_convention,
            "properties": {k: c.to_dict(include_violations) for k, c in self.checks.items()},
        }

    def to_json(self, include_violations: bool = True) -> str:
        return json.dumps(self.to_dict(include_violations), indent=2, sort_keys=False)


def violation_report(result: GridResult) -> ViolationReport:
    checks = {}
    checks.update(check_p1(result))
    checks["P2"] = check_p2(result)
    checks.update(check_p3(result))
    return ViolationReport(result.pair_convention, {k: checks[k] for k in sorted(checks)})


def rank_table(result: GridResult) -> dict[str, np.ndarray]:
    """Rank of every grid row under each measure, 1 = best, ties averaged."""
    ranks = {}
    for m in MEASURES:
        values = np.array([oriented(m, v) for v in result.values(m)])
        ranks[m] = stats.rankdata(-values, method="average")
    return ranks


def rank_correlations(result: GridResult, reference: str = "q2") -> dict[str, float]:
    """Spearman correlation of each measure with ``reference`` over the grid."""
    ranks = rank_table(result)
    return {
        m: float(stats.spearmanr(ranks[reference], ranks[m]).statistic)
        for m in MEASURES
        if m != reference
    }


@dataclass(frozen=True)
class SweepPoint:
    eps1: float
    measures: MeasureVector


def sweep_eps1(
    eps1_values: Iterable[float] = DEFAULT_SWEEP,
    num_classes: int = 5,
    useful: int = 5,
    noise: int = 0,
    eps2: float = 0.0,
    n: int = 500,
    pair_convention: str = "expected",
) -> list[SweepPoint]:
    """Measures along a sweep of ``eps1`` with everything else fixed."""
    values = [float(v) for v in eps1_values]
    if any(b <= a for a, b in zip(values, values[1:])):
        raise InvalidParameterError(["eps1 sweep values must be strictly ascending"])
    return [
        SweepPoint(e1, evaluate_model(ModelParams(num_classes, useful, noise, e1, eps2), n, pair_convention))
        for e1 in values
    ]


def table2(report: ViolationReport) -> dict[str, int]:
    """Noise-cluster failures for the five classical measures, in the customary column order."""
    p2 = report.checks["P2"]
    return {m: p2.failed[m] for m in ("rand", "fowlkes_mallows", "gamma", "jaccard", "hamming")}

