"""Contingency tables and pair-count tables.

A contingency table holds ``h(c, k)``, the number of objects of class ``c``
placed in cluster ``k``.  The pair table summarises the same data as counts of
unordered object pairs, indexed by (same class?, same cluster?) with index 0
meaning "same".
"""

from __future__ import annotations

import math
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import EmptyInputError, InconsistentTableError

REL_TOL = 1e-9


def _canonical_ids(values: Sequence[Hashable]) -> tuple[list[int], list[Hashable]]:
    # dense 0-based ids in order of first appearance
    index: dict[Hashable, int] = {}
    ids = []
    for v in values:
        if v not in index:
            index[v] = len(index)
        ids.append(index[v])
    return ids, list(index)


@dataclass(frozen=True)
class Labeling:
    """Per-object (class, cluster) assignments with dense 0-based ids."""

    classes: tuple[int, ...]
    clusters: tuple[int, ...]
    class_labels: tuple[Hashable, ...] = ()
    cluster_labels: tuple[Hashable, ...] = ()

    @classmethod
    def from_labels(cls, classes: Iterable[Hashable], clusters: Iterable[Hashable]) -> Labeling:
        classes, clusters = list(classes), list(clusters)
        if len(classes) != len(clusters):
            raise ValueError(
                f"got {len(classes)} class labels but {len(clusters)} cluster labels"
            )
        c_ids, c_labels = _canonical_ids(classes)
        k_ids, k_labels = _canonical_ids(clusters)
        return cls(tuple(c_ids), tuple(k_ids), tuple(c_labels), tuple(k_labels))

    @classmethod
    def from_pairs(cls, items: Iterable[tuple[Hashable, Hashable]]) -> Labeling:
        items = list(items)
        return cls.from_labels([c for c, _ in items], [k for _, k in items])

    @property
    def n(self) -> int:
        return len(self.classes)

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """A ``|C| x |K|`` table of (possibly fractional) object counts."""

    counts: np.ndarray
    class_labels: tuple = ()
    cluster_labels: tuple = ()
    _n: float = field(init=False, repr=False)

    def __post_init__(self):
        counts = np.array(self.counts, dtype=float)
        if counts.ndim != 2 or counts.size == 0:
            raise InconsistentTableError(f"counts must be a non-empty 2-D matrix, got shape {counts.shape}")
        if not np.all(np.isfinite(counts)) or np.any(counts < 0):
            raise InconsistentTableError("counts must be finite and non-negative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        n = float(math.fsum(counts.ravel()))
        if n <= 0:
            raise EmptyInputError("table has zero total mass")
        object.__setattr__(self, "_n", n)
        num_classes, num_clusters = counts.shape
        if not self.class_labels:
            object.__setattr__(self, "class_labels", tuple(range(num_classes)))
        if not self.cluster_labels:
            object.__setattr__(self, "cluster_labels", tuple(range(num_clusters)))
        if len(self.class_labels) != num_classes or len(self.cluster_labels) != num_clusters:
            raise InconsistentTableError("label lists do not match the table shape")

    @property
    def n(self) -> float:
        return self._n

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape

    @property
    def num_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def num_clusters(self) -> int:
        return self.counts.shape[1]

    @property
    def class_marginal(self) -> np.ndarray:
        """``h(c)``, the row sums."""
        return self.counts.sum(axis=1)

    @property
    def cluster_marginal(self) -> np.ndarray:
        """``h(k)``, the column sums."""
        return self.counts.sum(axis=0)

    def is_integral(self) -> bool:
        return bool(np.all(np.abs(self.counts - np.round(self.counts)) <= REL_TOL))

    def __eq__(self, other):
        if not isinstance(other, ContingencyTable):
            return NotImplemented
        return (
            self.shape == other.shape
            and bool(np.array_equal(self.counts, other.counts))
            and self.class_labels == other.class_labels
            and self.cluster_labels == other.cluster_labels
        )

    __hash__ = None

    def to_dict(self) -> dict:
        counts = [[_json_number(x) for x in row] for row in self.counts]
        return {
            "n": _json_number(self.n),
            "counts": counts,
            "class_labels": list(self.class_labels),
            "cluster_labels": list(self.cluster_labels),
        }

    @classmethod
    def from_dict(cls, data: dict) -> ContingencyTable:
        table = cls(
            np.asarray(data["counts"], dtype=float),
            tuple(data.get("class_labels", ())),
            tuple(data.get("cluster_labels", ())),
        )
        if "n" in data and not math.isclose(table.n, float(data["n"]), rel_tol=REL_TOL):
            raise InconsistentTableError(f"stated n={data['n']} but counts sum to {table.n}")
        return table


def _json_number(x: float):
    x = float(x)
    return int(x) if x.is_integer() else x


@dataclass(frozen=True)
class PairCounts:
    """The 2x2 pair table.

    ``a00``: same class, same cluster; ``a01``: same class, different
    cluster; ``a10``: different class, same cluster; ``a11``: different in
    both.  ``total`` is the number of unordered pairs, ``n(n-1)/2``.
    """

    a00: float
    a01: float
    a10: float
    a11: float
    total: float

    @property
    def same_class(self) -> float:
        """``a0.``: pairs sharing a class."""
        return self.a00 + self.a01

    @property
    def same_cluster(self) -> float:
        """``a.0``: pairs sharing a cluster."""
        return self.a00 + self.a10

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.a00, self.a01, self.a10, self.a11, self.total)

    def to_dict(self) -> dict:
        return {"a00": self.a00, "a01": self.a01, "a10": self.a10, "a11": self.a11, "M": self.total}


def build_contingency(labels: Labeling) -> ContingencyTable:
    if labels.n == 0:
        raise EmptyInputError("labeling is empty")
    num_classes = max(labels.classes) + 1
    num_clusters = max(labels.clusters) + 1
    counts = np.zeros((num_classes, num_clusters))
    np.add.at(counts, (np.asarray(labels.classes), np.asarray(labels.clusters)), 1)
    return ContingencyTable(counts, labels.class_labels, labels.cluster_labels)


def _pairs(x) -> float:
    # x(x-1)/2, applied verbatim to fractional counts as well
    x = np.asarray(x, dtype=float)
    return math.fsum((x * (x - 1.0) / 2.0).ravel())


def _from_marginal_sums(a00: float, same_class: float, same_cluster: float, total: float) -> PairCounts:
    a01 = same_class - a00
    a10 = same_cluster - a00
    a11 = total - a00 - a01 - a10
    tol = REL_TOL * max(total, 1.0)
    for name, value in (("a00", a00), ("a01", a01), ("a10", a10), ("a11", a11)):
        if value < -tol:
            raise InconsistentTableError(f"derived pair count {name}={value} is negative")
    clamp = lambda v: 0.0 if v < 0 else v  # noqa: E731
    return PairCounts(clamp(a00), clamp(a01), clamp(a10), clamp(a11), total)


def pair_counts_from_table(table: ContingencyTable) -> PairCounts:
    """Pair table computed from the cells and marginals of ``table``.

    Uses ``a00 = sum h(c,k)(h(c,k)-1)/2`` and the analogous row/column sums.
    Fractional counts go through the same formula (continuous extension).
    """
    n = table.n
    return _from_marginal_sums(
        _pairs(table.counts),
        _pairs(table.class_marginal),
        _pairs(table.cluster_marginal),
        n * (n - 1.0) / 2.0,
    )


def pair_counts_bruteforce(labels: Labeling) -> PairCounts:
    """Enumerate every unordered pair of objects.  Test oracle, O(n^2)."""
    a = [[0, 0], [0, 0]]
    for i, j in combinations(range(labels.n), 2):
        a[labels.classes[i] != labels.classes[j]][labels.clusters[i] != labels.clusters[j]] += 1
    n = labels.n
    return PairCounts(
        float(a[0][0]), float(a[0][1]), float(a[1][0]), float(a[1][1]), float(n * (n - 1) // 2)
    )


def expected_table(joint, n: int) -> ContingencyTable:
    """Expected contingency table ``n * p(c, k)``, left unrounded."""
    p = np.asarray(getattr(joint, "p", joint), dtype=float)
    total = math.fsum(p.ravel())
    if abs(total - 1.0) > REL_TOL:
        raise InconsistentTableError(f"joint distribution sums to {total}, not 1")
    return ContingencyTable(
        n * p,
        tuple(getattr(joint, "class_labels", ())),
        tuple(getattr(joint, "cluster_labels", ())),
    )


def expected_pair_counts(joint, n: int) -> PairCounts:
    """Expectation of the pair table for ``n`` objects drawn i.i.d. from ``joint``.

    Two distinct objects share cell ``(c, k)`` with probability ``p(c,k)^2``,
    so ``E[a00] = M * sum p(c,k)^2``, and likewise for the marginals.  This
    differs from :func:`pair_counts_from_table` applied to the expected table,
    which gives ``sum np(np-1)/2``.
    """
    p = np.asarray(getattr(joint, "p", joint), dtype=float)
    total = n * (n - 1.0) / 2.0
    sq = lambda v: math.fsum((np.asarray(v) ** 2).ravel())  # noqa: E731
    return _from_marginal_sums(
        total * sq(p), total * sq(p.sum(axis=1)), total * sq(p.sum(axis=0)), total
    )


def labeling_from_table(counts) -> Labeling:
    """Expand an integer table into a deterministic labeling (row-major order)."""
    counts = np.asarray(counts)
    if np.any(np.abs(counts - np.round(counts)) > REL_TOL):
        raise InconsistentTableError("only integer tables can be expanded into labelings")
    classes, clusters = [], []
    for (c, k), h in np.ndenumerate(np.round(counts).astype(int)):
        classes.extend([c] * h)
        clusters.extend([k] * h)
    return Labeling(tuple(classes), tuple(clusters), tuple(range(counts.shape[0])), tuple(range(counts.shape[1])))
