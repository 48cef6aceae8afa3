"""Classical external validity measures and the combined measure vector."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DegenerateInputError
from .info_measures import q_scores
from .tables import ContingencyTable, PairCounts, pair_counts_from_table

# order used in reports
MEASURES = ("q0", "q2", "rand", "fowlkes_mallows", "gamma", "jaccard", "hamming")


def rand_index(pairs: PairCounts) -> float:
    if pairs.total <= 0:
        raise DegenerateInputError("Rand index needs at least two objects")
    return (pairs.a00 + pairs.a11) / pairs.total


def jaccard_index(pairs: PairCounts) -> float:
    """``a00 / (a00 + a01 + a10)``.

    Returns 0.0 when no pair shares a class or a cluster;
    :func:`jaccard_is_degenerate` reports that case.
    """
    denom = pairs.a00 + pairs.a01 + pairs.a10
    if denom <= 0:
        return 0.0
    return pairs.a00 / denom


def jaccard_is_degenerate(pairs: PairCounts) -> bool:
    return pairs.a00 + pairs.a01 + pairs.a10 <= 0


def fowlkes_mallows(pairs: PairCounts) -> float:
    prod = pairs.same_class * pairs.same_cluster
    if prod <= 0:
        raise DegenerateInputError("Fowlkes-Mallows needs pairs sharing a class and pairs sharing a cluster")
    return pairs.a00 / math.sqrt(prod)


def hubert_gamma(pairs: PairCounts) -> float:
    """Hubert-Schultz Gamma, with ``M`` taken as the total number of pairs."""
    m = pairs.total
    prod = pairs.same_class * pairs.same_cluster
    denom = prod * (m - pairs.same_class) * (m - pairs.same_cluster)
    if denom <= 0:
        raise DegenerateInputError(
            "Gamma is undefined when all pairs (or no pairs) share a class or a cluster"
        )
    return (m * pairs.a00 - prod) / math.sqrt(denom)


class Assignments(NamedTuple):
    cluster_to_class: tuple[int, ...]
    class_to_cluster: tuple[int, ...]
    empty_clusters: tuple[int, ...]
    empty_classes: tuple[int, ...]


def hamming_assignments(table: ContingencyTable) -> Assignments:
    """Majority class of each cluster and majority cluster of each class.

    Ties go to the lowest index (``np.argmax`` semantics).  Empty rows and
    columns map to index 0 and are listed separately.
    """
    h = table.counts
    return Assignments(
        tuple(int(i) for i in h.argmax(axis=0)),
        tuple(int(i) for i in h.argmax(axis=1)),
        tuple(int(k) for k in np.flatnonzero(table.cluster_marginal == 0)),
        tuple(int(c) for c in np.flatnonzero(table.class_marginal == 0)),
    )


def directional_hamming(table: ContingencyTable) -> tuple[float, float]:
    """``(D_H(C;K), D_H(K;C))``: mass outside each column's / row's majority cell."""
    h = table.counts
    # the majority cell value doesn't depend on which tied index wins
    d_ck = math.fsum(table.cluster_marginal - h.max(axis=0))
    d_kc = math.fsum(table.class_marginal - h.max(axis=1))
    return d_ck, d_kc


def normalized_hamming(table: ContingencyTable) -> float:
    d_ck, d_kc = directional_hamming(table)
    return 1.0 - (d_ck + d_kc) / (2.0 * table.n)


@dataclass(frozen=True)
class MeasureVector:
    q0: float
    q2: float
    rand: float
    fowlkes_mallows: float
    gamma: float
    jaccard: float
    hamming: float
    degenerate: tuple[str, ...] = field(default=(), compare=False)

    def __getitem__(self, name: str) -> float:
        if name not in MEASURES:
            raise KeyError(name)
        return getattr(self, name)

    def values(self) -> tuple[float, ...]:
        return tuple(getattr(self, m) for m in MEASURES)

    def to_dict(self) -> dict:
        out = {m: (None if math.isnan(v) else v) for m, v in zip(MEASURES, self.values())}
        if self.degenerate:
            out["degenerate"] = list(self.degenerate)
        return out


def all_measures(table: ContingencyTable, pairs: PairCounts | None = None) -> MeasureVector:
    """Evaluate all seven measures on one table.

    ``pairs`` overrides the pair table derived from ``table`` (used for
    expected pair counts).  A measure that is undefined for this input comes
    back as NaN (Jaccard as 0.0) and is named in ``degenerate``.
    """
    if pairs is None:
        pairs = pair_counts_from_table(table)
    degenerate = []

    def guarded(name, fn, arg):
        try:
            return fn(arg)
        except (DegenerateInputError, ZeroDivisionError):
            degenerate.append(name)
            return math.nan

    scores = q_scores(table)
    if math.isnan(scores.q2):
        degenerate.append("q2")
    values = dict(
        q0=scores.q0,
        q2=scores.q2,
        rand=guarded("rand", rand_index, pairs),
        fowlkes_mallows=guarded("fowlkes_mallows", fowlkes_mallows, pairs),
        gamma=guarded("gamma", hubert_gamma, pairs),
        jaccard=jaccard_index(pairs),
        hamming=normalized_hamming(table),
    )
    if jaccard_is_degenerate(pairs):
        degenerate.append("jaccard")
    order = {m: i for i, m in enumerate(MEASURES)}
    return MeasureVector(**values, degenerate=tuple(sorted(degenerate, key=order.get)))

