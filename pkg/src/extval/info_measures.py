"""Entropy and description-length quantities, all in bits.

``q0`` is the per-object cost of sending the class labels when the receiver
already knows the cluster labels: the empirical conditional entropy plus the
cost of an enumerative code for the contingency table, column by column.
``q2`` rescales it so a perfect clustering scores 1.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateInputError
from .tables import REL_TOL, ContingencyTable

_LN2 = math.log(2.0)


def _clamp(x: float) -> float:
    # round-off below zero, including -0.0
    return 0.0 if x <= 0.0 else x


def empirical_entropy(marginal) -> float:
    """``-sum (h/n) log2(h/n)`` over a vector of counts, with ``0 log 0 = 0``."""
    h = np.asarray(marginal, dtype=float)
    if np.any(h < 0):
        raise ValueError("marginal counts must be non-negative")
    n = math.fsum(h)
    if n <= 0:
        raise DegenerateInputError("entropy of an all-zero marginal is undefined")
    p = h[h > 0] / n
    return _clamp(-math.fsum(p * np.log2(p)))


def empirical_conditional_entropy(table: ContingencyTable) -> float:
    """Plug-in estimate of ``H(C|K)`` from a contingency table."""
    h = table.counts
    hk = np.broadcast_to(table.cluster_marginal, h.shape)
    mask = h > 0
    terms = h[mask] / table.n * np.log2(h[mask] / hk[mask])
    return _clamp(-math.fsum(terms))


def mutual_information(table: ContingencyTable) -> float:
    return _clamp(empirical_entropy(table.class_marginal) - empirical_conditional_entropy(table))


def column_code_length(h_k: float, num_classes: int) -> float:
    """Bits to index one column with sum ``h_k`` among all ``num_classes``-vectors.

    ``log2 C(h_k + |C| - 1, |C| - 1)``; exact for integer ``h_k``, log-gamma
    extension otherwise.
    """
    if h_k < 0:
        raise ValueError("column sum must be non-negative")
    if num_classes < 1:
        raise ValueError("need at least one class")
    rounded = round(h_k)
    if abs(h_k - rounded) <= REL_TOL * max(1.0, abs(h_k)):
        return math.log2(math.comb(int(rounded) + num_classes - 1, num_classes - 1))
    return (
        math.lgamma(h_k + num_classes) - math.lgamma(h_k + 1.0) - math.lgamma(num_classes)
    ) / _LN2


def table_code_length(table: ContingencyTable) -> float:
    """Total bits (not per object) for the whole table given its column sums."""
    return math.fsum(column_code_length(hk, table.num_classes) for hk in table.cluster_marginal)


def model_cost(table: ContingencyTable) -> float:
    """Table code length per object."""
    return table_code_length(table) / table.n


def q0(table: ContingencyTable) -> float:
    # the constant log n bits for sending |C| is left out
    return empirical_conditional_entropy(table) + model_cost(table)


def q0_asymptotic(h_cond: float, num_clusters: int, num_classes: int, n: float) -> float:
    """Large-``n`` form: ``h_cond + |K|(|C|-1) log2(n) / n``."""
    if n < 2:
        raise ValueError("asymptotic form needs n >= 2")
    return h_cond + num_clusters * (num_classes - 1) * math.log2(n) / n


def _marginal_args(class_marginal, num_classes, n):
    h = np.asarray(class_marginal, dtype=float)
    num_classes = len(h) if num_classes is None else num_classes
    total = math.fsum(h)
    if n is not None and not math.isclose(total, n, rel_tol=REL_TOL):
        raise ValueError(f"class marginal sums to {total}, expected n={n}")
    return h, num_classes, total


def q0_min(class_marginal, num_classes: int | None = None, n: float | None = None) -> float:
    """Smallest attainable ``q0`` for a class marginal (the perfect clustering)."""
    h, num_classes, total = _marginal_args(class_marginal, num_classes, n)
    return math.fsum(column_code_length(hc, num_classes) for hc in h) / total


def q0_max(class_marginal, num_classes: int | None = None, n: float | None = None) -> float:
    """Upper bound ``H(C) + log2 |C|`` used to normalise ``q0``.

    This is a bound, not the exact maximum over clusterings.
    """
    h, num_classes, _ = _marginal_args(class_marginal, num_classes, n)
    return empirical_entropy(h) + math.log2(num_classes)


@dataclass(frozen=True)
class QScores:
    h_cond_bits: float
    model_cost_bits_per_obj: float
    q0: float
    q0_min: float
    q0_max: float
    q2: float
    mutual_information_bits: float

    def to_dict(self) -> dict:
        return asdict(self)


def _normalise(q0_value: float, lo: float, hi: float) -> float:
    span = hi - lo
    if span <= 0:
        raise DegenerateInputError(
            "q2 is undefined: max and min code lengths coincide (fewer than two classes?)"
        )
    return (hi - q0_value) / span


def q2(table: ContingencyTable) -> float:
    hc = table.class_marginal
    return _normalise(q0(table), q0_min(hc), q0_max(hc))


def q_scores(table: ContingencyTable) -> QScores:
    """All information-theoretic quantities for ``table``.

    ``q2`` is NaN when the normalisation is degenerate.
    """
    h_cond = empirical_conditional_entropy(table)
    cost = model_cost(table)
    hc = table.class_marginal
    lo, hi = q0_min(hc), q0_max(hc)
    total = h_cond + cost
    try:
        normalised = _normalise(total, lo, hi)
    except DegenerateInputError:
        normalised = math.nan
    return QScores(
        h_cond_bits=h_cond,
        model_cost_bits_per_obj=cost,
        q0=total,
        q0_min=lo,
        q0_max=hi,
        q2=normalised,
        mutual_information_bits=_clamp(empirical_entropy(hc) - h_cond),
    )
