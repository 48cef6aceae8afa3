"""Parametric family of class/cluster joint distributions.

Classes are equiprobable.  Clusters split into ``useful`` ones, each tied to
one or more classes, and ``noise`` ones whose class distribution is uniform.
Within a class, probability ``1 - eps`` goes to its matched useful clusters,
``eps1`` is spread over the other useful clusters and ``eps2`` over the noise
clusters.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError


@dataclass(frozen=True)
class ModelParams:
    num_classes: int
    useful_clusters: int
    noise_clusters: int
    eps1: float
    eps2: float

    @property
    def eps(self) -> float:
        return self.eps1 + self.eps2

    @property
    def num_clusters(self) -> int:
        return self.useful_clusters + self.noise_clusters

    def to_dict(self) -> dict:
        return {
            "num_classes": self.num_classes,
            "useful_clusters": self.useful_clusters,
            "noise_clusters": self.noise_clusters,
            "eps1": self.eps1,
            "eps2": self.eps2,
        }


@dataclass(frozen=True)
class Assignment:
    """Matched useful clusters of each class and matched classes of each useful cluster."""

    clusters_of_class: tuple[tuple[int, ...], ...]
    classes_of_cluster: tuple[tuple[int, ...], ...]


def _ceiling_split(items: int, groups: int) -> list[range]:
    # greedy: each group takes ceil(remaining items / remaining groups)
    out, start = [], 0
    for g in range(groups):
        take = -(-(items - start) // (groups - g))
        out.append(range(start, start + take))
        start += take
    return out


def assign(num_classes: int, useful_clusters: int) -> Assignment:
    """Tie useful clusters to classes in index order using the ceiling rule.

    With more useful clusters than classes, each class gets a consecutive
    block of clusters; with fewer, each cluster gets a block of classes.

    >>> assign(5, 7).clusters_of_class
    ((0, 1), (2, 3), (4,), (5,), (6,))
    """
    if num_classes < 1 or useful_clusters < 1:
        raise ValueError("need at least one class and one useful cluster")
    if num_classes <= useful_clusters:
        blocks = _ceiling_split(useful_clusters, num_classes)
        of_class = [tuple(b) for b in blocks]
        of_cluster = [()] * useful_clusters
        for c, b in enumerate(blocks):
            for k in b:
                of_cluster[k] = (c,)
    else:
        blocks = _ceiling_split(num_classes, useful_clusters)
        of_cluster = [tuple(b) for b in blocks]
        of_class = [()] * num_classes
        for k, b in enumerate(blocks):
            for c in b:
                of_class[c] = (k,)
    return Assignment(tuple(of_class), tuple(of_cluster))


def validate(params: ModelParams) -> list[str]:
    """Reasons why ``params`` is not a meaningful model; empty if valid.

    Noise clusters and noise probability must come together: ``eps2 > 0``
    needs at least one noise cluster, and a noise cluster needs ``eps2 > 0``.
    """
    p = params
    reasons = []
    if p.num_classes < 1:
        reasons.append(f"num_classes must be >= 1, got {p.num_classes}")
    if p.useful_clusters < 1:
        reasons.append(f"useful_clusters must be >= 1, got {p.useful_clusters}")
    if p.noise_clusters < 0:
        reasons.append(f"noise_clusters must be >= 0, got {p.noise_clusters}")
    for name in ("eps1", "eps2"):
        value = getattr(p, name)
        if not (math.isfinite(value) and 0.0 <= value < 1.0):
            reasons.append(f"{name} must lie in [0, 1), got {value}")
    if not p.eps < 1.0:
        reasons.append(f"eps1 + eps2 must be < 1, got {p.eps}")
    if p.eps2 > 0 and p.noise_clusters == 0:
        reasons.append("eps2 > 0 requires at least one noise cluster")
    if p.noise_clusters >= 1 and p.eps2 == 0:
        reasons.append("noise clusters require eps2 > 0")
    if not reasons and p.eps1 > 0:
        a = assign(p.num_classes, p.useful_clusters)
        if any(p.useful_clusters - len(ks) < 1 for ks in a.clusters_of_class):
            reasons.append("eps1 > 0 requires every class to have an unmatched useful cluster")
    return reasons


def is_valid(params: ModelParams) -> bool:
    return not validate(params)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """``p(c, k)``; columns are the useful clusters followed by the noise clusters."""

    p: np.ndarray
    params: ModelParams
    assignment: Assignment

    @property
    def class_labels(self) -> tuple[int, ...]:
        return tuple(range(1, self.p.shape[0] + 1))

    @property
    def cluster_labels(self) -> tuple[int, ...]:
        return tuple(range(1, self.p.shape[1] + 1))

    def to_dict(self) -> dict:
        return {"params": self.params.to_dict(), "p": self.p.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def build_joint(params: ModelParams) -> JointDistribution:
    reasons = validate(params)
    if reasons:
        raise InvalidParameterError(reasons)
    C, Ku, Kn = params.num_classes, params.useful_clusters, params.noise_clusters
    a = assign(C, Ku)
    # exact rational cells, each rounded once
    e1, e2 = Fraction(params.eps1), Fraction(params.eps2)
    p = np.zeros((C, Ku + Kn))
    for c, matched in enumerate(a.clusters_of_class):
        unmatched = Ku - len(matched)
        for k in range(Ku):
            if k in matched:
                cell = (1 - e1 - e2) / len(matched)
            else:
                cell = e1 / unmatched
            p[c, k] = float(cell / C)
        if Kn:
            p[c, Ku:] = float(e2 / Kn / C)
    p.setflags(write=False)
    return JointDistribution(p, params, a)
