"""Labelling energy over a fully connected region graph, and its minimisation.

    E(A) = -( sum_i  alpha * p(a_i|s_i) + beta * p(a_i)
            + sum_{i != j} delta * psi(a_i, a_j, r_ij) + p(a_i, a_j) * p(a_i|s_i) )

The pairwise sum runs over ordered pairs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .appearance import FuzzyLabelSet
from .context import ContextModel
from .spatial import RelationVector

MAX_SWEEPS = 100
SEARCH_LIMIT = 10 ** 6


class InvalidLabelError(ValueError):
    pass


class SearchSpaceError(ValueError):
    pass


@dataclass(frozen=True)
class EnergyParams:
    alpha: float = 1.4
    beta: float = 0.3
    delta: float = 0.8

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.alpha, self.beta, self.delta)):
            raise ValueError("energy weights must be finite")


@dataclass(frozen=True, eq=False)
class LabelingInstance:
    labels: tuple[FuzzyLabelSet, ...]
    relations: Mapping[tuple[int, int], RelationVector]
    context: ContextModel
    params: EnergyParams = EnergyParams()
    region_ids: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        for i, ls in enumerate(self.labels):
            if not ls.candidates:
                raise ValueError(f"region {i} has no candidate concepts")
        for i in range(self.k):
            for j in range(self.k):
                if i != j and (i, j) not in self.relations:
                    raise ValueError(f"missing relation vector for pair ({i}, {j})")

    @property
    def k(self) -> int:
        return len(self.labels)

    def candidates(self, i: int) -> tuple[int, ...]:
        return self.labels[i].candidates


@dataclass(frozen=True)
class Assignment:
    labels: tuple[int, ...]
    energy: float
    sweeps: int = 0
    history: tuple[float, ...] = field(default=(), compare=False)


def _check(instance: LabelingInstance, i: int, c: int) -> None:
    if c not in instance.labels[i].candidates:
        raise InvalidLabelError(f"concept {c} is not a candidate of region {i}")


def association_potential(instance: LabelingInstance, i: int, c: int) -> float:
    _check(instance, i, c)
    p = instance.params
    return p.alpha * instance.labels[i].belief(c) + p.beta * instance.context.prior[c]


def spatial_interaction(model: ContextModel, l: int, m: int, r) -> float:
    """Similarity of an observed relation to the learnt mean, clamped at 0; unseen pairs give 0."""
    mean = model.mean_relation.get((l, m))
    if mean is None:
        return 0.0
    vec = r.as_tuple() if isinstance(r, RelationVector) else tuple(r)
    dist = math.sqrt(math.fsum((a - b) ** 2 for a, b in zip(mean.mu, vec)))
    return max(0.0, 1.0 - dist)


def configuration_potential(instance: LabelingInstance, i: int, cl: int, j: int, cm: int) -> float:
    if i == j:
        raise ValueError("configuration potential needs two distinct regions")
    _check(instance, i, cl)
    _check(instance, j, cm)
    psi = spatial_interaction(instance.context, cl, cm, instance.relations[i, j])
    return (instance.params.delta * psi
            + instance.context.cooc[cl][cm] * instance.labels[i].belief(cl))


def total_energy(instance: LabelingInstance, labels: Sequence[int]) -> float:
    if len(labels) != instance.k:
        raise InvalidLabelError(f"expected {instance.k} labels, got {len(labels)}")
    terms = [association_potential(instance, i, c) for i, c in enumerate(labels)]
    for i, j in itertools.permutations(range(instance.k), 2):
        terms.append(configuration_potential(instance, i, labels[i], j, labels[j]))
    return -math.fsum(terms)


class _Tables:
    """Unary and pairwise potentials precomputed over each region's candidates."""

    def __init__(self, instance: LabelingInstance):
        k = instance.k
        self.unary = [{c: association_potential(instance, i, c) for c in instance.candidates(i)}
                      for i in range(k)]
        self.pair = {}
        for i, j in itertools.permutations(range(k), 2):
            self.pair[i, j] = {
                (a, b): configuration_potential(instance, i, a, j, b)
                for a in instance.candidates(i) for b in instance.candidates(j)
            }

    def local(self, labels: Sequence[int], i: int, c: int) -> float:
        """Negated sum of every term that involves region ``i`` labelled ``c``."""
        terms = [self.unary[i][c]]
        for j, b in enumerate(labels):
            if j != i:
                terms.append(self.pair[i, j][c, b])
                terms.append(self.pair[j, i][b, c])
        return -math.fsum(terms)

    def total(self, labels: Sequence[int]) -> float:
        terms = [self.unary[i][c] for i, c in enumerate(labels)]
        for (i, j), table in self.pair.items():
            terms.append(table[labels[i], labels[j]])
        return -math.fsum(terms)


def appearance_labels(instance: LabelingInstance) -> tuple[int, ...]:
    return tuple(ls.best for ls in instance.labels)


def icm(instance: LabelingInstance, max_sweeps: int = MAX_SWEEPS) -> Assignment:
    """Iterated conditional modes from the appearance argmax.

    Regions are revisited in ascending order with in-place updates.  Each
    region takes the candidate of lowest local energy, ties going to the lowest
    concept index.  ``history`` holds the total energy before the first sweep
    and after every sweep.
    """
    tables = _Tables(instance)
    labels = list(appearance_labels(instance))
    history = [tables.total(labels)]
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        changed = False
        for i in range(instance.k):
            best_c, best_e = None, math.inf
            for c in sorted(instance.candidates(i)):
                e = tables.local(labels, i, c)
                if e < best_e:
                    best_c, best_e = c, e
            if best_c != labels[i]:
                labels[i] = best_c
                changed = True
        history.append(tables.total(labels))
        if not changed:
            break
    return Assignment(tuple(labels), total_energy(instance, labels), sweeps, tuple(history))


def exhaustive_min(instance: LabelingInstance, limit: int = SEARCH_LIMIT) -> Assignment:
    """Global minimum over the candidate product; ties go to the lexicographically smallest labels."""
    spaces = [sorted(instance.candidates(i)) for i in range(instance.k)]
    size = math.prod(len(s) for s in spaces)
    if size > limit:
        raise SearchSpaceError(f"search space of {size} assignments exceeds the limit of {limit}")
    tables = _Tables(instance)
    best, best_e = None, math.inf
    for labels in itertools.product(*spaces):
        e = tables.total(labels)
        if e < best_e:
            best, best_e = labels, e
    return Assignment(tuple(best), total_energy(instance, best))


def appearance_only(instance: LabelingInstance) -> Assignment:
    labels = appearance_labels(instance)
    return Assignment(labels, total_energy(instance, labels))


def is_one_opt(instance: LabelingInstance, labels: Sequence[int], tol: float = 0.0) -> bool:
    """True when no single-region relabel lowers the energy by more than ``tol``."""
    base = total_energy(instance, labels)
    for i in range(instance.k):
        for c in instance.candidates(i):
            trial = list(labels)
            trial[i] = c
            if total_energy(instance, trial) < base - tol:
                return False
    return True
