"""Contextual statistics learnt from labelled scenes.

Priors are region frequencies, co-occurrence is counted once per image for
every unordered pair of concepts present (a concept pairs with itself when it
labels two or more regions), and mean relation vectors are kept per ordered
concept pair.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

from .scene import Scene, all_pair_descriptors
from .spatial import FuzzyParams, relation_vector


class MissingTruthError(ValueError):
    pass


@dataclass(frozen=True)
class MeanRelation:
    count: int
    mu: tuple[float, float, float, float, float]


@dataclass(frozen=True)
class ContextModel:
    vocabulary: tuple[str, ...]
    prior: tuple[float, ...]
    cooc: tuple[tuple[float, ...], ...]
    mean_relation: dict[tuple[int, int], MeanRelation]

    def index(self, concept) -> int:
        if isinstance(concept, str):
            try:
                return self.vocabulary.index(concept)
            except ValueError:
                raise KeyError(f"unknown concept {concept!r}") from None
        if not 0 <= concept < len(self.vocabulary):
            raise KeyError(f"concept index {concept} out of range")
        return concept

    def lookup(self, l, m) -> tuple[float, Optional[tuple[float, ...]]]:
        """Co-occurrence of ``(l, m)`` and their mean relation vector, or None if never observed."""
        l, m = self.index(l), self.index(m)
        rel = self.mean_relation.get((l, m))
        return self.cooc[l][m], (rel.mu if rel is not None else None)


def train_context(scenes: Sequence[Scene], params: FuzzyParams = FuzzyParams()) -> ContextModel:
    if not scenes:
        raise ValueError("need at least one training scene")
    vocab = scenes[0].vocabulary
    n = len(vocab)
    concept_counts = Counter()
    pair_counts = Counter()
    samples: dict[tuple[int, int], list[tuple[float, ...]]] = {}
    for scene in scenes:
        if scene.vocabulary != vocab:
            raise ValueError("all training scenes must share one vocabulary")
        truth = {}
        for reg in scene.regions:
            if reg.truth is None:
                raise MissingTruthError(f"region {reg.id} has no ground-truth concept")
            truth[reg.id] = reg.truth
        present = Counter(truth.values())
        concept_counts.update(present)
        for l, m in itertools.combinations_with_replacement(sorted(present), 2):
            if l != m or present[l] >= 2:
                pair_counts[l, m] += 1
        for (i, j), desc in all_pair_descriptors(scene).items():
            key = (truth[i], truth[j])
            samples.setdefault(key, []).append(relation_vector(desc, params).as_tuple())

    regions = sum(concept_counts.values())
    if regions == 0:
        raise ValueError("training scenes contain no regions")
    prior = tuple(concept_counts[l] / regions for l in range(n))
    total_pairs = sum(pair_counts.values())
    cooc = [[0.0] * n for _ in range(n)]
    for (l, m), count in pair_counts.items():
        cooc[l][m] = cooc[m][l] = count / total_pairs
    mean_relation = {
        key: MeanRelation(len(vs), tuple(_mean(col) for col in zip(*vs)))
        for key, vs in sorted(samples.items())
    }
    return ContextModel(tuple(vocab), prior, tuple(tuple(row) for row in cooc), mean_relation)


def _mean(values: Sequence[float]) -> float:
    # fsum is exactly rounded, so the result does not depend on scene order
    m = math.fsum(values) / len(values)
    return min(max(m, min(values)), max(values))


def save_context(model: ContextModel) -> str:
    vocab = model.vocabulary
    lines = ["{"]
    lines.append(f'"vocabulary": {json.dumps(list(vocab))},')
    lines.append(f'"prior": {json.dumps(dict(zip(vocab, model.prior)))},')
    rows = ",\n  ".join(json.dumps(list(row)) for row in model.cooc)
    lines.append(f'"cooc": [\n  {rows}\n],')
    rel = ",\n  ".join(
        f'{json.dumps(vocab[l] + "|" + vocab[m])}: '
        f'{json.dumps({"count": r.count, "mu": list(r.mu)})}'
        for (l, m), r in sorted(model.mean_relation.items()))
    lines.append(f'"mean_relation": {{\n  {rel}\n}}' if rel else '"mean_relation": {}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def load_context(document: str) -> ContextModel:
    try:
        doc = json.loads(document)
        vocab = tuple(doc["vocabulary"])
        prior = tuple(float(doc["prior"][name]) for name in vocab)
        cooc = tuple(tuple(float(x) for x in row) for row in doc["cooc"])
        if len(cooc) != len(vocab) or any(len(row) != len(vocab) for row in cooc):
            raise ValueError("cooc must be a square table over the vocabulary")
        mean_relation = {}
        for key, entry in doc["mean_relation"].items():
            l, m = key.split("|")
            mu = tuple(float(x) for x in entry["mu"])
            if len(mu) != 5:
                raise ValueError(f"mean relation {key!r} must have 5 components")
            mean_relation[vocab.index(l), vocab.index(m)] = MeanRelation(int(entry["count"]), mu)
    except (KeyError, TypeError, AttributeError, json.JSONDecodeError) as exc:
        raise ValueError(f"malformed context model: {exc}") from None
    return ContextModel(vocab, prior, cooc, dict(sorted(mean_relation.items())))
