"""Independent brute-force checks used by the tests.

Nothing here imports the code paths it is used to check: geometry works on
plain Python pixel sets and the energy is re-derived term by term.
"""

import itertools
import math
import random

from ctxcat.appearance import FuzzyLabelSet
from ctxcat.context import ContextModel, MeanRelation
from ctxcat.energy import EnergyParams, LabelingInstance
from ctxcat.scene import PairDescriptors, Region, Scene
from ctxcat.spatial import RelationVector


def pixel_set(region):
    return {(c + k, r) for r, c, n in region.runs for k in range(n)}


def brute_geometry(pixels):
    """(centroid, boundary, perimeter) of a set of (x, y) pixels by enumeration."""
    cx = sum(x for x, _ in pixels) / len(pixels)
    cy = sum(y for _, y in pixels) / len(pixels)
    exposed = 0
    boundary = set()
    for x, y in pixels:
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            if (x + dx, y + dy) not in pixels:
                exposed += 1
                boundary.add((x, y))
    return (cx, cy), boundary, exposed


def square_gap(p, q):
    """Euclidean gap between two closed unit squares centred on pixel centres."""
    dx = max(abs(p[0] - q[0]) - 1, 0)
    dy = max(abs(p[1] - q[1]) - 1, 0)
    return math.hypot(dx, dy)


def brute_descriptors(width, height, a, b):
    (xa, ya), ba, per_a = brute_geometry(a)
    (xb, yb), bb, _ = brute_geometry(b)
    theta = math.atan2(ya - yb, xb - xa)
    if theta <= -math.pi:
        theta += 2 * math.pi
    gap = min(square_gap(p, q) for p in ba for q in bb)
    shared = sum(1 for x, y in a for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1))
                 if (x + dx, y + dy) in b)
    return theta, gap / math.hypot(width, height), shared / per_a


def rect(x0, y0, w, h):
    return {(x, y) for x in range(x0, x0 + w) for y in range(y0, y0 + h)}


def scene_from_pixels(width, height, pixel_sets, vocabulary=("a", "b", "c"), truths=None):
    regions = []
    for rid, pix in enumerate(pixel_sets):
        rows = {}
        for x, y in pix:
            rows.setdefault(y, []).append(x)
        runs = []
        for y in sorted(rows):
            xs = sorted(rows[y])
            start = prev = xs[0]
            for x in xs[1:] + [None]:
                if x is not None and x == prev + 1:
                    prev = x
                    continue
                runs.append((y, start, prev - start + 1))
                if x is not None:
                    start = prev = x
        truth = None if truths is None else truths[rid]
        regions.append(Region(id=rid, runs=tuple(runs), truth=truth))
    return Scene(width, height, tuple(vocabulary), tuple(regions))


# -- energy --------------------------------------------------------------------

def brute_energy(instance, labels):
    """Energy straight from the definition, without any shared tables."""
    p = instance.params
    ctx = instance.context
    total = 0.0
    for i, c in enumerate(labels):
        total += p.alpha * instance.labels[i].beliefs[c] + p.beta * ctx.prior[c]
    for i, j in itertools.permutations(range(len(labels)), 2):
        l, m = labels[i], labels[j]
        mean = ctx.mean_relation.get((l, m))
        if mean is None:
            psi = 0.0
        else:
            r = instance.relations[i, j]
            obs = (r.mu_above, r.mu_below, r.mu_beside, r.mu_near, r.mu_sur)
            psi = max(0.0, 1.0 - math.sqrt(sum((u - v) ** 2 for u, v in zip(mean.mu, obs))))
        total += p.delta * psi + ctx.cooc[l][m] * instance.labels[i].beliefs[l]
    return -total


def brute_minimum(instance):
    spaces = [sorted(ls.candidates) for ls in instance.labels]
    return min((brute_energy(instance, lab), lab) for lab in itertools.product(*spaces))


def random_relation(rng):
    theta = rng.uniform(-math.pi, math.pi)
    if theta == -math.pi:
        theta = math.pi
    s2, c2 = math.sin(theta) ** 2, math.cos(theta) ** 2
    above = s2 if 0 < theta < math.pi else 0.0
    below = s2 if -math.pi < theta < 0 else 0.0
    return RelationVector(above, below, c2, rng.random(), rng.random(),
                          "ABOVE", PairDescriptors(theta, 0.0, 0.0))


def random_instance(seed, max_regions=4, max_candidates=3, n_concepts=4, params=None):
    """Seeded random fully connected instance with random beliefs and context."""
    rng = random.Random(seed)
    k = rng.randint(1, max_regions)
    labels = []
    for _ in range(k):
        raw = [rng.random() for _ in range(n_concepts)]
        beliefs = [v / sum(raw) for v in raw]
        order = sorted(range(n_concepts), key=lambda l: (-beliefs[l], l))
        labels.append(FuzzyLabelSet(tuple(order[:rng.randint(1, max_candidates)]), tuple(beliefs)))
    raw_prior = [rng.random() for _ in range(n_concepts)]
    prior = tuple(v / sum(raw_prior) for v in raw_prior)
    cooc = [[0.0] * n_concepts for _ in range(n_concepts)]
    for l in range(n_concepts):
        for m in range(l, n_concepts):
            cooc[l][m] = cooc[m][l] = rng.random() * 0.3
    mean = {}
    for l in range(n_concepts):
        for m in range(n_concepts):
            if rng.random() < 0.7:
                mean[l, m] = MeanRelation(rng.randint(1, 9), random_relation(rng).as_tuple())
    ctx = ContextModel(tuple("c%d" % n for n in range(n_concepts)), prior,
                       tuple(tuple(r) for r in cooc), mean)
    relations = {(i, j): random_relation(rng) for i in range(k) for j in range(k) if i != j}
    params = params or EnergyParams(rng.uniform(0, 2), rng.uniform(0, 1), rng.uniform(0, 2))
    return LabelingInstance(tuple(labels), relations, ctx, params, tuple(range(k)))
