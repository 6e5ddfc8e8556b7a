"""Exit criteria for the build; each test carries a ``criterion`` marker and
the terminal summary prints one PASS/FAIL line per criterion."""

import math
import random
import time

import numpy as np
import pytest

from ctxcat.appearance import fuzzy_memberships, load_model, save_model, train_classifier
from ctxcat.context import load_context, save_context, train_context
from ctxcat.energy import appearance_labels, exhaustive_min, icm, is_one_opt, total_energy
from ctxcat.experiment import ExperimentConfig, comparison_csv, run_experiment, split
from ctxcat.params import Params
from ctxcat.pipeline import build_instance, infer, parse_predictions, region_labels, serialize_predictions
from ctxcat.render import render
from ctxcat.scene import normalize_angle, pair_descriptors, parse_scene, region_geometry, serialize_scene
from ctxcat.spatial import (
    FuzzyParams,
    directional_memberships,
    near_membership,
    surrounded_membership,
)
from ctxcat.synth import GeneratorConfig, generate_corpus

from oracles import brute_descriptors, brute_geometry, random_instance, rect, scene_from_pixels

REFERENCE_PARAMS = FuzzyParams(alpha1=20, beta1=0.25, alpha2=10, beta2=0.6)
SEED = 2024
AMBIGUITY = 0.9
CORPUS_SIZE = 500
MARGIN = 0.10


@pytest.mark.criterion(1, "membership functions exact at sigmoid midpoints and axis angles (1e-12, < 1 s)")
def test_membership_exactness():
    start = time.perf_counter()
    assert abs(near_membership(0.25, REFERENCE_PARAMS) - 0.5) <= 1e-12
    assert abs(surrounded_membership(0.6, REFERENCE_PARAMS) - 0.5) <= 1e-12
    assert abs(directional_memberships(math.pi / 2)[0] - 1.0) <= 1e-12
    assert abs(directional_memberships(0.0)[2] - 1.0) <= 1e-12
    assert time.perf_counter() - start < 1.0


@pytest.mark.criterion(2, "directional identity and swap law on 10,000 angles (1e-12, < 1 s)")
def test_trigonometric_identities():
    rng = np.random.default_rng(20)
    thetas = rng.uniform(-math.pi, math.pi, 10_000)
    thetas[thetas == -math.pi] = math.pi
    start = time.perf_counter()
    for theta in thetas:
        theta = float(theta)
        above, below, beside = directional_memberships(theta)
        assert above == 0.0 or below == 0.0
        assert abs(max(above, below) + beside - 1.0) <= 1e-12
        a2, b2, s2 = directional_memberships(normalize_angle(theta + math.pi))
        assert abs(above - b2) <= 1e-12 and abs(below - a2) <= 1e-12 and abs(beside - s2) <= 1e-12
    assert time.perf_counter() - start < 1.0


def _direct_beliefs(ds):
    mu = []
    for d in ds:
        mu.append(1.0 if d >= 1 else 0.0 if d <= -1 else (1 + d) / 2)
    if sum(mu) != 0:
        return [m / sum(mu) for m in mu]
    inv = [1 / abs(d) for d in ds]
    return [v / sum(inv) for v in inv]


@pytest.mark.criterion(3, "fuzzy membership normalisation on 1,000 decision vectors and worked example (1e-9, < 1 s)")
def test_fuzzy_membership_contract():
    rng = random.Random(3)
    vectors = []
    for n in range(1000):
        dim = rng.randint(2, 10)
        if n % 4 == 0:
            vectors.append([rng.uniform(-6, -1) for _ in range(dim)])
        else:
            vectors.append([rng.uniform(-3, 3) for _ in range(dim)])
    start = time.perf_counter()
    fallbacks = 0
    for ds in vectors:
        beliefs = fuzzy_memberships(ds).beliefs
        assert all(0.0 <= b <= 1.0 for b in beliefs)
        assert abs(math.fsum(beliefs) - 1.0) <= 1e-9
        fallbacks += all(d <= -1 for d in ds)
    elapsed = time.perf_counter() - start
    assert fallbacks >= 250
    worked = fuzzy_memberships([2.0, -3.0, 0.0]).beliefs
    direct = _direct_beliefs([2.0, -3.0, 0.0])
    assert all(abs(a - b) <= 1e-9 for a, b in zip(worked, direct))
    assert all(abs(a - b) <= 1e-9 for a, b in zip(worked, (2 / 3, 0.0, 1 / 3)))
    assert elapsed < 1.0


@pytest.mark.criterion(4, "exhaustive <= ICM <= appearance energy and 1-opt on 200 random instances (< 30 s)")
def test_oracle_dominance():
    start = time.perf_counter()
    for seed in range(200):
        inst = random_instance(1000 + seed, max_regions=4, max_candidates=3)
        assert inst.k <= 4 and all(len(ls.candidates) <= 3 for ls in inst.labels)
        result = icm(inst)
        best = exhaustive_min(inst)
        start_energy = total_energy(inst, appearance_labels(inst))
        assert best.energy <= result.energy + 1e-12
        assert result.energy <= start_energy + 1e-12
        assert is_one_opt(inst, result.labels, tol=1e-12)
    assert time.perf_counter() - start < 30.0


@pytest.fixture(scope="module")
def corpus():
    return generate_corpus(GeneratorConfig(seed=SEED, scene_count=CORPUS_SIZE, ambiguity=AMBIGUITY))


@pytest.fixture(scope="module")
def experiment():
    config = ExperimentConfig(generator=GeneratorConfig(seed=SEED, scene_count=CORPUS_SIZE, ambiguity=AMBIGUITY))
    start = time.perf_counter()
    # regenerate inside the timed region: the criterion covers the full experiment
    result = run_experiment(config)
    return result, time.perf_counter() - start


@pytest.fixture(scope="module")
def trained(corpus):
    train, test = split(corpus)
    vocab = corpus[0].scene.vocabulary
    model = train_classifier([(r.features, r.truth) for s in train for r in s.scene.regions], vocab)
    context = train_context([s.scene for s in train])
    return model, context, test


@pytest.mark.criterion(5, "ICM sweep energies non-increasing, <= 100 sweeps, top-n = 1 keeps appearance labels")
def test_icm_monotone_and_terminates(trained):
    model, context, test = trained
    instances = [random_instance(5000 + s) for s in range(200)]
    for item in test[:100]:
        labels = region_labels(item.scene, model)
        instances.append(build_instance(item.scene, labels, context, Params()))
        single = build_instance(item.scene, labels, context, Params(top_n=1))
        assert icm(single).labels == appearance_labels(single)
    for inst in instances:
        result = icm(inst)
        assert result.sweeps <= 100
        for before, after in zip(result.history, result.history[1:]):
            assert after <= before + 1e-12
    for seed in range(50):
        inst = random_instance(7000 + seed, max_candidates=1)
        assert icm(inst).labels == appearance_labels(inst)


@pytest.mark.criterion(6, "context beats appearance-only by >= 10 points at ambiguity 0.9 on 500 scenes (< 60 s)")
def test_context_resolves_ambiguity(experiment, trained):
    result, elapsed = experiment
    top_n = Params().top_n
    base = result.accuracy("appearance-only")
    contextual = result.accuracy("icm", top_n)
    print(f"appearance-only {base:.4f}  icm(top_n={top_n}) {contextual:.4f}  "
          f"gain {100 * (contextual - base):.1f} pts  in {elapsed:.1f} s")
    assert contextual - base >= MARGIN
    assert elapsed < 60.0

    # the exhaustive oracle on a subsample confirms the gain is the energy's, not the solver's
    model, context, test = trained
    hits = {"appearance": 0, "icm": 0, "exhaustive": 0}
    total = 0
    for item in test[:60]:
        inst = build_instance(item.scene, region_labels(item.scene, model), context, Params())
        truth = [r.truth for r in item.scene.regions]
        ic, ex = icm(inst), exhaustive_min(inst)
        assert ex.energy <= ic.energy + 1e-12
        for name, labels in (("appearance", appearance_labels(inst)), ("icm", ic.labels), ("exhaustive", ex.labels)):
            hits[name] += sum(a == t for a, t in zip(labels, truth))
        total += len(truth)
    assert (hits["exhaustive"] - hits["appearance"]) / total >= MARGIN
    assert (hits["icm"] - hits["appearance"]) / total >= MARGIN


@pytest.mark.criterion(7, "accuracy at top-n = vocabulary >= top-n = 1; accuracy-vs-n CSV byte-identical across runs")
def test_top_n_plateau(experiment):
    result, _ = experiment
    vocab_size = len(result.config.generator.vocabulary)
    assert result.accuracy("icm", vocab_size) >= result.accuracy("icm", 1)
    again = run_experiment(result.config)
    assert comparison_csv(again) == comparison_csv(result)


@pytest.mark.criterion(8, "scene, model, context and prediction files round-trip byte-identically; render is deterministic")
def test_round_trips(trained):
    model, context, test = trained
    item = test[0]
    text = serialize_scene(item.scene)
    assert serialize_scene(parse_scene(text)) == text
    mtext = save_model(model)
    assert save_model(load_model(mtext)) == mtext
    ctext = save_context(context)
    assert save_context(load_context(ctext)) == ctext
    preds = infer(item.scene, model, context)
    ptext = serialize_predictions(preds)
    assert serialize_predictions(parse_predictions(ptext)) == ptext
    lookup = {name: n for n, name in enumerate(item.scene.vocabulary)}
    labeling = {rid: lookup[p.concept] for rid, p in preds.items()}
    assert render(item.scene, labeling) == render(parse_scene(text), dict(labeling))


@pytest.mark.criterion(9, "hand-derived geometry examples agree with pixel enumeration (1e-12)")
def test_geometry_oracles():
    # one-pixel pair in a 5x5 frame
    a, b = {(1, 1)}, {(1, 3)}
    scene = scene_from_pixels(5, 5, [a, b])
    got = pair_descriptors(scene, 0, 1)
    theta, d, rho = brute_descriptors(5, 5, a, b)
    assert abs(got.theta - theta) <= 1e-12 and abs(got.theta + math.pi / 2) <= 1e-12
    assert abs(got.d - d) <= 1e-12 and abs(got.d - 1 / math.sqrt(50)) <= 1e-12
    assert got.rho == rho == 0.0

    # one-pixel hole inside a 3x3 ring
    ring, hole = rect(1, 1, 3, 3) - {(2, 2)}, {(2, 2)}
    scene = scene_from_pixels(5, 5, [ring, hole])
    got = pair_descriptors(scene, 1, 0)
    _, _, rho = brute_descriptors(5, 5, hole, ring)
    assert abs(got.rho - rho) <= 1e-12 and abs(got.rho - 1.0) <= 1e-12

    # 2x2 block
    block = rect(1, 1, 2, 2)
    g = region_geometry(scene_from_pixels(5, 5, [block]), 0)
    centroid, boundary, perimeter = brute_geometry(block)
    assert g.perimeter == perimeter == 8
    assert abs(g.centroid[0] - centroid[0]) <= 1e-12 and abs(g.centroid[1] - 1.5) <= 1e-12
