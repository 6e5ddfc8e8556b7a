"""Appearance-based initial labelling.

Region features are a 6x3x3 linear HSV colour histogram followed by an 8-bin
Sobel edge-direction histogram.  A one-vs-rest kernel regularized
least-squares classifier turns them into per-concept decision values, which
are mapped to fuzzy belief degrees.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from matplotlib.colors import rgb_to_hsv

from .scene import Scene

HUE_BINS, SAT_BINS, VAL_BINS = 6, 3, 3
COLOR_BINS = HUE_BINS * SAT_BINS * VAL_BINS
EDGE_BINS = 8
FEATURE_DIM = COLOR_BINS + EDGE_BINS

# 10% of the largest Sobel magnitude on an 8-bit grey image (4 * 255 per axis)
EDGE_THRESHOLD = 0.1 * 4 * 255 * math.sqrt(2)

DEFAULT_SIGMA = 2.0
DEFAULT_COST = 10.0


class FeatureError(ValueError):
    pass


@dataclass(frozen=True)
class FuzzyLabelSet:
    """Candidate concepts (best first) and beliefs over the full vocabulary."""

    candidates: tuple[int, ...]
    beliefs: tuple[float, ...]

    def belief(self, concept: int) -> float:
        return self.beliefs[concept]

    @property
    def best(self) -> int:
        return self.candidates[0]


# -- features ----------------------------------------------------------------

def color_histogram(rgb: np.ndarray) -> np.ndarray:
    """54-bin HSV histogram of an ``(n, 3)`` uint8 pixel list, L1-normalised."""
    hist = np.zeros(COLOR_BINS)
    if len(rgb) == 0:
        return hist
    hsv = rgb_to_hsv(np.asarray(rgb, dtype=np.float64) / 255.0)
    h = np.minimum((hsv[:, 0] * HUE_BINS).astype(int), HUE_BINS - 1)
    s = np.minimum((hsv[:, 1] * SAT_BINS).astype(int), SAT_BINS - 1)
    v = np.minimum((hsv[:, 2] * VAL_BINS).astype(int), VAL_BINS - 1)
    np.add.at(hist, (h * SAT_BINS + s) * VAL_BINS + v, 1.0)
    return hist / hist.sum()


def sobel(gray: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sobel ``(gx, gy)`` with edge replication at the frame border; y grows downward."""
    p = np.pad(gray.astype(np.float64), 1, mode="edge")
    h, w = gray.shape

    def at(dr, dc):
        return p[1 + dr:1 + dr + h, 1 + dc:1 + dc + w]

    gx = (at(-1, 1) + 2 * at(0, 1) + at(1, 1)) - (at(-1, -1) + 2 * at(0, -1) + at(1, -1))
    gy = (at(1, -1) + 2 * at(1, 0) + at(1, 1)) - (at(-1, -1) + 2 * at(-1, 0) + at(-1, 1))
    return gx, gy


def edge_histogram(gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    hist = np.zeros(EDGE_BINS)
    strong = np.hypot(gx, gy) > EDGE_THRESHOLD
    if not strong.any():
        return hist
    angle = np.arctan2(gy[strong], gx[strong])
    bins = np.floor((angle + math.pi) / (2 * math.pi / EDGE_BINS)).astype(int) % EDGE_BINS
    np.add.at(hist, bins, 1.0)
    return hist / hist.sum()


def extract_features(scene: Scene, region_id: int, pixels: Optional[np.ndarray] = None) -> tuple[float, ...]:
    region = scene.region(region_id)
    if region.features is not None:
        return region.features
    if pixels is None:
        raise FeatureError(f"region {region_id} has no stored features and no raster was given")
    pixels = np.asarray(pixels)
    if pixels.shape != (scene.height, scene.width, 3):
        raise FeatureError(
            f"raster is {pixels.shape}, scene needs ({scene.height}, {scene.width}, 3)")
    rows, cols = region.pixels
    gray = pixels.astype(np.float64) @ np.array([0.299, 0.587, 0.114])
    gx, gy = sobel(gray)
    feats = np.concatenate([
        color_histogram(pixels[rows, cols]),
        edge_histogram(gx[rows, cols], gy[rows, cols]),
    ])
    return tuple(float(v) for v in feats)


# -- classifier ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AppearanceModel:
    vocabulary: tuple[str, ...]
    sigma: float
    c: float
    points: np.ndarray       # (n, dim)
    coef: np.ndarray         # (n, n_concepts)
    bias: np.ndarray         # (n_concepts,)

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def rbf_kernel(a: np.ndarray, b: np.ndarray, sigma: float) -> np.ndarray:
    sq = (a * a).sum(1)[:, None] + (b * b).sum(1)[None, :] - 2.0 * a @ b.T
    return np.exp(-np.maximum(sq, 0.0) / (2.0 * sigma * sigma))


def train_classifier(
    examples: Iterable[tuple[Sequence[float], int]],
    vocabulary: Sequence[str],
    sigma: float = DEFAULT_SIGMA,
    c: float = DEFAULT_COST,
) -> AppearanceModel:
    """Fit one ridge-regularised RBF expansion per concept to +1/-1 targets.

    Each concept's bias is the mean of its targets; the dual coefficients solve
    ``(K + I/c) coef = y - bias``.
    """
    examples = list(examples)
    if not examples:
        raise ValueError("no training examples")
    dims = {len(v) for v, _ in examples}
    if len(dims) != 1:
        raise ValueError(f"inconsistent feature dimensions {sorted(dims)}")
    if sigma <= 0 or c <= 0:
        raise ValueError("sigma and c must be positive")
    X = np.array([v for v, _ in examples], dtype=np.float64)
    y = np.array([label for _, label in examples])
    missing = [vocabulary[l] for l in range(len(vocabulary)) if not (y == l).any()]
    if missing:
        raise ValueError(f"no training examples for concept(s): {', '.join(missing)}")
    targets = np.where(y[:, None] == np.arange(len(vocabulary))[None, :], 1.0, -1.0)
    bias = targets.mean(axis=0)
    system = rbf_kernel(X, X, sigma) + np.eye(len(X)) / c
    try:
        coef = np.linalg.solve(system, targets - bias)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"kernel system is singular: {exc}") from None
    return AppearanceModel(tuple(vocabulary), float(sigma), float(c), X, coef, bias)


def decision_values(model: AppearanceModel, v: Sequence[float]) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (model.dim,):
        raise ValueError(f"feature vector has shape {v.shape}, model expects ({model.dim},)")
    k = rbf_kernel(v[None, :], model.points, model.sigma)[0]
    return k @ model.coef + model.bias


def save_model(model: AppearanceModel) -> str:
    doc = {
        "vocabulary": list(model.vocabulary),
        "sigma": model.sigma,
        "c": model.c,
        "points": model.points.tolist(),
        "coef": model.coef.tolist(),
        "bias": model.bias.tolist(),
    }
    return _dump_rows(doc, ("points", "coef")) + "\n"


def load_model(document: str) -> AppearanceModel:
    doc = json.loads(document)
    try:
        vocab = tuple(doc["vocabulary"])
        points = np.array(doc["points"], dtype=np.float64).reshape(len(doc["points"]), -1)
        coef = np.array(doc["coef"], dtype=np.float64).reshape(len(points), len(vocab))
        bias = np.array(doc["bias"], dtype=np.float64).reshape(len(vocab))
        return AppearanceModel(vocab, float(doc["sigma"]), float(doc["c"]), points, coef, bias)
    except (KeyError, ValueError, TypeError) as exc:
        raise ValueError(f"malformed appearance model: {exc}") from None


def _dump_rows(doc: dict, matrix_keys: Sequence[str]) -> str:
    """JSON with one matrix row per line."""
    parts = []
    for key, value in doc.items():
        if key in matrix_keys:
            rows = ",\n  ".join(json.dumps(row) for row in value)
            parts.append(f"{json.dumps(key)}: [\n  {rows}\n]")
        else:
            parts.append(f"{json.dumps(key)}: {json.dumps(value)}")
    return "{\n" + ",\n".join(parts) + "\n}"


# -- fuzzy labels --------------------------------------------------------------

def clamp_membership(d: float) -> float:
    if d >= 1.0:
        return 1.0
    if d <= -1.0:
        return 0.0
    return (1.0 + d) / 2.0


def fuzzy_memberships(decisions: Sequence[float]) -> FuzzyLabelSet:
    decisions = [float(d) for d in decisions]
    if not decisions:
        raise ValueError("need at least one decision value")
    mu = [clamp_membership(d) for d in decisions]
    total = math.fsum(mu)
    if total != 0.0:
        beliefs = [m / total for m in mu]
    else:
        # every D <= -1 here, so no division by zero
        assert all(d != 0.0 for d in decisions)
        inv = [1.0 / abs(d) for d in decisions]
        norm = math.fsum(inv)
        beliefs = [x / norm for x in inv]
    order = sorted(range(len(beliefs)), key=lambda l: (-beliefs[l], l))
    return FuzzyLabelSet(tuple(order), tuple(beliefs))


def candidates(labels: FuzzyLabelSet, n: int) -> FuzzyLabelSet:
    if n < 1:
        raise ValueError("n must be at least 1")
    return FuzzyLabelSet(labels.candidates[:n], labels.beliefs)


def label_region(model: AppearanceModel, features: Sequence[float]) -> FuzzyLabelSet:
    return fuzzy_memberships(decision_values(model, features))
