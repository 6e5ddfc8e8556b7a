"""Deterministic synthetic scenes with ground truth and RGB rasters.

Layout: a sky band on top, and a water or grass band below it.  Water may
carry a boat strictly inside it.  Grass may carry a building straddling the
horizon, with a road strip touching the building's side.

Appearance ambiguity pulls the colour means of the confusable pairs
sky/water and grass/road towards each other (by ``ambiguity / 2`` of their
separation each) and lets a region borrow its partner's texture with
probability ``ambiguity / 2``.

Random numbers come from xorshift64* (Vigna 2016: shifts 12, 25, 27 and
multiplier 0x2545F4914F6CDD1D), seeded per scene through splitmix64
(increment 0x9E3779B97F4A7C15, multipliers 0xBF58476D1CE4E5B9 and
0x94D049BB133111EB).  Both are plain integer arithmetic, so a corpus is
identical on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from matplotlib.colors import hsv_to_rgb

from .appearance import extract_features
from .scene import Region, Scene, runs_from_mask

MASK64 = (1 << 64) - 1

DEFAULT_VOCABULARY = ("sky", "water", "grass", "boat", "building", "road")
SKY, WATER, GRASS, BOAT, BUILDING, ROAD = range(6)
CONFUSABLE = {SKY: WATER, WATER: SKY, GRASS: ROAD, ROAD: GRASS}

# per concept: (hue, saturation, value) mean, texture
APPEARANCE = {
    SKY: ((0.58, 0.30, 0.95), "flat"),
    WATER: ((0.62, 0.85, 0.45), "hstripes"),
    GRASS: ((0.30, 0.80, 0.55), "vstripes"),
    BOAT: ((0.00, 0.85, 0.80), "flat"),
    BUILDING: ((0.08, 0.55, 0.75), "grid"),
    ROAD: ((0.10, 0.08, 0.40), "flat"),
}
JITTER = (0.02, 0.08, 0.08)


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class XorShift64Star:
    def __init__(self, seed: int):
        self.state = splitmix64(seed & MASK64) or 1

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & MASK64

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        return lo + (hi - lo) * ((self.next_u64() >> 11) * 2.0 ** -53)

    def randint(self, lo: int, hi: int) -> int:
        """Integer in ``[lo, hi]``."""
        return lo + int(self.uniform() * (hi - lo + 1))

    def chance(self, p: float) -> bool:
        return self.uniform() < p


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    scene_count: int = 100
    width: int = 64
    height: int = 48
    vocabulary: tuple[str, ...] = DEFAULT_VOCABULARY
    ambiguity: float = 0.0

    def __post_init__(self):
        if self.scene_count < 1:
            raise ValueError("scene_count must be at least 1")
        if not 0.0 <= self.ambiguity <= 1.0:
            raise ValueError("ambiguity must lie in [0, 1]")
        if self.width < 48 or self.height < 36:
            raise ValueError("frames smaller than 48x36 cannot hold the layout")
        if len(self.vocabulary) != len(DEFAULT_VOCABULARY) or len(set(self.vocabulary)) != 6:
            raise ValueError("vocabulary must name six distinct concepts "
                             "(sky, water, grass, boat, building, road roles in order)")


@dataclass(frozen=True, eq=False)
class SyntheticScene:
    scene: Scene
    raster: np.ndarray


def scene_seed(seed: int, index: int) -> int:
    return splitmix64((seed * 0x9E3779B97F4A7C15 + index) & MASK64)


def _layout(rng: XorShift64Star, w: int, h: int) -> list[tuple[int, np.ndarray]]:
    """Concept index and boolean mask per region, in region-id order."""
    hz = rng.randint(h * 3 // 10, h * 9 // 20)
    rows = np.arange(h)[:, None]
    cols = np.arange(w)[None, :]
    sky = np.broadcast_to(rows < hz, (h, w)).copy()
    lower = ~sky
    parts = []
    if rng.chance(0.5):
        lower_concept = WATER
        if rng.chance(0.75):
            bw, bh = rng.randint(w // 8, w // 4), rng.randint(3, 6)
            bx = rng.randint(2, w - bw - 2)
            by = rng.randint(hz + 2, h - bh - 2)
            boat = (rows >= by) & (rows < by + bh) & (cols >= bx) & (cols < bx + bw)
            lower &= ~boat
            parts.append((BOAT, boat))
    else:
        lower_concept = GRASS
        if rng.chance(0.75):
            bw, bh = rng.randint(w // 6, w // 4), rng.randint(h // 6, h // 4)
            rw, rh = rng.randint(w // 5, w // 3), rng.randint(4, 7)
            bx = rng.randint(2, w - bw - rw - 2)
            building = (rows >= hz - bh) & (rows < hz + 3) & (cols >= bx) & (cols < bx + bw)
            sky &= ~building
            lower &= ~building
            parts.append((BUILDING, building))
            if rng.chance(0.75):
                road = (rows >= hz) & (rows < hz + rh) & (cols >= bx + bw) & (cols < bx + bw + rw)
                lower &= ~road
                parts.append((ROAD, road))
    return [(SKY, sky), (lower_concept, lower)] + parts


def _texture(kind: str, h: int, w: int) -> np.ndarray:
    rows = np.arange(h)[:, None]
    cols = np.arange(w)[None, :]
    mod = np.ones((h, w))
    if kind == "hstripes":
        mod = np.where((rows // 2) % 2 == 0, 1.0, 0.55) * mod
    elif kind == "vstripes":
        mod = np.where((cols // 2) % 2 == 0, 1.0, 0.55) * mod
    elif kind == "grid":
        mod = np.where((rows % 4 == 1) & (cols % 4 >= 1) & (cols % 4 <= 2), 0.45, 1.0) * mod
    return mod


def _appearance(concept: int, ambiguity: float, rng: XorShift64Star):
    mean, texture = APPEARANCE[concept]
    partner = CONFUSABLE.get(concept)
    if partner is not None:
        other, other_texture = APPEARANCE[partner]
        pull = ambiguity / 2.0
        mean = tuple(a + pull * (b - a) for a, b in zip(mean, other))
        if rng.chance(pull):
            texture = other_texture
    hsv = [min(1.0, max(0.0, m + rng.uniform(-j, j))) for m, j in zip(mean, JITTER)]
    hsv[0] %= 1.0
    return tuple(hsv), texture


def generate_scene(config: GeneratorConfig, index: int) -> SyntheticScene:
    rng = XorShift64Star(scene_seed(config.seed, index))
    w, h = config.width, config.height
    raster = np.zeros((h, w, 3), dtype=np.uint8)
    regions = []
    for rid, (concept, mask) in enumerate(_layout(rng, w, h)):
        (hue, sat, val), texture = _appearance(concept, config.ambiguity, rng)
        value = val * _texture(texture, h, w)
        hsv = np.stack([np.full((h, w), hue), np.full((h, w), sat), value], axis=-1)
        rgb = np.rint(hsv_to_rgb(hsv) * 255.0).astype(np.uint8)
        raster[mask] = rgb[mask]
        regions.append(Region(id=rid, runs=runs_from_mask(mask), truth=concept))
    scene = Scene(w, h, tuple(config.vocabulary), tuple(regions))
    with_features = [replace(r, features=extract_features(scene, r.id, raster)) for r in scene.regions]
    return SyntheticScene(scene.with_regions(with_features), raster)


def generate_corpus(config: GeneratorConfig, indices: Optional[range] = None) -> list[SyntheticScene]:
    indices = indices if indices is not None else range(config.scene_count)
    return [generate_scene(config, i) for i in indices]
