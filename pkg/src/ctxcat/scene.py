"""Scenes, run-length encoded region masks and raw pair descriptors.

Pixel coordinates are ``(x, y) = (column, row)`` with ``y`` growing downward.
Masks are stored as row-major runs ``(row, start_col, run_len)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np


class SceneError(ValueError):
    """Base class for invalid scene documents."""


class MalformedSceneError(SceneError):
    pass


class OverlapError(SceneError):
    pass


class OutOfBoundsError(SceneError):
    pass


class EmptyRegionError(SceneError):
    pass


class UnknownRegionError(KeyError):
    pass


# 4-neighbourhood as (drow, dcol)
NEIGHBOURS = ((-1, 0), (1, 0), (0, -1), (0, 1))


@dataclass(frozen=True)
class Region:
    id: int
    runs: tuple[tuple[int, int, int], ...]
    truth: Optional[int] = None
    features: Optional[tuple[float, ...]] = None
    decisions: Optional[tuple[float, ...]] = None

    @cached_property
    def pixels(self) -> tuple[np.ndarray, np.ndarray]:
        """``(rows, cols)`` of every mask pixel, row-major."""
        rows = [np.full(n, r, dtype=np.int64) for r, _, n in self.runs]
        cols = [np.arange(c, c + n, dtype=np.int64) for _, c, n in self.runs]
        if not rows:
            return np.zeros(0, np.int64), np.zeros(0, np.int64)
        return np.concatenate(rows), np.concatenate(cols)

    @property
    def area(self) -> int:
        return sum(n for _, _, n in self.runs)


@dataclass(frozen=True)
class PairDescriptors:
    theta: float
    d: float
    rho: float


@dataclass(frozen=True)
class Geometry:
    centroid: tuple[float, float]
    boundary: frozenset[tuple[int, int]]
    perimeter: int


@dataclass(frozen=True)
class Scene:
    width: int
    height: int
    vocabulary: tuple[str, ...]
    regions: tuple[Region, ...] = field(default=())

    def __post_init__(self):
        validate_scene(self)

    @property
    def image_diagonal(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def k(self) -> int:
        return len(self.regions)

    @cached_property
    def _index(self) -> dict[int, int]:
        return {r.id: n for n, r in enumerate(self.regions)}

    def region(self, region_id: int) -> Region:
        try:
            return self.regions[self._index[region_id]]
        except KeyError:
            raise UnknownRegionError(f"no region with id {region_id}") from None

    def position(self, region_id: int) -> int:
        self.region(region_id)
        return self._index[region_id]

    @cached_property
    def label_map(self) -> np.ndarray:
        """``height x width`` array of region positions, -1 where unlabelled."""
        out = np.full((self.height, self.width), -1, dtype=np.int64)
        for n, reg in enumerate(self.regions):
            rows, cols = reg.pixels
            out[rows, cols] = n
        return out

    def mask(self, region_id: int) -> np.ndarray:
        return self.label_map == self.position(region_id)

    def with_regions(self, regions: Sequence[Region]) -> "Scene":
        return Scene(self.width, self.height, self.vocabulary, tuple(regions))


def validate_scene(scene: Scene) -> None:
    if scene.width < 1 or scene.height < 1:
        raise MalformedSceneError(f"frame must be at least 1x1, got {scene.width}x{scene.height}")
    if len(set(scene.vocabulary)) != len(scene.vocabulary):
        raise MalformedSceneError("vocabulary names must be unique")
    seen_ids = set()
    owner = np.full((scene.height, scene.width), -1, dtype=np.int64)
    for reg in scene.regions:
        if reg.id in seen_ids:
            raise MalformedSceneError(f"duplicate region id {reg.id}")
        seen_ids.add(reg.id)
        if not reg.runs or reg.area == 0:
            raise EmptyRegionError(f"region {reg.id} has an empty mask")
        prev_end = None
        for row, start, n in reg.runs:
            if n < 1:
                raise MalformedSceneError(f"region {reg.id}: run length must be positive")
            if not (0 <= row < scene.height and 0 <= start and start + n <= scene.width):
                raise OutOfBoundsError(
                    f"region {reg.id}: run ({row}, {start}, {n}) leaves the "
                    f"{scene.width}x{scene.height} frame")
            if prev_end is not None and (row, start) < prev_end:
                raise MalformedSceneError(
                    f"region {reg.id}: runs must be sorted and non-overlapping")
            prev_end = (row, start + n)
        if reg.truth is not None and not 0 <= reg.truth < len(scene.vocabulary):
            raise MalformedSceneError(f"region {reg.id}: truth index {reg.truth} not in vocabulary")
        rows, cols = reg.pixels
        taken = owner[rows, cols]
        if (taken >= 0).any():
            other = scene.regions[int(taken[taken >= 0][0])].id
            r, c = int(rows[taken >= 0][0]), int(cols[taken >= 0][0])
            raise OverlapError(f"regions {other} and {reg.id} overlap at pixel ({c}, {r})")
        owner[rows, cols] = len(seen_ids) - 1


def runs_from_mask(mask: np.ndarray) -> tuple[tuple[int, int, int], ...]:
    """Row-major run-length encoding of a boolean mask."""
    runs = []
    for row in range(mask.shape[0]):
        line = np.concatenate(([False], mask[row].astype(bool), [False]))
        edges = np.flatnonzero(line[1:] != line[:-1])
        for start, stop in zip(edges[::2], edges[1::2]):
            runs.append((row, int(start), int(stop - start)))
    return tuple(runs)


# -- serialization -----------------------------------------------------------

def parse_scene(document: str) -> Scene:
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise MalformedSceneError(f"scene is not valid JSON: {exc}") from None
    return scene_from_dict(doc)


def scene_from_dict(doc) -> Scene:
    if not isinstance(doc, dict):
        raise MalformedSceneError("scene document must be a JSON object")
    try:
        width, height = doc["width"], doc["height"]
        vocabulary = tuple(doc["vocabulary"])
        raw_regions = doc["regions"]
    except KeyError as exc:
        raise MalformedSceneError(f"scene document missing key {exc}") from None
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in (width, height)):
        raise MalformedSceneError("width and height must be integers")
    if not all(isinstance(v, str) for v in vocabulary):
        raise MalformedSceneError("vocabulary entries must be strings")
    if not isinstance(raw_regions, list):
        raise MalformedSceneError("regions must be a list")
    lookup = {name: n for n, name in enumerate(vocabulary)}
    regions = []
    for raw in raw_regions:
        if not isinstance(raw, dict) or "id" not in raw or "rle" not in raw:
            raise MalformedSceneError("each region needs 'id' and 'rle'")
        try:
            runs = tuple((int(r), int(c), int(n)) for r, c, n in raw["rle"])
        except (TypeError, ValueError):
            raise MalformedSceneError(f"region {raw['id']}: rle entries must be [row, col, len]") from None
        truth = raw.get("truth")
        if truth is not None:
            if truth not in lookup:
                raise MalformedSceneError(f"region {raw['id']}: truth {truth!r} not in vocabulary")
            truth = lookup[truth]
        regions.append(Region(
            id=int(raw["id"]),
            runs=runs,
            truth=truth,
            features=_floats(raw.get("features")),
            decisions=_floats(raw.get("decisions")),
        ))
    return Scene(width, height, vocabulary, tuple(regions))


def _floats(values):
    if values is None:
        return None
    try:
        return tuple(float(v) for v in values)
    except (TypeError, ValueError):
        raise MalformedSceneError("features/decisions must be lists of numbers") from None


def scene_to_dict(scene: Scene) -> dict:
    regions = []
    for reg in scene.regions:
        raw = {"id": reg.id, "rle": [list(run) for run in reg.runs]}
        if reg.truth is not None:
            raw["truth"] = scene.vocabulary[reg.truth]
        if reg.features is not None:
            raw["features"] = list(reg.features)
        if reg.decisions is not None:
            raw["decisions"] = list(reg.decisions)
        regions.append(raw)
    return {
        "width": scene.width,
        "height": scene.height,
        "vocabulary": list(scene.vocabulary),
        "regions": regions,
    }


def serialize_scene(scene: Scene) -> str:
    doc = scene_to_dict(scene)
    head = {k: v for k, v in doc.items() if k != "regions"}
    lines = [json.dumps(head)[:-1] + ', "regions": [']
    body = [json.dumps(r) for r in doc["regions"]]
    lines.append(",\n".join(body))
    lines.append("]}")
    return "\n".join(lines) + "\n"


# -- geometry ----------------------------------------------------------------

def _exposed(mask: np.ndarray) -> list[np.ndarray]:
    """Per direction, which mask pixels have that 4-neighbour outside the mask."""
    padded = np.pad(mask, 1, constant_values=False)
    h, w = mask.shape
    out = []
    for dr, dc in NEIGHBOURS:
        neighbour = padded[1 + dr:1 + dr + h, 1 + dc:1 + dc + w]
        out.append(mask & ~neighbour)
    return out


def region_geometry(scene: Scene, region_id: int) -> Geometry:
    reg = scene.region(region_id)
    rows, cols = reg.pixels
    mask = scene.mask(region_id)
    exposed = _exposed(mask)
    on_boundary = np.logical_or.reduce(exposed)
    br, bc = np.nonzero(on_boundary)
    return Geometry(
        centroid=(float(cols.mean()), float(rows.mean())),
        boundary=frozenset(zip(bc.tolist(), br.tolist())),
        perimeter=int(sum(int(e.sum()) for e in exposed)),
    )


def normalize_angle(theta: float) -> float:
    """Wrap into (-pi, pi]."""
    theta = math.remainder(theta, 2 * math.pi)
    if theta <= -math.pi:
        theta += 2 * math.pi
    return theta


def boundary_gap(a: np.ndarray, b: np.ndarray) -> float:
    """Smallest Euclidean gap between two sets of unit pixel squares.

    ``a`` and ``b`` are ``(n, 2)`` integer pixel coordinates.  Pixels sharing an
    edge or a corner are at gap 0.
    """
    best = math.inf
    step = max(1, 2_000_000 // max(len(b), 1))
    for lo in range(0, len(a), step):
        chunk = a[lo:lo + step]
        dx = np.maximum(np.abs(chunk[:, None, 0] - b[None, :, 0]) - 1, 0)
        dy = np.maximum(np.abs(chunk[:, None, 1] - b[None, :, 1]) - 1, 0)
        best = min(best, int((dx * dx + dy * dy).min()))
    return math.sqrt(best)


def pair_descriptors(scene: Scene, i: int, j: int) -> PairDescriptors:
    if i == j:
        raise ValueError("pair descriptors need two distinct regions")
    gi, gj = region_geometry(scene, i), region_geometry(scene, j)
    (xi, yi), (xj, yj) = gi.centroid, gj.centroid
    theta = normalize_angle(math.atan2(yi - yj, xj - xi))
    d = boundary_gap(np.array(sorted(gi.boundary)), np.array(sorted(gj.boundary)))
    return PairDescriptors(theta=theta, d=d / scene.image_diagonal, rho=_shared_ratio(scene, i, j, gi.perimeter))


def _shared_ratio(scene: Scene, i: int, j: int, perimeter: int) -> float:
    labels = np.pad(scene.label_map, 1, constant_values=-1)
    h, w = scene.height, scene.width
    mine = scene.mask(i)
    other = scene.position(j)
    shared = 0
    for dr, dc in NEIGHBOURS:
        neighbour = labels[1 + dr:1 + dr + h, 1 + dc:1 + dc + w]
        shared += int((mine & (neighbour == other)).sum())
    return shared / perimeter


def all_pair_descriptors(scene: Scene) -> dict[tuple[int, int], PairDescriptors]:
    """Descriptors for every ordered pair of distinct region ids."""
    geoms = {r.id: region_geometry(scene, r.id) for r in scene.regions}
    bounds = {rid: np.array(sorted(g.boundary)) for rid, g in geoms.items()}
    out = {}
    ids = [r.id for r in scene.regions]
    gaps = {}
    for a in ids:
        for b in ids:
            if a == b:
                continue
            key = (min(a, b), max(a, b))
            if key not in gaps:
                gaps[key] = boundary_gap(bounds[a], bounds[b]) / scene.image_diagonal
            (xi, yi), (xj, yj) = geoms[a].centroid, geoms[b].centroid
            out[a, b] = PairDescriptors(
                theta=normalize_angle(math.atan2(yi - yj, xj - xi)),
                d=gaps[key],
                rho=_shared_ratio(scene, a, b, geoms[a].perimeter),
            )
    return out
