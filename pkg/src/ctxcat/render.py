"""Labelled-scene rendering to binary PPM."""

from __future__ import annotations

import colorsys
from typing import Mapping

import numpy as np

from .raster import encode_ppm
from .scene import Scene

PALETTE = (
    (135, 206, 235),
    (30, 90, 200),
    (60, 170, 60),
    (220, 40, 40),
    (150, 100, 60),
    (128, 128, 128),
    (240, 200, 40),
    (160, 60, 200),
    (40, 200, 200),
    (240, 130, 180),
    (250, 140, 30),
    (255, 255, 255),
)


def palette_color(index: int) -> tuple[int, int, int]:
    if index < len(PALETTE):
        return PALETTE[index]
    # golden-ratio hue walk past the fixed palette
    hue = (index * 0.618033988749895) % 1.0
    r, g, b = colorsys.hsv_to_rgb(hue, 0.7, 0.9)
    return (round(r * 255), round(g * 255), round(b * 255))


def render(scene: Scene, labeling: Mapping[int, int]) -> bytes:
    """PPM bytes colouring each region by its concept; unlabelled pixels are black."""
    missing = [r.id for r in scene.regions if r.id not in labeling]
    if missing:
        raise ValueError(f"no label for region(s) {missing}")
    image = np.zeros((scene.height, scene.width, 3), dtype=np.uint8)
    for reg in scene.regions:
        rows, cols = reg.pixels
        image[rows, cols] = palette_color(labeling[reg.id])
    return encode_ppm(image)
