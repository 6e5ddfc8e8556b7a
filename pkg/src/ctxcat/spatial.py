"""Fuzzy spatial relation memberships between ordered region pairs."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .scene import PairDescriptors

ABOVE, BELOW, BESIDE = "ABOVE", "BELOW", "BESIDE"
DIRECTIONS = (ABOVE, BELOW, BESIDE)


@dataclass(frozen=True)
class FuzzyParams:
    alpha1: float = 20.0
    beta1: float = 0.25
    alpha2: float = 10.0
    beta2: float = 0.6

    def __post_init__(self):
        if not (self.alpha1 > 0 and self.alpha2 > 0):
            raise ValueError("alpha1 and alpha2 must be positive")
        if not (0.0 <= self.beta1 <= 1.0 and 0.0 <= self.beta2 <= 1.0):
            raise ValueError("beta1 and beta2 must lie in [0, 1]")


@dataclass(frozen=True)
class RelationVector:
    mu_above: float
    mu_below: float
    mu_beside: float
    mu_near: float
    mu_sur: float
    dominant_direction: str
    descriptors: PairDescriptors

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.mu_above, self.mu_below, self.mu_beside, self.mu_near, self.mu_sur)


def directional_memberships(theta: float) -> tuple[float, float, float]:
    """``(mu_above, mu_below, mu_beside)`` for a centroid angle in (-pi, pi].

    Exactly on the horizontal axis (theta 0 or pi) both vertical memberships are 0.
    """
    s2 = math.sin(theta) ** 2
    c2 = math.cos(theta) ** 2
    above = s2 if 0.0 < theta < math.pi else 0.0
    below = s2 if -math.pi < theta < 0.0 else 0.0
    return above, below, c2


def _logistic(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def near_membership(d: float, params: FuzzyParams = FuzzyParams()) -> float:
    return _logistic(-params.alpha1 * (d - params.beta1))


def surrounded_membership(rho: float, params: FuzzyParams = FuzzyParams()) -> float:
    return _logistic(params.alpha2 * (rho - params.beta2))


def relation_vector(desc: PairDescriptors, params: FuzzyParams = FuzzyParams()) -> RelationVector:
    above, below, beside = directional_memberships(desc.theta)
    # max() returns the first maximal item, which gives the ABOVE < BELOW < BESIDE tie order
    dominant = max(zip((above, below, beside), DIRECTIONS), key=lambda p: p[0])[1]
    return RelationVector(
        mu_above=above,
        mu_below=below,
        mu_beside=beside,
        mu_near=near_membership(desc.d, params),
        mu_sur=surrounded_membership(desc.rho, params),
        dominant_direction=dominant,
        descriptors=desc,
    )
