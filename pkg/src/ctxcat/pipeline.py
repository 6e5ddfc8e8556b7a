"""Glue from scenes and trained models to labelling instances and predictions."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

from .appearance import (
    AppearanceModel,
    FeatureError,
    FuzzyLabelSet,
    candidates,
    decision_values,
    fuzzy_memberships,
)
from .context import ContextModel
from .energy import (
    Assignment,
    LabelingInstance,
    appearance_only,
    exhaustive_min,
    icm,
)
from .params import Params
from .scene import Scene, all_pair_descriptors
from .spatial import relation_vector

METHODS = ("icm", "exhaustive", "appearance-only")


@dataclass(frozen=True)
class Prediction:
    concept: str
    belief: float
    final_energy: float


def region_labels(scene: Scene, model: Optional[AppearanceModel]) -> list[FuzzyLabelSet]:
    """Fuzzy labels per region from stored decision values, else from features and the model."""
    out = []
    for reg in scene.regions:
        if reg.decisions is not None:
            decisions = reg.decisions
            if len(decisions) != len(scene.vocabulary):
                raise FeatureError(f"region {reg.id}: {len(decisions)} decision values for "
                                   f"{len(scene.vocabulary)} concepts")
        elif reg.features is not None and model is not None:
            decisions = decision_values(model, reg.features)
        else:
            raise FeatureError(f"region {reg.id} has neither decision values nor features "
                               "usable with an appearance model")
        out.append(fuzzy_memberships(decisions))
    return out


def build_instance(
    scene: Scene,
    labels: Sequence[FuzzyLabelSet],
    context: ContextModel,
    params: Params = Params(),
    descriptors=None,
) -> LabelingInstance:
    if context.vocabulary != scene.vocabulary:
        raise ValueError("context model and scene use different vocabularies")
    descriptors = descriptors if descriptors is not None else all_pair_descriptors(scene)
    ids = [r.id for r in scene.regions]
    pos = {rid: n for n, rid in enumerate(ids)}
    relations = {(pos[a], pos[b]): relation_vector(d, params.fuzzy) for (a, b), d in descriptors.items()}
    return LabelingInstance(
        labels=tuple(candidates(ls, params.top_n) for ls in labels),
        relations=relations,
        context=context,
        params=params.energy,
        region_ids=tuple(ids),
    )


def solve(instance: LabelingInstance, method: str, max_sweeps: int = 100) -> Assignment:
    if method == "icm":
        return icm(instance, max_sweeps)
    if method == "exhaustive":
        return exhaustive_min(instance)
    if method == "appearance-only":
        return appearance_only(instance)
    raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


def predict(scene: Scene, instance: LabelingInstance, assignment: Assignment) -> dict[int, Prediction]:
    return {
        rid: Prediction(scene.vocabulary[c], instance.labels[n].belief(c), assignment.energy)
        for n, (rid, c) in enumerate(zip(instance.region_ids, assignment.labels))
    }


def infer(
    scene: Scene,
    appearance: Optional[AppearanceModel],
    context: ContextModel,
    params: Params = Params(),
    method: str = "icm",
) -> dict[int, Prediction]:
    instance = build_instance(scene, region_labels(scene, appearance), context, params)
    return predict(scene, instance, solve(instance, method, params.max_sweeps))


def serialize_predictions(predictions: dict[int, Prediction]) -> str:
    lines = [
        f'{json.dumps(str(rid))}: '
        + json.dumps({"concept": p.concept, "belief": p.belief, "final_energy": p.final_energy})
        for rid, p in sorted(predictions.items())
    ]
    return "{\n" + ",\n".join(lines) + "\n}\n" if lines else "{}\n"


def parse_predictions(document: str) -> dict[int, Prediction]:
    try:
        doc = json.loads(document)
        return {
            int(rid): Prediction(str(v["concept"]), float(v["belief"]), float(v["final_energy"]))
            for rid, v in doc.items()
        }
    except (json.JSONDecodeError, AttributeError, KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed predictions file: {exc}") from None
