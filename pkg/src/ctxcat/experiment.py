"""Appearance-only versus contextual labelling on a synthetic corpus.

Even-indexed scenes train the appearance and context models, odd-indexed
scenes are the test set.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .appearance import DEFAULT_COST, DEFAULT_SIGMA, train_classifier
from .context import train_context
from .evaluate import EvalReport, evaluate
from .params import Params, ParamsError, params_from_mapping, parse_key_values
from .pipeline import build_instance, region_labels, solve
from .scene import all_pair_descriptors
from .synth import GeneratorConfig, SyntheticScene, generate_corpus

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExperimentConfig:
    generator: GeneratorConfig = GeneratorConfig()
    params: Params = Params()
    sigma: float = DEFAULT_SIGMA
    cost: float = DEFAULT_COST
    sweep_top_n: bool = True
    methods: tuple[str, ...] = ("appearance-only", "icm")


@dataclass(frozen=True)
class ResultRow:
    method: str
    top_n: int
    report: EvalReport


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list[ResultRow] = field(default_factory=list)

    def accuracy(self, method: str, top_n: Optional[int] = None) -> float:
        for row in self.rows:
            if row.method == method and (top_n is None or row.top_n == top_n):
                return row.report.accuracy
        raise KeyError((method, top_n))

    def curve(self, method: str = "icm") -> list[tuple[int, float]]:
        return [(r.top_n, r.report.accuracy) for r in self.rows if r.method == method]


def split(corpus: Sequence[SyntheticScene]) -> tuple[list, list]:
    train = [s for n, s in enumerate(corpus) if n % 2 == 0]
    test = [s for n, s in enumerate(corpus) if n % 2 == 1]
    if not train or not test:
        raise ValueError("corpus too small for a train/test split (need at least 2 scenes)")
    return train, test


def run_experiment(config: ExperimentConfig, corpus: Optional[Sequence[SyntheticScene]] = None) -> ExperimentResult:
    gen = config.generator
    corpus = corpus if corpus is not None else generate_corpus(gen)
    train, test = split(corpus)
    vocab = gen.vocabulary
    examples = [(r.features, r.truth) for s in train for r in s.scene.regions]
    model = train_classifier(examples, vocab, config.sigma, config.cost)
    context = train_context([s.scene for s in train], config.params.fuzzy)
    log.info("trained on %d scenes (%d regions)", len(train), len(examples))

    prepared = []
    truth = {}
    for n, s in enumerate(test):
        labels = region_labels(s.scene, model)
        prepared.append((n, s.scene, labels, all_pair_descriptors(s.scene)))
        for reg in s.scene.regions:
            truth[n, reg.id] = reg.truth

    if config.sweep_top_n:
        top_ns = list(range(1, len(vocab) + 1))
    else:
        top_ns = [config.params.top_n]
    result = ExperimentResult(config)
    for method in config.methods:
        for top_n in ([1] if method == "appearance-only" else top_ns):
            params = params_from_mapping({"top_n": top_n}, config.params)
            preds = {}
            for n, scene, labels, desc in prepared:
                instance = build_instance(scene, labels, context, params, desc)
                assignment = solve(instance, method, params.max_sweeps)
                for rid, c in zip(instance.region_ids, assignment.labels):
                    preds[n, rid] = c
            report = evaluate(preds, truth, vocab)
            log.info("%s top_n=%d accuracy=%.4f", method, top_n, report.accuracy)
            result.rows.append(ResultRow(method, top_n, report))
    return result


def comparison_csv(result: ExperimentResult) -> str:
    vocab = result.config.generator.vocabulary
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["method", "top_n", "accuracy", *vocab])
    for row in result.rows:
        per = row.report.per_concept
        writer.writerow([row.method, row.top_n, f"{row.report.accuracy:.6f}",
                         *(f"{per[c]:.6f}" if c in per else "" for c in vocab)])
    return buf.getvalue()


_GENERATOR_KEYS = {"seed": int, "count": int, "width": int, "height": int, "ambiguity": float}
_BOOL = {"true": True, "false": False, "1": True, "0": False, "yes": True, "no": False}


def load_experiment_config(text: str) -> ExperimentConfig:
    """``key = value`` config: generator keys, ``sigma``, ``cost``, ``sweep_top_n``, ``methods``
    (comma separated) and any run parameter."""
    values = parse_key_values(text)
    gen = {}
    for key, kind in _GENERATOR_KEYS.items():
        if key in values:
            try:
                gen["scene_count" if key == "count" else key] = kind(values.pop(key))
            except ValueError:
                raise ParamsError(f"{key}: not a valid {kind.__name__}") from None
    if "vocabulary" in values:
        gen["vocabulary"] = tuple(v.strip() for v in values.pop("vocabulary").split(","))
    extra = {}
    for key in ("sigma", "cost"):
        if key in values:
            try:
                extra[key] = float(values.pop(key))
            except ValueError:
                raise ParamsError(f"{key}: not a number") from None
    if "sweep_top_n" in values:
        flag = values.pop("sweep_top_n").lower()
        if flag not in _BOOL:
            raise ParamsError(f"sweep_top_n: expected true/false, got {flag!r}")
        extra["sweep_top_n"] = _BOOL[flag]
    if "methods" in values:
        extra["methods"] = tuple(m.strip() for m in values.pop("methods").split(","))
    try:
        generator = GeneratorConfig(**gen)
    except ValueError as exc:
        raise ParamsError(str(exc)) from None
    return ExperimentConfig(generator=generator, params=params_from_mapping(values), **extra)
