"""Region-level categorisation accuracy."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence


@dataclass(frozen=True)
class EvalReport:
    vocabulary: tuple[str, ...]
    accuracy: float
    per_concept: dict[str, float]
    confusion: tuple[tuple[int, ...], ...]   # rows: truth, columns: prediction
    counts: dict[str, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def evaluate(
    predictions: Mapping[Hashable, int],
    truth: Mapping[Hashable, int],
    vocabulary: Sequence[str],
) -> EvalReport:
    if set(predictions) != set(truth):
        missing = set(truth) - set(predictions)
        extra = set(predictions) - set(truth)
        raise ValueError(f"region ids differ: {len(missing)} without prediction, "
                         f"{len(extra)} without ground truth")
    n = len(vocabulary)
    confusion = [[0] * n for _ in range(n)]
    for key, t in truth.items():
        confusion[t][predictions[key]] += 1
    counts = {vocabulary[l]: sum(confusion[l]) for l in range(n)}
    correct = sum(confusion[l][l] for l in range(n))
    total = len(truth)
    per_concept = {
        vocabulary[l]: confusion[l][l] / counts[vocabulary[l]]
        for l in range(n) if counts[vocabulary[l]]
    }
    return EvalReport(
        vocabulary=tuple(vocabulary),
        accuracy=correct / total if total else 0.0,
        per_concept=per_concept,
        confusion=tuple(tuple(row) for row in confusion),
        counts=counts,
    )


def report_csv(report: EvalReport) -> str:
    """One row per concept plus an ``ALL`` row; trailing columns are the confusion counts."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["concept", "regions", "correct", "accuracy", *(f"pred_{c}" for c in report.vocabulary)])
    for l, name in enumerate(report.vocabulary):
        n = report.counts[name]
        acc = report.per_concept.get(name)
        writer.writerow([name, n, report.confusion[l][l], "" if acc is None else repr(acc),
                         *report.confusion[l]])
    correct = sum(report.confusion[l][l] for l in range(len(report.vocabulary)))
    writer.writerow(["ALL", report.total, correct, repr(report.accuracy),
                     *(sum(col) for col in zip(*report.confusion))])
    return buf.getvalue()
