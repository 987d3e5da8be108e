"""Evaluation metrics for the two classification tasks.

Everything derives from a label-indexed confusion matrix: per-class
precision/recall/F1 (0/0 cases defined as 0), support-weighted and
macro aggregates, accuracy, and the two official task metrics — F1 of
the sarcastic class for the sarcasm task, and the macro F1 of the
positive and negative classes (F-PN, neutral excluded) for sentiment.

Reports render either as JSON (raw fractions, fixed keys) or as a text
table with percentage columns ordered C_E, A, P, R, M-F1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .dataset import TASK_LABELS, TASKS


@dataclass(frozen=True)
class ConfusionMatrix:
    """Square gold-by-predicted count matrix over an ordered label set."""

    labels: tuple[str, ...]
    counts: np.ndarray  # shape (n_labels, n_labels), counts[gold][pred]

    def __post_init__(self):
        n = len(self.labels)
        if self.counts.shape != (n, n):
            raise ValueError(
                f"counts shape {self.counts.shape} does not match {n} labels"
            )
        if (self.counts < 0).any():
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def index(self, label: str) -> int:
        return self.labels.index(label)


@dataclass(frozen=True)
class ClassScore:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    """All evaluation quantities for one task."""

    task: str
    official: float
    accuracy: float
    weighted: tuple[float, float, float]  # (P, R, F1)
    macro: tuple[float, float, float]
    per_class: Mapping[str, ClassScore]

    @property
    def macro_f1(self) -> float:
        return self.macro[2]


def confusion_matrix(
    gold: Sequence[str], pred: Sequence[str], labels: Sequence[str]
) -> ConfusionMatrix:
    """Count gold/pred pairs into a matrix over `labels` (order kept)."""
    if len(gold) != len(pred):
        raise ValueError(f"gold has {len(gold)} items, pred has {len(pred)}")
    if len(gold) == 0:
        raise ValueError("cannot build a confusion matrix from no pairs")
    index = {label: i for i, label in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for g, p in zip(gold, pred):
        if g not in index:
            raise ValueError(f"unknown gold label {g!r}")
        if p not in index:
            raise ValueError(f"unknown predicted label {p!r}")
        counts[index[g], index[p]] += 1
    return ConfusionMatrix(labels=tuple(labels), counts=counts)


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def per_class_prf(m: ConfusionMatrix) -> dict[str, ClassScore]:
    """Per-label precision, recall, F1 and support. 0/0 counts as 0."""
    scores = {}
    for i, label in enumerate(m.labels):
        tp = float(m.counts[i, i])
        fp = float(m.counts[:, i].sum() - m.counts[i, i])
        fn = float(m.counts[i, :].sum() - m.counts[i, i])
        precision = _safe_div(tp, tp + fp)
        recall = _safe_div(tp, tp + fn)
        f1 = _safe_div(2 * precision * recall, precision + recall)
        scores[label] = ClassScore(
            precision=precision,
            recall=recall,
            f1=f1,
            support=int(m.counts[i, :].sum()),
        )
    return scores


def aggregate(
    scores: Mapping[str, ClassScore], scheme: str
) -> tuple[float, float, float]:
    """Aggregate per-class scores: support-weighted or unweighted macro."""
    if scheme == "macro":
        n = len(scores)
        return (
            sum(s.precision for s in scores.values()) / n,
            sum(s.recall for s in scores.values()) / n,
            sum(s.f1 for s in scores.values()) / n,
        )
    if scheme == "weighted":
        total = sum(s.support for s in scores.values())
        if total == 0:
            raise ValueError("weighted aggregate needs at least one supported class")
        return (
            sum(s.precision * s.support for s in scores.values()) / total,
            sum(s.recall * s.support for s in scores.values()) / total,
            sum(s.f1 * s.support for s in scores.values()) / total,
        )
    raise ValueError(f"unknown aggregation scheme {scheme!r}")


def accuracy(m: ConfusionMatrix) -> float:
    """Fraction of pairs on the diagonal."""
    if m.total == 0:
        raise ValueError("cannot compute accuracy of an empty matrix")
    return float(np.trace(m.counts)) / m.total


def official_metric(m: ConfusionMatrix, task: str) -> float:
    """The official headline number for one task.

    sarcasm: F1 of the TRUE class over labels {FALSE, TRUE}.
    sentiment: mean of the POS and NEG F1 scores over {NEG, NEU, POS};
    the neutral class never influences the value.
    """
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}; expected one of {TASKS}")
    expected = set(TASK_LABELS[task])
    if set(m.labels) != expected:
        raise ValueError(
            f"task {task!r} needs label set {sorted(expected)}, got {list(m.labels)}"
        )
    scores = per_class_prf(m)
    if task == "sarcasm":
        return scores["TRUE"].f1
    return (scores["POS"].f1 + scores["NEG"].f1) / 2.0


def evaluation_report(m: ConfusionMatrix, task: str) -> EvalReport:
    """Bundle every metric for one task into a report."""
    scores = per_class_prf(m)
    return EvalReport(
        task=task,
        official=official_metric(m, task),
        accuracy=accuracy(m),
        weighted=aggregate(scores, "weighted"),
        macro=aggregate(scores, "macro"),
        per_class=scores,
    )


def report(rep: EvalReport, format: str = "table") -> str:
    """Render a report.

    "table" prints the headline row as percentages with two decimals in
    the column order C_E, A, P, R, M-F1 (P and R are the weighted
    aggregates), plus a per-class breakdown. "json" emits raw fractions
    under fixed keys: task, official, accuracy, weighted {p,r,f1},
    macro {p,r,f1}, macro_f1, per_class {label: {p,r,f1,support}}.
    """
    if format == "json":
        payload = {
            "task": rep.task,
            "official": rep.official,
            "accuracy": rep.accuracy,
            "weighted": {
                "p": rep.weighted[0],
                "r": rep.weighted[1],
                "f1": rep.weighted[2],
            },
            "macro": {"p": rep.macro[0], "r": rep.macro[1], "f1": rep.macro[2]},
            "macro_f1": rep.macro_f1,
            "per_class": {
                label: {
                    "p": s.precision,
                    "r": s.recall,
                    "f1": s.f1,
                    "support": s.support,
                }
                for label, s in rep.per_class.items()
            },
        }
        return json.dumps(payload, ensure_ascii=False, indent=2)
    if format == "table":
        def pct(v: float) -> str:
            return f"{100.0 * v:.2f}"

        lines = [
            f"task: {rep.task}",
            "C_E A P R M-F1",
            " ".join(
                pct(v)
                for v in (
                    rep.official,
                    rep.accuracy,
                    rep.weighted[0],
                    rep.weighted[1],
                    rep.macro_f1,
                )
            ),
            "",
            "class P R F1 support",
        ]
        for label, s in rep.per_class.items():
            lines.append(
                f"{label} {pct(s.precision)} {pct(s.recall)} {pct(s.f1)} {s.support}"
            )
        return "\n".join(lines)
    raise ValueError(f"unknown report format {format!r}")


def report_from_json(payload: str) -> EvalReport:
    """Parse a JSON report back into an EvalReport."""
    obj = json.loads(payload)
    return EvalReport(
        task=obj["task"],
        official=obj["official"],
        accuracy=obj["accuracy"],
        weighted=(obj["weighted"]["p"], obj["weighted"]["r"], obj["weighted"]["f1"]),
        macro=(obj["macro"]["p"], obj["macro"]["r"], obj["macro"]["f1"]),
        per_class={
            label: ClassScore(
                precision=s["p"], recall=s["r"], f1=s["f1"], support=s["support"]
            )
            for label, s in obj["per_class"].items()
        },
    )
