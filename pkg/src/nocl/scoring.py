"""Score model responses against gold corpora: Accuracy and ROC_AUC.

Numeric scores come from the prediction file. When an AUC task record has
only text, the documented fallback maps yes -> 1.0, no -> 0.0, unknown ->
0.5. ROC_AUC uses average ranks for ties, which equals the fraction of
(positive, negative) pairs won with ties counting one half.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

import numpy as np

from .errors import MetricError, PredictionFormatError
from .taskgen import (
    EDGE_CHECK,
    GRAPH_CLS,
    LINK_PRED,
    NODE_CLS,
    NODE_COUNT,
    InstructionExample,
)

AUC_TASKS = (LINK_PRED, GRAPH_CLS)
ACCURACY_TASKS = (NODE_CLS, GRAPH_CLS, NODE_COUNT, EDGE_CHECK, LINK_PRED)

_WS_RE = re.compile(r"\s+")


@dataclass
class PredictionRecord:
    example_id: str
    response_text: str | None = None
    score: float | None = None

    def __post_init__(self):
        if self.response_text is None and self.score is None:
            raise PredictionFormatError(
                f"prediction '{self.example_id}' has neither response_text nor score"
            )


@dataclass
class MetricsReport:
    task: str
    n: int
    accuracy: float | None = None
    roc_auc: float | None = None
    unparsed: int = 0

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "n": self.n,
            "accuracy": self.accuracy,
            "roc_auc": self.roc_auc,
            "unparsed": self.unparsed,
        }


def normalize_response(text: str) -> str:
    """Trim, casefold, collapse whitespace, and drop one terminal period."""
    out = _WS_RE.sub(" ", text.strip()).casefold()
    if out.endswith("."):
        out = out[:-1]
    return out


def parse_link_response(text: str) -> str:
    """'yes' / 'no' / 'unknown' by normalized prefix ('nope' starts with 'no')."""
    norm = normalize_response(text)
    if norm.startswith("yes"):
        return "yes"
    if norm.startswith("no"):
        return "no"
    return "unknown"


def accuracy(
    preds: list[PredictionRecord],
    gold: list[InstructionExample],
    aliases: dict[str, str] | None = None,
    lenient_categories: list[str] | None = None,
) -> MetricsReport:
    """Exact normalized match against the gold response (or a label alias).

    ``aliases`` maps normalized response strings to gold labels. With
    ``lenient_categories``, a response containing exactly one category as a
    substring counts as naming that category (opt-in extension).
    """
    by_id = {ex.example_id: ex for ex in gold}
    missing = [p.example_id for p in preds if p.example_id not in by_id]
    if missing:
        raise PredictionFormatError(
            f"{len(missing)} predictions reference unknown example ids; "
            f"first offenders: {missing[:10]}"
        )
    aliases = aliases or {}
    correct = 0
    unparsed = 0
    task = by_id[preds[0].example_id].task if preds else ""
    for p in preds:
        ex = by_id[p.example_id]
        norm = normalize_response(p.response_text) if p.response_text else ""
        if not norm:
            unparsed += 1
            continue
        if norm == normalize_response(ex.response):
            correct += 1
            continue
        if aliases.get(norm) == ex.gold_label:
            correct += 1
            continue
        if lenient_categories:
            hits = [c for c in lenient_categories if normalize_response(c) in norm]
            if len(hits) == 1 and normalize_response(hits[0]) == normalize_response(ex.gold_label):
                correct += 1
    return MetricsReport(
        task=task,
        n=len(preds),
        accuracy=(correct / len(preds)) if preds else 0.0,
        unparsed=unparsed,
    )


def roc_auc(scores, labels) -> float:
    """Rank-statistic AUC with average ranks on tied scores.

    AUC = (R+ - P(P+1)/2) / (P*N) where R+ sums the (average) ranks of the
    positives: exactly the pairwise win fraction with half credit for ties.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be equal-length 1-d sequences")
    pos = int(labels.sum())
    neg = len(labels) - pos
    if pos == 0 or neg == 0:
        raise MetricError("ROC_AUC undefined: both classes must be present")

    order = np.argsort(scores, kind="mergesort")
    s = scores[order]
    boundaries = np.flatnonzero(s[1:] != s[:-1]) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [len(s)]))
    group_rank = (starts + ends + 1) / 2.0  # average of 1-based ranks in each tie group
    ranks = np.empty(len(s), dtype=np.float64)
    ranks[order] = np.repeat(group_rank, ends - starts)

    rank_pos = float(ranks[labels == 1].sum())
    return (rank_pos - pos * (pos + 1) / 2.0) / (pos * neg)


def read_predictions(path) -> list[PredictionRecord]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise PredictionFormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if "example_id" not in rec:
                raise PredictionFormatError(f"{path}:{lineno}: missing example_id")
            try:
                out.append(
                    PredictionRecord(
                        example_id=str(rec["example_id"]),
                        response_text=rec.get("response_text"),
                        score=None if rec.get("score") is None else float(rec["score"]),
                    )
                )
            except PredictionFormatError as exc:
                raise PredictionFormatError(f"{path}:{lineno}: {exc}") from exc
    return out


def _binary_truth(ex: InstructionExample) -> int:
    if ex.task == LINK_PRED:
        return 1 if ex.gold_label == "pos" else 0
    return 1 if normalize_response(ex.response) == "yes" else 0


def _fallback_score(p: PredictionRecord) -> float:
    if p.score is not None:
        return p.score
    verdict = parse_link_response(p.response_text or "")
    return {"yes": 1.0, "no": 0.0, "unknown": 0.5}[verdict]


def score_preds(
    preds: list[PredictionRecord],
    gold: list[InstructionExample],
    lenient_categories: list[str] | None = None,
) -> list[MetricsReport]:
    """Per-task reports: accuracy for every task, AUC where scores make sense."""
    if not preds:
        raise PredictionFormatError("prediction file contains no records")
    by_id = {ex.example_id: ex for ex in gold}
    missing = [p.example_id for p in preds if p.example_id not in by_id]
    if missing:
        raise PredictionFormatError(
            f"{len(missing)} predictions reference unknown example ids; "
            f"first offenders: {missing[:10]}"
        )
    by_task: dict[str, list[PredictionRecord]] = {}
    for p in preds:
        by_task.setdefault(by_id[p.example_id].task, []).append(p)

    reports = []
    for task in sorted(by_task):
        task_preds = by_task[task]
        report = accuracy(task_preds, gold, lenient_categories=lenient_categories)
        report.task = task
        if task == LINK_PRED:
            report.unparsed = sum(
                1 for p in task_preds
                if p.score is None and parse_link_response(p.response_text or "") == "unknown"
            )
        if task in AUC_TASKS:
            labels = [_binary_truth(by_id[p.example_id]) for p in task_preds]
            if 0 < sum(labels) < len(labels):
                report.roc_auc = roc_auc([_fallback_score(p) for p in task_preds], labels)
        reports.append(report)
    return reports


def score_run(pred_path, gold_path, lenient_categories=None) -> list[MetricsReport]:
    from .taskgen import read_corpus

    return score_preds(
        read_predictions(pred_path), read_corpus(gold_path), lenient_categories
    )


def reports_to_text(reports: list[MetricsReport]) -> str:
    lines = [f"{'task':<14} {'n':>6} {'accuracy':>9} {'roc_auc':>8} {'unparsed':>8}"]
    for r in reports:
        acc = f"{r.accuracy:.4f}" if r.accuracy is not None else "-"
        auc = f"{r.roc_auc:.4f}" if r.roc_auc is not None else "-"
        lines.append(f"{r.task:<14} {r.n:>6} {acc:>9} {auc:>8} {r.unparsed:>8}")
    return "\n".join(lines)


def reports_to_json(reports: list[MetricsReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=1)
