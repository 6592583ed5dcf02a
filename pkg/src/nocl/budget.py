"""Token-budget accounting: concept placeholders versus full descriptions.

Concept mode counts a query as-is, with every <|NC|> placeholder worth one
token. Full-description mode substitutes each placeholder with the
referenced node's complete description before counting. The built-in
tokenizer counts maximal non-whitespace runs; a vocabulary file can be
loaded for greedy longest-match counting instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .describe import NodeDescription
from .descriptor import NC
from .errors import NoclError
from .taskgen import InstructionExample

CONCEPT_MODE = "concept"
FULL_MODE = "full_description"


class WhitespaceTokenizer:
    """count(s) = number of maximal non-whitespace runs."""

    name = "whitespace"

    def count_tokens(self, text: str) -> int:
        return len(text.split())


class VocabTokenizer:
    """Greedy longest-match against a fixed vocabulary.

    Whitespace separates matches and is not counted; a character with no
    vocabulary entry counts as one token on its own.
    """

    def __init__(self, vocab: list[str], name: str = "vocab"):
        self._vocab = {v for v in vocab if v}
        if not self._vocab:
            raise NoclError("vocabulary is empty")
        self._max_len = max(len(v) for v in self._vocab)
        self.name = name

    @classmethod
    def load(cls, path) -> "VocabTokenizer":
        with open(path, "r", encoding="utf-8") as fh:
            vocab = [line.rstrip("\n") for line in fh]
        return cls(vocab, name=f"vocab:{path}")

    def count_tokens(self, text: str) -> int:
        count = 0
        i = 0
        n = len(text)
        while i < n:
            if text[i].isspace():
                i += 1
                continue
            matched = 0
            for length in range(min(self._max_len, n - i), 0, -1):
                if text[i : i + length] in self._vocab:
                    matched = length
                    break
            count += 1
            i += matched if matched else 1
        return count


@dataclass
class BudgetStats:
    """Per (dataset, task) token accounting for concept vs full-description mode."""

    dataset: str
    task: str
    mode: str
    n_examples: int
    avg_question_tokens: float
    paired_avg_tokens: float
    reduction_ratio: float

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "task": self.task,
            "mode": self.mode,
            "n_examples": self.n_examples,
            "avg_question_tokens": self.avg_question_tokens,
            "paired_avg_tokens": self.paired_avg_tokens,
            "reduction_ratio": self.reduction_ratio,
        }


def _as_lookup(desc_store) -> dict[str, str]:
    if isinstance(desc_store, dict):
        return desc_store
    return {d.node_id: d.text for d in desc_store}


def count_question_tokens(
    example: InstructionExample,
    mode: str,
    tokenizer,
    desc_lookup=None,
) -> int:
    """Token count of one query under the given mode.

    The query is split at <|NC|> boundaries so a placeholder is always one
    token in concept mode and exactly its description's count in full mode,
    independent of the tokenizer's whitespace handling.
    """
    parts = example.query.split(NC)
    count = sum(tokenizer.count_tokens(part) for part in parts)
    refs = example.concept_refs
    if mode == CONCEPT_MODE:
        return count + len(refs)
    if mode != FULL_MODE:
        raise ValueError(f"unknown mode '{mode}'")
    lookup = _as_lookup(desc_lookup or {})
    for ref in refs:
        if ref not in lookup:
            raise NoclError(f"no description available for node '{ref}'")
        count += tokenizer.count_tokens(lookup[ref])
    return count


def dataset_stats(
    corpus: list[InstructionExample],
    tokenizer,
    desc_store,
) -> list[BudgetStats]:
    """One row per (dataset, task): averages in both modes and the reduction."""
    if not corpus:
        raise NoclError("corpus is empty")
    lookup = _as_lookup(desc_store)
    groups: dict[tuple[str, str], list[InstructionExample]] = {}
    for ex in corpus:
        groups.setdefault((ex.dataset, ex.task), []).append(ex)
    rows = []
    for (dataset, task) in sorted(groups):
        examples = groups[(dataset, task)]
        concept = [count_question_tokens(ex, CONCEPT_MODE, tokenizer) for ex in examples]
        full = [count_question_tokens(ex, FULL_MODE, tokenizer, lookup) for ex in examples]
        avg_concept = sum(concept) / len(examples)
        avg_full = sum(full) / len(examples)
        ratio = 1.0 - (avg_concept / avg_full) if avg_full > 0 else 0.0
        rows.append(
            BudgetStats(
                dataset=dataset,
                task=task,
                mode=CONCEPT_MODE,
                n_examples=len(examples),
                avg_question_tokens=avg_concept,
                paired_avg_tokens=avg_full,
                reduction_ratio=ratio,
            )
        )
    return rows


def stats_to_tsv(rows: list[BudgetStats]) -> str:
    header = "dataset\ttask\tmode\tn_examples\tavg_question_tokens\tpaired_avg_tokens\treduction_ratio"
    lines = [header]
    for r in rows:
        lines.append(
            f"{r.dataset}\t{r.task}\t{r.mode}\t{r.n_examples}"
            f"\t{r.avg_question_tokens:.3f}\t{r.paired_avg_tokens:.3f}\t{r.reduction_ratio:.4f}"
        )
    return "\n".join(lines)


def stats_to_json(rows: list[BudgetStats]) -> str:
    return json.dumps([r.to_dict() for r in rows], indent=1)
