"""Graded-relevance recommendation evaluation: P@K and MAP under three
binarization criteria (LOW/MEDIUM/HIGH) over NONE/LOW/MEDIUM/HIGH ratings.

AP uses the pooled-judging convention: the denominator is the number of
relevant items within the judged list, and users whose list contains no
relevant item contribute 0 to MAP.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .errors import EvaluationError

GRADES = ("NONE", "LOW", "MEDIUM", "HIGH")

CRITERIA: dict[str, frozenset[str]] = {
    "LOW": frozenset({"LOW", "MEDIUM", "HIGH"}),
    "MEDIUM": frozenset({"MEDIUM", "HIGH"}),
    "HIGH": frozenset({"HIGH"}),
}

DEFAULT_K = {"papers": 10, "projects": 10, "achievements": 5}
FALLBACK_K = 10


@dataclass(frozen=True)
class Judgment:
    user: str
    item: str
    category: str
    rank: int
    grade: str

    def __post_init__(self):
        if self.grade not in GRADES:
            raise EvaluationError(f"unknown grade {self.grade!r}")
        if self.rank < 1:
            raise EvaluationError(f"rank must be >= 1, got {self.rank}")


def precision_at_k(rels: Sequence[int], k: int) -> float:
    """Relevant fraction of the first k slots; short lists pad non-relevant."""
    if k < 1:
        raise EvaluationError("K must be >= 1")
    return sum(rels[:k]) / k


def average_precision(rels: Sequence[int]) -> float:
    relevant = sum(rels)
    if relevant == 0:
        return 0.0
    total = 0.0
    hits = 0
    for i, rel in enumerate(rels, start=1):
        if rel:
            hits += 1
            total += hits / i
    return total / relevant


@dataclass
class CategoryResult:
    category: str
    criterion: str
    map: float
    p_at_k: float
    k: int
    users: int

    def as_dict(self) -> dict:
        return {
            "category": self.category,
            "criterion": self.criterion,
            "map": self.map,
            "p_at_k": self.p_at_k,
            "k": self.k,
            "users": self.users,
        }


@dataclass
class EvalReport:
    results: list[CategoryResult]

    def lookup(self, category: str, criterion: str) -> CategoryResult:
        for result in self.results:
            if result.category == category and result.criterion == criterion:
                return result
        raise KeyError((category, criterion))

    def as_dict(self) -> dict:
        return {"results": [r.as_dict() for r in self.results]}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def _grouped_lists(judgments: Iterable[Judgment]) -> dict[str, dict[str, list[Judgment]]]:
    by_category: dict[str, dict[str, list[Judgment]]] = {}
    seen: set[tuple[str, str]] = set()
    for j in judgments:
        if (j.user, j.item) in seen:
            raise EvaluationError(f"duplicate judgment for user {j.user!r} item {j.item!r}")
        seen.add((j.user, j.item))
        by_category.setdefault(j.category, {}).setdefault(j.user, []).append(j)
    for category, users in by_category.items():
        for user, items in users.items():
            items.sort(key=lambda j: j.rank)
            ranks = [j.rank for j in items]
            if ranks != list(range(1, len(ranks) + 1)):
                raise EvaluationError(
                    f"ranks for user {user!r} in {category!r} must be contiguous from 1, got {ranks}"
                )
    return by_category


def evaluate(
    judgments: Iterable[Judgment],
    criterion: str,
    k_per_category: Optional[Mapping[str, int]] = None,
) -> list[CategoryResult]:
    """Binarize by criterion and average AP and P@K over each category's users."""
    if criterion not in CRITERIA:
        raise EvaluationError(f"unknown criterion {criterion!r}")
    relevant_grades = CRITERIA[criterion]
    ks = dict(DEFAULT_K)
    if k_per_category:
        ks.update(k_per_category)
    results = []
    for category, users in sorted(_grouped_lists(judgments).items()):
        k = ks.get(category, FALLBACK_K)
        ap_values = []
        p_values = []
        for _, items in sorted(users.items()):
            rels = [1 if j.grade in relevant_grades else 0 for j in items]
            ap_values.append(average_precision(rels))
            p_values.append(precision_at_k(rels, k))
        results.append(
            CategoryResult(
                category=category,
                criterion=criterion,
                map=sum(ap_values) / len(ap_values),
                p_at_k=sum(p_values) / len(p_values),
                k=k,
                users=len(ap_values),
            )
        )
    return results


def evaluate_all(
    judgments: Iterable[Judgment],
    k_per_category: Optional[Mapping[str, int]] = None,
    criteria: Sequence[str] = ("LOW", "MEDIUM", "HIGH"),
) -> EvalReport:
    judgments = list(judgments)
    results = []
    for criterion in criteria:
        results.extend(evaluate(judgments, criterion, k_per_category))
    return EvalReport(results=results)


def load_judgments_csv(path) -> list[Judgment]:
    """Read judgments from CSV with header user,item,category,rank,grade."""
    judgments = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"user", "item", "category", "rank", "grade"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise EvaluationError(f"judgments CSV needs columns {sorted(required)}")
        for row in reader:
            judgments.append(
                Judgment(
                    user=row["user"],
                    item=row["item"],
                    category=row["category"],
                    rank=int(row["rank"]),
                    grade=row["grade"].strip().upper(),
                )
            )
    return judgments


def render_report(report: EvalReport) -> str:
    """Table in the shape of the published user evaluation: one row per
    criterion, MAP and P@K columns per category."""
    categories = sorted({r.category for r in report.results})
    criteria = []
    for r in report.results:
        if r.criterion not in criteria:
            criteria.append(r.criterion)
    header = ["Criteria"]
    for category in categories:
        k = next(r.k for r in report.results if r.category == category)
        header += [f"{category} MAP", f"{category} P@{k}"]
    rows = []
    for criterion in criteria:
        row = [criterion]
        for category in categories:
            result = report.lookup(category, criterion)
            row += [f"{result.map:.2f}", f"{result.p_at_k:.2f}"]
        rows.append(row)
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) for i in range(len(header))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    return "\n".join(lines) + "\n"
