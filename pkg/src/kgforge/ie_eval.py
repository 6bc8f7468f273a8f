"""Micro-averaged P/R/F1 scorer for extraction output against gold annotations.

Five matching criteria over a shared greedy one-to-one assignment:
  MD    exact character span
  TYPE  span + type label
  EL    span + canonical entity label
  RN    (subject label, relation label, object label), types ignored
  REL   full quintuple including both type labels
Labels are compared case-insensitively after whitespace collapse. Each gold
item matches at most one prediction, greedily in document order, and exact
duplicate predictions are collapsed before scoring.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import EvaluationError
from .extraction import Document, ExtractedFact, GazetteerEntry, Mention, RelationRule, find_mentions, split_sentences

_WS = re.compile(r"\s+")

METRICS = ("MD", "TYPE", "EL", "RN", "REL")


def canon(label: str) -> str:
    return _WS.sub(" ", label.strip()).lower()


@dataclass(frozen=True)
class MentionAnnotation:
    doc_id: str
    start: int
    end: int
    entity_label: str
    type_label: str


@dataclass(frozen=True)
class FactAnnotation:
    doc_id: str
    subject_label: str
    subject_type: str
    relation_label: str
    object_label: str
    object_type: str


@dataclass
class GoldDocument:
    doc_id: str
    text: str = ""
    mentions: list[MentionAnnotation] = field(default_factory=list)
    facts: list[FactAnnotation] = field(default_factory=list)


@dataclass
class GoldCorpus:
    documents: dict[str, GoldDocument] = field(default_factory=dict)

    @property
    def doc_ids(self) -> list[str]:
        return list(self.documents)


@dataclass
class MetricCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> float:
        total = self.tp + self.fp
        return self.tp / total if total else 0.0

    @property
    def recall(self) -> float:
        total = self.tp + self.fn
        return self.tp / total if total else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r > 0 else 0.0


@dataclass
class MetricReport:
    md: MetricCounts
    type: MetricCounts
    el: MetricCounts
    rn: MetricCounts
    rel: MetricCounts

    def counts(self) -> dict[str, MetricCounts]:
        return {"MD": self.md, "TYPE": self.type, "EL": self.el, "RN": self.rn, "REL": self.rel}

    def as_dict(self) -> dict:
        out = {}
        for name, c in self.counts().items():
            out[name] = {
                "tp": c.tp,
                "fp": c.fp,
                "fn": c.fn,
                "precision": c.precision,
                "recall": c.recall,
                "f1": c.f1,
            }
        return out


def load_gold_corpus(path) -> GoldCorpus:
    """Read the gold JSONL: one document per line with mentions and facts."""
    corpus = GoldCorpus()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise EvaluationError(f"gold line {lineno}: invalid JSON: {exc}") from exc
            doc_id = doc.get("doc_id")
            if not doc_id:
                raise EvaluationError(f"gold line {lineno}: missing doc_id")
            gold_doc = GoldDocument(doc_id=doc_id, text=doc.get("text", ""))
            for m in doc.get("mentions", []):
                start, end = int(m["start"]), int(m["end"])
                if gold_doc.text and not (0 <= start < end <= len(gold_doc.text)):
                    raise EvaluationError(f"gold line {lineno}: span {start}..{end} outside document")
                gold_doc.mentions.append(
                    MentionAnnotation(doc_id, start, end, m["label"], m["type"])
                )
            for f in doc.get("facts", []):
                gold_doc.facts.append(
                    FactAnnotation(
                        doc_id=doc_id,
                        subject_label=f["subject"]["label"],
                        subject_type=f["subject"]["type"]["label"],
                        relation_label=f["relation"]["label"],
                        object_label=f["object"]["label"],
                        object_type=f["object"]["type"]["label"],
                    )
                )
            corpus.documents[doc_id] = gold_doc
    return corpus


def mention_annotations(doc_id: str, sentence_start: int, mentions: Iterable[Mention]) -> list[MentionAnnotation]:
    """Convert sentence-relative extractor mentions to document-absolute spans."""
    return [
        MentionAnnotation(
            doc_id=doc_id,
            start=sentence_start + m.start,
            end=sentence_start + m.end,
            entity_label=m.entry.label,
            type_label=m.entry.type_label,
        )
        for m in mentions
    ]


def fact_annotations(facts: Iterable[ExtractedFact]) -> list[FactAnnotation]:
    return [
        FactAnnotation(
            doc_id=f.evidence.doc_id,
            subject_label=f.subject.label,
            subject_type=f.subject.type_label,
            relation_label=f.relation_label,
            object_label=f.object.label,
            object_type=f.object.type_label,
        )
        for f in facts
    ]


def predict_corpus(
    corpus: GoldCorpus,
    gazetteer: Sequence[GazetteerEntry],
    rules: Sequence[RelationRule],
    abbreviations: Iterable[str] = (),
) -> tuple[list[MentionAnnotation], list[FactAnnotation]]:
    """Run the rule extractor over the gold documents' own texts."""
    from .extraction import apply_rules

    mentions: list[MentionAnnotation] = []
    facts: list[FactAnnotation] = []
    for doc_id, gold_doc in corpus.documents.items():
        document = Document(doc_id=doc_id, entity="urn:kg:eval", text=gold_doc.text)
        for s in split_sentences(document, abbreviations):
            found = find_mentions(s, gazetteer)
            mentions.extend(mention_annotations(doc_id, s.start, found))
            facts.extend(fact_annotations(apply_rules(s, found, rules)))
    return mentions, facts


def _mention_key(metric: str, m: MentionAnnotation):
    if metric == "MD":
        return (m.start, m.end)
    if metric == "TYPE":
        return (m.start, m.end, canon(m.type_label))
    return (m.start, m.end, canon(m.entity_label))


def _fact_key(metric: str, f: FactAnnotation):
    if metric == "RN":
        return (canon(f.subject_label), canon(f.relation_label), canon(f.object_label))
    return (
        canon(f.subject_label),
        canon(f.subject_type),
        canon(f.relation_label),
        canon(f.object_label),
        canon(f.object_type),
    )


def _greedy_count(gold_items: list, pred_items: list, key) -> MetricCounts:
    counts = MetricCounts()
    available = [key(p) for p in pred_items]
    used = [False] * len(available)
    for g in gold_items:
        target = key(g)
        for i, pk in enumerate(available):
            if not used[i] and pk == target:
                used[i] = True
                counts.tp += 1
                break
        else:
            counts.fn += 1
    counts.fp += used.count(False)
    return counts


def _dedup(items: Iterable) -> list:
    seen = set()
    out = []
    for item in items:
        if item not in seen:
            seen.add(item)
            out.append(item)
    return out


def score(
    gold: GoldCorpus,
    predicted_mentions: Iterable[MentionAnnotation],
    predicted_facts: Iterable[FactAnnotation],
) -> MetricReport:
    mentions_by_doc: dict[str, list[MentionAnnotation]] = {}
    for m in _dedup(predicted_mentions):
        if m.doc_id not in gold.documents:
            raise EvaluationError(f"prediction references unknown doc id {m.doc_id!r}")
        mentions_by_doc.setdefault(m.doc_id, []).append(m)
    facts_by_doc: dict[str, list[FactAnnotation]] = {}
    for f in _dedup(predicted_facts):
        if f.doc_id not in gold.documents:
            raise EvaluationError(f"prediction references unknown doc id {f.doc_id!r}")
        facts_by_doc.setdefault(f.doc_id, []).append(f)

    totals = {name: MetricCounts() for name in METRICS}
    for doc_id, gold_doc in gold.documents.items():
        preds_m = mentions_by_doc.get(doc_id, [])
        preds_f = facts_by_doc.get(doc_id, [])
        for metric in ("MD", "TYPE", "EL"):
            part = _greedy_count(gold_doc.mentions, preds_m, lambda m, _metric=metric: _mention_key(_metric, m))
            totals[metric].tp += part.tp
            totals[metric].fp += part.fp
            totals[metric].fn += part.fn
        for metric in ("RN", "REL"):
            part = _greedy_count(gold_doc.facts, preds_f, lambda f, _metric=metric: _fact_key(_metric, f))
            totals[metric].tp += part.tp
            totals[metric].fp += part.fp
            totals[metric].fn += part.fn
    return MetricReport(
        md=totals["MD"], type=totals["TYPE"], el=totals["EL"], rn=totals["RN"], rel=totals["REL"]
    )


def render_report(report: MetricReport) -> str:
    """Columns in percentage points, two decimals."""
    header = ["MD-F1", "TYPE-F1", "EL-F1", "RN-F1", "REL-P", "REL-R", "REL-F1"]
    values = [
        report.md.f1,
        report.type.f1,
        report.el.f1,
        report.rn.f1,
        report.rel.precision,
        report.rel.recall,
        report.rel.f1,
    ]
    cells = [f"{100 * v:.2f}" for v in values]
    widths = [max(len(h), len(c)) for h, c in zip(header, cells)]
    head = "  ".join(h.rjust(w) for h, w in zip(header, widths))
    row = "  ".join(c.rjust(w) for c, w in zip(cells, widths))
    return head + "\n" + row + "\n"
