"""Text-to-fact pipeline with a deterministic parser contract.

Sentences are chunked, mentions detected with a gazetteer (leftmost-longest,
case-insensitive, word-bounded), and relations generated by trigger rules
over typed mention pairs. Externally produced facts can be imported from
JSONL in the same shape, so downstream consumers never know which producer
emitted a fact. Reification turns each fact into an addressable statement
node carrying mentions, labels, types, evidence sentence and confidence.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import FactSchemaError
from .store import DEFAULT_BASE_NAMESPACE, Iri, Literal, StatementNode, Triple, statement_namespace
from .vocab import (
    CONFIDENCE,
    DOC_ID,
    DOC_YEAR,
    EVIDENCE_DOC,
    EVIDENCE_OFFSET,
    EVIDENCE_SENTENCE,
    OBJECT_MENTION,
    OBJECT_TYPE,
    RDF_OBJECT,
    RDF_PREDICATE,
    RDF_STATEMENT,
    RDF_SUBJECT,
    RDF_TYPE,
    RDFS_LABEL,
    STATEMENT_LINK,
    SUBJECT_MENTION,
    SUBJECT_TYPE,
    XSD_DECIMAL,
    XSD_INTEGER,
    doc_iri,
    wd,
    wdt,
)

_TOKEN_RE = re.compile(r"[0-9a-z]+")
_WORD_CHAR = re.compile(r"[0-9A-Za-z]")


@dataclass(frozen=True)
class Document:
    doc_id: str
    entity: str
    text: str
    year: Optional[int] = None


@dataclass(frozen=True)
class Sentence:
    doc_id: str
    start: int
    text: str


@dataclass(frozen=True)
class GazetteerEntry:
    surface_forms: tuple[str, ...]
    entity_id: str
    label: str
    type_id: str
    type_label: str


@dataclass(frozen=True)
class RelationRule:
    relation_id: str
    relation_label: str
    subject_type: str
    object_type: str
    trigger: tuple[str, ...]
    direction: str = "subject-first"
    confidence: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.confidence <= 1.0):
            raise ValueError(f"rule confidence must be in (0,1], got {self.confidence}")
        if not self.trigger:
            raise ValueError("rule trigger must be a non-empty token sequence")
        if self.direction not in ("subject-first", "object-first", "either"):
            raise ValueError(f"bad rule direction {self.direction!r}")


@dataclass(frozen=True)
class Mention:
    start: int
    end: int
    text: str
    entry: GazetteerEntry


@dataclass(frozen=True)
class EntityRef:
    mention: str
    label: str
    id: str
    type_id: str
    type_label: str


@dataclass(frozen=True)
class Evidence:
    doc_id: str
    offset: int
    sentence: str


@dataclass(frozen=True)
class ExtractedFact:
    subject: EntityRef
    relation_id: str
    relation_label: str
    object: EntityRef
    evidence: Evidence
    confidence: float


def tokenize(text: str) -> list[str]:
    """Lowercase tokens split on non-alphanumeric characters."""
    return _TOKEN_RE.findall(text.lower())


def load_gazetteer(path) -> list[GazetteerEntry]:
    with open(path, "r", encoding="utf-8") as fh:
        docs = json.load(fh)
    return [
        GazetteerEntry(
            surface_forms=tuple(d["surface_forms"]),
            entity_id=d["id"],
            label=d["label"],
            type_id=d["type"]["id"],
            type_label=d["type"]["label"],
        )
        for d in docs
    ]


def load_rules(path) -> list[RelationRule]:
    with open(path, "r", encoding="utf-8") as fh:
        docs = json.load(fh)
    return [
        RelationRule(
            relation_id=d["relation"]["id"],
            relation_label=d["relation"]["label"],
            subject_type=d["subject_type"],
            object_type=d["object_type"],
            trigger=tuple(tokenize(d["trigger"])),
            direction=d.get("direction", "subject-first"),
            confidence=d["confidence"],
        )
        for d in docs
    ]


# --- sentence chunking ------------------------------------------------------

def split_sentences(doc: Document, abbreviations: Iterable[str] = ()) -> list[Sentence]:
    """Split at '.', '!' or '?' followed by whitespace and an uppercase letter
    (or end of text); trailing abbreviation tokens suppress the split."""
    abbrevs = {a.lower() for a in abbreviations}
    text = doc.text
    boundaries = []
    for i, ch in enumerate(text):
        if ch not in ".!?":
            continue
        j = i + 1
        while j < len(text) and text[j].isspace():
            j += 1
        if j == len(text):
            continue  # end of text closes the last sentence anyway
        if j == i + 1 or not text[j].isupper():
            continue
        if ch == ".":
            word_start = i
            while word_start > 0 and not text[word_start - 1].isspace():
                word_start -= 1
            if text[word_start : i + 1].lower() in abbrevs:
                continue
        boundaries.append(i + 1)
    sentences = []
    prev = 0
    for boundary in boundaries + [len(text)]:
        chunk = text[prev:boundary]
        stripped = chunk.strip()
        if stripped:
            start = prev + chunk.index(stripped[0])
            sentences.append(Sentence(doc_id=doc.doc_id, start=start, text=text[start : start + len(stripped)]))
        prev = boundary
    return sentences


# --- mention detection ------------------------------------------------------

def _word_bounded(text: str, start: int, end: int) -> bool:
    if start > 0 and _WORD_CHAR.match(text[start - 1]):
        return False
    if end < len(text) and _WORD_CHAR.match(text[end]):
        return False
    return True


def find_mentions(sentence: Sentence, gazetteer: Iterable[GazetteerEntry]) -> list[Mention]:
    """Leftmost-longest, non-overlapping, case-insensitive matches on word
    boundaries. Offsets are relative to the sentence text."""
    forms: dict[str, GazetteerEntry] = {}
    for entry in gazetteer:
        for form in entry.surface_forms:
            key = form.lower()
            if key not in forms or entry.entity_id < forms[key].entity_id:
                forms[key] = entry
    ordered_forms = sorted(forms, key=len, reverse=True)
    lowered = sentence.text.lower()
    mentions = []
    pos = 0
    while pos < len(lowered):
        if not _WORD_CHAR.match(lowered[pos]) or (pos > 0 and _WORD_CHAR.match(lowered[pos - 1])):
            pos += 1
            continue
        hit = None
        for form in ordered_forms:
            end = pos + len(form)
            if lowered.startswith(form, pos) and _word_bounded(lowered, pos, end):
                hit = (form, end)
                break
        if hit is None:
            pos += 1
            continue
        form, end = hit
        mentions.append(Mention(start=pos, end=end, text=sentence.text[pos:end], entry=forms[form]))
        pos = end
    return mentions


# --- rule application -------------------------------------------------------

def _window_tokens(sentence_text: str, first: Mention, second: Mention) -> list[str]:
    # Tokens strictly between the mentions plus one flanking token on each side.
    between = tokenize(sentence_text[first.end : second.start])
    before = tokenize(sentence_text[: first.start])
    after = tokenize(sentence_text[second.end :])
    window = between
    if before:
        window = [before[-1]] + window
    if after:
        window = window + [after[0]]
    return window


def _contains_sequence(tokens: list[str], needle: tuple[str, ...]) -> bool:
    n = len(needle)
    return any(tuple(tokens[i : i + n]) == needle for i in range(len(tokens) - n + 1))


def _as_ref(mention: Mention) -> EntityRef:
    e = mention.entry
    return EntityRef(
        mention=mention.text,
        label=e.label,
        id=e.entity_id,
        type_id=e.type_id,
        type_label=e.type_label,
    )


def apply_rules(
    sentence: Sentence,
    mentions: list[Mention],
    rules: Iterable[RelationRule],
) -> list[ExtractedFact]:
    """Emit one fact per mention pair whose types and window match a rule;
    duplicate (subject, relation, object) facts keep the highest confidence."""
    facts: dict[tuple[str, str, str], ExtractedFact] = {}
    order: list[tuple[str, str, str]] = []
    for i, first in enumerate(mentions):
        for second in mentions[i + 1 :]:
            window = _window_tokens(sentence.text, first, second)
            for rule in rules:
                pairs = []
                if rule.direction in ("subject-first", "either"):
                    pairs.append((first, second))
                if rule.direction in ("object-first", "either"):
                    pairs.append((second, first))
                for subj, obj in pairs:
                    if subj.entry.type_id != rule.subject_type:
                        continue
                    if obj.entry.type_id != rule.object_type:
                        continue
                    if not _contains_sequence(window, rule.trigger):
                        continue
                    fact = ExtractedFact(
                        subject=_as_ref(subj),
                        relation_id=rule.relation_id,
                        relation_label=rule.relation_label,
                        object=_as_ref(obj),
                        evidence=Evidence(doc_id=sentence.doc_id, offset=sentence.start, sentence=sentence.text),
                        confidence=rule.confidence,
                    )
                    key = (fact.subject.id, fact.relation_id, fact.object.id)
                    if key not in facts:
                        facts[key] = fact
                        order.append(key)
                    elif rule.confidence > facts[key].confidence:
                        facts[key] = fact
    return [facts[key] for key in order]


def extract_document(
    doc: Document,
    gazetteer: Iterable[GazetteerEntry],
    rules: Iterable[RelationRule],
    abbreviations: Iterable[str] = (),
) -> list[ExtractedFact]:
    facts = []
    for sentence in split_sentences(doc, abbreviations):
        mentions = find_mentions(sentence, gazetteer)
        facts.extend(apply_rules(sentence, mentions, rules))
    return facts


# --- fact JSONL interchange -------------------------------------------------

def fact_to_dict(fact: ExtractedFact) -> dict:
    def ref(r: EntityRef) -> dict:
        return {
            "mention": r.mention,
            "label": r.label,
            "id": r.id,
            "type": {"id": r.type_id, "label": r.type_label},
        }

    return {
        "doc_id": fact.evidence.doc_id,
        "sentence": fact.evidence.sentence,
        "offset": fact.evidence.offset,
        "confidence": fact.confidence,
        "subject": ref(fact.subject),
        "relation": {"id": fact.relation_id, "label": fact.relation_label},
        "object": ref(fact.object),
    }


def _ref_from_dict(doc: dict, side: str, line: int) -> EntityRef:
    node = doc.get(side)
    if not isinstance(node, dict):
        raise FactSchemaError(f"missing {side!r} object", line=line)
    type_node = node.get("type")
    if not isinstance(type_node, dict):
        raise FactSchemaError(f"missing {side}.type", line=line)
    fields = {
        "mention": node.get("mention"),
        "label": node.get("label"),
        "id": node.get("id"),
        "type_id": type_node.get("id"),
        "type_label": type_node.get("label"),
    }
    for name, value in fields.items():
        if not value or not isinstance(value, str):
            raise FactSchemaError(f"{side}.{name} must be a non-empty string", line=line)
    return EntityRef(**fields)


def fact_from_dict(doc: dict, line: int = 0) -> ExtractedFact:
    for field_name in ("doc_id", "sentence"):
        if not doc.get(field_name) or not isinstance(doc[field_name], str):
            raise FactSchemaError(f"{field_name} must be a non-empty string", line=line)
    offset = doc.get("offset")
    if not isinstance(offset, int) or offset < 0:
        raise FactSchemaError("offset must be a non-negative integer", line=line)
    confidence = doc.get("confidence")
    if not isinstance(confidence, (int, float)) or not (0.0 < float(confidence) <= 1.0):
        raise FactSchemaError(f"confidence must be in (0,1], got {confidence!r}", line=line)
    relation = doc.get("relation")
    if not isinstance(relation, dict) or not relation.get("id") or not relation.get("label"):
        raise FactSchemaError("relation needs non-empty id and label", line=line)
    subject = _ref_from_dict(doc, "subject", line)
    obj = _ref_from_dict(doc, "object", line)
    sentence = doc["sentence"]
    for side, ref in (("subject", subject), ("object", obj)):
        if ref.mention.lower() not in sentence.lower():
            raise FactSchemaError(f"{side} mention {ref.mention!r} not in evidence sentence", line=line)
    return ExtractedFact(
        subject=subject,
        relation_id=relation["id"],
        relation_label=relation["label"],
        object=obj,
        evidence=Evidence(doc_id=doc["doc_id"], offset=offset, sentence=sentence),
        confidence=float(confidence),
    )


def import_external_facts(stream: Iterable[str]) -> list[ExtractedFact]:
    """Parse fact JSONL; each line must match the fact schema exactly."""
    facts = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FactSchemaError(f"invalid JSON: {exc}", line=lineno) from exc
        facts.append(fact_from_dict(doc, line=lineno))
    return facts


def export_facts_jsonl(facts: Iterable[ExtractedFact]) -> str:
    return "".join(json.dumps(fact_to_dict(f), sort_keys=True) + "\n" for f in facts)


# --- reification ------------------------------------------------------------

def format_confidence(value: float) -> str:
    text = repr(float(value))
    return text


def statement_id(fact: ExtractedFact) -> str:
    """Stable 128-bit hex id over (doc, offset, subject, relation, object)."""
    material = "\x1f".join(
        [
            fact.evidence.doc_id,
            str(fact.evidence.offset),
            fact.subject.id,
            fact.relation_id,
            fact.object.id,
        ]
    )
    return hashlib.blake2b(material.encode("utf-8"), digest_size=16).hexdigest()


def reify(
    fact: ExtractedFact,
    owner: Optional[Iri] = None,
    base: str = DEFAULT_BASE_NAMESPACE,
) -> list[Triple]:
    """Statement node plus its links, mentions, labels, types and evidence.

    Deterministic: the same fact always produces the same statement IRI, so
    re-reification is idempotent under the store's set semantics.
    """
    node = StatementNode(statement_namespace(base) + statement_id(fact))
    subj = wd(fact.subject.id)
    obj = wd(fact.object.id)
    rel = wdt(fact.relation_id)
    subj_type = wd(fact.subject.type_id)
    obj_type = wd(fact.object.type_id)
    triples = [
        Triple(node, RDF_TYPE, RDF_STATEMENT),
        Triple(node, RDF_SUBJECT, subj),
        Triple(node, RDF_PREDICATE, rel),
        Triple(node, RDF_OBJECT, obj),
        Triple(node, SUBJECT_MENTION, Literal(fact.subject.mention)),
        Triple(node, OBJECT_MENTION, Literal(fact.object.mention)),
        Triple(node, SUBJECT_TYPE, subj_type),
        Triple(node, OBJECT_TYPE, obj_type),
        Triple(node, EVIDENCE_SENTENCE, Literal(fact.evidence.sentence)),
        Triple(node, EVIDENCE_DOC, Literal(fact.evidence.doc_id)),
        Triple(node, EVIDENCE_OFFSET, Literal(str(fact.evidence.offset), datatype=XSD_INTEGER)),
        Triple(node, CONFIDENCE, Literal(format_confidence(fact.confidence), datatype=XSD_DECIMAL)),
        Triple(subj, RDFS_LABEL, Literal(fact.subject.label)),
        Triple(obj, RDFS_LABEL, Literal(fact.object.label)),
        Triple(subj, RDF_TYPE, subj_type),
        Triple(obj, RDF_TYPE, obj_type),
        Triple(subj_type, RDFS_LABEL, Literal(fact.subject.type_label)),
        Triple(obj_type, RDFS_LABEL, Literal(fact.object.type_label)),
        Triple(rel, RDFS_LABEL, Literal(fact.relation_label)),
    ]
    if owner is not None:
        triples.append(Triple(owner, STATEMENT_LINK, node))
    return triples


def document_triples(doc: Document, base: str = DEFAULT_BASE_NAMESPACE) -> list[Triple]:
    """Document metadata: id literal and publication year when known."""
    node = doc_iri(doc.doc_id, base)
    triples = [Triple(node, DOC_ID, Literal(doc.doc_id))]
    if doc.year is not None:
        triples.append(Triple(node, DOC_YEAR, Literal(str(doc.year), datatype=XSD_INTEGER)))
    return triples
