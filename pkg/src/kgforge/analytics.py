"""Type-hierarchy analytics, trend tables, infobox induction and evidence.

The hierarchy joins subclass edges induced from text (statements whose
relation is a configured subclass relation, P279 by default) with edges
imported from the background KB (rdfs:subClassOf). Cycles collapse into one
node labeled by the lexicographically least member id, leaving a DAG.
Entity counts are distinct: `direct` counts entities typed exactly at a
node, `transitive` the union over the node and all descendants.

Trends count distinct documents per year owning at least one reified fact
that mentions an entity; infoboxes instantiate the per-type schema induced
by relation frequency, attaching sentence evidence to induced objects and a
background marker to facts imported from the background KB.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import EvaluationError, UnknownIdError
from .store import GraphBuilder, GraphSnapshot, Iri, Literal, StatementNode, Term, Triple
from .vocab import (
    CONFIDENCE,
    DOC_ID,
    DOC_YEAR,
    EVIDENCE_DOC,
    EVIDENCE_SENTENCE,
    INSTANCE_OF,
    OBJECT_TYPE,
    RDF_PREDICATE,
    RDF_OBJECT,
    RDF_STATEMENT,
    RDF_SUBJECT,
    RDF_TYPE,
    RDFS_LABEL,
    RDFS_SUBCLASS_OF,
    SUBCLASS_OF,
    SUBJECT_TYPE,
    wd,
    wd_id,
    wdt,
)

DEFAULT_SUBCLASS_RELATIONS = (SUBCLASS_OF,)


# --- graph scanning helpers -------------------------------------------------

@dataclass(frozen=True)
class StatementView:
    """Flat view of one reified statement."""

    statement: StatementNode
    subject_id: str
    relation_id: str
    object_id: str
    subject_type: str
    object_type: str
    sentence: str
    doc_id: str
    confidence: float


def _first_lexical(kg: GraphSnapshot, subject: Term, predicate: Iri) -> Optional[str]:
    for obj in kg.objects(subject, predicate):
        if isinstance(obj, Literal):
            return obj.lexical
    return None


def _first_id(kg: GraphSnapshot, subject: Term, predicate: Iri) -> Optional[str]:
    for obj in kg.objects(subject, predicate):
        if isinstance(obj, Iri):
            return wd_id(obj.value)
    return None


def iter_statements(kg: GraphSnapshot) -> list[StatementView]:
    views = []
    for node in kg.subjects(RDF_TYPE, RDF_STATEMENT):
        if not isinstance(node, StatementNode):
            continue
        subject_id = _first_id(kg, node, RDF_SUBJECT)
        relation_id = _first_id(kg, node, RDF_PREDICATE)
        object_id = _first_id(kg, node, RDF_OBJECT)
        if subject_id is None or relation_id is None or object_id is None:
            continue
        confidence = _first_lexical(kg, node, CONFIDENCE)
        views.append(
            StatementView(
                statement=node,
                subject_id=subject_id,
                relation_id=relation_id,
                object_id=object_id,
                subject_type=_first_id(kg, node, SUBJECT_TYPE) or "",
                object_type=_first_id(kg, node, OBJECT_TYPE) or "",
                sentence=_first_lexical(kg, node, EVIDENCE_SENTENCE) or "",
                doc_id=_first_lexical(kg, node, EVIDENCE_DOC) or "",
                confidence=float(confidence) if confidence else 1.0,
            )
        )
    return views


def label_of(kg: GraphSnapshot, entity_id: str) -> str:
    label = _first_lexical(kg, wd(entity_id), RDFS_LABEL)
    if label is None:
        label = _first_lexical(kg, wdt(entity_id), RDFS_LABEL)
    return label if label is not None else entity_id


# --- background KB import ---------------------------------------------------

def import_background_kb(lines: Iterable[str], builder: GraphBuilder) -> int:
    """Load labeled background triples; P31 becomes rdf:type and P279
    rdfs:subClassOf so typing and taxonomy join the induced graph."""
    added = 0
    for raw in lines:
        line = raw.strip()
        if not line:
            continue
        doc = json.loads(line)
        s = wd(doc["subject"]["id"])
        o = wd(doc["object"]["id"])
        relation_id = doc["relation"]["id"]
        if relation_id == INSTANCE_OF:
            predicate = RDF_TYPE
        elif relation_id == SUBCLASS_OF:
            predicate = RDFS_SUBCLASS_OF
        else:
            predicate = wdt(relation_id)
            builder.insert(Triple(predicate, RDFS_LABEL, Literal(doc["relation"]["label"])))
        builder.insert(Triple(s, predicate, o))
        builder.insert(Triple(s, RDFS_LABEL, Literal(doc["subject"]["label"])))
        builder.insert(Triple(o, RDFS_LABEL, Literal(doc["object"]["label"])))
        added += 1
    return added


# --- hierarchy --------------------------------------------------------------

@dataclass
class TypeNode:
    node_id: str
    members: frozenset[str]
    label: str
    parents: set[str] = field(default_factory=set)
    children: set[str] = field(default_factory=set)


@dataclass
class TypeHierarchy:
    nodes: dict[str, TypeNode]
    node_of: dict[str, str]

    def node(self, type_id: str) -> TypeNode:
        if type_id in self.node_of:
            return self.nodes[self.node_of[type_id]]
        raise UnknownIdError(f"unknown type {type_id!r}")

    def descendants(self, type_id: str) -> set[str]:
        """Node ids strictly below the given type."""
        start = self.node(type_id).node_id
        seen: set[str] = set()
        stack = list(self.nodes[start].children)
        while stack:
            node_id = stack.pop()
            if node_id in seen:
                continue
            seen.add(node_id)
            stack.extend(self.nodes[node_id].children)
        return seen


def _tarjan_scc(vertices: list[str], edges: dict[str, set[str]]) -> list[list[str]]:
    index_of: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    components: list[list[str]] = []
    counter = 0

    for root in vertices:
        if root in index_of:
            continue
        work = [(root, iter(sorted(edges.get(root, ()))))]
        index_of[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            vertex, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index_of:
                    index_of[nxt] = lowlink[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(sorted(edges.get(nxt, ())))))
                    advanced = True
                    break
                if nxt in on_stack:
                    lowlink[vertex] = min(lowlink[vertex], index_of[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[vertex])
            if lowlink[vertex] == index_of[vertex]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.remove(member)
                    component.append(member)
                    if member == vertex:
                        break
                components.append(sorted(component))
    return components


def build_hierarchy(
    kg: GraphSnapshot,
    subclass_relations: Iterable[str] = DEFAULT_SUBCLASS_RELATIONS,
) -> TypeHierarchy:
    subclass_set = set(subclass_relations)
    type_ids: set[str] = set()
    edges: list[tuple[str, str]] = []
    for view in iter_statements(kg):
        if view.subject_type:
            type_ids.add(view.subject_type)
        if view.object_type:
            type_ids.add(view.object_type)
        if view.relation_id in subclass_set:
            edges.append((view.subject_id, view.object_id))
    for t in kg.match(None, RDFS_SUBCLASS_OF, None):
        if isinstance(t.subject, Iri) and isinstance(t.object, Iri):
            edges.append((wd_id(t.subject.value), wd_id(t.object.value)))
    vertices = sorted(type_ids | {v for e in edges for v in e})
    upward: dict[str, set[str]] = {}
    for child, parent in edges:
        upward.setdefault(child, set()).add(parent)
    components = _tarjan_scc(vertices, upward)
    node_of: dict[str, str] = {}
    nodes: dict[str, TypeNode] = {}
    for component in components:
        node_id = component[0]  # lexicographically least member
        members = frozenset(component)
        for member in component:
            node_of[member] = node_id
        nodes[node_id] = TypeNode(node_id=node_id, members=members, label=label_of(kg, node_id))
    for child, parent in edges:
        child_node, parent_node = node_of[child], node_of[parent]
        if child_node != parent_node:
            nodes[child_node].parents.add(parent_node)
            nodes[parent_node].children.add(child_node)
    return TypeHierarchy(nodes=nodes, node_of=node_of)


# --- stats ------------------------------------------------------------------

def _instances_of_members(kg: GraphSnapshot, members: Iterable[str]) -> set[str]:
    found: set[str] = set()
    for member in members:
        for subject in kg.subjects(RDF_TYPE, wd(member)):
            if isinstance(subject, Iri):
                found.add(wd_id(subject.value))
    return found


@dataclass(frozen=True)
class TypeStats:
    type_id: str
    label: str
    direct_entities: int
    transitive_entities: int
    statements: int

    def as_dict(self) -> dict:
        return {
            "id": self.type_id,
            "label": self.label,
            "direct": self.direct_entities,
            "transitive": self.transitive_entities,
            "statements": self.statements,
        }


def type_stats(hierarchy: TypeHierarchy, kg: GraphSnapshot, type_id: str) -> TypeStats:
    node = hierarchy.node(type_id)
    direct = _instances_of_members(kg, node.members)
    transitive = set(direct)
    for descendant in hierarchy.descendants(type_id):
        transitive |= _instances_of_members(kg, hierarchy.nodes[descendant].members)
    statements = sum(
        1
        for view in iter_statements(kg)
        if view.subject_id in transitive or view.object_id in transitive
    )
    return TypeStats(
        type_id=node.node_id,
        label=node.label,
        direct_entities=len(direct),
        transitive_entities=len(transitive),
        statements=statements,
    )


def _ranked(stats: Iterable[TypeStats]) -> list[TypeStats]:
    return sorted(stats, key=lambda s: (-s.transitive_entities, s.type_id))


def top_types(hierarchy: TypeHierarchy, kg: GraphSnapshot, n: int) -> list[TypeStats]:
    ranked = _ranked(type_stats(hierarchy, kg, node_id) for node_id in hierarchy.nodes)
    return ranked[:n] if n >= 0 else ranked


def children_sorted(hierarchy: TypeHierarchy, kg: GraphSnapshot, type_id: str) -> list[TypeStats]:
    node = hierarchy.node(type_id)
    return _ranked(type_stats(hierarchy, kg, child) for child in node.children)


# --- trends -------------------------------------------------------------------

@dataclass(frozen=True)
class TrendRow:
    entity_id: str
    label: str
    cells: dict[int, float]
    total: int

    def as_dict(self) -> dict:
        return {
            "id": self.entity_id,
            "label": self.label,
            "cells": {str(year): pct for year, pct in self.cells.items()},
            "total": self.total,
        }


@dataclass(frozen=True)
class TrendTable:
    type_id: str
    years: list[int]
    rows: list[TrendRow]

    def as_dict(self) -> dict:
        return {"type": self.type_id, "years": self.years, "rows": [r.as_dict() for r in self.rows]}


def _doc_years(kg: GraphSnapshot) -> dict[str, int]:
    years: dict[str, int] = {}
    for t in kg.match(None, DOC_ID, None):
        if not isinstance(t.object, Literal):
            continue
        year = _first_lexical(kg, t.subject, DOC_YEAR)
        if year is not None:
            years[t.object.lexical] = int(year)
    return years


def trend_table(
    hierarchy: TypeHierarchy,
    kg: GraphSnapshot,
    type_id: str,
    year_from: int,
    year_to: int,
) -> TrendTable:
    """Per-entity yearly document percentages for a type's transitive instances."""
    if year_from > year_to:
        raise EvaluationError(f"empty year range {year_from}..{year_to}")
    node = hierarchy.node(type_id)
    entities = _instances_of_members(kg, node.members)
    for descendant in hierarchy.descendants(type_id):
        entities |= _instances_of_members(kg, hierarchy.nodes[descendant].members)
    doc_years = _doc_years(kg)
    years = list(range(year_from, year_to + 1))
    docs_per_entity_year: dict[str, dict[int, set[str]]] = {}
    for view in iter_statements(kg):
        year = doc_years.get(view.doc_id)
        if year is None or not (year_from <= year <= year_to):
            continue
        for entity_id in (view.subject_id, view.object_id):
            if entity_id in entities:
                docs_per_entity_year.setdefault(entity_id, {}).setdefault(year, set()).add(view.doc_id)
    rows = []
    for entity_id, per_year in docs_per_entity_year.items():
        counts = {year: len(docs) for year, docs in per_year.items()}
        total = sum(counts.values())
        if total == 0:
            continue
        cells = {year: round(100.0 * counts.get(year, 0) / total, 1) for year in years}
        rows.append(TrendRow(entity_id=entity_id, label=label_of(kg, entity_id), cells=cells, total=total))
    rows.sort(key=lambda r: (-r.total, r.entity_id))
    return TrendTable(type_id=node.node_id, years=years, rows=rows)


# --- infobox ------------------------------------------------------------------

@dataclass(frozen=True)
class SchemaEntry:
    relation_id: str
    label: str
    frequency: int

    def as_dict(self) -> dict:
        return {"id": self.relation_id, "label": self.label, "frequency": self.frequency}


@dataclass(frozen=True)
class InfoboxSchema:
    type_id: str
    relations: list[SchemaEntry]

    def as_dict(self) -> dict:
        return {"type": self.type_id, "relations": [r.as_dict() for r in self.relations]}


def induce_schema(
    hierarchy: TypeHierarchy,
    kg: GraphSnapshot,
    type_id: str,
    n: int = 10,
) -> InfoboxSchema:
    """Most frequent relations among facts whose subject has the type (or a
    descendant type)."""
    node = hierarchy.node(type_id)
    member_ids = set(node.members)
    for descendant in hierarchy.descendants(type_id):
        member_ids |= hierarchy.nodes[descendant].members
    counts: dict[str, int] = {}
    for view in iter_statements(kg):
        if view.subject_type in member_ids:
            counts[view.relation_id] = counts.get(view.relation_id, 0) + 1
    ranked = sorted(counts.items(), key=lambda pair: (-pair[1], pair[0]))[:n]
    return InfoboxSchema(
        type_id=node.node_id,
        relations=[
            SchemaEntry(relation_id=rid, label=label_of(kg, rid), frequency=freq)
            for rid, freq in ranked
        ],
    )


@dataclass(frozen=True)
class EvidenceRecord:
    sentence: str
    doc_id: str
    confidence: float

    def as_dict(self) -> dict:
        return {"kind": "evidence", "sentence": self.sentence, "doc": self.doc_id, "confidence": self.confidence}


BACKGROUND_PROVENANCE = {"kind": "background"}


@dataclass(frozen=True)
class InfoboxObject:
    object_id: str
    label: str
    provenance: tuple[dict, ...]

    def as_dict(self) -> dict:
        return {"id": self.object_id, "label": self.label, "provenance": list(self.provenance)}


@dataclass(frozen=True)
class InfoboxRow:
    relation_id: str
    relation_label: str
    objects: list[InfoboxObject]

    def as_dict(self) -> dict:
        return {
            "relation": self.relation_id,
            "label": self.relation_label,
            "objects": [o.as_dict() for o in self.objects],
        }


@dataclass(frozen=True)
class Infobox:
    entity_id: str
    label: str
    types: list[str]
    rows: list[InfoboxRow]

    def as_dict(self) -> dict:
        return {
            "id": self.entity_id,
            "label": self.label,
            "types": self.types,
            "rows": [r.as_dict() for r in self.rows],
        }


def infobox(kg: GraphSnapshot, hierarchy: TypeHierarchy, entity_id: str) -> Infobox:
    entity_iri = wd(entity_id)
    type_terms = [t for t in kg.objects(entity_iri, RDF_TYPE) if isinstance(t, Iri)]
    if not type_terms and not kg.objects(entity_iri, RDFS_LABEL):
        raise UnknownIdError(f"unknown entity {entity_id!r}")
    type_ids = sorted({wd_id(t.value) for t in type_terms})
    views = iter_statements(kg)
    rows: list[InfoboxRow] = []
    seen_relations: set[str] = set()
    for type_id in type_ids:
        try:
            schema = induce_schema(hierarchy, kg, type_id)
        except UnknownIdError:
            continue
        for entry in schema.relations:
            if entry.relation_id in seen_relations:
                continue
            seen_relations.add(entry.relation_id)
            objects: dict[str, list[dict]] = {}
            for view in views:
                if view.subject_id == entity_id and view.relation_id == entry.relation_id:
                    objects.setdefault(view.object_id, []).append(
                        EvidenceRecord(view.sentence, view.doc_id, view.confidence).as_dict()
                    )
            for t in kg.match(entity_iri, wdt(entry.relation_id), None):
                if isinstance(t.object, Iri):
                    objects.setdefault(wd_id(t.object.value), []).append(dict(BACKGROUND_PROVENANCE))
            if not objects:
                continue
            row_objects = [
                InfoboxObject(object_id=oid, label=label_of(kg, oid), provenance=tuple(provs))
                for oid, provs in sorted(objects.items())
            ]
            rows.append(InfoboxRow(entry.relation_id, entry.label, row_objects))
    return Infobox(
        entity_id=entity_id,
        label=label_of(kg, entity_id),
        types=type_ids,
        rows=rows,
    )


def evidence_for(kg: GraphSnapshot, statement_id: str) -> list[EvidenceRecord]:
    """Evidence for every supporting occurrence of a statement's fact: all
    statements asserting the same (subject, predicate, object) contribute."""
    target = None
    for view in iter_statements(kg):
        if view.statement.statement_id == statement_id or view.statement.value == statement_id:
            target = view
            break
    if target is None:
        raise UnknownIdError(f"unknown statement {statement_id!r}")
    records = [
        EvidenceRecord(view.sentence, view.doc_id, view.confidence)
        for view in iter_statements(kg)
        if (view.subject_id, view.relation_id, view.object_id)
        == (target.subject_id, target.relation_id, target.object_id)
    ]
    return sorted(records, key=lambda r: (r.doc_id, r.sentence))
