import pytest

from kgforge.analytics import (
    build_hierarchy,
    children_sorted,
    evidence_for,
    induce_schema,
    infobox,
    iter_statements,
    top_types,
    trend_table,
    type_stats,
)
from kgforge.errors import EvaluationError, UnknownIdError
from kgforge.store import GraphBuilder, Triple
from kgforge.vocab import RDFS_SUBCLASS_OF, wd

ACADEMIC_DISCIPLINE = "Q11862829"
CONCEPT = "Q151885"
PROCESS = "Q3249551"


def subclass_graph(*edges):
    builder = GraphBuilder()
    for child, parent in edges:
        builder.insert(Triple(wd(child), RDFS_SUBCLASS_OF, wd(parent)))
    return builder.build()


def test_hierarchy_no_edges_flat_forest(corpus):
    kg = subclass_graph()
    h = build_hierarchy(kg)
    assert h.nodes == {}


def test_hierarchy_cycle_collapses_to_single_node():
    kg = subclass_graph(("B", "A"), ("A", "B"))
    h = build_hierarchy(kg)
    assert len(h.nodes) == 1
    node = h.node("B")
    assert node.node_id == "A"
    assert node.members == frozenset({"A", "B"})
    assert node.parents == set() and node.children == set()


def test_hierarchy_six_node_dag_parent_child_lists():
    kg = subclass_graph(("B", "A"), ("C", "A"), ("D", "B"), ("E", "B"), ("E", "C"), ("F", "E"))
    h = build_hierarchy(kg)
    assert h.node("A").children == {"B", "C"}
    assert h.node("B").children == {"D", "E"}
    assert h.node("C").children == {"E"}
    assert h.node("E").parents == {"B", "C"}
    assert h.node("E").children == {"F"}
    assert h.descendants("A") == {"B", "C", "D", "E", "F"}


def test_hierarchy_unknown_type():
    h = build_hierarchy(subclass_graph(("B", "A")))
    with pytest.raises(UnknownIdError):
        h.node("missing")


def test_corpus_hierarchy_nodes(corpus):
    h = corpus.hierarchy
    expected = {
        "Q151885", "Q11862829", "Q3249551", "Q8366", "Q755673",
        "Q7397", "Q593744", "Q317623", "Q24451526", "Q11660", "Q30642",
    }
    assert set(h.nodes) == expected
    # induced subclass edge from "subfield of" text makes NLP a child of AI
    assert h.node("Q30642").parents == {"Q11660"}
    assert "Q11660" in h.node(ACADEMIC_DISCIPLINE).children


def test_corpus_engineered_direct_transitive_pairs(corpus):
    process = type_stats(corpus.hierarchy, corpus.kg, PROCESS)
    assert (process.direct_entities, process.transitive_entities) == (2, 4)
    concept = type_stats(corpus.hierarchy, corpus.kg, CONCEPT)
    assert (concept.direct_entities, concept.transitive_entities) == (4, 23)
    discipline = type_stats(corpus.hierarchy, corpus.kg, ACADEMIC_DISCIPLINE)
    assert (discipline.direct_entities, discipline.transitive_entities) == (9, 9)


def test_stats_render_echoes_direct_transitive_presentation(corpus):
    stats = type_stats(corpus.hierarchy, corpus.kg, PROCESS)
    line = f"{stats.label} — {stats.direct_entities} direct / {stats.transitive_entities} transitive"
    assert line == "process — 2 direct / 4 transitive"


def test_transitive_monotonicity_invariants(corpus):
    h, kg = corpus.hierarchy, corpus.kg
    stats = {node_id: type_stats(h, kg, node_id) for node_id in h.nodes}
    for node_id, node in h.nodes.items():
        assert stats[node_id].transitive_entities >= stats[node_id].direct_entities
        for child in node.children:
            assert stats[node_id].transitive_entities >= stats[child].transitive_entities


def test_top_types_ordering_and_limit(corpus):
    h, kg = corpus.hierarchy, corpus.kg
    ranked = top_types(h, kg, 3)
    assert [s.type_id for s in ranked] == ["Q151885", "Q11862829", "Q3249551"]
    everything = top_types(h, kg, 100)
    assert len(everything) == len(h.nodes)
    transitives = [s.transitive_entities for s in everything]
    assert transitives == sorted(transitives, reverse=True)


def test_total_distinct_types_reported(corpus):
    assert len(top_types(corpus.hierarchy, corpus.kg, -1)) == 11


def test_children_sorted_by_cumulative_frequency(corpus):
    children = children_sorted(corpus.hierarchy, corpus.kg, CONCEPT)
    assert [c.type_id for c in children] == ["Q11862829", "Q3249551", "Q317623", "Q7397"]


def test_leaf_children_empty(corpus):
    assert children_sorted(corpus.hierarchy, corpus.kg, "Q755673") == []


def test_trend_rows_include_flagship_entities(corpus):
    table = trend_table(corpus.hierarchy, corpus.kg, ACADEMIC_DISCIPLINE, 2002, 2021)
    labels = [row.label for row in table.rows]
    assert "Ontology" in labels
    assert "Semantic Web" in labels
    assert "Linked Data" in labels
    assert labels[0] == "Semantic Web"


def test_trend_linked_data_distribution(corpus):
    table = trend_table(corpus.hierarchy, corpus.kg, ACADEMIC_DISCIPLINE, 2002, 2021)
    row = next(r for r in table.rows if r.label == "Linked Data")
    assert row.total == 4
    assert row.cells[2009] == pytest.approx(25.0)
    assert row.cells[2014] == pytest.approx(25.0)
    assert row.cells[2021] == pytest.approx(50.0)
    assert sum(row.cells.values()) == pytest.approx(100.0, abs=0.5)


def test_trend_cells_sum_to_100_for_all_rows(corpus):
    table = trend_table(corpus.hierarchy, corpus.kg, ACADEMIC_DISCIPLINE, 2002, 2021)
    assert table.rows
    for row in table.rows:
        assert sum(row.cells.values()) == pytest.approx(100.0, abs=0.5)
        assert len(row.cells) == len(table.years)


def test_trend_rescales_on_narrower_range(corpus):
    table = trend_table(corpus.hierarchy, corpus.kg, ACADEMIC_DISCIPLINE, 2014, 2021)
    row = next(r for r in table.rows if r.label == "Linked Data")
    assert row.total == 3
    assert row.cells[2014] == pytest.approx(33.3)
    assert row.cells[2021] == pytest.approx(66.7)


def test_trend_single_document_entity_is_100(corpus):
    table = trend_table(corpus.hierarchy, corpus.kg, ACADEMIC_DISCIPLINE, 2002, 2021)
    row = next(r for r in table.rows if r.label == "information retrieval")
    assert row.total == 1
    assert row.cells[2021] == pytest.approx(100.0)


def test_trend_empty_year_range_rejected(corpus):
    with pytest.raises(EvaluationError):
        trend_table(corpus.hierarchy, corpus.kg, ACADEMIC_DISCIPLINE, 2021, 2002)


def test_schema_for_academic_discipline(corpus):
    schema = induce_schema(corpus.hierarchy, corpus.kg, ACADEMIC_DISCIPLINE)
    labels = [entry.label for entry in schema.relations]
    for expected in ("part of", "facet of", "based on", "studies"):
        assert expected in labels
    assert [e.relation_id for e in schema.relations[:2]] == ["P2283", "P361"]
    assert schema.relations[0].frequency == 6
    assert schema.relations[1].frequency == 6


def test_schema_frequencies_match_brute_force_over_facts(corpus, fixture_config):
    from kgforge.pipeline import run_extract, run_ingest

    ingest_result = run_ingest(fixture_config)
    facts = run_extract(fixture_config, ingest_result.documents, ingest_result.fingerprints)
    h = corpus.hierarchy
    members = set(h.node(ACADEMIC_DISCIPLINE).members)
    for descendant in h.descendants(ACADEMIC_DISCIPLINE):
        members |= h.nodes[descendant].members
    brute: dict[str, int] = {}
    for fact in facts:
        if fact.subject.type_id in members:
            brute[fact.relation_id] = brute.get(fact.relation_id, 0) + 1
    schema = induce_schema(corpus.hierarchy, corpus.kg, ACADEMIC_DISCIPLINE, n=100)
    assert {e.relation_id: e.frequency for e in schema.relations} == brute
    frequencies = [e.frequency for e in schema.relations]
    assert frequencies == sorted(frequencies, reverse=True)


def test_schema_single_relation_type(corpus):
    schema = induce_schema(corpus.hierarchy, corpus.kg, "Q593744")
    assert [e.label for e in schema.relations] == ["uses"]


def test_infobox_linked_data(corpus):
    box = infobox(corpus.kg, corpus.hierarchy, "Q515701")
    assert box.label == "Linked Data"
    assert box.types == [ACADEMIC_DISCIPLINE]
    rows = {row.relation_label: row for row in box.rows}
    part_of = rows["part of"]
    open_data = next(o for o in part_of.objects if o.label == "Open Data")
    evidence = [p for p in open_data.provenance if p["kind"] == "evidence"]
    assert len(evidence) == 2
    assert {e["doc"] for e in evidence} == {
        "urn:kg:paper/iswc2009-lod-cloud#abstract",
        "urn:kg:recognition/open-science-award#description",
    }
    assert all("part of" in e["sentence"] for e in evidence)
    # background fact from the KB import shows up with the background marker
    based_on = rows["based on"]
    assert [o.label for o in based_on.objects] == ["RDF"]
    assert based_on.objects[0].provenance == ({"kind": "background"},)


def test_infobox_rows_follow_schema_rank(corpus):
    box = infobox(corpus.kg, corpus.hierarchy, "Q54837")
    schema = induce_schema(corpus.hierarchy, corpus.kg, ACADEMIC_DISCIPLINE)
    rank = {e.relation_id: i for i, e in enumerate(schema.relations)}
    ranks = [rank[row.relation_id] for row in box.rows]
    assert ranks == sorted(ranks)


def test_infobox_entity_without_facts_is_types_only(corpus):
    box = infobox(corpus.kg, corpus.hierarchy, "Q7095652")
    assert box.label == "OWL"
    assert box.types == ["Q24451526"]
    assert box.rows == []


def test_infobox_unknown_entity(corpus):
    with pytest.raises(UnknownIdError):
        infobox(corpus.kg, corpus.hierarchy, "Q999999999")


def test_induced_objects_always_have_evidence(corpus):
    h, kg = corpus.hierarchy, corpus.kg
    for type_id in ("Q515701", "Q54837", "Q30642", "Q465"):
        box = infobox(kg, h, type_id)
        for row in box.rows:
            for obj in row.objects:
                assert obj.provenance
                for record in obj.provenance:
                    if record["kind"] == "evidence":
                        assert record["sentence"]
                        assert record["doc"]
                    else:
                        assert record == {"kind": "background"}


def test_evidence_for_single_statement(corpus):
    view = next(
        v for v in iter_statements(corpus.kg)
        if (v.subject_id, v.relation_id, v.object_id) == ("Q324254", "P1269", "Q839546")
    )
    records = evidence_for(corpus.kg, view.statement.statement_id)
    assert len(records) == 1
    assert records[0].confidence == pytest.approx(0.8)


def test_evidence_for_merged_statement_two_sentences(corpus):
    view = next(
        v for v in iter_statements(corpus.kg)
        if (v.subject_id, v.relation_id, v.object_id) == ("Q30105403", "P361", "Q180160")
    )
    records = evidence_for(corpus.kg, view.statement.statement_id)
    assert len(records) == 2
    assert {r.confidence for r in records} == {0.7}
    assert len({r.doc_id for r in records}) == 2


def test_evidence_for_unknown_statement(corpus):
    with pytest.raises(UnknownIdError):
        evidence_for(corpus.kg, "doesnotexist")


def test_hierarchy_types_without_edges_are_isolated_nodes():
    from kgforge.extraction import Document, extract_document, reify
    from kgforge.store import Iri
    from tests.test_extraction import INFERENCE, SEMWEB, USES

    builder = GraphBuilder()
    entity = Iri("urn:kg:paper/p1")
    doc = Document(doc_id="d1", entity=entity.value, text="Semantic Web uses inference.")
    fact = extract_document(doc, [SEMWEB, INFERENCE], [USES])[0]
    builder.extend(reify(fact, owner=entity))
    h = build_hierarchy(builder.build())
    assert set(h.nodes) == {"Q11862829", "Q3249551"}
    for node in h.nodes.values():
        assert node.parents == set() and node.children == set()
