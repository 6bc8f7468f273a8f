import random

import pytest

from kgforge.errors import BuildStateError, ParseError, StructuralError
from kgforge.store import (
    GraphBuilder,
    GraphSnapshot,
    Iri,
    Literal,
    StatementNode,
    Triple,
    import_canonical,
    statement_namespace,
    term_text,
)

A = Iri("urn:test:a")
B = Iri("urn:test:b")
P = Iri("urn:test:p")
TYPE = Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
DISCIPLINE = Iri("http://www.wikidata.org/entity/Q11862829")


def test_insert_fresh_returns_true():
    builder = GraphBuilder()
    assert builder.insert(Triple(A, P, Literal("x"))) is True
    assert len(builder) == 1


def test_insert_duplicate_returns_false_count_unchanged():
    builder = GraphBuilder()
    t = Triple(A, P, Literal("x"))
    assert builder.insert(t) is True
    assert builder.insert(t) is False
    assert len(builder) == 1


def test_literal_subject_is_structural_error():
    with pytest.raises(StructuralError):
        Triple(Literal("lit"), P, B)


def test_relative_iri_rejected():
    with pytest.raises(StructuralError):
        Iri("no-scheme-here/x")


def test_builder_sealed_after_build():
    builder = GraphBuilder([Triple(A, P, B)])
    builder.build()
    with pytest.raises(BuildStateError):
        builder.insert(Triple(B, P, A))


def five_triple_fixture() -> GraphSnapshot:
    return GraphBuilder(
        [
            Triple(Iri("urn:test:sw"), TYPE, DISCIPLINE),
            Triple(Iri("urn:test:ld"), TYPE, DISCIPLINE),
            Triple(Iri("urn:test:sw"), P, Literal("x")),
            Triple(A, P, Literal("x")),
            Triple(A, Iri("urn:test:authorOf"), Iri("urn:test:paper1")),
        ]
    ).build()


def test_match_bound_subject_predicate():
    g = GraphBuilder([Triple(A, P, Literal("x"))]).build()
    assert list(g.match(A, P, None)) == [Triple(A, P, Literal("x"))]


def test_match_all_unbound_returns_whole_store():
    g = five_triple_fixture()
    assert len(list(g.match())) == 5


def test_match_by_type_object():
    g = five_triple_fixture()
    hits = list(g.match(None, TYPE, DISCIPLINE))
    assert [t.subject for t in hits] == [Iri("urn:test:ld"), Iri("urn:test:sw")]


def test_match_all_bound_is_containment():
    g = five_triple_fixture()
    assert list(g.match(A, P, Literal("x"))) == [Triple(A, P, Literal("x"))]
    assert list(g.match(A, P, Literal("missing"))) == []


def test_objects_and_subjects_projections():
    g = five_triple_fixture()
    assert g.objects(A, P) == [Literal("x")]
    assert g.subjects(Iri("urn:test:authorOf"), Iri("urn:test:paper1")) == [A]
    assert g.objects(Iri("urn:test:absent"), P) == []


def test_index_cardinalities_agree():
    g = five_triple_fixture()
    assert g.index_cardinalities() == (5, 5, 5)


def test_export_empty_store():
    assert GraphBuilder().build().export_canonical() == b""


def test_export_order_independent():
    t1 = Triple(A, P, Literal("x"))
    t2 = Triple(B, P, Literal("y"))
    g1 = GraphBuilder([t1, t2]).build()
    g2 = GraphBuilder([t2, t1]).build()
    assert g1.export_canonical() == g2.export_canonical()


def test_export_is_sorted_with_trailing_newline():
    g = GraphBuilder([Triple(B, P, Literal("y")), Triple(A, P, Literal("x"))]).build()
    data = g.export_canonical()
    lines = data.split(b"\n")
    assert lines[-1] == b""
    body = lines[:-1]
    assert body == sorted(body)


def test_import_single_line():
    g = import_canonical(b'<urn:test:a> <urn:test:p> "x" .\n')
    assert len(g) == 1
    assert Triple(A, P, Literal("x")) in g


def test_import_malformed_line_cites_line_number():
    doc = b'<urn:test:a> <urn:test:p> "x" .\n<urn:test:b> <urn:test:p> "y" .\n<bad iri> <urn:test:p> "z" .\n'
    with pytest.raises(ParseError) as err:
        import_canonical(doc)
    assert err.value.line == 3


def test_import_duplicate_lines_collapse():
    doc = b'<urn:test:a> <urn:test:p> "x" .\n<urn:test:a> <urn:test:p> "x" .\n'
    assert len(import_canonical(doc)) == 1


def test_statement_nodes_survive_round_trip():
    stmt = StatementNode(statement_namespace() + "abc123")
    g = GraphBuilder([Triple(stmt, P, Literal("x")), Triple(A, P, stmt)]).build()
    back = import_canonical(g.export_canonical())
    assert back.triples == g.triples
    assert any(isinstance(t.subject, StatementNode) for t in back)


def test_literal_escaping_round_trip():
    tricky = Literal('say "hi"\nthen\ttab\\doneé')
    lang = Literal("bonjour", language="fr")
    typed = Literal("2022-03-02", datatype="http://www.w3.org/2001/XMLSchema#date")
    g = GraphBuilder([Triple(A, P, tricky), Triple(A, P, lang), Triple(A, P, typed)]).build()
    back = import_canonical(g.export_canonical())
    assert back.triples == g.triples


def random_snapshot(rng: random.Random, size: int) -> GraphSnapshot:
    subjects = [Iri(f"urn:r:s{i}") for i in range(8)] + [
        StatementNode(statement_namespace() + f"{i:04x}") for i in range(4)
    ]
    predicates = [Iri(f"urn:r:p{i}") for i in range(6)]
    builder = GraphBuilder()
    for _ in range(size):
        s = rng.choice(subjects)
        p = rng.choice(predicates)
        kind = rng.random()
        if kind < 0.4:
            chars = "".join(rng.choice('ab"\\\n\tzé ') for _ in range(rng.randint(0, 9)))
            o = Literal(chars)
        elif kind < 0.55:
            o = Literal(str(rng.randint(0, 99)), datatype="http://www.w3.org/2001/XMLSchema#integer")
        elif kind < 0.65:
            o = Literal("w" * rng.randint(1, 4), language=rng.choice(["en", "fr", "de-DE"]))
        else:
            o = rng.choice(subjects)
        builder.insert(Triple(s, p, o))
    return builder.build()


def test_random_round_trips_are_byte_idempotent():
    rng = random.Random(20260809)
    for trial in range(30):
        g = random_snapshot(rng, rng.randint(0, 120))
        first = g.export_canonical()
        again = import_canonical(first)
        assert again.triples == g.triples
        assert again.export_canonical() == first
        n = len(again)
        assert again.index_cardinalities() == (n, n, n)


def test_term_text_orders_deterministically():
    terms = [Literal("b"), Iri("urn:test:a"), Literal("a", language="en")]
    assert sorted(map(term_text, terms)) == sorted(map(term_text, reversed(terms)))
