import math
import random

import pytest

from kgforge.errors import UnknownIdError
from kgforge.extraction import Document, extract_document, reify
from kgforge.recommender import (
    FeatureKey,
    Recommender,
    SparseVector,
    VsmConfig,
    cosine,
    dumps_model,
    featurize,
    fit,
)
from kgforge.store import GraphBuilder, Iri, Literal, Triple
from kgforge.vocab import RDF_TYPE
from tests.test_extraction import INFERENCE, SEMWEB, USES

ABSTRACT = "http://schema.org/abstract"
AUTHOR = "http://schema.org/author"
PERSON = "http://schema.org/Person"
ARTICLE = "http://schema.org/ScholarlyArticle"

CONFIG = VsmConfig(
    text_predicates=(ABSTRACT,),
    person_types=(PERSON,),
    hop_predicates=(AUTHOR,),
)


def vector(*entries):
    return SparseVector(tuple(entries))


def test_cosine_self_is_one():
    v = vector((0, 1.5), (3, 2.0))
    assert cosine(v, v) == pytest.approx(1.0, abs=1e-12)


def test_cosine_disjoint_supports_zero():
    assert cosine(vector((0, 1.0)), vector((1, 1.0))) == 0.0


def test_cosine_hand_computed():
    u = vector((0, 1.0), (1, 1.0))
    v = vector((0, 1.0))
    assert cosine(u, v) == pytest.approx(1 / math.sqrt(2), abs=1e-12)


def test_cosine_empty_vector_is_zero():
    assert cosine(vector(), vector((0, 1.0))) == 0.0


def test_sparse_vector_rejects_unsorted_or_zero():
    with pytest.raises(ValueError):
        SparseVector(((2, 1.0), (1, 1.0)))
    with pytest.raises(ValueError):
        SparseVector(((0, 0.0),))


def paper_fact_graph():
    """One entity whose only information is the worked uses-inference fact."""
    builder = GraphBuilder()
    entity = Iri("urn:kg:paper/p1")
    doc = Document(doc_id="d1", entity=entity.value, text="Semantic Web uses inference.")
    fact = extract_document(doc, [SEMWEB, INFERENCE], [USES])[0]
    builder.extend(reify(fact, owner=entity))
    return builder.build(), entity


def test_featurize_entity_and_frame_features():
    kg, entity = paper_fact_graph()
    counts = featurize(entity, kg, VsmConfig())
    assert counts[FeatureKey("entity", "Semantic Web:academic discipline")] == 1
    assert counts[FeatureKey("entity", "inference:process")] == 1
    assert counts[FeatureKey("frame", "academic discipline,uses,process")] == 1


def test_featurize_empty_entity():
    builder = GraphBuilder()
    builder.insert(Triple(Iri("urn:kg:paper/p1"), Iri("urn:kg:vocab/seeAlso"), Iri("urn:kg:paper/lonely")))
    kg = builder.build()
    counts = featurize("urn:kg:paper/lonely", kg, VsmConfig())
    assert counts == {}


def test_featurize_unknown_entity():
    kg, _ = paper_fact_graph()
    with pytest.raises(UnknownIdError):
        featurize("urn:kg:nowhere", kg, VsmConfig())


def test_struct_features_cover_integration_triples():
    builder = GraphBuilder()
    e = Iri("urn:kg:project/p")
    builder.insert(Triple(e, RDF_TYPE, Iri("http://schema.org/ResearchProject")))
    builder.insert(Triple(e, Iri("http://schema.org/department"), Literal("AI Research")))
    builder.insert(Triple(e, Iri(ABSTRACT), Literal("ignored as text payload")))
    kg = builder.build()
    counts = featurize(e, kg, VsmConfig(text_predicates=(ABSTRACT,)))
    struct = {fk.name for fk in counts if fk.group == "struct"}
    assert "http://schema.org/department=AI Research" in struct
    assert "http://schema.org/rdf-syntax-ns#type" not in struct
    assert not any("abstract" in name for name in struct)
    assert counts[FeatureKey("bow", "ignored")] == 1


def person_graph():
    builder = GraphBuilder()
    p1 = Iri("urn:kg:paper/p1")
    p2 = Iri("urn:kg:paper/p2")
    person = Iri("urn:kg:person/ada")
    builder.insert(Triple(p1, RDF_TYPE, Iri(ARTICLE)))
    builder.insert(Triple(p2, RDF_TYPE, Iri(ARTICLE)))
    builder.insert(Triple(person, RDF_TYPE, Iri(PERSON)))
    builder.insert(Triple(p1, Iri(ABSTRACT), Literal("graphs and graphs everywhere")))
    builder.insert(Triple(p2, Iri(ABSTRACT), Literal("ranking graphs with vectors")))
    builder.insert(Triple(p1, Iri(AUTHOR), person))
    builder.insert(Triple(p2, Iri(AUTHOR), person))
    return builder.build(), person, p1, p2


def test_person_bow_is_sum_of_authored_papers():
    kg, person, p1, p2 = person_graph()
    person_counts = featurize(person, kg, CONFIG)
    paper_bow = featurize(p1, kg, CONFIG) + featurize(p2, kg, CONFIG)
    for fk, count in paper_bow.items():
        if fk.group == "bow":
            assert person_counts[fk] == count
    assert person_counts[FeatureKey("bow", "graphs")] == 3


def test_fit_single_entity_idf_is_one():
    builder = GraphBuilder()
    e = Iri("urn:kg:paper/p1")
    builder.insert(Triple(e, Iri(ABSTRACT), Literal("alpha beta")))
    kg = builder.build()
    model = fit([e], kg, VsmConfig(text_predicates=(ABSTRACT,)))
    assert all(v == pytest.approx(1.0) for v in model.idf)


def test_fit_tfidf_oracle_three_entity_corpus():
    # Hand corpus: e1 "alpha alpha beta", e2 "alpha gamma", e3 "delta delta delta".
    builder = GraphBuilder()
    texts = {
        "urn:kg:e/1": "alpha alpha beta",
        "urn:kg:e/2": "alpha gamma",
        "urn:kg:e/3": "delta delta delta",
    }
    for iri, text in texts.items():
        builder.insert(Triple(Iri(iri), Iri(ABSTRACT), Literal(text)))
    kg = builder.build()
    model = fit(list(texts), kg, VsmConfig(text_predicates=(ABSTRACT,)))

    counts = {
        "urn:kg:e/1": {"alpha": 2, "beta": 1},
        "urn:kg:e/2": {"alpha": 1, "gamma": 1},
        "urn:kg:e/3": {"delta": 3},
    }
    df = {"alpha": 2, "beta": 1, "gamma": 1, "delta": 1}
    n = 3
    for iri, expected_counts in counts.items():
        row = dict(model.rows[iri].entries)
        assert len(row) == len(expected_counts)
        for token, count in expected_counts.items():
            idx = model.index[FeatureKey("bow", token)]
            expected = count * (math.log((1 + n) / (1 + df[token])) + 1.0)
            assert row[idx] == pytest.approx(expected, abs=1e-9)


def test_two_identical_entities_share_rows():
    builder = GraphBuilder()
    for iri in ("urn:kg:e/1", "urn:kg:e/2"):
        builder.insert(Triple(Iri(iri), Iri(ABSTRACT), Literal("same words here")))
    kg = builder.build()
    model = fit(["urn:kg:e/1", "urn:kg:e/2"], kg, VsmConfig(text_predicates=(ABSTRACT,)))
    assert model.rows["urn:kg:e/1"] == model.rows["urn:kg:e/2"]


def test_group_weights_scale_rows():
    kg, entity = paper_fact_graph()
    config = VsmConfig(group_weights={"frame": 2.0})
    model = fit([entity], kg, config)
    frame_idx = [i for f, i in model.index.items() if f.group == "frame"]
    doubled = [w for i, w in model.rows[entity.value].entries if i in frame_idx]
    assert doubled == [pytest.approx(2.0)]


def rec_fixture():
    """Five articles plus a user row; texts chosen so cosines are distinct."""
    builder = GraphBuilder()
    texts = {
        "urn:kg:paper/a": "graphs graphs ranking",
        "urn:kg:paper/b": "graphs ranking vectors",
        "urn:kg:paper/c": "vectors vectors algebra",
        "urn:kg:paper/d": "completely unrelated topic",
        "urn:kg:paper/e": "graphs graphs graphs ranking ranking",
    }
    for iri, text in texts.items():
        builder.insert(Triple(Iri(iri), RDF_TYPE, Iri(ARTICLE)))
        builder.insert(Triple(Iri(iri), Iri(ABSTRACT), Literal(text)))
    user = Iri("urn:kg:person/u")
    builder.insert(Triple(user, RDF_TYPE, Iri(PERSON)))
    builder.insert(Triple(user, Iri(ABSTRACT), Literal("graphs ranking")))
    kg = builder.build()
    model = fit(sorted(texts) + [user.value], kg, VsmConfig(text_predicates=(ABSTRACT,)))
    return kg, model, user.value


def test_recommend_identical_vector_ranks_first():
    builder = GraphBuilder()
    paper = Iri("urn:kg:paper/a")
    twin = Iri("urn:kg:paper/twin")
    for iri in (paper, twin):
        builder.insert(Triple(iri, RDF_TYPE, Iri(ARTICLE)))
        builder.insert(Triple(iri, Iri(ABSTRACT), Literal("graphs ranking")))
    kg = builder.build()
    model = fit([paper.value, twin.value], kg, VsmConfig(text_predicates=(ABSTRACT,)))
    assert model.rows[paper.value] == model.rows[twin.value]
    recs = Recommender(model, kg).recommend(twin.value, ARTICLE, k=3)
    assert recs[0].item == paper.value
    assert recs[0].score == pytest.approx(1.0, abs=1e-9)
    assert recs[0].rank == 1


def test_recommend_excludes_all_authored_items():
    kg, model, user = rec_fixture()
    authored = GraphBuilder(kg.triples)
    for iri in model.rows:
        if iri.startswith("urn:kg:paper/"):
            authored.insert(Triple(Iri(iri), Iri(AUTHOR), Iri(user)))
    kg2 = authored.build()
    rec = Recommender(model, kg2, authorship_predicates=(AUTHOR,))
    assert rec.recommend(user, ARTICLE, k=10) == []
    assert len(rec.recommend(user, ARTICLE, k=10, exclude_connected=False)) == 5


def test_recommend_matches_brute_force_ordering():
    kg, model, user = rec_fixture()
    rec = Recommender(model, kg)
    got = rec.recommend(user, ARTICLE, k=5)
    expected = sorted(
        (
            (cosine(model.rows[user], model.rows[iri]), iri)
            for iri in model.rows
            if iri != user and Triple(Iri(iri), RDF_TYPE, Iri(ARTICLE)) in kg
        ),
        key=lambda pair: (-pair[0], pair[1]),
    )
    assert [(r.item, pytest.approx(r.score)) for r in got] == [
        (iri, pytest.approx(score)) for score, iri in expected
    ]
    assert [r.rank for r in got] == [1, 2, 3, 4, 5]


def test_recommend_never_returns_user_and_is_deterministic():
    kg, model, user = rec_fixture()
    rec = Recommender(model, kg)
    first = rec.recommend(user, ARTICLE, k=5)
    second = rec.recommend(user, ARTICLE, k=5)
    assert first == second
    assert all(r.item != user for r in first)


def test_recommend_k_validation_and_unknown_user():
    kg, model, user = rec_fixture()
    rec = Recommender(model, kg)
    with pytest.raises(ValueError):
        rec.recommend(user, ARTICLE, k=0)
    with pytest.raises(UnknownIdError):
        rec.recommend("urn:kg:person/ghost", ARTICLE, k=1)


def test_explain_sums_to_cosine():
    kg, model, user = rec_fixture()
    rec = Recommender(model, kg)
    for iri in model.rows:
        if iri == user:
            continue
        explanation = rec.explain(user, iri, top_m=3)
        expected = cosine(model.rows[user], model.rows[iri])
        assert sum(w for _, w in explanation.contributions) == pytest.approx(expected, abs=1e-6)
        assert explanation.total == pytest.approx(expected, abs=1e-9)


def test_explain_single_shared_feature_is_total():
    builder = GraphBuilder()
    for iri in ("urn:kg:e/1", "urn:kg:e/2"):
        builder.insert(Triple(Iri(iri), Iri(ABSTRACT), Literal("solo")))
    kg = builder.build()
    model = fit(["urn:kg:e/1", "urn:kg:e/2"], kg, VsmConfig(text_predicates=(ABSTRACT,)))
    explanation = Recommender(model, kg).explain("urn:kg:e/1", "urn:kg:e/2")
    assert len(explanation.contributions) == 1
    assert explanation.contributions[0][1] == pytest.approx(1.0, abs=1e-9)


def test_explain_top_contribution_matches_exhaustive_scan():
    kg, model, user = rec_fixture()
    rec = Recommender(model, kg)
    item = "urn:kg:paper/b"
    explanation = rec.explain(user, item, top_m=1)
    u, v = model.rows[user], model.rows[item]
    theirs = dict(v.entries)
    denom = u.norm * v.norm
    best = max((w * theirs[i] / denom for i, w in u.entries if i in theirs), default=0.0)
    assert explanation.contributions[0][1] == pytest.approx(best, abs=1e-12)


def test_explain_groups_entity_contributions_by_type():
    kg, entity = paper_fact_graph()
    other = Iri("urn:kg:paper/p2")
    builder = GraphBuilder(kg.triples)
    doc = Document(doc_id="d2", entity=other.value, text="Semantic Web uses inference.")
    fact = extract_document(doc, [SEMWEB, INFERENCE], [USES])[0]
    builder.extend(reify(fact, owner=other))
    kg2 = builder.build()
    model = fit([entity.value, other.value], kg2, VsmConfig())
    explanation = Recommender(model, kg2).explain(entity.value, other.value, top_m=5)
    types = dict(explanation.grouped)
    assert "academic discipline" in types
    assert ("Semantic Web", pytest.approx(types["academic discipline"][0][1])) == types["academic discipline"][0]
    assert "process" in types


def test_scaling_counts_leaves_rankings_unchanged():
    rng = random.Random(7)
    kg, model, user = rec_fixture()
    for _ in range(20):
        scale = rng.uniform(0.1, 9.0)
        target = rng.choice(sorted(model.rows))
        scaled = SparseVector(tuple((i, w * scale) for i, w in model.rows[target].entries))
        for other_iri, other in model.rows.items():
            assert cosine(scaled, other) == pytest.approx(cosine(model.rows[target], other), abs=1e-9)


def test_model_dump_is_deterministic():
    kg, model, user = rec_fixture()
    kg2, model2, _ = rec_fixture()
    assert dumps_model(model) == dumps_model(model2)


def test_model_dump_load_round_trip(tmp_path):
    from kgforge.recommender import dump_model, load_model

    kg, model, user = rec_fixture()
    path = tmp_path / "model.json"
    dump_model(model, path)
    loaded = load_model(path)
    assert loaded.features == model.features
    assert loaded.idf == pytest.approx(model.idf)
    assert loaded.rows.keys() == model.rows.keys()
    for iri in model.rows:
        assert loaded.rows[iri].entries == model.rows[iri].entries
    assert dumps_model(loaded) == dumps_model(model)
