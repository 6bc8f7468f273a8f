"""kgforge: knowledge-graph induction and exploitation.

Library surface: an indexed in-memory triple store with canonical
N-Triples round-tripping, declarative JSON-to-graph ingestion, a
deterministic text-to-fact extractor with reified provenance, an
explainable tf-idf recommender, taxonomy/trend/infobox analytics, and the
two evaluation harnesses (extraction micro-F1, MAP/P@K), all driven by the
`kgforge` CLI or the FastAPI service.
"""

from .store import (
    GraphBuilder,
    GraphSnapshot,
    Iri,
    Literal,
    StatementNode,
    Triple,
    import_canonical,
)
from .ingest import MappingSpec, load_mapping, parse_mapping, record_to_triples
from .extraction import (
    Document,
    ExtractedFact,
    GazetteerEntry,
    RelationRule,
    apply_rules,
    extract_document,
    find_mentions,
    import_external_facts,
    reify,
    split_sentences,
)
from .ie_eval import GoldCorpus, MetricReport, load_gold_corpus, score
from .recommender import Recommender, VsmConfig, VsmModel, cosine, featurize, fit
from .rec_eval import Judgment, average_precision, evaluate, precision_at_k
from .analytics import (
    Infobox,
    InfoboxSchema,
    TrendTable,
    TypeHierarchy,
    TypeStats,
    build_hierarchy,
    evidence_for,
    induce_schema,
    infobox,
    top_types,
    trend_table,
    type_stats,
)
from .pipeline import BuildResult, PipelineConfig, build_state

__version__ = "0.1.0"

__all__ = [
    "BuildResult",
    "Document",
    "ExtractedFact",
    "GazetteerEntry",
    "GoldCorpus",
    "GraphBuilder",
    "GraphSnapshot",
    "Infobox",
    "InfoboxSchema",
    "Iri",
    "Judgment",
    "Literal",
    "MappingSpec",
    "MetricReport",
    "PipelineConfig",
    "Recommender",
    "RelationRule",
    "StatementNode",
    "TrendTable",
    "Triple",
    "TypeHierarchy",
    "TypeStats",
    "VsmConfig",
    "VsmModel",
    "apply_rules",
    "average_precision",
    "build_hierarchy",
    "build_state",
    "cosine",
    "evaluate",
    "evidence_for",
    "extract_document",
    "featurize",
    "find_mentions",
    "fit",
    "import_canonical",
    "import_external_facts",
    "induce_schema",
    "infobox",
    "load_gold_corpus",
    "load_mapping",
    "parse_mapping",
    "precision_at_k",
    "record_to_triples",
    "reify",
    "score",
    "split_sentences",
    "top_types",
    "trend_table",
    "type_stats",
]
