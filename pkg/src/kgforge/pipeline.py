"""End-to-end pipeline: ingest sources, extract facts, build the graph,
fit the recommender model and the type hierarchy.

Stages communicate through flat artifacts in the output directory so each
CLI subcommand can run on its own:
  integration.nt     canonical export of the mapped source records
  documents.jsonl    registered text payloads (doc id, entity, text, year)
  fingerprints.jsonl change-detection ledger per entity
  facts.jsonl        extraction output in the fact interchange schema
  graph.nt           full graph: integration + reified facts + background KB
  model.json         VSM dump

Every stage is deterministic: running the pipeline twice over the same
inputs produces byte-identical artifacts.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .analytics import TypeHierarchy, build_hierarchy, import_background_kb
from .errors import KgforgeError, MappingError
from .extraction import (
    Document,
    ExtractedFact,
    export_facts_jsonl,
    extract_document,
    import_external_facts,
    load_gazetteer,
    load_rules,
    document_triples,
    reify,
)
from .ingest import (
    Fingerprint,
    entity_fingerprint,
    load_mapping,
    load_source_records,
    needs_reextraction,
    read_fingerprints,
    record_to_triples,
    write_fingerprints,
)
from .recommender import (
    DEFAULT_STOPWORDS,
    Recommender,
    VsmConfig,
    VsmModel,
    dump_model,
    fit,
    load_model,
)
from .store import DEFAULT_BASE_NAMESPACE, GraphBuilder, GraphSnapshot, Iri, Triple, import_canonical, statement_namespace
from .vocab import RDF_TYPE


@dataclass
class ServiceConfig:
    port: int = 8100
    token: str = ""
    admin_token: str = ""


@dataclass
class PipelineConfig:
    base_namespace: str = DEFAULT_BASE_NAMESPACE
    mappings: list[Path] = field(default_factory=list)
    sources: dict[str, str] = field(default_factory=dict)
    gazetteer: Optional[Path] = None
    rules: Optional[Path] = None
    abbreviations: tuple[str, ...] = ()
    background_kb: Optional[Path] = None
    output_dir: Path = Path("out")
    group_weights: dict[str, float] = field(default_factory=dict)
    stopwords: tuple[str, ...] = tuple(sorted(DEFAULT_STOPWORDS))
    authorship_predicates: tuple[str, ...] = ()
    hop_predicates: tuple[str, ...] = ()
    person_types: tuple[str, ...] = ()
    categories: dict[str, str] = field(default_factory=dict)
    k_defaults: dict[str, int] = field(default_factory=dict)
    subclass_relations: tuple[str, ...] = ("P279",)
    service: ServiceConfig = field(default_factory=ServiceConfig)

    @classmethod
    def load(cls, path: Path | str) -> "PipelineConfig":
        path = Path(path)
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        base_dir = path.parent

        def rel(p) -> Path:
            p = Path(p)
            return p if p.is_absolute() else base_dir / p

        service_doc = doc.get("service", {})
        return cls(
            base_namespace=doc.get("base_namespace", DEFAULT_BASE_NAMESPACE),
            mappings=[rel(p) for p in doc.get("mappings", [])],
            sources={
                name: (location if str(location).startswith(("http://", "https://")) else str(rel(location)))
                for name, location in doc.get("sources", {}).items()
            },
            gazetteer=rel(doc["gazetteer"]) if "gazetteer" in doc else None,
            rules=rel(doc["rules"]) if "rules" in doc else None,
            abbreviations=tuple(doc.get("abbreviations", ())),
            background_kb=rel(doc["background_kb"]) if "background_kb" in doc else None,
            output_dir=Path(doc.get("output_dir", "out")),
            group_weights=dict(doc.get("group_weights", {})),
            stopwords=tuple(doc.get("stopwords", sorted(DEFAULT_STOPWORDS))),
            authorship_predicates=tuple(doc.get("authorship_predicates", ())),
            hop_predicates=tuple(doc.get("hop_predicates", ())),
            person_types=tuple(doc.get("person_types", ())),
            categories=dict(doc.get("categories", {})),
            k_defaults=dict(doc.get("k_defaults", {})),
            subclass_relations=tuple(doc.get("subclass_relations", ("P279",))),
            service=ServiceConfig(
                port=int(service_doc.get("port", 8100)),
                token=os.environ.get("KGFORGE_TOKEN", service_doc.get("token", "")),
                admin_token=os.environ.get("KGFORGE_ADMIN_TOKEN", service_doc.get("admin_token", "")),
            ),
        )


@dataclass
class IngestResult:
    triples: list[Triple]
    documents: list[Document]
    fingerprints: dict[str, Fingerprint]
    entities: list[str]
    text_predicates: tuple[str, ...]


def run_ingest(config: PipelineConfig, version: int = 1) -> IngestResult:
    triples: list[Triple] = []
    documents: list[Document] = []
    texts_per_entity: dict[str, list[str]] = {}
    entities: set[str] = set()
    text_predicates: list[str] = []
    for mapping_path in config.mappings:
        spec = load_mapping(mapping_path)
        for rule in spec.properties:
            if rule.kind == "text-payload" and rule.predicate not in text_predicates:
                text_predicates.append(rule.predicate)
        if spec.source not in config.sources:
            raise MappingError(f"no source configured for mapping {spec.source!r}")
        for record in load_source_records(config.sources[spec.source], spec.source):
            out = record_to_triples(record.data, spec)
            triples.extend(out.triples)
            entities.add(out.entity.value)
            for ref, ref_type in out.refs:
                triples.append(Triple(ref, RDF_TYPE, Iri(ref_type)))
                entities.add(ref.value)
            for text in out.texts:
                documents.append(Document(doc_id=text.doc_id, entity=text.entity, text=text.text, year=text.year))
                texts_per_entity.setdefault(text.entity, []).append(text.text)
    fingerprints = {
        entity: entity_fingerprint(entity, texts, version)
        for entity, texts in texts_per_entity.items()
    }
    return IngestResult(
        triples=triples,
        documents=documents,
        fingerprints=fingerprints,
        entities=sorted(entities),
        text_predicates=tuple(text_predicates),
    )


def run_extract(
    config: PipelineConfig,
    documents: list[Document],
    prior_fingerprints: Optional[dict[str, Fingerprint]] = None,
    prior_facts: Optional[list[ExtractedFact]] = None,
) -> list[ExtractedFact]:
    """Extract facts, reusing prior output for entities whose text payloads
    are unchanged according to the last extraction's fingerprint ledger."""
    gazetteer = load_gazetteer(config.gazetteer) if config.gazetteer else []
    rules = load_rules(config.rules) if config.rules else []
    prior_by_doc: dict[str, list[ExtractedFact]] = {}
    for fact in prior_facts or []:
        prior_by_doc.setdefault(fact.evidence.doc_id, []).append(fact)
    texts_per_entity: dict[str, list[str]] = {}
    for doc in documents:
        texts_per_entity.setdefault(doc.entity, []).append(doc.text)
    unchanged: set[str] = set()
    if prior_fingerprints is not None and prior_facts is not None:
        for entity, texts in texts_per_entity.items():
            joined = "\x1e".join(texts)
            if not needs_reextraction(entity, joined, prior_fingerprints.get(entity)):
                unchanged.add(entity)
    facts: list[ExtractedFact] = []
    for doc in documents:
        if doc.entity in unchanged:
            facts.extend(prior_by_doc.get(doc.doc_id, []))
        else:
            facts.extend(extract_document(doc, gazetteer, rules, config.abbreviations))
    return facts


@dataclass
class BuildResult:
    kg: GraphSnapshot
    model: VsmModel
    hierarchy: TypeHierarchy
    recommender: Recommender
    documents: list[Document]
    version: int


def vsm_config(config: PipelineConfig, text_predicates: tuple[str, ...]) -> VsmConfig:
    return VsmConfig(
        group_weights=config.group_weights,
        stopwords=frozenset(config.stopwords),
        text_predicates=text_predicates,
        person_types=config.person_types,
        hop_predicates=config.hop_predicates,
    )


def run_build(
    config: PipelineConfig,
    ingest_result: IngestResult,
    facts: list[ExtractedFact],
    version: int = 1,
) -> BuildResult:
    builder = GraphBuilder()
    builder.extend(ingest_result.triples)
    doc_index = {doc.doc_id: doc for doc in ingest_result.documents}
    for doc in ingest_result.documents:
        builder.extend(document_triples(doc, config.base_namespace))
    for fact in facts:
        doc = doc_index.get(fact.evidence.doc_id)
        owner = Iri(doc.entity) if doc else None
        builder.extend(reify(fact, owner=owner, base=config.base_namespace))
    if config.background_kb:
        with open(config.background_kb, "r", encoding="utf-8") as fh:
            import_background_kb(fh, builder)
    kg = builder.build(version=version)
    model = fit(ingest_result.entities, kg, vsm_config(config, ingest_result.text_predicates))
    hierarchy = build_hierarchy(kg, config.subclass_relations)
    recommender = Recommender(model, kg, config.authorship_predicates)
    return BuildResult(
        kg=kg,
        model=model,
        hierarchy=hierarchy,
        recommender=recommender,
        documents=ingest_result.documents,
        version=version,
    )


def build_state(config: PipelineConfig, version: int = 1) -> BuildResult:
    """Run all three stages in memory (used by `serve` and hot reload)."""
    ingest_result = run_ingest(config, version=version)
    facts = run_extract(config, ingest_result.documents)
    return run_build(config, ingest_result, facts, version=version)


# --- artifact IO -------------------------------------------------------------

def write_documents_jsonl(path: Path, documents: list[Document]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in documents:
            fh.write(
                json.dumps(
                    {"doc_id": doc.doc_id, "entity": doc.entity, "text": doc.text, "year": doc.year},
                    sort_keys=True,
                )
            )
            fh.write("\n")


def read_documents_jsonl(path: Path) -> list[Document]:
    documents = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                doc = json.loads(line)
                documents.append(
                    Document(doc_id=doc["doc_id"], entity=doc["entity"], text=doc["text"], year=doc.get("year"))
                )
    return documents


@dataclass
class Artifacts:
    out_dir: Path

    @property
    def integration(self) -> Path:
        return self.out_dir / "integration.nt"

    @property
    def documents(self) -> Path:
        return self.out_dir / "documents.jsonl"

    @property
    def fingerprints(self) -> Path:
        return self.out_dir / "fingerprints.jsonl"

    @property
    def facts(self) -> Path:
        return self.out_dir / "facts.jsonl"

    @property
    def extraction_ledger(self) -> Path:
        # fingerprints as of the last extraction run, for change detection
        return self.out_dir / "facts.fingerprints.jsonl"

    @property
    def graph(self) -> Path:
        return self.out_dir / "graph.nt"

    @property
    def model(self) -> Path:
        return self.out_dir / "model.json"


def ingest_to_dir(config: PipelineConfig, out_dir: Path, version: int = 1) -> IngestResult:
    artifacts = Artifacts(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = run_ingest(config, version=version)
    snapshot = GraphBuilder(result.triples).build()
    artifacts.integration.write_bytes(snapshot.export_canonical())
    write_documents_jsonl(artifacts.documents, result.documents)
    write_fingerprints(artifacts.fingerprints, result.fingerprints.values())
    return result


def extract_to_dir(config: PipelineConfig, out_dir: Path, version: int = 1) -> list[ExtractedFact]:
    artifacts = Artifacts(out_dir)
    if not artifacts.documents.exists():
        raise KgforgeError(f"missing {artifacts.documents}; run ingest first")
    documents = read_documents_jsonl(artifacts.documents)
    prior_fingerprints = None
    prior_facts = None
    if artifacts.facts.exists() and artifacts.extraction_ledger.exists():
        prior_fingerprints = read_fingerprints(artifacts.extraction_ledger)
        with open(artifacts.facts, "r", encoding="utf-8") as fh:
            prior_facts = import_external_facts(fh)
    facts = run_extract(config, documents, prior_fingerprints, prior_facts)
    with open(artifacts.facts, "w", encoding="utf-8") as fh:
        fh.write(export_facts_jsonl(facts))
    texts_per_entity: dict[str, list[str]] = {}
    for doc in documents:
        texts_per_entity.setdefault(doc.entity, []).append(doc.text)
    write_fingerprints(
        artifacts.extraction_ledger,
        (entity_fingerprint(entity, texts, version) for entity, texts in texts_per_entity.items()),
    )
    return facts


def build_to_dir(config: PipelineConfig, out_dir: Path, version: int = 1) -> BuildResult:
    artifacts = Artifacts(out_dir)
    for required in (artifacts.integration, artifacts.documents, artifacts.facts):
        if not required.exists():
            raise KgforgeError(f"missing {required}; run ingest and extract first")
    ingest_result = run_ingest(config, version=version)
    with open(artifacts.facts, "r", encoding="utf-8") as fh:
        facts = import_external_facts(fh)
    result = run_build(config, ingest_result, facts, version=version)
    artifacts.graph.write_bytes(result.kg.export_canonical())
    dump_model(result.model, artifacts.model)
    return result


def load_state_from_dir(config: PipelineConfig, out_dir: Path, version: int = 1) -> BuildResult:
    """Rehydrate a BuildResult from staged artifacts (no source access)."""
    artifacts = Artifacts(out_dir)
    for required in (artifacts.graph, artifacts.model, artifacts.documents):
        if not required.exists():
            raise KgforgeError(f"missing {required}; run the build first")
    kg = import_canonical(
        artifacts.graph.read_bytes(),
        statement_ns=statement_namespace(config.base_namespace),
        version=version,
    )
    model = load_model(artifacts.model)
    hierarchy = build_hierarchy(kg, config.subclass_relations)
    recommender = Recommender(model, kg, config.authorship_predicates)
    return BuildResult(
        kg=kg,
        model=model,
        hierarchy=hierarchy,
        recommender=recommender,
        documents=read_documents_jsonl(artifacts.documents),
        version=version,
    )
