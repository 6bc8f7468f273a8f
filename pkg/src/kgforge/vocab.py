"""Vocabulary IRIs: standard RDF terms plus this graph's own predicates.

Entities, types and relations linked to the background knowledge base keep
their Wikidata-style identifiers (Q…/P…) and are minted under the public
Wikidata namespaces so external tooling can follow them.
"""

from urllib.parse import quote, unquote

from .store import DEFAULT_BASE_NAMESPACE, Iri

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
WD_ENTITY_NS = "http://www.wikidata.org/entity/"
WD_PROP_NS = "http://www.wikidata.org/prop/direct/"

RDF_TYPE = Iri(RDF_NS + "type")
RDF_STATEMENT = Iri(RDF_NS + "Statement")
RDF_SUBJECT = Iri(RDF_NS + "subject")
RDF_PREDICATE = Iri(RDF_NS + "predicate")
RDF_OBJECT = Iri(RDF_NS + "object")
RDFS_LABEL = Iri(RDFS_NS + "label")
RDFS_SUBCLASS_OF = Iri(RDFS_NS + "subClassOf")

XSD_DATE = XSD_NS + "date"
XSD_DECIMAL = XSD_NS + "decimal"
XSD_INTEGER = XSD_NS + "integer"
XSD_BOOLEAN = XSD_NS + "boolean"

# Wikidata relation ids with special meaning during background import.
INSTANCE_OF = "P31"
SUBCLASS_OF = "P279"


def vocab_iri(name: str, base: str = DEFAULT_BASE_NAMESPACE) -> Iri:
    return Iri(base + "vocab/" + name)


# Predicates of the reified-statement model.
SUBJECT_MENTION = vocab_iri("subjectMention")
OBJECT_MENTION = vocab_iri("objectMention")
SUBJECT_TYPE = vocab_iri("subjectType")
OBJECT_TYPE = vocab_iri("objectType")
EVIDENCE_SENTENCE = vocab_iri("evidenceSentence")
EVIDENCE_DOC = vocab_iri("evidenceDoc")
EVIDENCE_OFFSET = vocab_iri("evidenceOffset")
CONFIDENCE = vocab_iri("confidence")
STATEMENT_LINK = vocab_iri("statement")

# Document metadata.
DOC_ID = vocab_iri("docId")
DOC_YEAR = vocab_iri("year")


def wd(entity_id: str) -> Iri:
    return Iri(WD_ENTITY_NS + quote(entity_id, safe=""))


def wdt(relation_id: str) -> Iri:
    return Iri(WD_PROP_NS + quote(relation_id, safe=""))


def wd_id(iri_value: str) -> str:
    """Bare identifier for a Wikidata-namespace IRI; full IRI otherwise."""
    for ns in (WD_ENTITY_NS, WD_PROP_NS):
        if iri_value.startswith(ns):
            return unquote(iri_value[len(ns):])
    return iri_value


def doc_iri(doc_id: str, base: str = DEFAULT_BASE_NAMESPACE) -> Iri:
    return Iri(base + "doc/" + quote(doc_id, safe=""))
