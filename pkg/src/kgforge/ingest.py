"""Declarative mapping of siloed JSON records into triples.

A MappingSpec (see docs/mapping.schema.json) describes how one source's
records become graph assertions: a deterministic id rule mints the entity
IRI, property rules emit literal/date/entity-ref triples, and text-payload
rules additionally register the text as a document for the extraction
pipeline. Normalization and minting are pure, so re-ingesting the same
records always reproduces the same IRIs and the same canonical bytes.
"""

from __future__ import annotations

import datetime
import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional
from urllib.parse import quote

from .errors import MappingError, NormalizationError, ResolutionError
from .store import Iri, Literal, Triple
from .vocab import RDF_TYPE, XSD_BOOLEAN, XSD_DATE, XSD_DECIMAL, XSD_INTEGER

VALID_KINDS = ("literal", "date", "entity-ref", "text-payload")
DATE_FORMATS = ("mdy", "dmy", "ymd")
_WS_RUN = re.compile(r"\s+")
_DATE_SPLIT = re.compile(r"[/.\-]")


@dataclass(frozen=True)
class IdRule:
    keys: tuple[str, ...]
    namespace: str


@dataclass(frozen=True)
class PropertyRule:
    path: str
    predicate: str
    kind: str
    normalizers: tuple[str, ...] = ()
    date_format: Optional[str] = None
    ref_namespace: Optional[str] = None
    ref_key: Optional[str] = None
    ref_type: Optional[str] = None
    required: bool = False


@dataclass(frozen=True)
class MappingSpec:
    source: str
    type_iri: str
    id_rule: IdRule
    properties: tuple[PropertyRule, ...]
    year_path: Optional[str] = None


@dataclass(frozen=True)
class RegisteredText:
    """Text payload handed to the extraction module."""

    doc_id: str
    entity: str
    text: str
    year: Optional[int] = None


@dataclass(frozen=True)
class SourceRecord:
    data: Any
    source: str
    retrieved_at: Optional[str] = None


@dataclass(frozen=True)
class Fingerprint:
    iri: str
    digest: str
    version: int


@dataclass
class RecordOutput:
    entity: Iri
    triples: list[Triple] = field(default_factory=list)
    texts: list[RegisteredText] = field(default_factory=list)
    # referenced-entity typing, asserted by the pipeline outside the record
    # mapping itself so each record yields exactly 1 + Σ resolved scalars
    refs: list[tuple[Iri, str]] = field(default_factory=list)


def _require_absolute_iri(value: Any, what: str) -> str:
    if not isinstance(value, str) or ":" not in value or not re.match(r"^[A-Za-z][A-Za-z0-9+.\-]*:", value):
        raise MappingError(f"{what} must be an absolute IRI, got {value!r}")
    return value


def parse_mapping(doc: dict) -> MappingSpec:
    """Validate a mapping document against the schema in docs/."""
    if not isinstance(doc, dict):
        raise MappingError("mapping document must be a JSON object")
    source = doc.get("source")
    if not source or not isinstance(source, str):
        raise MappingError("mapping requires a non-empty 'source' name")
    type_iri = _require_absolute_iri(doc.get("type"), "'type'")
    id_doc = doc.get("id")
    if not isinstance(id_doc, dict):
        raise MappingError("mapping requires exactly one 'id' rule object")
    keys = id_doc.get("keys")
    if not keys or not isinstance(keys, list) or not all(isinstance(k, str) and k for k in keys):
        raise MappingError("id rule needs a non-empty 'keys' list of paths")
    namespace = _require_absolute_iri(id_doc.get("namespace"), "id rule 'namespace'")
    rules = []
    text_predicates = set()
    for i, rule_doc in enumerate(doc.get("properties", [])):
        where = f"properties[{i}]"
        if not isinstance(rule_doc, dict):
            raise MappingError(f"{where}: must be an object")
        path = rule_doc.get("path")
        if not path or not isinstance(path, str):
            raise MappingError(f"{where}: missing 'path'")
        predicate = _require_absolute_iri(rule_doc.get("predicate"), f"{where} 'predicate'")
        kind = rule_doc.get("kind", "literal")
        if kind not in VALID_KINDS:
            raise MappingError(f"{where}: unknown kind {kind!r}")
        normalizers = tuple(rule_doc.get("normalize", ()))
        for name in normalizers:
            if name != "lowercase":
                raise MappingError(f"{where}: unknown normalizer {name!r}")
        date_format = rule_doc.get("format")
        if kind == "date":
            if date_format not in DATE_FORMATS:
                raise MappingError(f"{where}: date rule needs 'format' in {DATE_FORMATS}")
        elif date_format is not None:
            raise MappingError(f"{where}: 'format' only applies to date rules")
        ref_namespace = ref_key = ref_type = None
        if kind == "entity-ref":
            ref_namespace = _require_absolute_iri(rule_doc.get("namespace"), f"{where} 'namespace'")
            ref_key = rule_doc.get("key")
            if not ref_key or not isinstance(ref_key, str):
                raise MappingError(f"{where}: entity-ref rule missing 'key' path")
            if "type" in rule_doc:
                ref_type = _require_absolute_iri(rule_doc["type"], f"{where} 'type'")
        if kind == "text-payload":
            if predicate in text_predicates:
                raise MappingError(f"{where}: duplicate text-payload predicate {predicate}")
            text_predicates.add(predicate)
        rules.append(
            PropertyRule(
                path=path,
                predicate=predicate,
                kind=kind,
                normalizers=normalizers,
                date_format=date_format,
                ref_namespace=ref_namespace,
                ref_key=ref_key,
                ref_type=ref_type,
                required=bool(rule_doc.get("required", False)),
            )
        )
    year_path = doc.get("year")
    if year_path is not None and not isinstance(year_path, str):
        raise MappingError("'year' must be a path string")
    return MappingSpec(
        source=source,
        type_iri=type_iri,
        id_rule=IdRule(keys=tuple(keys), namespace=namespace),
        properties=tuple(rules),
        year_path=year_path,
    )


def load_mapping(path: Path | str) -> MappingSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_mapping(json.load(fh))


def resolve_path(tree: Any, path: str) -> list[Any]:
    """Resolve a dotted path; lists fan out. Missing steps yield []."""
    current = [tree]
    for step in path.split("."):
        nxt: list[Any] = []
        for node in current:
            if isinstance(node, list):
                node_items = node
            else:
                node_items = [node]
            for item in node_items:
                if isinstance(item, dict) and step in item:
                    nxt.append(item[step])
        current = nxt
    flat: list[Any] = []
    for node in current:
        if isinstance(node, list):
            flat.extend(node)
        else:
            flat.append(node)
    return [v for v in flat if v is not None]


def _parse_date(value: str, fmt: str, path: str) -> str:
    parts = _DATE_SPLIT.split(value.strip())
    if len(parts) != 3 or not all(p.isdigit() for p in parts):
        raise NormalizationError(f"cannot parse date {value!r} with format {fmt}", path=path)
    nums = [int(p) for p in parts]
    if fmt == "mdy":
        month, day, year = nums
    elif fmt == "dmy":
        day, month, year = nums
    else:
        year, month, day = nums
    try:
        parsed = datetime.date(year, month, day)
    except ValueError as exc:
        raise NormalizationError(f"invalid date {value!r}: {exc}", path=path) from exc
    return parsed.isoformat()


def normalize(value: Any, rules: Iterable[str] = (), date_format: Optional[str] = None, path: str = "") -> Any:
    """Trim + collapse whitespace, then optional lowercase and date coercion."""
    if not isinstance(value, str):
        return value
    out = _WS_RUN.sub(" ", value.strip())
    if "lowercase" in rules:
        out = out.lower()
    if date_format is not None:
        out = _parse_date(out, date_format, path)
    return out


def encode_key(value: str) -> str:
    """Percent-encode to the RFC 3986 unreserved set."""
    return quote(value, safe="")


def mint_iri(record: Any, id_rule: IdRule) -> Iri:
    """Deterministic entity IRI from the record's normalized key values."""
    parts = []
    for key_path in id_rule.keys:
        values = resolve_path(record, key_path)
        values = [normalize(v) for v in values]
        values = [v for v in values if v not in (None, "")]
        if not values:
            raise ResolutionError(f"missing key field {key_path!r} for id rule")
        if len(values) > 1:
            raise ResolutionError(f"key field {key_path!r} resolved to {len(values)} values")
        parts.append(encode_key(str(values[0])))
    return Iri(id_rule.namespace + "/".join(parts))


def _scalar_literal(value: Any, rule: PropertyRule, path: str) -> Literal:
    if isinstance(value, bool):
        return Literal("true" if value else "false", datatype=XSD_BOOLEAN)
    if isinstance(value, int):
        return Literal(str(value), datatype=XSD_INTEGER)
    if isinstance(value, float):
        return Literal(repr(value), datatype=XSD_DECIMAL)
    text = normalize(value, rule.normalizers, path=path)
    if rule.kind == "date":
        return Literal(normalize(text, date_format=rule.date_format, path=path), datatype=XSD_DATE)
    return Literal(text)


def record_to_triples(record: Any, spec: MappingSpec) -> RecordOutput:
    """Map one source record: type assertion + one triple per resolved scalar."""
    entity = mint_iri(record, spec.id_rule)
    out = RecordOutput(entity=entity)
    out.triples.append(Triple(entity, RDF_TYPE, Iri(spec.type_iri)))
    year = None
    if spec.year_path:
        year_values = resolve_path(record, spec.year_path)
        if year_values:
            year = int(year_values[0])
    for rule in spec.properties:
        values = resolve_path(record, rule.path)
        if not values:
            if rule.required:
                raise ResolutionError(f"required path {rule.path!r} missing in {spec.source} record")
            continue
        predicate = Iri(rule.predicate)
        for idx, value in enumerate(values):
            if rule.kind == "entity-ref":
                if isinstance(value, dict):
                    keys = resolve_path(value, rule.ref_key)
                    if not keys:
                        raise ResolutionError(
                            f"entity-ref key {rule.ref_key!r} missing under {rule.path!r}"
                        )
                    key_value = keys[0]
                else:
                    key_value = value
                key_text = normalize(str(key_value))
                if not key_text:
                    raise ResolutionError(f"empty entity-ref key under {rule.path!r}")
                ref = Iri(rule.ref_namespace + encode_key(key_text))
                out.triples.append(Triple(entity, predicate, ref))
                if rule.ref_type:
                    out.refs.append((ref, rule.ref_type))
            elif rule.kind == "text-payload":
                text = normalize(value, rule.normalizers, path=rule.path)
                if not isinstance(text, str) or not text:
                    continue
                out.triples.append(Triple(entity, predicate, Literal(text)))
                local = rule.predicate.rstrip("/#").rsplit("/", 1)[-1].rsplit("#", 1)[-1]
                suffix = f".{idx}" if idx else ""
                out.texts.append(
                    RegisteredText(
                        doc_id=f"{entity.value}#{local}{suffix}",
                        entity=entity.value,
                        text=text,
                        year=year,
                    )
                )
            else:
                out.triples.append(Triple(entity, predicate, _scalar_literal(value, rule, rule.path)))
    return out


# --- change fingerprinting -------------------------------------------------

def text_digest(text: str) -> str:
    """Stable 128-bit digest of an entity's text payloads."""
    return hashlib.blake2b(text.encode("utf-8"), digest_size=16).hexdigest()


def entity_fingerprint(entity: str, texts: Iterable[str], version: int) -> Fingerprint:
    joined = "\x1e".join(texts)
    return Fingerprint(iri=entity, digest=text_digest(joined), version=version)


def needs_reextraction(entity: str, text: str, prior: Optional[Fingerprint]) -> bool:
    """True iff there is no prior fingerprint or the text changed."""
    return prior is None or prior.digest != text_digest(text)


def write_fingerprints(path: Path | str, fingerprints: Iterable[Fingerprint]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for fp in sorted(fingerprints, key=lambda f: f.iri):
            fh.write(json.dumps({"iri": fp.iri, "digest": fp.digest, "version": fp.version}, sort_keys=True))
            fh.write("\n")


def read_fingerprints(path: Path | str) -> dict[str, Fingerprint]:
    ledger: dict[str, Fingerprint] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            ledger[doc["iri"]] = Fingerprint(iri=doc["iri"], digest=doc["digest"], version=doc["version"])
    return ledger


# --- source loading --------------------------------------------------------

def load_source_records(location: str | Path, source: str) -> list[SourceRecord]:
    """Fetch a JSON array of records from a file path or HTTP(S) URL.

    Paged HTTP responses may wrap records as {"items": [...], "next": url};
    next-links are followed until exhausted.
    """
    location = str(location)
    if location.startswith(("http://", "https://")):
        import requests

        records: list[Any] = []
        url: Optional[str] = location
        while url:
            response = requests.get(url, timeout=30)
            response.raise_for_status()
            payload = response.json()
            if isinstance(payload, list):
                records.extend(payload)
                url = None
            elif isinstance(payload, dict) and "items" in payload:
                records.extend(payload["items"])
                url = payload.get("next")
            else:
                raise MappingError(f"source {source}: expected a JSON array at {url}")
    else:
        with open(location, "r", encoding="utf-8") as fh:
            records = json.load(fh)
        if not isinstance(records, list):
            raise MappingError(f"source {source}: expected a JSON array in {location}")
    return [SourceRecord(data=r, source=source) for r in records]
