"""In-memory triple store: immutable indexed snapshots with canonical export.

The store holds a set of triples over three term kinds (IRIs, literals,
statement nodes). Writes go through a single-writer GraphBuilder; `build()`
publishes an immutable GraphSnapshot that is safe to share across threads.
Canonical serialization is the N-Triples subset with bytewise-sorted lines,
so equal triple sets always export to identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

from . import ntriples
from .errors import BuildStateError, ParseError, StructuralError

DEFAULT_BASE_NAMESPACE = "urn:kg:"


def statement_namespace(base: str = DEFAULT_BASE_NAMESPACE) -> str:
    return base + "stmt/"


@dataclass(frozen=True)
class Iri:
    value: str

    def __post_init__(self):
        if not ntriples.valid_iri(self.value):
            raise StructuralError(f"not a valid absolute IRI: {self.value!r}")


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: Optional[str] = None
    language: Optional[str] = None

    def __post_init__(self):
        if self.datatype is not None and self.language is not None:
            raise StructuralError("literal cannot carry both datatype and language")
        if self.datatype is not None and not ntriples.valid_iri(self.datatype):
            raise StructuralError(f"bad datatype IRI: {self.datatype!r}")
        if self.language is not None and not ntriples.valid_language_tag(self.language):
            raise StructuralError(f"bad language tag: {self.language!r}")


@dataclass(frozen=True)
class StatementNode:
    """Addressable node for a reified statement; serialized as its IRI."""

    value: str

    def __post_init__(self):
        if not ntriples.valid_iri(self.value):
            raise StructuralError(f"not a valid statement IRI: {self.value!r}")

    @property
    def statement_id(self) -> str:
        return self.value.rsplit("/", 1)[-1]


Term = Union[Iri, Literal, StatementNode]


def term_text(term: Term) -> str:
    """Canonical N-Triples text of a term; doubles as the deterministic sort key."""
    if isinstance(term, (Iri, StatementNode)):
        return f"<{term.value}>"
    if isinstance(term, Literal):
        body = f'"{ntriples.escape_literal(term.lexical)}"'
        if term.language is not None:
            return f"{body}@{term.language}"
        if term.datatype is not None:
            return f"{body}^^<{term.datatype}>"
        return body
    raise StructuralError(f"not a term: {term!r}")


@dataclass(frozen=True)
class Triple:
    subject: Union[Iri, StatementNode]
    predicate: Iri
    object: Term

    def __post_init__(self):
        if isinstance(self.subject, Literal):
            raise StructuralError("literal in subject position")
        if not isinstance(self.subject, (Iri, StatementNode)):
            raise StructuralError(f"bad subject: {self.subject!r}")
        if not isinstance(self.predicate, Iri):
            raise StructuralError(f"bad predicate: {self.predicate!r}")
        if not isinstance(self.object, (Iri, Literal, StatementNode)):
            raise StructuralError(f"bad object: {self.object!r}")

    def sort_key(self) -> tuple[str, str, str]:
        return (term_text(self.subject), term_text(self.predicate), term_text(self.object))


def serialize_triple(t: Triple) -> str:
    return f"{term_text(t.subject)} {term_text(t.predicate)} {term_text(t.object)} ."


def _token_to_term(token, position: str, lineno: int, stmt_ns: str) -> Term:
    if token[0] == "iri":
        value = token[1]
        if value.startswith(stmt_ns):
            return StatementNode(value)
        return Iri(value)
    _, lexical, datatype, language = token
    if position == "subject":
        raise ParseError("literal in subject position", line=lineno)
    if position == "predicate":
        raise ParseError("literal in predicate position", line=lineno)
    return Literal(lexical, datatype=datatype, language=language)


class GraphSnapshot:
    """Immutable, fully indexed triple set. Never mutated after publication."""

    __slots__ = ("version", "_triples", "_sorted", "_spo", "_pos", "_osp")

    def __init__(self, triples: Iterable[Triple], version: int = 1):
        self.version = version
        self._triples = frozenset(triples)
        self._sorted = tuple(sorted(self._triples, key=Triple.sort_key))
        spo: dict = {}
        pos: dict = {}
        osp: dict = {}
        for t in self._sorted:
            spo.setdefault(t.subject, {}).setdefault(t.predicate, set()).add(t.object)
            pos.setdefault(t.predicate, {}).setdefault(t.object, set()).add(t.subject)
            osp.setdefault(t.object, {}).setdefault(t.subject, set()).add(t.predicate)
        self._spo = spo
        self._pos = pos
        self._osp = osp

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, t: Triple) -> bool:
        return t in self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._sorted)

    @property
    def triples(self) -> frozenset:
        return self._triples

    def index_cardinalities(self) -> tuple[int, int, int]:
        """Full enumeration counts of the SPO, POS and OSP indexes."""
        spo = sum(len(objs) for preds in self._spo.values() for objs in preds.values())
        pos = sum(len(subs) for objs in self._pos.values() for subs in objs.values())
        osp = sum(len(preds) for subs in self._osp.values() for preds in subs.values())
        return (spo, pos, osp)

    def match(
        self,
        subject: Optional[Term] = None,
        predicate: Optional[Iri] = None,
        obj: Optional[Term] = None,
    ) -> Iterator[Triple]:
        """Stream triples agreeing with all bound positions, in index order."""
        s, p, o = subject, predicate, obj
        if s is None and p is None and o is None:
            yield from self._sorted
            return
        if s is not None and p is not None and o is not None:
            t = Triple(s, p, o)
            if t in self._triples:
                yield t
            return
        found: list[Triple] = []
        if s is not None:
            preds = self._spo.get(s, {})
            items = [(p, preds.get(p, set()))] if p is not None else preds.items()
            for pred, objs in items:
                for candidate in objs:
                    if o is None or candidate == o:
                        found.append(Triple(s, pred, candidate))
        elif p is not None:
            objs = self._pos.get(p, {})
            items = [(o, objs.get(o, set()))] if o is not None else objs.items()
            for obj_term, subjects in items:
                for subj in subjects:
                    found.append(Triple(subj, p, obj_term))
        else:
            for subj, preds in self._osp.get(o, {}).items():
                for pred in preds:
                    found.append(Triple(subj, pred, o))
        found.sort(key=Triple.sort_key)
        yield from found

    def objects(self, subject: Term, predicate: Iri) -> list[Term]:
        objs = self._spo.get(subject, {}).get(predicate, set())
        return sorted(objs, key=term_text)

    def subjects(self, predicate: Iri, obj: Term) -> list[Term]:
        subs = self._pos.get(predicate, {}).get(obj, set())
        return sorted(subs, key=term_text)

    def export_canonical(self) -> bytes:
        """One sorted N-Triples line per triple, UTF-8, trailing newline."""
        lines = sorted(serialize_triple(t).encode("utf-8") for t in self._triples)
        if not lines:
            return b""
        return b"\n".join(lines) + b"\n"


class GraphBuilder:
    """Single-writer accumulation phase; sealed once a snapshot is built."""

    def __init__(self, triples: Iterable[Triple] = ()):
        self._triples: set[Triple] = set()
        self._sealed = False
        self.extend(triples)

    def insert(self, t: Triple) -> bool:
        """Add one triple; True iff it was not already present."""
        if self._sealed:
            raise BuildStateError("builder already published a snapshot")
        if not isinstance(t, Triple):
            raise StructuralError(f"not a triple: {t!r}")
        if t in self._triples:
            return False
        self._triples.add(t)
        return True

    def extend(self, triples: Iterable[Triple]) -> int:
        return sum(1 for t in triples if self.insert(t))

    def __len__(self) -> int:
        return len(self._triples)

    def build(self, version: int = 1) -> GraphSnapshot:
        self._sealed = True
        return GraphSnapshot(self._triples, version=version)


def import_canonical(
    doc: Union[bytes, str],
    statement_ns: str = statement_namespace(),
    version: int = 1,
) -> GraphSnapshot:
    """Parse an N-Triples subset document into a snapshot.

    Duplicate lines are legal and collapse under set semantics. IRIs under
    `statement_ns` come back as StatementNode terms so that export/import
    round-trips reproduce the identical triple set.
    """
    if isinstance(doc, bytes):
        try:
            text = doc.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not valid UTF-8: {exc}") from exc
    else:
        text = doc
    triples: set[Triple] = set()
    for lineno, line in enumerate(text.split("\n"), start=1):
        parsed = ntriples.parse_line(line, lineno)
        if parsed is None:
            continue
        s_tok, p_tok, o_tok = parsed
        s = _token_to_term(s_tok, "subject", lineno, statement_ns)
        p = _token_to_term(p_tok, "predicate", lineno, statement_ns)
        o = _token_to_term(o_tok, "object", lineno, statement_ns)
        if isinstance(p, StatementNode):
            raise ParseError("statement node in predicate position", line=lineno)
        triples.add(Triple(s, p, o))
    return GraphSnapshot(triples, version=version)
