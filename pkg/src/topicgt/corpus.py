"""Corpus ingestion and preprocessing into an integer-encoded corpus.

The pipeline is fixed: section filter -> tokenize -> stopword removal
-> (optional prefix strip) -> (optional stemming) -> vocabulary with
document-frequency pruning -> integer encoding. Documents left empty by
the pipeline are dropped and reported, never silently lost.

Everything here is pure and deterministic: the same (corpus, config)
pair always yields a byte-identical serialized EncodedCorpus.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ContractViolation, CorruptFile
from .stemming import stem, strip_prefix
from .stopwords import default_stopwords

SCHEMA_VERSION = 1

# maximal runs of letters; digits, punctuation and underscores separate
_TOKEN_RE = re.compile(r"[^\W\d_]+", re.UNICODE)


@dataclass(frozen=True)
class Document:
    doc_id: str
    title: str = ""
    section_tags: tuple[str, ...] = ()
    raw_text: str = ""


@dataclass
class Corpus:
    """Raw ingested documents plus a report of what was skipped."""

    documents: list[Document]
    skipped: list[dict] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.documents)


@dataclass(frozen=True)
class PreprocessConfig:
    stopword_list: frozenset[str] = field(default_factory=default_stopwords)
    min_token_length: int = 2
    min_document_frequency: int = 2
    stemming_enabled: bool = True
    prefix_stripping_enabled: bool = False
    section_filter: frozenset[str] | None = None

    def __post_init__(self):
        if self.min_token_length < 1:
            raise ContractViolation(
                "min_token_length must be >= 1", field="min_token_length"
            )
        if self.min_document_frequency < 1:
            raise ContractViolation(
                "min_document_frequency must be >= 1", field="min_document_frequency"
            )

    def to_dict(self) -> dict:
        return {
            "stopword_list": sorted(self.stopword_list),
            "min_token_length": self.min_token_length,
            "min_document_frequency": self.min_document_frequency,
            "stemming_enabled": self.stemming_enabled,
            "prefix_stripping_enabled": self.prefix_stripping_enabled,
            "section_filter": (
                sorted(self.section_filter) if self.section_filter is not None else None
            ),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "PreprocessConfig":
        return cls(
            stopword_list=frozenset(data["stopword_list"]),
            min_token_length=data["min_token_length"],
            min_document_frequency=data["min_document_frequency"],
            stemming_enabled=data["stemming_enabled"],
            prefix_stripping_enabled=data.get("prefix_stripping_enabled", False),
            section_filter=(
                frozenset(data["section_filter"])
                if data.get("section_filter") is not None
                else None
            ),
        )


@dataclass
class Vocabulary:
    """Bijective word <-> contiguous-id mapping with document frequencies."""

    id_to_word: list[str]
    document_frequency: list[int]
    word_to_id: dict[str, int] = field(init=False)

    def __post_init__(self):
        self.word_to_id = {w: i for i, w in enumerate(self.id_to_word)}
        if len(self.word_to_id) != len(self.id_to_word):
            raise ContractViolation("vocabulary contains duplicate words")

    def __len__(self) -> int:
        return len(self.id_to_word)

    def __contains__(self, word: str) -> bool:
        return word in self.word_to_id


@dataclass
class EncodedCorpus:
    vocabulary: Vocabulary
    doc_ids: list[str]
    titles: list[str]
    docs: list[list[int]]  # token-id sequences, raw-text order preserved
    provenance: PreprocessConfig
    report: dict = field(default_factory=dict)

    @property
    def num_documents(self) -> int:
        return len(self.docs)

    @property
    def total_tokens(self) -> int:
        return sum(len(d) for d in self.docs)

    @property
    def corpus_id(self) -> str:
        """Content-derived identifier, stable for identical inputs."""
        payload = json.dumps(
            {"vocab": self.vocabulary.id_to_word, "docs": self.docs,
             "doc_ids": self.doc_ids},
            sort_keys=True, separators=(",", ":"),
        )
        return "c" + hashlib.sha256(payload.encode()).hexdigest()[:12]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "corpus_id": self.corpus_id,
            "vocabulary": {
                "words": self.vocabulary.id_to_word,
                "document_frequency": self.vocabulary.document_frequency,
            },
            "doc_ids": self.doc_ids,
            "titles": self.titles,
            "docs": self.docs,
            "provenance": self.provenance.to_dict(),
            "report": self.report,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: Mapping) -> "EncodedCorpus":
        try:
            vocab = Vocabulary(
                id_to_word=list(data["vocabulary"]["words"]),
                document_frequency=list(data["vocabulary"]["document_frequency"]),
            )
            enc = cls(
                vocabulary=vocab,
                doc_ids=list(data["doc_ids"]),
                titles=list(data.get("titles") or [""] * len(data["doc_ids"])),
                docs=[list(d) for d in data["docs"]],
                provenance=PreprocessConfig.from_dict(data["provenance"]),
                report=dict(data.get("report", {})),
            )
        except (KeyError, TypeError) as exc:
            raise CorruptFile(f"encoded corpus is missing or has invalid field: {exc}")
        return enc

    @classmethod
    def from_json(cls, text: str) -> "EncodedCorpus":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CorruptFile(f"encoded corpus is not valid JSON: {exc}")
        return cls.from_dict(data)


def tokenize(raw_text: str, config: PreprocessConfig) -> list[str]:
    """Lowercase maximal letter runs, dropping tokens below the length floor."""
    return [
        tok
        for tok in _TOKEN_RE.findall(raw_text.lower())
        if len(tok) >= config.min_token_length
    ]


def remove_stopwords(tokens: Sequence[str], config: PreprocessConfig) -> list[str]:
    return [t for t in tokens if t not in config.stopword_list]


def _preprocess_document(doc: Document, config: PreprocessConfig) -> list[str]:
    tokens = remove_stopwords(tokenize(doc.raw_text, config), config)
    if config.prefix_stripping_enabled:
        tokens = [strip_prefix(t) for t in tokens]
    if config.stemming_enabled:
        tokens = [stem(t) for t in tokens]
    return tokens


def _section_match(doc: Document, section_filter: frozenset[str] | None) -> bool:
    if section_filter is None:
        return True
    return bool(set(doc.section_tags) & section_filter)


def build_encoded_corpus(corpus: Corpus, config: PreprocessConfig) -> EncodedCorpus:
    """Run the full preprocessing pipeline and encode against a pruned vocabulary."""
    if not corpus.documents:
        raise ContractViolation("corpus contains no documents")

    dropped_documents: list[dict] = []
    kept: list[tuple[Document, list[str]]] = []
    for doc in corpus.documents:
        if not _section_match(doc, config.section_filter):
            dropped_documents.append(
                {"doc_id": doc.doc_id, "reason": "section_filter"}
            )
            continue
        kept.append((doc, _preprocess_document(doc, config)))

    # document frequency over the surviving documents
    df: dict[str, int] = {}
    for _, tokens in kept:
        for word in set(tokens):
            df[word] = df.get(word, 0) + 1

    kept_words = sorted(w for w, c in df.items() if c >= config.min_document_frequency)
    dropped_words = {w: c for w, c in df.items() if c < config.min_document_frequency}
    vocab = Vocabulary(
        id_to_word=kept_words,
        document_frequency=[df[w] for w in kept_words],
    )

    doc_ids: list[str] = []
    titles: list[str] = []
    docs: list[list[int]] = []
    for doc, tokens in kept:
        ids = [vocab.word_to_id[t] for t in tokens if t in vocab.word_to_id]
        if not ids:
            dropped_documents.append(
                {"doc_id": doc.doc_id, "reason": "empty_after_preprocessing"}
            )
            continue
        doc_ids.append(doc.doc_id)
        titles.append(doc.title)
        docs.append(ids)

    if not docs:
        raise ContractViolation("all documents are empty after preprocessing")

    report = {
        "documents_in": len(corpus.documents),
        "documents_out": len(docs),
        "dropped_documents": dropped_documents,
        "dropped_words": dict(sorted(dropped_words.items())),
        "vocabulary_size": len(vocab),
        "total_tokens": sum(len(d) for d in docs),
    }
    return EncodedCorpus(
        vocabulary=vocab,
        doc_ids=doc_ids,
        titles=titles,
        docs=docs,
        provenance=config,
        report=report,
    )


def _document_from_record(record: Mapping, line_no: int) -> Document:
    for key in ("doc_id", "raw_text"):
        if key not in record:
            raise CorruptFile(f"line {line_no}: missing field '{key}'")
    if not isinstance(record["doc_id"], str) or not record["doc_id"]:
        raise CorruptFile(f"line {line_no}: field 'doc_id' must be a non-empty string")
    if not isinstance(record["raw_text"], str):
        raise CorruptFile(f"line {line_no}: field 'raw_text' must be a string")
    tags = record.get("section_tags", [])
    if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
        raise CorruptFile(
            f"line {line_no}: field 'section_tags' must be a list of strings"
        )
    return Document(
        doc_id=record["doc_id"],
        title=str(record.get("title", "")),
        section_tags=tuple(tags),
        raw_text=record["raw_text"],
    )


def _ingest_jsonl(path: Path) -> Corpus:
    documents: list[Document] = []
    skipped: list[dict] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorruptFile(f"line {line_no}: malformed JSON ({exc.msg})")
            if not isinstance(record, dict):
                raise CorruptFile(f"line {line_no}: expected a JSON object")
            doc = _document_from_record(record, line_no)
            if doc.doc_id in seen:
                raise ContractViolation(
                    f"duplicate doc_id '{doc.doc_id}' (line {line_no})",
                    field="doc_id",
                )
            seen.add(doc.doc_id)
            if not doc.raw_text.strip():
                skipped.append({"doc_id": doc.doc_id, "reason": "empty_text"})
                continue
            documents.append(doc)
    return Corpus(documents=documents, skipped=skipped)


def _ingest_directory(path: Path, manifest: Mapping | None) -> Corpus:
    documents: list[Document] = []
    skipped: list[dict] = []
    manifest = manifest or {}
    for txt_path in sorted(path.glob("*.txt")):
        doc_id = txt_path.stem
        text = txt_path.read_text(encoding="utf-8")
        if not text.strip():
            skipped.append({"doc_id": doc_id, "reason": "empty_file"})
            continue
        meta = manifest.get(doc_id, {})
        documents.append(
            Document(
                doc_id=doc_id,
                title=str(meta.get("title", doc_id)),
                section_tags=tuple(meta.get("section_tags", ())),
                raw_text=text,
            )
        )
    return Corpus(documents=documents, skipped=skipped)


def ingest(source_path, manifest: Mapping | None = None) -> Corpus:
    """Read documents from a directory of .txt files or a JSONL file.

    JSONL lines are objects with doc_id, title, section_tags and
    raw_text. For directories, doc_ids are the file stems and the
    optional manifest (doc_id -> {title, section_tags}) supplies
    metadata. Duplicate doc_ids are rejected; empty documents are
    skipped and reported.
    """
    path = Path(source_path)
    if path.is_dir():
        return _ingest_directory(path, manifest)
    if path.is_file():
        return _ingest_jsonl(path)
    raise FileNotFoundError(f"no such file or directory: {path}")
