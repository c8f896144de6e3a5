"""Grounded-theory workflow over a topic model.

A project walks four stages: RAW_CODING (mark outlier topics),
EXPERT_CODING (experts label and rate the surviving codes, low-rated
ones are pruned), FOCUS_CODING (codes are grouped into categories,
singleton categories are pruned), THEORY_BUILDING (categories are
aggregated into dimensions). Moving forward requires the current
stage's completion rule; moving "backward" is permitted by running an
earlier-stage operation later, in which case its audit event carries a
retroactive flag.

Every mutation is an audit event. The public operation builds the
event, and an applier validates preconditions against the current
state, mutates, and appends the event; outcome details (generated ids,
pruned items) are written back into the event payload
deterministically. Replaying a project's audit log from its create
event therefore reproduces the exact final state, audit log included.
"""

from __future__ import annotations

import copy
import csv
import io
import json
import os
import tempfile
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Mapping

from .errors import (
    ContractViolation,
    CorruptFile,
    SchemaVersionMismatch,
    StageRuleViolation,
    UnknownResource,
)
from .lda import TopicModel, top_words

SCHEMA_VERSION = 1

STAGES = ("RAW_CODING", "EXPERT_CODING", "FOCUS_CODING", "THEORY_BUILDING")
CODE_STATUSES = ("ACTIVE", "OUTLIER_REMOVED", "RATING_REMOVED")
CATEGORY_KINDS = ("CORE", "GENERIC")
MEMO_KINDS = ("code", "category", "dimension", "project")

MIN_RATING = 1
MAX_RATING = 5
DEFAULT_RATING_THRESHOLD = 2.0


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


@dataclass
class ExpertLabel:
    expert_id: str
    label: str
    rating: int

    def to_dict(self) -> dict:
        return {"expert_id": self.expert_id, "label": self.label, "rating": self.rating}


@dataclass
class Code:
    topic_id: int
    top_words: list[str]
    status: str = "ACTIVE"
    removal_reason: str | None = None
    expert_labels: list[ExpertLabel] = field(default_factory=list)
    aggregate_label: str | None = None

    def to_dict(self) -> dict:
        return {
            "topic_id": self.topic_id,
            "top_words": list(self.top_words),
            "status": self.status,
            "removal_reason": self.removal_reason,
            "expert_labels": [l.to_dict() for l in self.expert_labels],
            "aggregate_label": self.aggregate_label,
        }


@dataclass
class Category:
    category_id: str
    name: str
    kind: str
    member_codes: set[int] = field(default_factory=set)

    def to_dict(self) -> dict:
        return {
            "category_id": self.category_id,
            "name": self.name,
            "kind": self.kind,
            "member_codes": sorted(self.member_codes),
        }


@dataclass
class Dimension:
    dimension_id: str
    name: str
    member_categories: set[str] = field(default_factory=set)

    def to_dict(self) -> dict:
        return {
            "dimension_id": self.dimension_id,
            "name": self.name,
            "member_categories": sorted(self.member_categories),
        }


@dataclass
class Memo:
    memo_id: str
    author: str
    attached_kind: str
    attached_id: str
    text: str
    created_at: str

    def to_dict(self) -> dict:
        return {
            "memo_id": self.memo_id,
            "author": self.author,
            "attached_to": {"kind": self.attached_kind, "id": self.attached_id},
            "text": self.text,
            "created_at": self.created_at,
        }


@dataclass
class AuditEvent:
    seq: int
    timestamp: str
    op: str
    retroactive: bool
    payload: dict

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "timestamp": self.timestamp,
            "op": self.op,
            "retroactive": self.retroactive,
            "payload": copy.deepcopy(self.payload),
        }


@dataclass
class Project:
    project_id: str
    corpus_ref: str
    model_ref: str
    stage: str
    created_at: str
    codes: list[Code] = field(default_factory=list)
    categories: list[Category] = field(default_factory=list)
    dimensions: list[Dimension] = field(default_factory=list)
    memos: list[Memo] = field(default_factory=list)
    audit_log: list[AuditEvent] = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION
    id_counter: int = 0

    @property
    def stage_index(self) -> int:
        return STAGES.index(self.stage)

    def code(self, topic_id: int) -> Code:
        for code in self.codes:
            if code.topic_id == topic_id:
                return code
        raise UnknownResource(f"unknown topic_id {topic_id}")

    def category(self, category_id: str) -> Category:
        for cat in self.categories:
            if cat.category_id == category_id:
                return cat
        raise UnknownResource(f"unknown category {category_id}")

    def dimension(self, dimension_id: str) -> Dimension:
        for dim in self.dimensions:
            if dim.dimension_id == dimension_id:
                return dim
        raise UnknownResource(f"unknown dimension {dimension_id}")

    def active_codes(self) -> list[Code]:
        return [c for c in self.codes if c.status == "ACTIVE"]

    def dimension_of(self, category_id: str) -> Dimension | None:
        for dim in self.dimensions:
            if category_id in dim.member_categories:
                return dim
        return None

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "project_id": self.project_id,
            "corpus_ref": self.corpus_ref,
            "model_ref": self.model_ref,
            "stage": self.stage,
            "created_at": self.created_at,
            "id_counter": self.id_counter,
            "codes": [c.to_dict() for c in self.codes],
            "categories": [c.to_dict() for c in self.categories],
            "dimensions": [d.to_dict() for d in self.dimensions],
            "memos": [m.to_dict() for m in self.memos],
            "audit_log": [e.to_dict() for e in self.audit_log],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data: Mapping) -> "Project":
        def get(container, key, where):
            try:
                return container[key]
            except (KeyError, TypeError):
                raise CorruptFile(f"project file is missing field '{where}{key}'")

        version = get(data, "schema_version", "")
        if version != SCHEMA_VERSION:
            raise SchemaVersionMismatch(
                f"unsupported schema_version {version!r}, expected {SCHEMA_VERSION}"
            )
        try:
            codes = [
                Code(
                    topic_id=int(get(c, "topic_id", "codes.")),
                    top_words=list(get(c, "top_words", "codes.")),
                    status=get(c, "status", "codes."),
                    removal_reason=get(c, "removal_reason", "codes."),
                    expert_labels=[
                        ExpertLabel(
                            expert_id=get(l, "expert_id", "expert_labels."),
                            label=get(l, "label", "expert_labels."),
                            rating=int(get(l, "rating", "expert_labels.")),
                        )
                        for l in get(c, "expert_labels", "codes.")
                    ],
                    aggregate_label=get(c, "aggregate_label", "codes."),
                )
                for c in get(data, "codes", "")
            ]
            categories = [
                Category(
                    category_id=get(c, "category_id", "categories."),
                    name=get(c, "name", "categories."),
                    kind=get(c, "kind", "categories."),
                    member_codes=set(int(t) for t in get(c, "member_codes", "categories.")),
                )
                for c in get(data, "categories", "")
            ]
            dimensions = [
                Dimension(
                    dimension_id=get(d, "dimension_id", "dimensions."),
                    name=get(d, "name", "dimensions."),
                    member_categories=set(get(d, "member_categories", "dimensions.")),
                )
                for d in get(data, "dimensions", "")
            ]
            memos = [
                Memo(
                    memo_id=get(m, "memo_id", "memos."),
                    author=get(m, "author", "memos."),
                    attached_kind=get(get(m, "attached_to", "memos."), "kind", "attached_to."),
                    attached_id=get(get(m, "attached_to", "memos."), "id", "attached_to."),
                    text=get(m, "text", "memos."),
                    created_at=get(m, "created_at", "memos."),
                )
                for m in get(data, "memos", "")
            ]
            audit_log = [
                AuditEvent(
                    seq=int(get(e, "seq", "audit_log.")),
                    timestamp=get(e, "timestamp", "audit_log."),
                    op=get(e, "op", "audit_log."),
                    retroactive=bool(get(e, "retroactive", "audit_log.")),
                    payload=dict(get(e, "payload", "audit_log.")),
                )
                for e in get(data, "audit_log", "")
            ]
        except (TypeError, ValueError) as exc:
            raise CorruptFile(f"project file has an invalid field value: {exc}")

        stage = get(data, "stage", "")
        if stage not in STAGES:
            raise CorruptFile(f"project file has invalid field 'stage': {stage!r}")
        for code in codes:
            if code.status not in CODE_STATUSES:
                raise CorruptFile(
                    f"project file has invalid field 'codes.status': {code.status!r}"
                )

        return cls(
            project_id=get(data, "project_id", ""),
            corpus_ref=get(data, "corpus_ref", ""),
            model_ref=get(data, "model_ref", ""),
            stage=stage,
            created_at=get(data, "created_at", ""),
            codes=codes,
            categories=categories,
            dimensions=dimensions,
            memos=memos,
            audit_log=audit_log,
            schema_version=version,
            id_counter=int(get(data, "id_counter", "")),
        )


def projects_equal(a: Project, b: Project) -> bool:
    """Structural equality, audit log included."""
    return a.to_dict() == b.to_dict()


# --- event machinery -------------------------------------------------

_APPLIERS: dict[str, Callable[[Project, AuditEvent], object]] = {}


def _applier(op: str):
    def register(fn):
        _APPLIERS[op] = fn
        return fn

    return register


def _apply_event(project: Project, event: AuditEvent):
    """Validate and apply one event, then append it to the audit log."""
    try:
        applier = _APPLIERS[event.op]
    except KeyError:
        raise CorruptFile(f"audit log has unknown op {event.op!r}")
    result = applier(project, event)
    project.audit_log.append(event)
    return result


def _record(project: Project, op: str, payload: dict, home_stage: str | None = None):
    retroactive = (
        home_stage is not None and project.stage_index > STAGES.index(home_stage)
    )
    event = AuditEvent(
        seq=len(project.audit_log) + 1,
        timestamp=_now_iso(),
        op=op,
        retroactive=retroactive,
        payload=payload,
    )
    return _apply_event(project, event)


def _require_stage_at_least(project: Project, stage: str, op: str) -> None:
    if project.stage_index < STAGES.index(stage):
        raise StageRuleViolation(
            f"{op} requires stage {stage} or later, project is in {project.stage}"
        )


def _require_stage_exactly(project: Project, stage: str, op: str) -> None:
    if project.stage != stage:
        raise StageRuleViolation(
            f"{op} requires stage {stage}, project is in {project.stage}"
        )


def _require_nonempty(value: str, fieldname: str) -> None:
    if not isinstance(value, str) or not value.strip():
        raise ContractViolation(f"{fieldname} must be a non-empty string", field=fieldname)


def _next_id(project: Project, prefix: str) -> str:
    project.id_counter += 1
    return f"{prefix}_{project.id_counter}"


def _drop_code_from_categories(project: Project, topic_id: int) -> list[str]:
    """Removed codes may not stay category members; returns affected ids."""
    affected = []
    for cat in project.categories:
        if topic_id in cat.member_codes:
            cat.member_codes.discard(topic_id)
            affected.append(cat.category_id)
    return affected


# --- operations ------------------------------------------------------


def create_project(model: TopicModel, project_id: str | None = None) -> Project:
    """Start a project at RAW_CODING with one ACTIVE code per topic."""
    n = model.params.top_n_words
    if n < 1:
        raise ContractViolation(
            "the model must carry at least one top word per topic", field="top_n_words"
        )
    payload = {
        "project_id": project_id or "p" + uuid.uuid4().hex[:12],
        "corpus_ref": model.corpus_ref,
        "model_ref": model.model_id,
        "codes": [
            {"topic_id": k, "top_words": top_words(model, k, n)}
            for k in range(model.num_topics)
        ],
    }
    event = AuditEvent(
        seq=1, timestamp=_now_iso(), op="create_project", retroactive=False,
        payload=payload,
    )
    return _apply_create(event)


def _apply_create(event: AuditEvent) -> Project:
    payload = event.payload
    project = Project(
        project_id=payload["project_id"],
        corpus_ref=payload["corpus_ref"],
        model_ref=payload["model_ref"],
        stage="RAW_CODING",
        created_at=event.timestamp,
        codes=[
            Code(topic_id=int(c["topic_id"]), top_words=list(c["top_words"]))
            for c in payload["codes"]
        ],
        audit_log=[event],
    )
    return project


def replay_audit(events: list[AuditEvent]) -> Project:
    """Rebuild a project by replaying its audit log from the create event."""
    if not events or events[0].op != "create_project":
        raise ContractViolation("audit log must start with a create_project event")
    first = copy.deepcopy(events[0])
    project = _apply_create(first)
    for event in events[1:]:
        _apply_event(project, copy.deepcopy(event))
    return project


def mark_outlier(project: Project, topic_id: int, reason: str) -> Project:
    _record(
        project,
        "mark_outlier",
        {"topic_id": topic_id, "reason": reason},
        home_stage="RAW_CODING",
    )
    return project


@_applier("mark_outlier")
def _apply_mark_outlier(project: Project, event: AuditEvent):
    topic_id = event.payload["topic_id"]
    reason = event.payload["reason"]
    _require_nonempty(reason, "reason")
    code = project.code(topic_id)
    if code.status != "ACTIVE":
        raise ContractViolation(
            f"topic_{topic_id} is already removed ({code.status})", field="topic_id"
        )
    code.status = "OUTLIER_REMOVED"
    code.removal_reason = reason
    event.payload["removed_from_categories"] = _drop_code_from_categories(
        project, topic_id
    )
    return code


def advance_stage(project: Project) -> Project:
    _record(project, "advance_stage", {})
    return project


@_applier("advance_stage")
def _apply_advance_stage(project: Project, event: AuditEvent):
    idx = project.stage_index
    if idx == len(STAGES) - 1:
        raise StageRuleViolation(f"project is already at the final stage {project.stage}")
    if STAGES[idx] == "EXPERT_CODING":
        unlabeled = sorted(
            c.topic_id for c in project.active_codes() if not c.expert_labels
        )
        if unlabeled:
            names = ", ".join(f"topic_{t}" for t in unlabeled)
            raise StageRuleViolation(
                "advancing past EXPERT_CODING requires at least one expert label "
                f"per ACTIVE code; unlabeled: {names}"
            )
    if STAGES[idx] == "FOCUS_CODING" and not project.categories:
        raise StageRuleViolation(
            "advancing past FOCUS_CODING requires at least one category"
        )
    project.stage = STAGES[idx + 1]
    event.payload["from_stage"] = STAGES[idx]
    event.payload["to_stage"] = project.stage
    return project


def submit_expert_label(
    project: Project, expert_id: str, topic_id: int, label: str, rating: int
) -> Project:
    _record(
        project,
        "submit_expert_label",
        {"expert_id": expert_id, "topic_id": topic_id, "label": label, "rating": rating},
        home_stage="EXPERT_CODING",
    )
    return project


@_applier("submit_expert_label")
def _apply_submit_expert_label(project: Project, event: AuditEvent):
    p = event.payload
    _require_stage_at_least(project, "EXPERT_CODING", "submit_expert_label")
    _require_nonempty(p["expert_id"], "expert_id")
    _require_nonempty(p["label"], "label")
    rating = p["rating"]
    if not isinstance(rating, int) or isinstance(rating, bool) or not (
        MIN_RATING <= rating <= MAX_RATING
    ):
        raise ContractViolation(
            f"rating must be an integer in [{MIN_RATING}, {MAX_RATING}]", field="rating"
        )
    code = project.code(p["topic_id"])
    if code.status != "ACTIVE":
        raise ContractViolation(
            f"topic_{code.topic_id} is removed and cannot be labeled", field="topic_id"
        )
    prior = [l for l in code.expert_labels if l.expert_id == p["expert_id"]]
    event.payload["replaced"] = bool(prior)
    for old in prior:
        code.expert_labels.remove(old)
    code.expert_labels.append(ExpertLabel(p["expert_id"], p["label"], rating))
    return code


def set_aggregate_label(project: Project, topic_id: int, label: str) -> Project:
    _record(
        project,
        "set_aggregate_label",
        {"topic_id": topic_id, "label": label},
        home_stage="EXPERT_CODING",
    )
    return project


@_applier("set_aggregate_label")
def _apply_set_aggregate_label(project: Project, event: AuditEvent):
    _require_stage_at_least(project, "EXPERT_CODING", "set_aggregate_label")
    _require_nonempty(event.payload["label"], "label")
    code = project.code(event.payload["topic_id"])
    if not code.expert_labels:
        raise ContractViolation(
            f"topic_{code.topic_id} has no expert labels to aggregate", field="topic_id"
        )
    event.payload["replaced"] = code.aggregate_label is not None
    code.aggregate_label = event.payload["label"]
    return code


def average_rating(project: Project, topic_id: int) -> float:
    """Mean of each expert's current rating for the code. Read-only."""
    code = project.code(topic_id)
    if not code.expert_labels:
        raise ContractViolation(f"topic_{topic_id} has no ratings", field="topic_id")
    return sum(l.rating for l in code.expert_labels) / len(code.expert_labels)


def prune_low_rated(
    project: Project, threshold: float = DEFAULT_RATING_THRESHOLD
) -> list[Code]:
    """Remove every ACTIVE code whose average rating is strictly below threshold."""
    return _record(
        project,
        "prune_low_rated",
        {"threshold": threshold},
        home_stage="EXPERT_CODING",
    )


@_applier("prune_low_rated")
def _apply_prune_low_rated(project: Project, event: AuditEvent):
    _require_stage_at_least(project, "EXPERT_CODING", "prune_low_rated")
    threshold = event.payload["threshold"]
    if not isinstance(threshold, (int, float)) or isinstance(threshold, bool):
        raise ContractViolation("threshold must be a number", field="threshold")
    unrated = sorted(
        c.topic_id for c in project.active_codes() if not c.expert_labels
    )
    if unrated:
        names = ", ".join(f"topic_{t}" for t in unrated)
        raise ContractViolation(f"unrated ACTIVE codes: {names}", field="topic_id")

    removed = [
        c
        for c in project.active_codes()
        if average_rating(project, c.topic_id) < threshold
    ]
    affected = {}
    for code in removed:
        avg = average_rating(project, code.topic_id)
        code.status = "RATING_REMOVED"
        code.removal_reason = f"average rating {avg:g} below threshold {threshold:g}"
        dropped = _drop_code_from_categories(project, code.topic_id)
        if dropped:
            affected[str(code.topic_id)] = dropped
    event.payload["removed"] = [c.topic_id for c in removed]
    event.payload["removed_from_categories"] = affected
    return removed


def create_category(project: Project, name: str, kind: str) -> Category:
    return _record(
        project,
        "create_category",
        {"name": name, "kind": kind},
        home_stage="FOCUS_CODING",
    )


@_applier("create_category")
def _apply_create_category(project: Project, event: AuditEvent):
    _require_stage_at_least(project, "FOCUS_CODING", "create_category")
    _require_nonempty(event.payload["name"], "name")
    kind = event.payload["kind"]
    if kind not in CATEGORY_KINDS:
        raise ContractViolation(
            f"kind must be one of {', '.join(CATEGORY_KINDS)}", field="kind"
        )
    category = Category(
        category_id=_next_id(project, "cat"), name=event.payload["name"], kind=kind
    )
    event.payload["category_id"] = category.category_id
    project.categories.append(category)
    return category


def rename_category(project: Project, category_id: str, name: str) -> Category:
    return _record(
        project,
        "rename_category",
        {"category_id": category_id, "name": name},
        home_stage="FOCUS_CODING",
    )


@_applier("rename_category")
def _apply_rename_category(project: Project, event: AuditEvent):
    _require_stage_at_least(project, "FOCUS_CODING", "rename_category")
    _require_nonempty(event.payload["name"], "name")
    category = project.category(event.payload["category_id"])
    event.payload["previous_name"] = category.name
    category.name = event.payload["name"]
    return category


def set_category_kind(project: Project, category_id: str, kind: str) -> Category:
    return _record(
        project,
        "set_category_kind",
        {"category_id": category_id, "kind": kind},
        home_stage="FOCUS_CODING",
    )


@_applier("set_category_kind")
def _apply_set_category_kind(project: Project, event: AuditEvent):
    _require_stage_at_least(project, "FOCUS_CODING", "set_category_kind")
    kind = event.payload["kind"]
    if kind not in CATEGORY_KINDS:
        raise ContractViolation(
            f"kind must be one of {', '.join(CATEGORY_KINDS)}", field="kind"
        )
    category = project.category(event.payload["category_id"])
    event.payload["previous_kind"] = category.kind
    category.kind = kind
    return category


def assign_code(project: Project, category_id: str, topic_id: int) -> Project:
    _record(
        project,
        "assign_code",
        {"category_id": category_id, "topic_id": topic_id},
        home_stage="FOCUS_CODING",
    )
    return project


@_applier("assign_code")
def _apply_assign_code(project: Project, event: AuditEvent):
    _require_stage_at_least(project, "FOCUS_CODING", "assign_code")
    category = project.category(event.payload["category_id"])
    code = project.code(event.payload["topic_id"])
    if code.status != "ACTIVE":
        raise ContractViolation(
            f"topic_{code.topic_id} is removed and cannot join a category",
            field="topic_id",
        )
    if code.topic_id in category.member_codes:
        raise ContractViolation(
            f"topic_{code.topic_id} is already in {category.category_id}",
            field="topic_id",
        )
    category.member_codes.add(code.topic_id)
    return category


def unassign_code(project: Project, category_id: str, topic_id: int) -> Project:
    _record(
        project,
        "unassign_code",
        {"category_id": category_id, "topic_id": topic_id},
        home_stage="FOCUS_CODING",
    )
    return project


@_applier("unassign_code")
def _apply_unassign_code(project: Project, event: AuditEvent):
    _require_stage_at_least(project, "FOCUS_CODING", "unassign_code")
    category = project.category(event.payload["category_id"])
    code = project.code(event.payload["topic_id"])
    if code.topic_id not in category.member_codes:
        raise ContractViolation(
            f"topic_{code.topic_id} is not in {category.category_id}", field="topic_id"
        )
    category.member_codes.discard(code.topic_id)
    return category


def prune_singleton_categories(project: Project) -> list[Category]:
    """Delete categories with fewer than two member codes."""
    return _record(project, "prune_singleton_categories", {}, home_stage="FOCUS_CODING")


@_applier("prune_singleton_categories")
def _apply_prune_singleton_categories(project: Project, event: AuditEvent):
    _require_stage_at_least(project, "FOCUS_CODING", "prune_singleton_categories")
    removed = [c for c in project.categories if len(c.member_codes) < 2]
    removed_ids = {c.category_id for c in removed}
    project.categories = [
        c for c in project.categories if c.category_id not in removed_ids
    ]
    for dim in project.dimensions:
        dim.member_categories -= removed_ids
    event.payload["removed"] = [c.to_dict() for c in removed]
    return removed


def create_dimension(project: Project, name: str) -> Dimension:
    return _record(
        project, "create_dimension", {"name": name}, home_stage="THEORY_BUILDING"
    )


@_applier("create_dimension")
def _apply_create_dimension(project: Project, event: AuditEvent):
    _require_stage_exactly(project, "THEORY_BUILDING", "create_dimension")
    _require_nonempty(event.payload["name"], "name")
    dimension = Dimension(
        dimension_id=_next_id(project, "dim"), name=event.payload["name"]
    )
    event.payload["dimension_id"] = dimension.dimension_id
    project.dimensions.append(dimension)
    return dimension


def assign_category(project: Project, dimension_id: str, category_id: str) -> Project:
    _record(
        project,
        "assign_category",
        {"dimension_id": dimension_id, "category_id": category_id},
        home_stage="THEORY_BUILDING",
    )
    return project


@_applier("assign_category")
def _apply_assign_category(project: Project, event: AuditEvent):
    _require_stage_exactly(project, "THEORY_BUILDING", "assign_category")
    dimension = project.dimension(event.payload["dimension_id"])
    category = project.category(event.payload["category_id"])
    holder = project.dimension_of(category.category_id)
    if holder is not None:
        raise ContractViolation(
            f"{category.category_id} already belongs to {holder.dimension_id}",
            field="category_id",
        )
    dimension.member_categories.add(category.category_id)
    return dimension


def add_memo(
    project: Project, attached_kind: str, attached_id: str, author: str, text: str
) -> Memo:
    return _record(
        project,
        "add_memo",
        {
            "attached_kind": attached_kind,
            "attached_id": str(attached_id),
            "author": author,
            "text": text,
        },
    )


@_applier("add_memo")
def _apply_add_memo(project: Project, event: AuditEvent):
    p = event.payload
    _require_nonempty(p["author"], "author")
    _require_nonempty(p["text"], "text")
    kind, ref = p["attached_kind"], p["attached_id"]
    if kind not in MEMO_KINDS:
        raise ContractViolation(
            f"attachment kind must be one of {', '.join(MEMO_KINDS)}", field="attached_kind"
        )
    if kind == "code":
        try:
            project.code(int(ref))
        except ValueError:
            raise ContractViolation(
                "code attachments need an integer topic id", field="attached_id"
            )
    elif kind == "category":
        project.category(ref)
    elif kind == "dimension":
        project.dimension(ref)
    elif ref != project.project_id:
        raise UnknownResource(f"unknown project {ref}")
    memo = Memo(
        memo_id=_next_id(project, "memo"),
        author=p["author"],
        attached_kind=kind,
        attached_id=ref,
        text=p["text"],
        created_at=event.timestamp,
    )
    event.payload["memo_id"] = memo.memo_id
    project.memos.append(memo)
    return memo


def memos_for(project: Project, attached_kind: str, attached_id: str) -> list[Memo]:
    return [
        m
        for m in project.memos
        if m.attached_kind == attached_kind and m.attached_id == str(attached_id)
    ]


# --- exports and persistence ----------------------------------------

TABLE2_HEADER = ("topic_number", "words", "label", "categories")
TABLE3_HEADER = ("topic_numbers", "category", "aggregate_dimension")


def _table2_rows(project: Project) -> list[dict]:
    rows = []
    for code in sorted(project.active_codes(), key=lambda c: c.topic_id):
        cats = [
            c.name
            for c in sorted(project.categories, key=lambda c: c.category_id)
            if code.topic_id in c.member_codes
        ]
        rows.append(
            {
                "topic_number": f"topic_{code.topic_id}",
                "words": " ".join(code.top_words),
                "label": code.aggregate_label or "",
                "categories": "; ".join(cats),
            }
        )
    return rows


def _table3_rows(project: Project) -> list[dict]:
    rows = []
    for cat in sorted(project.categories, key=lambda c: c.category_id):
        dim = project.dimension_of(cat.category_id)
        rows.append(
            {
                "topic_numbers": ", ".join(
                    f"topic_{t}" for t in sorted(cat.member_codes)
                ),
                "category": cat.name,
                "aggregate_dimension": dim.name if dim else "",
            }
        )
    return rows


def _rows_to_csv(header: tuple, rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_ALL)
    writer.writerow(header)
    for row in rows:
        writer.writerow([row[h] for h in header])
    return buf.getvalue()


def export_tables(project: Project, format: str = "json") -> dict:
    """Code table and category table, as parsed rows or CSV text.

    Row order is deterministic: the code table by topic id, the
    category table by category id; category names inside a code row are
    ordered by category id.
    """
    table2, table3 = _table2_rows(project), _table3_rows(project)
    if format == "json":
        return {"table2": table2, "table3": table3}
    if format == "csv":
        return {
            "table2": _rows_to_csv(TABLE2_HEADER, table2),
            "table3": _rows_to_csv(TABLE3_HEADER, table3),
        }
    raise ContractViolation("format must be 'json' or 'csv'", field="format")


def save_project(project: Project, path) -> None:
    """Write the project JSON atomically (temp file, then rename)."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    data = project.to_json()
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_project(path) -> Project:
    with open(os.fspath(path), "r", encoding="utf-8") as handle:
        text = handle.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptFile(f"project file is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise CorruptFile("project file must contain a JSON object")
    return Project.from_dict(data)
