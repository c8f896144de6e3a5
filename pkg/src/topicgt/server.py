"""HTTP service over corpora, models, comparison grids, and projects.

All durable state lives in a Workspace directory (one JSON file per
corpus, model, grid, project, and job), so restarting the service loses
nothing. Handlers are thin wrappers over the library operations: every
workflow endpoint maps 1:1 onto a workflow function, and errors come
back as a structured {code, message, field} body with 400 for contract
violations, 404 for unknown ids, 409 for stage-rule violations, and 422
for malformed payloads.

LDA runs and grid comparisons execute as jobs on a bounded worker pool;
clients poll the job until it is DONE and then fetch the result by
result_ref.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from contextlib import asynccontextmanager
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Literal

from fastapi import APIRouter, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from . import workflow
from .corpus import Corpus, Document, EncodedCorpus, PreprocessConfig, build_encoded_corpus
from .errors import (
    ContractViolation,
    CorruptFile,
    PersistenceError,
    SchemaVersionMismatch,
    StageRuleViolation,
    UnknownResource,
)
from .lda import LdaParams, TopicModel, run_lda, theta_csv, top_documents, top_words
from .topicsim import (
    DEFAULT_COVERAGE_THRESHOLD,
    ComparisonGrid,
    compare_grid,
    select_k,
)

JOB_KINDS = ("LDA_RUN", "GRID_COMPARE")
JOB_STATUSES = ("QUEUED", "RUNNING", "DONE", "FAILED")
TERMINAL_STATUSES = ("DONE", "FAILED")


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


@dataclass
class JobRecord:
    job_id: str
    kind: str
    status: str
    params: dict
    result_ref: str | None = None
    error: str | None = None
    created_at: str = ""
    finished_at: str | None = None

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "kind": self.kind,
            "status": self.status,
            "params": self.params,
            "result_ref": self.result_ref,
            "error": self.error,
            "created_at": self.created_at,
            "finished_at": self.finished_at,
        }


class Workspace:
    """Directory-backed store; every artifact is one JSON file."""

    def __init__(self, root):
        self.root = Path(root)
        for sub in ("corpora", "models", "grids", "projects", "jobs"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)

    def _write(self, path: Path, text: str) -> None:
        tmp = path.with_suffix(path.suffix + f".tmp{os.getpid()}")
        try:
            tmp.write_text(text, encoding="utf-8")
            os.replace(tmp, path)
        except OSError as exc:
            raise PersistenceError(f"cannot write {path}: {exc}")

    def _read(self, path: Path, what: str, ident: str) -> str:
        if not path.exists():
            raise UnknownResource(f"unknown {what} {ident}")
        return path.read_text(encoding="utf-8")

    # corpora

    def save_corpus(self, encoded: EncodedCorpus) -> str:
        corpus_id = encoded.corpus_id
        self._write(self.root / "corpora" / f"{corpus_id}.json", encoded.to_json())
        return corpus_id

    def load_corpus(self, corpus_id: str) -> EncodedCorpus:
        text = self._read(self.root / "corpora" / f"{corpus_id}.json", "corpus", corpus_id)
        return EncodedCorpus.from_json(text)

    def list_corpora(self) -> list[dict]:
        out = []
        for path in sorted((self.root / "corpora").glob("*.json")):
            encoded = EncodedCorpus.from_json(path.read_text(encoding="utf-8"))
            out.append(corpus_summary(encoded))
        return out

    # models

    def save_model(self, model: TopicModel) -> str:
        model_id = model.model_id
        self._write(self.root / "models" / f"{model_id}.json", model.to_json())
        return model_id

    def load_model(self, model_id: str) -> TopicModel:
        text = self._read(self.root / "models" / f"{model_id}.json", "model", model_id)
        return TopicModel.from_json(text)

    def list_models(self) -> list[dict]:
        out = []
        for path in sorted((self.root / "models").glob("*.json")):
            model = TopicModel.from_json(path.read_text(encoding="utf-8"))
            out.append(model_summary(model))
        return out

    # comparison grids

    def save_grid(self, grid: ComparisonGrid) -> str:
        text = grid.to_json()
        grid_id = "g" + hashlib.sha256(text.encode()).hexdigest()[:12]
        self._write(self.root / "grids" / f"{grid_id}.json", text)
        return grid_id

    def load_grid(self, grid_id: str) -> ComparisonGrid:
        text = self._read(self.root / "grids" / f"{grid_id}.json", "grid", grid_id)
        return ComparisonGrid.from_json(text)

    def list_grids(self) -> list[str]:
        return sorted(p.stem for p in (self.root / "grids").glob("*.json"))

    # projects

    def project_path(self, project_id: str) -> Path:
        return self.root / "projects" / f"{project_id}.json"

    def save_project(self, project: workflow.Project) -> str:
        workflow.save_project(project, self.project_path(project.project_id))
        return project.project_id

    def load_project(self, project_id: str) -> workflow.Project:
        path = self.project_path(project_id)
        if not path.exists():
            raise UnknownResource(f"unknown project {project_id}")
        return workflow.load_project(path)

    def has_project(self, project_id: str) -> bool:
        return self.project_path(project_id).exists()

    def list_projects(self) -> list[dict]:
        out = []
        for path in sorted((self.root / "projects").glob("*.json")):
            out.append(project_summary(workflow.load_project(path)))
        return out

    # jobs

    def save_job(self, job: JobRecord) -> None:
        self._write(
            self.root / "jobs" / f"{job.job_id}.json",
            json.dumps(job.to_dict(), sort_keys=True),
        )

    def load_jobs(self) -> dict[str, JobRecord]:
        jobs = {}
        for path in sorted((self.root / "jobs").glob("*.json")):
            data = json.loads(path.read_text(encoding="utf-8"))
            jobs[data["job_id"]] = JobRecord(**data)
        return jobs


def corpus_summary(encoded: EncodedCorpus) -> dict:
    return {
        "corpus_id": encoded.corpus_id,
        "num_documents": encoded.num_documents,
        "vocabulary_size": len(encoded.vocabulary),
        "total_tokens": encoded.total_tokens,
        "report": encoded.report,
    }


def model_summary(model: TopicModel) -> dict:
    return {
        "model_id": model.model_id,
        "corpus_ref": model.corpus_ref,
        "num_topics": model.num_topics,
        "params": model.params.to_dict(),
        "final_log_likelihood": model.log_likelihood_trace[-1]
        if model.log_likelihood_trace
        else None,
    }


def _topics_payload(model: TopicModel, n: int | None) -> list[dict]:
    n = model.params.top_n_words if n is None else n
    return [
        {"topic_id": k, "words": top_words(model, k, n)}
        for k in range(model.num_topics)
    ]


def project_summary(project: workflow.Project) -> dict:
    return {
        "project_id": project.project_id,
        "corpus_ref": project.corpus_ref,
        "model_ref": project.model_ref,
        "stage": project.stage,
        "codes": len(project.codes),
        "active_codes": len(project.active_codes()),
        "categories": len(project.categories),
        "dimensions": len(project.dimensions),
        "memos": len(project.memos),
        "audit_events": len(project.audit_log),
    }


def project_view(project: workflow.Project) -> dict:
    """Full project state plus per-code average ratings for the UI."""
    data = project.to_dict()
    for code in data["codes"]:
        ratings = [l["rating"] for l in code["expert_labels"]]
        code["average_rating"] = sum(ratings) / len(ratings) if ratings else None
    return data


# --- request bodies ---------------------------------------------------


class DocumentIn(BaseModel):
    doc_id: str
    title: str = ""
    section_tags: list[str] = []
    raw_text: str


class CorpusUpload(BaseModel):
    documents: list[DocumentIn]
    config: dict[str, Any] | None = None


class JobSubmit(BaseModel):
    kind: Literal["LDA_RUN", "GRID_COMPARE"]
    corpus_id: str
    params: dict[str, Any] = {}
    k_list: list[int] | None = None
    threshold: int = DEFAULT_COVERAGE_THRESHOLD


class ProjectCreate(BaseModel):
    model_id: str
    project_id: str | None = None


class OutlierIn(BaseModel):
    topic_id: int
    reason: str


class LabelIn(BaseModel):
    expert_id: str
    topic_id: int
    label: str
    rating: int


class AggregateLabelIn(BaseModel):
    topic_id: int
    label: str


class PruneRatedIn(BaseModel):
    threshold: float = workflow.DEFAULT_RATING_THRESHOLD


class CategoryIn(BaseModel):
    name: str
    kind: str = "GENERIC"


class CategoryPatch(BaseModel):
    name: str | None = None
    kind: str | None = None


class MemberIn(BaseModel):
    topic_id: int


class DimensionIn(BaseModel):
    name: str


class DimensionMemberIn(BaseModel):
    category_id: str


class MemoIn(BaseModel):
    kind: str
    ref_id: str
    author: str
    text: str


class ProjectImport(BaseModel):
    project: dict[str, Any]
    overwrite: bool = False


# --- application ------------------------------------------------------


class _ServerState:
    def __init__(self, workspace: Workspace, max_workers: int):
        self.workspace = workspace
        self.executor = ThreadPoolExecutor(max_workers=max_workers)
        self.jobs = workspace.load_jobs()
        self.jobs_lock = threading.Lock()
        self._project_locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def project_lock(self, project_id: str) -> threading.Lock:
        with self._locks_guard:
            if project_id not in self._project_locks:
                self._project_locks[project_id] = threading.Lock()
            return self._project_locks[project_id]

    def transition(self, job: JobRecord, status: str, result_ref=None, error=None):
        with self.jobs_lock:
            if job.status in TERMINAL_STATUSES:
                raise PersistenceError(
                    f"job {job.job_id} is already {job.status} and immutable"
                )
            job.status = status
            if status == "DONE":
                job.result_ref = result_ref
                job.finished_at = _now_iso()
            elif status == "FAILED":
                job.error = error
                job.finished_at = _now_iso()
            self.workspace.save_job(job)


def _error_response(status_code: int, code: str, message: str, field=None):
    return JSONResponse(
        status_code=status_code,
        content={"code": code, "message": message, "field": field},
    )


def _lda_params_from(payload: dict, default_topics: int | None = None) -> LdaParams:
    data = dict(payload)
    if "num_topics" not in data:
        if default_topics is None:
            raise ContractViolation("params.num_topics is required", field="num_topics")
        data["num_topics"] = default_topics
    try:
        return LdaParams.from_dict(data)
    except TypeError as exc:
        raise ContractViolation(f"invalid LDA params: {exc}", field="params")


def _execute_job(state: _ServerState, job: JobRecord) -> None:
    state.transition(job, "RUNNING")
    try:
        spec = job.params
        encoded = state.workspace.load_corpus(spec["corpus_id"])
        if job.kind == "LDA_RUN":
            model = run_lda(encoded, _lda_params_from(spec["params"]))
            result_ref = state.workspace.save_model(model)
        else:
            params = _lda_params_from(spec["params"], default_topics=max(spec["k_list"]))
            grid = compare_grid(
                encoded, spec["k_list"], params, threshold=spec["threshold"]
            )
            result_ref = state.workspace.save_grid(grid)
        state.transition(job, "DONE", result_ref=result_ref)
    except Exception as exc:
        state.transition(job, "FAILED", error=f"{type(exc).__name__}: {exc}")


def create_app(workspace, max_workers: int = 2, ui_dir=None) -> FastAPI:
    if not isinstance(workspace, Workspace):
        workspace = Workspace(workspace)
    state = _ServerState(workspace, max_workers)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        state.executor.shutdown(wait=False)

    app = FastAPI(title="topicgt server", version="1.0", lifespan=lifespan)
    app.state.topicgt = state

    @app.exception_handler(ContractViolation)
    async def _contract(request: Request, exc: ContractViolation):
        return _error_response(400, "contract_violation", str(exc), exc.field)

    @app.exception_handler(UnknownResource)
    async def _unknown(request: Request, exc: UnknownResource):
        return _error_response(404, "unknown_resource", str(exc))

    @app.exception_handler(StageRuleViolation)
    async def _stage(request: Request, exc: StageRuleViolation):
        return _error_response(409, "stage_rule_violation", str(exc))

    @app.exception_handler(CorruptFile)
    async def _corrupt(request: Request, exc: CorruptFile):
        return _error_response(400, "corrupt_file", str(exc))

    @app.exception_handler(SchemaVersionMismatch)
    async def _schema(request: Request, exc: SchemaVersionMismatch):
        return _error_response(400, "schema_version_mismatch", str(exc))

    @app.exception_handler(PersistenceError)
    async def _persist(request: Request, exc: PersistenceError):
        return _error_response(500, "persistence_error", str(exc))

    @app.exception_handler(RequestValidationError)
    async def _validation(request: Request, exc: RequestValidationError):
        errors = exc.errors()
        first = errors[0] if errors else {}
        loc = ".".join(str(part) for part in first.get("loc", []) if part != "body")
        return _error_response(
            422, "validation_error", first.get("msg", "invalid payload"), loc or None
        )

    api = APIRouter(prefix="/api/v1")

    # corpora ---------------------------------------------------------

    @api.post("/corpora", status_code=201)
    def upload_corpus(body: CorpusUpload):
        documents = [
            Document(
                doc_id=d.doc_id,
                title=d.title,
                section_tags=tuple(d.section_tags),
                raw_text=d.raw_text,
            )
            for d in body.documents
        ]
        seen = set()
        for doc in documents:
            if doc.doc_id in seen:
                raise ContractViolation(
                    f"duplicate doc_id {doc.doc_id}", field="doc_id"
                )
            seen.add(doc.doc_id)
        config = (
            PreprocessConfig()
            if body.config is None
            else _config_from_payload(body.config)
        )
        encoded = build_encoded_corpus(Corpus(documents=documents), config)
        workspace.save_corpus(encoded)
        return corpus_summary(encoded)

    @api.get("/corpora")
    def list_corpora():
        return workspace.list_corpora()

    @api.get("/corpora/{corpus_id}")
    def get_corpus(corpus_id: str, full: bool = False):
        encoded = workspace.load_corpus(corpus_id)
        if full:
            return encoded.to_dict()
        return corpus_summary(encoded)

    # jobs ------------------------------------------------------------

    @api.post("/jobs", status_code=202)
    def submit_job(body: JobSubmit):
        workspace.load_corpus(body.corpus_id)
        if body.kind == "LDA_RUN":
            _lda_params_from(body.params)
            spec = {"corpus_id": body.corpus_id, "params": body.params}
        else:
            if body.k_list is None or len(set(body.k_list)) < 2:
                raise ContractViolation(
                    "GRID_COMPARE needs k_list with at least 2 distinct values",
                    field="k_list",
                )
            _lda_params_from(body.params, default_topics=max(body.k_list))
            if body.threshold < 1:
                raise ContractViolation("threshold must be >= 1", field="threshold")
            spec = {
                "corpus_id": body.corpus_id,
                "params": body.params,
                "k_list": sorted(set(body.k_list)),
                "threshold": body.threshold,
            }
        job = JobRecord(
            job_id="job" + uuid.uuid4().hex[:12],
            kind=body.kind,
            status="QUEUED",
            params=spec,
            created_at=_now_iso(),
        )
        with state.jobs_lock:
            state.jobs[job.job_id] = job
            workspace.save_job(job)
        state.executor.submit(_execute_job, state, job)
        return job.to_dict()

    @api.get("/jobs")
    def list_jobs():
        with state.jobs_lock:
            return [job.to_dict() for _, job in sorted(state.jobs.items())]

    @api.get("/jobs/{job_id}")
    def get_job(job_id: str):
        with state.jobs_lock:
            if job_id not in state.jobs:
                raise UnknownResource(f"unknown job {job_id}")
            return state.jobs[job_id].to_dict()

    # models ----------------------------------------------------------

    @api.get("/models")
    def list_models():
        return workspace.list_models()

    @api.get("/models/{model_id}")
    def get_model(model_id: str):
        model = workspace.load_model(model_id)
        summary = model_summary(model)
        summary["topics"] = _topics_payload(model, None)
        return summary

    @api.get("/models/{model_id}/topics")
    def get_topics(model_id: str, n: int | None = None):
        return _topics_payload(workspace.load_model(model_id), n)

    @api.get("/models/{model_id}/topics/{topic_id}/documents")
    def get_topic_documents(model_id: str, topic_id: int, n: int = 5):
        model = workspace.load_model(model_id)
        try:
            ranked = top_documents(model, topic_id, n)
        except IndexError:
            raise UnknownResource(f"unknown topic {topic_id} in model {model_id}")
        return [{"doc_id": doc_id, "theta": theta} for doc_id, theta in ranked]

    @api.get("/models/{model_id}/theta")
    def get_theta(model_id: str, format: str = "json"):
        model = workspace.load_model(model_id)
        if format == "csv":
            return PlainTextResponse(theta_csv(model), media_type="text/csv")
        if format == "json":
            return {"doc_ids": model.doc_ids, "theta": model.theta.tolist()}
        raise ContractViolation("format must be 'json' or 'csv'", field="format")

    # comparison grids ------------------------------------------------

    @api.get("/grids")
    def list_grids():
        return workspace.list_grids()

    @api.get("/grids/{grid_id}")
    def get_grid(grid_id: str, format: str = "json"):
        grid = workspace.load_grid(grid_id)
        if format == "csv":
            return PlainTextResponse(grid.to_csv(), media_type="text/csv")
        if format != "json":
            raise ContractViolation("format must be 'json' or 'csv'", field="format")
        payload = grid.to_dict()
        payload["selection"] = select_k(grid).to_dict()
        return payload

    # projects --------------------------------------------------------

    def _mutate(project_id: str, fn):
        """Load-mutate-save under the project's single-writer lock."""
        with state.project_lock(project_id):
            project = workspace.load_project(project_id)
            result = fn(project)
            workspace.save_project(project)
            return project, result

    @api.post("/projects", status_code=201)
    def create_project(body: ProjectCreate):
        model = workspace.load_model(body.model_id)
        if body.project_id is not None and workspace.has_project(body.project_id):
            raise ContractViolation(
                f"project {body.project_id} already exists", field="project_id"
            )
        project = workflow.create_project(model, project_id=body.project_id)
        workspace.save_project(project)
        return project_view(project)

    @api.get("/projects")
    def list_projects():
        return workspace.list_projects()

    @api.get("/projects/{project_id}")
    def get_project(project_id: str):
        return project_view(workspace.load_project(project_id))

    @api.get("/projects/{project_id}/file")
    def get_project_file(project_id: str):
        return workspace.load_project(project_id).to_dict()

    @api.post("/projects/import", status_code=201)
    def import_project(body: ProjectImport):
        project = workflow.Project.from_dict(body.project)
        if workspace.has_project(project.project_id) and not body.overwrite:
            raise ContractViolation(
                f"project {project.project_id} already exists; pass overwrite=true",
                field="project",
            )
        with state.project_lock(project.project_id):
            workspace.save_project(project)
        return project_view(project)

    @api.post("/projects/{project_id}/outliers")
    def mark_outlier(project_id: str, body: OutlierIn):
        project, _ = _mutate(
            project_id, lambda p: workflow.mark_outlier(p, body.topic_id, body.reason)
        )
        return project_view(project)

    @api.post("/projects/{project_id}/advance")
    def advance_stage(project_id: str):
        project, _ = _mutate(project_id, workflow.advance_stage)
        return project_view(project)

    @api.post("/projects/{project_id}/labels")
    def submit_label(project_id: str, body: LabelIn):
        project, _ = _mutate(
            project_id,
            lambda p: workflow.submit_expert_label(
                p, body.expert_id, body.topic_id, body.label, body.rating
            ),
        )
        return project_view(project)

    @api.post("/projects/{project_id}/aggregate-labels")
    def set_aggregate_label(project_id: str, body: AggregateLabelIn):
        project, _ = _mutate(
            project_id,
            lambda p: workflow.set_aggregate_label(p, body.topic_id, body.label),
        )
        return project_view(project)

    @api.get("/projects/{project_id}/codes/{topic_id}/average-rating")
    def get_average_rating(project_id: str, topic_id: int):
        project = workspace.load_project(project_id)
        return {"topic_id": topic_id, "average_rating": workflow.average_rating(project, topic_id)}

    @api.post("/projects/{project_id}/prune-rated")
    def prune_rated(project_id: str, body: PruneRatedIn | None = None):
        threshold = (body or PruneRatedIn()).threshold
        project, removed = _mutate(
            project_id, lambda p: workflow.prune_low_rated(p, threshold)
        )
        return {
            "removed": [c.to_dict() for c in removed],
            "project": project_view(project),
        }

    @api.post("/projects/{project_id}/categories", status_code=201)
    def create_category(project_id: str, body: CategoryIn):
        project, category = _mutate(
            project_id, lambda p: workflow.create_category(p, body.name, body.kind)
        )
        return {"category": category.to_dict(), "project": project_view(project)}

    @api.patch("/projects/{project_id}/categories/{category_id}")
    def patch_category(project_id: str, category_id: str, body: CategoryPatch):
        def do(p):
            if body.name is None and body.kind is None:
                raise ContractViolation("nothing to change", field="name")
            if body.name is not None:
                workflow.rename_category(p, category_id, body.name)
            if body.kind is not None:
                workflow.set_category_kind(p, category_id, body.kind)
            return p.category(category_id)

        project, category = _mutate(project_id, do)
        return {"category": category.to_dict(), "project": project_view(project)}

    @api.post("/projects/{project_id}/categories/{category_id}/codes")
    def assign_code(project_id: str, category_id: str, body: MemberIn):
        project, _ = _mutate(
            project_id, lambda p: workflow.assign_code(p, category_id, body.topic_id)
        )
        return project_view(project)

    @api.delete("/projects/{project_id}/categories/{category_id}/codes/{topic_id}")
    def unassign_code(project_id: str, category_id: str, topic_id: int):
        project, _ = _mutate(
            project_id, lambda p: workflow.unassign_code(p, category_id, topic_id)
        )
        return project_view(project)

    @api.post("/projects/{project_id}/prune-singletons")
    def prune_singletons(project_id: str):
        project, removed = _mutate(project_id, workflow.prune_singleton_categories)
        return {
            "removed": [c.to_dict() for c in removed],
            "project": project_view(project),
        }

    @api.post("/projects/{project_id}/dimensions", status_code=201)
    def create_dimension(project_id: str, body: DimensionIn):
        project, dimension = _mutate(
            project_id, lambda p: workflow.create_dimension(p, body.name)
        )
        return {"dimension": dimension.to_dict(), "project": project_view(project)}

    @api.post("/projects/{project_id}/dimensions/{dimension_id}/categories")
    def assign_category(project_id: str, dimension_id: str, body: DimensionMemberIn):
        project, _ = _mutate(
            project_id,
            lambda p: workflow.assign_category(p, dimension_id, body.category_id),
        )
        return project_view(project)

    @api.post("/projects/{project_id}/memos", status_code=201)
    def add_memo(project_id: str, body: MemoIn):
        project, memo = _mutate(
            project_id,
            lambda p: workflow.add_memo(p, body.kind, body.ref_id, body.author, body.text),
        )
        return {"memo": memo.to_dict(), "project": project_view(project)}

    @api.get("/projects/{project_id}/export")
    def export_project(project_id: str, format: str = "json"):
        project = workspace.load_project(project_id)
        return workflow.export_tables(project, format=format)

    app.include_router(api)

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=os.fspath(ui_dir), html=True), name="ui")

    return app


def _config_from_payload(payload: dict) -> PreprocessConfig:
    """Build a PreprocessConfig from a partial JSON payload."""
    base = PreprocessConfig()
    data = base.to_dict()
    unknown = set(payload) - set(data)
    if unknown:
        raise ContractViolation(
            f"unknown preprocess option(s): {', '.join(sorted(unknown))}",
            field="config",
        )
    data.update(payload)
    return PreprocessConfig.from_dict(data)


def serve(
    workspace_dir,
    host: str = "127.0.0.1",
    port: int = 8000,
    max_workers: int = 2,
    ui_dir=None,
) -> None:
    """Run the HTTP service until interrupted."""
    import uvicorn

    app = create_app(workspace_dir, max_workers=max_workers, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
