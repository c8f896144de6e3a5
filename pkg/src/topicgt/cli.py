"""Command-line driver.

Every subcommand is a thin mapping onto a library operation; nothing
here implements behavior of its own. Primary output goes to stdout as
JSON (or CSV under --csv); diagnostics go to stderr. Exit codes: 0 on
success, 1 on a contract/usage error, 2 on an I/O error.

A JSON config file (--config) may supply any flag by its dest name
(dashes become underscores); explicit flags override config values.
"""

from __future__ import annotations

import argparse
import json
import sys

from .corpus import (
    EncodedCorpus,
    PreprocessConfig,
    build_encoded_corpus,
    ingest,
)
from .errors import ContractViolation, PersistenceError, WorkbenchError
from .lda import LdaParams, TopicModel, run_lda, theta_csv, top_words
from .report import render_report
from .stopwords import load_stopwords
from .topicsim import (
    DEFAULT_COVERAGE_THRESHOLD,
    ComparisonGrid,
    compare_grid,
    select_k,
)
from . import workflow


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on bad usage; the contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _UsageError(message)


def _print_json(payload) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _read(path) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _write(path, text: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


def _merge(args: argparse.Namespace, defaults: dict) -> dict:
    """Resolve option values: explicit flag > config file > default."""
    config = {}
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            config = json.loads(_read(config_path))
        except json.JSONDecodeError as exc:
            raise ContractViolation(
                f"config file is not valid JSON: {exc}", field="config"
            )
        if not isinstance(config, dict):
            raise ContractViolation("config file must hold a JSON object", field="config")
        unknown = set(config) - set(defaults)
        if unknown:
            raise ContractViolation(
                f"config file has unknown option(s): {', '.join(sorted(unknown))}",
                field="config",
            )
    merged = dict(defaults)
    merged.update(config)
    merged.update(
        {k: v for k, v in vars(args).items() if k in defaults}
    )
    return merged


def _require(merged: dict, key: str) -> object:
    if merged.get(key) is None:
        flag = "--" + key.replace("_", "-")
        raise ContractViolation(f"{flag} is required (flag or config)", field=key)
    return merged[key]


def _load_encoded(path) -> EncodedCorpus:
    return EncodedCorpus.from_json(_read(path))


def _load_model(path) -> TopicModel:
    return TopicModel.from_json(_read(path))


def _preprocess_config(merged: dict) -> PreprocessConfig:
    kwargs = {
        "min_token_length": merged["min_token_length"],
        "min_document_frequency": merged["min_df"],
        "stemming_enabled": merged["stemming"],
        "prefix_stripping_enabled": merged["prefix_stripping"],
    }
    if merged["stopwords"]:
        kwargs["stopword_list"] = load_stopwords(merged["stopwords"])
    if merged["section_filter"]:
        tags = merged["section_filter"]
        if isinstance(tags, str):
            tags = [t.strip() for t in tags.split(",") if t.strip()]
        kwargs["section_filter"] = frozenset(tags)
    return PreprocessConfig(**kwargs)


def _lda_params(merged: dict, num_topics: int) -> LdaParams:
    return LdaParams(
        num_topics=num_topics,
        alpha=merged["alpha"],
        beta=merged["beta"],
        sweeps=merged["sweeps"],
        seed=merged["seed"],
        top_n_words=merged["words"],
        average_last=merged["average_last"],
    )


def _parse_k_list(value) -> list[int]:
    if isinstance(value, list):
        return [int(k) for k in value]
    try:
        return [int(part) for part in str(value).split(",") if part.strip()]
    except ValueError:
        raise ContractViolation(
            "--topics must be a comma-separated list of integers", field="topics"
        )


# --- subcommand handlers ----------------------------------------------

_INGEST_DEFAULTS = {
    "source": None,
    "manifest": None,
    "out": None,
    "stopwords": None,
    "min_token_length": 2,
    "min_df": 2,
    "stemming": True,
    "prefix_stripping": False,
    "section_filter": None,
}


def _cmd_ingest(args) -> int:
    merged = _merge(args, _INGEST_DEFAULTS)
    source = _require(merged, "source")
    manifest = None
    if merged["manifest"]:
        manifest = json.loads(_read(merged["manifest"]))
    corpus = ingest(source, manifest=manifest)
    encoded = build_encoded_corpus(corpus, _preprocess_config(merged))
    if merged["out"]:
        _write(merged["out"], encoded.to_json())
    _print_json(
        {
            "corpus_id": encoded.corpus_id,
            "num_documents": encoded.num_documents,
            "vocabulary_size": len(encoded.vocabulary),
            "total_tokens": encoded.total_tokens,
            "report": encoded.report,
            "ingest_skipped": corpus.skipped,
            "out": merged["out"],
        }
    )
    return 0


_MODEL_DEFAULTS = {
    "corpus": None,
    "topics": None,
    "alpha": 0.5,
    "beta": 0.02,
    "sweeps": 1000,
    "seed": 0,
    "words": 10,
    "average_last": 0,
    "out": None,
    "csv": False,
}


def _cmd_model(args) -> int:
    merged = _merge(args, _MODEL_DEFAULTS)
    encoded = _load_encoded(_require(merged, "corpus"))
    params = _lda_params(merged, int(_require(merged, "topics")))
    model = run_lda(encoded, params)
    if merged["out"]:
        _write(merged["out"], model.to_json())
    if merged["csv"]:
        sys.stdout.write(theta_csv(model))
        return 0
    _print_json(
        {
            "model_id": model.model_id,
            "corpus_ref": model.corpus_ref,
            "params": params.to_dict(),
            "final_log_likelihood": model.log_likelihood_trace[-1],
            "topics": [
                {"topic_id": k, "words": top_words(model, k, params.top_n_words)}
                for k in range(model.num_topics)
            ],
            "out": merged["out"],
        }
    )
    return 0


_COMPARE_DEFAULTS = {
    "corpus": None,
    "topics": None,
    "alpha": 0.5,
    "beta": 0.02,
    "sweeps": 1000,
    "seed": 0,
    "words": 10,
    "average_last": 0,
    "threshold": DEFAULT_COVERAGE_THRESHOLD,
    "out": None,
    "csv": False,
}


def _cmd_compare(args) -> int:
    merged = _merge(args, _COMPARE_DEFAULTS)
    encoded = _load_encoded(_require(merged, "corpus"))
    k_list = _parse_k_list(_require(merged, "topics"))
    params = _lda_params(merged, max(k_list))
    grid = compare_grid(encoded, k_list, params, threshold=merged["threshold"])
    if merged["out"]:
        _write(merged["out"], grid.to_json())
    if merged["csv"]:
        sys.stdout.write(grid.to_csv())
        return 0
    selection = select_k(grid)
    _print_json(
        {
            "corpus_ref": grid.corpus_ref,
            "k_list": grid.k_list,
            "threshold": grid.threshold,
            "reports": [
                {
                    "from_k": a,
                    "to_k": b,
                    "covered_count": r.covered_count,
                    "from_size": r.from_size,
                    "coverage_percent": r.coverage_percent,
                }
                for (a, b), r in sorted(grid.reports.items())
            ],
            "selected_k": selection.selected_k,
            "selection": selection.to_dict(),
            "out": merged["out"],
        }
    )
    return 0


def _load_project_for(merged: dict) -> tuple[str, workflow.Project]:
    path = _require(merged, "project")
    return path, workflow.load_project(path)


def _save_and_print(path, project: workflow.Project, payload: dict) -> int:
    workflow.save_project(project, path)
    _print_json(payload)
    return 0


_PROJECT_FILE = {"project": None}


def _cmd_project_create(args) -> int:
    merged = _merge(args, {"model": None, "project": None, "id": None})
    model = _load_model(_require(merged, "model"))
    project = workflow.create_project(model, project_id=merged["id"])
    path = _require(merged, "project")
    workflow.save_project(project, path)
    _print_json(_project_summary(project))
    return 0


def _project_summary(project: workflow.Project) -> dict:
    return {
        "project_id": project.project_id,
        "stage": project.stage,
        "codes": len(project.codes),
        "active_codes": len(project.active_codes()),
        "categories": len(project.categories),
        "dimensions": len(project.dimensions),
        "memos": len(project.memos),
        "audit_events": len(project.audit_log),
    }


def _cmd_mark_outlier(args) -> int:
    merged = _merge(args, {**_PROJECT_FILE, "topic": None, "reason": None})
    path, project = _load_project_for(merged)
    topic = int(_require(merged, "topic"))
    workflow.mark_outlier(project, topic, _require(merged, "reason"))
    return _save_and_print(
        path,
        project,
        {"code": project.code(topic).to_dict(), "active_codes": len(project.active_codes())},
    )


def _cmd_advance(args) -> int:
    merged = _merge(args, dict(_PROJECT_FILE))
    path, project = _load_project_for(merged)
    workflow.advance_stage(project)
    return _save_and_print(path, project, {"stage": project.stage})


def _cmd_label(args) -> int:
    merged = _merge(
        args,
        {**_PROJECT_FILE, "expert": None, "topic": None, "label": None, "rating": None},
    )
    path, project = _load_project_for(merged)
    topic = int(_require(merged, "topic"))
    workflow.submit_expert_label(
        project,
        _require(merged, "expert"),
        topic,
        _require(merged, "label"),
        int(_require(merged, "rating")),
    )
    return _save_and_print(path, project, {"code": project.code(topic).to_dict()})


def _cmd_aggregate_label(args) -> int:
    merged = _merge(args, {**_PROJECT_FILE, "topic": None, "label": None})
    path, project = _load_project_for(merged)
    topic = int(_require(merged, "topic"))
    workflow.set_aggregate_label(project, topic, _require(merged, "label"))
    return _save_and_print(path, project, {"code": project.code(topic).to_dict()})


def _cmd_prune_rated(args) -> int:
    merged = _merge(
        args, {**_PROJECT_FILE, "threshold": workflow.DEFAULT_RATING_THRESHOLD}
    )
    path, project = _load_project_for(merged)
    removed = workflow.prune_low_rated(project, float(merged["threshold"]))
    return _save_and_print(
        path,
        project,
        {
            "removed": [c.to_dict() for c in removed],
            "active_codes": len(project.active_codes()),
        },
    )


def _cmd_category_create(args) -> int:
    merged = _merge(args, {**_PROJECT_FILE, "name": None, "kind": "GENERIC"})
    path, project = _load_project_for(merged)
    category = workflow.create_category(project, _require(merged, "name"), merged["kind"])
    return _save_and_print(path, project, {"category": category.to_dict()})


def _cmd_category_rename(args) -> int:
    merged = _merge(args, {**_PROJECT_FILE, "category": None, "name": None})
    path, project = _load_project_for(merged)
    category = workflow.rename_category(
        project, _require(merged, "category"), _require(merged, "name")
    )
    return _save_and_print(path, project, {"category": category.to_dict()})


def _cmd_category_set_kind(args) -> int:
    merged = _merge(args, {**_PROJECT_FILE, "category": None, "kind": None})
    path, project = _load_project_for(merged)
    category = workflow.set_category_kind(
        project, _require(merged, "category"), _require(merged, "kind")
    )
    return _save_and_print(path, project, {"category": category.to_dict()})


def _cmd_category_assign(args) -> int:
    merged = _merge(args, {**_PROJECT_FILE, "category": None, "topic": None})
    path, project = _load_project_for(merged)
    workflow.assign_code(
        project, _require(merged, "category"), int(_require(merged, "topic"))
    )
    return _save_and_print(
        path, project, {"category": project.category(merged["category"]).to_dict()}
    )


def _cmd_category_unassign(args) -> int:
    merged = _merge(args, {**_PROJECT_FILE, "category": None, "topic": None})
    path, project = _load_project_for(merged)
    workflow.unassign_code(
        project, _require(merged, "category"), int(_require(merged, "topic"))
    )
    return _save_and_print(
        path, project, {"category": project.category(merged["category"]).to_dict()}
    )


def _cmd_prune_singletons(args) -> int:
    merged = _merge(args, dict(_PROJECT_FILE))
    path, project = _load_project_for(merged)
    removed = workflow.prune_singleton_categories(project)
    return _save_and_print(
        path,
        project,
        {
            "removed": [c.to_dict() for c in removed],
            "categories": len(project.categories),
        },
    )


def _cmd_dimension_create(args) -> int:
    merged = _merge(args, {**_PROJECT_FILE, "name": None})
    path, project = _load_project_for(merged)
    dimension = workflow.create_dimension(project, _require(merged, "name"))
    return _save_and_print(path, project, {"dimension": dimension.to_dict()})


def _cmd_dimension_assign(args) -> int:
    merged = _merge(args, {**_PROJECT_FILE, "dimension": None, "category": None})
    path, project = _load_project_for(merged)
    workflow.assign_category(
        project, _require(merged, "dimension"), _require(merged, "category")
    )
    return _save_and_print(
        path, project, {"dimension": project.dimension(merged["dimension"]).to_dict()}
    )


def _cmd_memo(args) -> int:
    merged = _merge(
        args, {**_PROJECT_FILE, "kind": None, "ref": None, "author": None, "text": None}
    )
    path, project = _load_project_for(merged)
    memo = workflow.add_memo(
        project,
        _require(merged, "kind"),
        str(_require(merged, "ref")),
        _require(merged, "author"),
        _require(merged, "text"),
    )
    return _save_and_print(path, project, {"memo": memo.to_dict()})


def _cmd_export(args) -> int:
    merged = _merge(args, {**_PROJECT_FILE, "format": "json", "csv": False})
    _, project = _load_project_for(merged)
    fmt = "csv" if merged["csv"] else merged["format"]
    tables = workflow.export_tables(project, format=fmt)
    if fmt == "csv":
        sys.stdout.write(tables["table2"])
        sys.stdout.write("\n")
        sys.stdout.write(tables["table3"])
        return 0
    _print_json(tables)
    return 0


def _cmd_serve(args) -> int:
    merged = _merge(
        args,
        {
            "workspace": None,
            "host": "127.0.0.1",
            "port": 8000,
            "workers": 2,
            "ui": None,
        },
    )
    from .server import serve

    serve(
        _require(merged, "workspace"),
        host=merged["host"],
        port=int(merged["port"]),
        max_workers=int(merged["workers"]),
        ui_dir=merged["ui"],
    )
    return 0


def _cmd_report(args) -> int:
    merged = _merge(
        args,
        {
            "out_dir": None,
            "model": None,
            "project": None,
            "grid": None,
            "max_topics": 16,
        },
    )
    out_dir = _require(merged, "out_dir")
    model = _load_model(merged["model"]) if merged["model"] else None
    project = workflow.load_project(merged["project"]) if merged["project"] else None
    grid = (
        ComparisonGrid.from_json(_read(merged["grid"])) if merged["grid"] else None
    )
    if model is None and project is None and grid is None:
        raise ContractViolation(
            "report needs at least one of --model, --project, --grid", field="model"
        )
    manifest = render_report(
        out_dir,
        model=model,
        project=project,
        grid=grid,
        max_topics=int(merged["max_topics"]),
    )
    _print_json(manifest)
    return 0


# --- parser wiring ----------------------------------------------------

_S = argparse.SUPPRESS


def _add_config(parser) -> None:
    parser.add_argument("--config", default=None, help="JSON file supplying flags")


def _add_project_flag(parser) -> None:
    parser.add_argument("--project", default=_S, help="project file path")
    _add_config(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="topicgt", description="Topic-model grounded-theory workbench")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("ingest", help="read documents and build an encoded corpus")
    p.add_argument("--source", default=_S, help="JSONL file or directory of .txt files")
    p.add_argument("--manifest", default=_S, help="JSON manifest for directory sources")
    p.add_argument("--out", default=_S, help="where to write the encoded corpus JSON")
    p.add_argument("--stopwords", default=_S, help="stopword file, one word per line")
    p.add_argument("--min-token-length", type=int, default=_S)
    p.add_argument("--min-df", type=int, default=_S, help="minimum document frequency")
    p.add_argument("--stemming", action=argparse.BooleanOptionalAction, default=_S)
    p.add_argument(
        "--prefix-stripping", action=argparse.BooleanOptionalAction, default=_S
    )
    p.add_argument("--section-filter", default=_S, help="comma-separated tags to keep")
    _add_config(p)
    p.set_defaults(handler=_cmd_ingest)

    p = sub.add_parser("model", help="run LDA on an encoded corpus")
    p.add_argument("--corpus", default=_S, help="encoded corpus JSON path")
    p.add_argument("--topics", type=int, default=_S, help="number of topics K")
    p.add_argument("--alpha", type=float, default=_S)
    p.add_argument("--beta", type=float, default=_S)
    p.add_argument("--sweeps", type=int, default=_S)
    p.add_argument("--seed", type=int, default=_S)
    p.add_argument("--words", type=int, default=_S, help="top words kept per topic")
    p.add_argument("--average-last", type=int, default=_S)
    p.add_argument("--out", default=_S, help="where to write the model JSON")
    p.add_argument("--csv", action="store_true", default=_S,
                   help="print the document-topic matrix as CSV")
    _add_config(p)
    p.set_defaults(handler=_cmd_model)

    p = sub.add_parser("compare", help="run several K and compare topic sets")
    p.add_argument("--corpus", default=_S)
    p.add_argument("--topics", default=_S, help="comma-separated K list, e.g. 40,50,60")
    p.add_argument("--alpha", type=float, default=_S)
    p.add_argument("--beta", type=float, default=_S)
    p.add_argument("--sweeps", type=int, default=_S)
    p.add_argument("--seed", type=int, default=_S)
    p.add_argument("--words", type=int, default=_S)
    p.add_argument("--average-last", type=int, default=_S)
    p.add_argument("--threshold", type=int, default=_S, help="shared-word threshold")
    p.add_argument("--out", default=_S, help="where to write the grid JSON")
    p.add_argument("--csv", action="store_true", default=_S,
                   help="print the coverage matrix as CSV")
    _add_config(p)
    p.set_defaults(handler=_cmd_compare)

    project = sub.add_parser("project", help="workflow operations on a project file")
    psub = project.add_subparsers(dest="project_command", required=True, metavar="OP")

    p = psub.add_parser("create", help="start a project from a model")
    p.add_argument("--model", default=_S, help="model JSON path")
    p.add_argument("--project", default=_S, help="project file to create")
    p.add_argument("--id", default=_S, help="explicit project id")
    _add_config(p)
    p.set_defaults(handler=_cmd_project_create)

    p = psub.add_parser("mark-outlier", help="remove a topic as an outlier")
    p.add_argument("--topic", type=int, default=_S)
    p.add_argument("--reason", default=_S)
    _add_project_flag(p)
    p.set_defaults(handler=_cmd_mark_outlier)

    p = psub.add_parser("advance", help="advance to the next stage")
    _add_project_flag(p)
    p.set_defaults(handler=_cmd_advance)

    p = psub.add_parser("label", help="submit an expert label and rating")
    p.add_argument("--expert", default=_S)
    p.add_argument("--topic", type=int, default=_S)
    p.add_argument("--label", default=_S)
    p.add_argument("--rating", type=int, default=_S)
    _add_project_flag(p)
    p.set_defaults(handler=_cmd_label)

    p = psub.add_parser("aggregate-label", help="set the aggregated label of a code")
    p.add_argument("--topic", type=int, default=_S)
    p.add_argument("--label", default=_S)
    _add_project_flag(p)
    p.set_defaults(handler=_cmd_aggregate_label)

    p = psub.add_parser("prune-rated", help="remove codes rated below the threshold")
    p.add_argument("--threshold", type=float, default=_S)
    _add_project_flag(p)
    p.set_defaults(handler=_cmd_prune_rated)

    category = psub.add_parser("category", help="category operations")
    csub = category.add_subparsers(dest="category_command", required=True, metavar="OP")
    p = csub.add_parser("create")
    p.add_argument("--name", default=_S)
    p.add_argument("--kind", default=_S, choices=list(workflow.CATEGORY_KINDS))
    _add_project_flag(p)
    p.set_defaults(handler=_cmd_category_create)
    p = csub.add_parser("rename")
    p.add_argument("--category", default=_S)
    p.add_argument("--name", default=_S)
    _add_project_flag(p)
    p.set_defaults(handler=_cmd_category_rename)
    p = csub.add_parser("set-kind")
    p.add_argument("--category", default=_S)
    p.add_argument("--kind", default=_S, choices=list(workflow.CATEGORY_KINDS))
    _add_project_flag(p)
    p.set_defaults(handler=_cmd_category_set_kind)
    p = csub.add_parser("assign")
    p.add_argument("--category", default=_S)
    p.add_argument("--topic", type=int, default=_S)
    _add_project_flag(p)
    p.set_defaults(handler=_cmd_category_assign)
    p = csub.add_parser("unassign")
    p.add_argument("--category", default=_S)
    p.add_argument("--topic", type=int, default=_S)
    _add_project_flag(p)
    p.set_defaults(handler=_cmd_category_unassign)

    p = psub.add_parser("prune-singletons", help="delete categories with < 2 codes")
    _add_project_flag(p)
    p.set_defaults(handler=_cmd_prune_singletons)

    dimension = psub.add_parser("dimension", help="dimension operations")
    dsub = dimension.add_subparsers(dest="dimension_command", required=True, metavar="OP")
    p = dsub.add_parser("create")
    p.add_argument("--name", default=_S)
    _add_project_flag(p)
    p.set_defaults(handler=_cmd_dimension_create)
    p = dsub.add_parser("assign")
    p.add_argument("--dimension", default=_S)
    p.add_argument("--category", default=_S)
    _add_project_flag(p)
    p.set_defaults(handler=_cmd_dimension_assign)

    p = psub.add_parser("memo", help="attach a memo")
    p.add_argument("--kind", default=_S, choices=list(workflow.MEMO_KINDS))
    p.add_argument("--ref", default=_S, help="id of the attachment target")
    p.add_argument("--author", default=_S)
    p.add_argument("--text", default=_S)
    _add_project_flag(p)
    p.set_defaults(handler=_cmd_memo)

    p = psub.add_parser("export", help="export the code and category tables")
    p.add_argument("--format", default=_S, choices=["json", "csv"])
    p.add_argument("--csv", action="store_true", default=_S)
    _add_project_flag(p)
    p.set_defaults(handler=_cmd_export)

    p = sub.add_parser("serve", help="start the HTTP server")
    p.add_argument("--workspace", default=_S, help="workspace directory")
    p.add_argument("--host", default=_S)
    p.add_argument("--port", type=int, default=_S)
    p.add_argument("--workers", type=int, default=_S)
    p.add_argument("--ui", default=_S, help="static UI directory to mount at /")
    _add_config(p)
    p.set_defaults(handler=_cmd_serve)

    p = sub.add_parser("report", help="render figures and tables to a directory")
    p.add_argument("--out-dir", default=_S)
    p.add_argument("--model", default=_S, help="model JSON path")
    p.add_argument("--project", default=_S, help="project file path")
    p.add_argument("--grid", default=_S, help="comparison grid JSON path")
    p.add_argument("--max-topics", type=int, default=_S)
    _add_config(p)
    p.set_defaults(handler=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError:
        return 1
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.handler(args)
    except (PersistenceError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except WorkbenchError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        if getattr(exc, "field", None):
            payload["field"] = exc.field
        print(json.dumps(payload), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
