"""Topic-model grounded-theory workbench.

Pipeline: ingest documents into an EncodedCorpus, fit LDA by collapsed
Gibbs sampling into a TopicModel, compare topic sets across candidate K
to pick one, then run the coding workflow (outliers, expert labels and
ratings, categories, dimensions, memos) on a persistent Project. A CLI,
a report renderer, and an HTTP server wrap the same library calls.
"""

from .corpus import (
    Corpus,
    Document,
    EncodedCorpus,
    PreprocessConfig,
    Vocabulary,
    build_encoded_corpus,
    ingest,
    remove_stopwords,
    tokenize,
)
from .errors import (
    ContractViolation,
    CorruptFile,
    PersistenceError,
    SchemaVersionMismatch,
    StageRuleViolation,
    UnknownResource,
    WorkbenchError,
)
from .lda import (
    LdaParams,
    SamplerState,
    TopicModel,
    gibbs_conditional,
    gibbs_sweep,
    init_state,
    log_likelihood,
    run_lda,
    theta_csv,
    top_documents,
    top_words,
)
from .stemming import stem
from .stopwords import default_stopwords, load_stopwords
from .topicsim import (
    ComparisonGrid,
    CoverageReport,
    KSelection,
    TopicSet,
    compare_grid,
    coverage,
    derive_seed,
    match_topics,
    select_k,
)
from .workflow import (
    AuditEvent,
    Category,
    Code,
    Dimension,
    ExpertLabel,
    Memo,
    Project,
    add_memo,
    advance_stage,
    assign_category,
    assign_code,
    average_rating,
    create_category,
    create_dimension,
    create_project,
    export_tables,
    load_project,
    mark_outlier,
    memos_for,
    projects_equal,
    prune_low_rated,
    prune_singleton_categories,
    rename_category,
    replay_audit,
    save_project,
    set_aggregate_label,
    set_category_kind,
    submit_expert_label,
    unassign_code,
)

__version__ = "1.0.0"

__all__ = [
    "Corpus",
    "Document",
    "EncodedCorpus",
    "PreprocessConfig",
    "Vocabulary",
    "build_encoded_corpus",
    "ingest",
    "remove_stopwords",
    "tokenize",
    "ContractViolation",
    "CorruptFile",
    "PersistenceError",
    "SchemaVersionMismatch",
    "StageRuleViolation",
    "UnknownResource",
    "WorkbenchError",
    "LdaParams",
    "SamplerState",
    "TopicModel",
    "gibbs_conditional",
    "gibbs_sweep",
    "init_state",
    "log_likelihood",
    "run_lda",
    "theta_csv",
    "top_documents",
    "top_words",
    "stem",
    "default_stopwords",
    "load_stopwords",
    "ComparisonGrid",
    "CoverageReport",
    "KSelection",
    "TopicSet",
    "compare_grid",
    "coverage",
    "derive_seed",
    "match_topics",
    "select_k",
    "AuditEvent",
    "Category",
    "Code",
    "Dimension",
    "ExpertLabel",
    "Memo",
    "Project",
    "add_memo",
    "advance_stage",
    "assign_category",
    "assign_code",
    "average_rating",
    "create_category",
    "create_dimension",
    "create_project",
    "export_tables",
    "load_project",
    "mark_outlier",
    "memos_for",
    "projects_equal",
    "prune_low_rated",
    "prune_singleton_categories",
    "rename_category",
    "replay_audit",
    "save_project",
    "set_aggregate_label",
    "set_category_kind",
    "submit_expert_label",
    "unassign_code",
    "__version__",
]
