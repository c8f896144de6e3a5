/** Shapes of the JSON documents served under /api/v1. */

export type Stage =
  | "RAW_CODING"
  | "EXPERT_CODING"
  | "FOCUS_CODING"
  | "THEORY_BUILDING";

export type CodeStatus = "ACTIVE" | "OUTLIER_REMOVED" | "RATING_REMOVED";

export type CategoryKind = "CORE" | "GENERIC";

export type MemoKind = "code" | "category" | "dimension" | "project";

export interface ExpertLabel {
  expert_id: string;
  label: string;
  rating: number;
}

export interface Code {
  topic_id: number;
  top_words: string[];
  status: CodeStatus;
  removal_reason: string | null;
  expert_labels: ExpertLabel[];
  aggregate_label: string | null;
  /** Added by the server's project view; absent from the raw project file. */
  average_rating?: number | null;
}

export interface Category {
  category_id: string;
  name: string;
  kind: CategoryKind;
  member_codes: number[];
}

export interface Dimension {
  dimension_id: string;
  name: string;
  member_categories: string[];
}

export interface Memo {
  memo_id: string;
  author: string;
  attached_to: { kind: MemoKind; id: string };
  text: string;
  created_at: string;
}

export interface AuditEvent {
  seq: number;
  timestamp: string;
  op: string;
  retroactive: boolean;
  payload: Record<string, unknown>;
}

export interface ProjectView {
  schema_version: number;
  project_id: string;
  corpus_ref: string;
  model_ref: string;
  stage: Stage;
  created_at: string;
  id_counter: number;
  codes: Code[];
  categories: Category[];
  dimensions: Dimension[];
  memos: Memo[];
  audit_log: AuditEvent[];
}

export interface ProjectSummary {
  project_id: string;
  corpus_ref: string;
  model_ref: string;
  stage: Stage;
  codes: number;
  active_codes: number;
  categories: number;
  dimensions: number;
  memos: number;
  audit_events: number;
}

export interface TopicWords {
  topic_id: number;
  words: string[];
}

export interface TopicDocument {
  doc_id: string;
  theta: number;
}

export interface ModelSummary {
  model_id: string;
  corpus_ref: string;
  num_topics: number;
  params: Record<string, unknown>;
  final_log_likelihood: number | null;
  topics: TopicWords[];
}

export interface AverageRating {
  topic_id: number;
  average_rating: number;
}

export interface ExportTables {
  table2: Array<Record<string, string>>;
  table3: Array<Record<string, string>>;
}

export interface ErrorEnvelope {
  code: string;
  message: string;
  field: string | null;
}
