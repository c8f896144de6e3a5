import type {
  AverageRating,
  Category,
  Dimension,
  ErrorEnvelope,
  ExportTables,
  Memo,
  MemoKind,
  ModelSummary,
  ProjectSummary,
  ProjectView,
  TopicDocument,
} from "./models.js";

/** A non-2xx response, carrying the server's flat error envelope. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly field: string | null = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function toError(response: Response): Promise<ApiError> {
  let envelope: ErrorEnvelope | null = null;
  try {
    envelope = (await response.json()) as ErrorEnvelope;
  } catch {
    // non-JSON body; fall through to a generic error
  }
  if (envelope && typeof envelope.code === "string") {
    return new ApiError(
      response.status,
      envelope.code,
      envelope.message,
      envelope.field ?? null,
    );
  }
  return new ApiError(response.status, "http_error", `HTTP ${response.status}`);
}

/**
 * Thin typed client for the server's /api/v1 routes. Every method is a
 * single HTTP request; mutating routes return the fresh project view so
 * callers can re-render without a follow-up fetch.
 */
export class ApiClient {
  constructor(
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
    private readonly base = "/api/v1",
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) {
      throw await toError(response);
    }
    return (await response.json()) as T;
  }

  // projects ----------------------------------------------------------

  listProjects(): Promise<ProjectSummary[]> {
    return this.request("GET", "/projects");
  }

  getProject(projectId: string): Promise<ProjectView> {
    return this.request("GET", `/projects/${encodeURIComponent(projectId)}`);
  }

  advance(projectId: string): Promise<ProjectView> {
    return this.request(
      "POST",
      `/projects/${encodeURIComponent(projectId)}/advance`,
    );
  }

  markOutlier(
    projectId: string,
    topicId: number,
    reason: string,
  ): Promise<ProjectView> {
    return this.request(
      "POST",
      `/projects/${encodeURIComponent(projectId)}/outliers`,
      { topic_id: topicId, reason },
    );
  }

  submitLabel(
    projectId: string,
    expertId: string,
    topicId: number,
    label: string,
    rating: number,
  ): Promise<ProjectView> {
    return this.request(
      "POST",
      `/projects/${encodeURIComponent(projectId)}/labels`,
      { expert_id: expertId, topic_id: topicId, label, rating },
    );
  }

  setAggregateLabel(
    projectId: string,
    topicId: number,
    label: string,
  ): Promise<ProjectView> {
    return this.request(
      "POST",
      `/projects/${encodeURIComponent(projectId)}/aggregate-labels`,
      { topic_id: topicId, label },
    );
  }

  averageRating(projectId: string, topicId: number): Promise<AverageRating> {
    return this.request(
      "GET",
      `/projects/${encodeURIComponent(projectId)}/codes/${topicId}/average-rating`,
    );
  }

  pruneRated(
    projectId: string,
    threshold: number,
  ): Promise<{ removed: unknown[]; project: ProjectView }> {
    return this.request(
      "POST",
      `/projects/${encodeURIComponent(projectId)}/prune-rated`,
      { threshold },
    );
  }

  // categories --------------------------------------------------------

  createCategory(
    projectId: string,
    name: string,
    kind: string,
  ): Promise<{ category: Category; project: ProjectView }> {
    return this.request(
      "POST",
      `/projects/${encodeURIComponent(projectId)}/categories`,
      { name, kind },
    );
  }

  patchCategory(
    projectId: string,
    categoryId: string,
    patch: { name?: string; kind?: string },
  ): Promise<{ category: Category; project: ProjectView }> {
    return this.request(
      "PATCH",
      `/projects/${encodeURIComponent(projectId)}/categories/${encodeURIComponent(categoryId)}`,
      patch,
    );
  }

  assignCode(
    projectId: string,
    categoryId: string,
    topicId: number,
  ): Promise<ProjectView> {
    return this.request(
      "POST",
      `/projects/${encodeURIComponent(projectId)}/categories/${encodeURIComponent(categoryId)}/codes`,
      { topic_id: topicId },
    );
  }

  unassignCode(
    projectId: string,
    categoryId: string,
    topicId: number,
  ): Promise<ProjectView> {
    return this.request(
      "DELETE",
      `/projects/${encodeURIComponent(projectId)}/categories/${encodeURIComponent(categoryId)}/codes/${topicId}`,
    );
  }

  pruneSingletons(
    projectId: string,
  ): Promise<{ removed: Category[]; project: ProjectView }> {
    return this.request(
      "POST",
      `/projects/${encodeURIComponent(projectId)}/prune-singletons`,
    );
  }

  // dimensions and memos ----------------------------------------------

  createDimension(
    projectId: string,
    name: string,
  ): Promise<{ dimension: Dimension; project: ProjectView }> {
    return this.request(
      "POST",
      `/projects/${encodeURIComponent(projectId)}/dimensions`,
      { name },
    );
  }

  assignCategory(
    projectId: string,
    dimensionId: string,
    categoryId: string,
  ): Promise<ProjectView> {
    return this.request(
      "POST",
      `/projects/${encodeURIComponent(projectId)}/dimensions/${encodeURIComponent(dimensionId)}/categories`,
      { category_id: categoryId },
    );
  }

  addMemo(
    projectId: string,
    kind: MemoKind,
    refId: string,
    author: string,
    text: string,
  ): Promise<{ memo: Memo; project: ProjectView }> {
    return this.request(
      "POST",
      `/projects/${encodeURIComponent(projectId)}/memos`,
      { kind, ref_id: refId, author, text },
    );
  }

  exportTables(projectId: string): Promise<ExportTables> {
    return this.request(
      "GET",
      `/projects/${encodeURIComponent(projectId)}/export?format=json`,
    );
  }

  async exportCsv(projectId: string): Promise<{ table2: string; table3: string }> {
    return this.request(
      "GET",
      `/projects/${encodeURIComponent(projectId)}/export?format=csv`,
    );
  }

  // models --------------------------------------------------------------

  getModel(modelId: string): Promise<ModelSummary> {
    return this.request("GET", `/models/${encodeURIComponent(modelId)}`);
  }

  topicDocuments(
    modelId: string,
    topicId: number,
    n = 5,
  ): Promise<TopicDocument[]> {
    return this.request(
      "GET",
      `/models/${encodeURIComponent(modelId)}/topics/${topicId}/documents?n=${n}`,
    );
  }
}
