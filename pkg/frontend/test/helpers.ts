/**
 * Test support: fixture loading (real server responses captured over
 * /api/v1 by scripts/capture_fixtures.py) and a FakeBackend that speaks
 * the same routes and envelopes for interaction tests.
 */

import { readFileSync } from "node:fs";
import { join } from "node:path";

import type {
  Category,
  Code,
  Dimension,
  ExportTables,
  Memo,
  ProjectView,
  TopicDocument,
} from "../src/models.js";
import type { FetchLike } from "../src/api.js";

export function fixturePath(name: string): string {
  // vitest runs with the package root as cwd
  return join(process.cwd(), "test", "fixtures", name);
}

export function loadFixture<T>(name: string): T {
  return JSON.parse(readFileSync(fixturePath(name), "utf-8")) as T;
}

export function fixtureProject(name: string): ProjectView {
  return loadFixture<ProjectView>(name);
}

function json(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function envelope(
  status: number,
  code: string,
  message: string,
  field: string | null = null,
): Response {
  return json({ code, message, field }, status);
}

const STAGES = [
  "RAW_CODING",
  "EXPERT_CODING",
  "FOCUS_CODING",
  "THEORY_BUILDING",
] as const;

interface Call {
  method: string;
  url: string;
  body: unknown;
}

/**
 * In-memory stand-in for the server: holds one project document, applies
 * the same mutations, and answers with the same JSON shapes (mutation
 * responses carry the fresh project view). Unknown routes throw so a test
 * with a typo fails loudly instead of silently passing.
 */
export class FakeBackend {
  readonly calls: Call[] = [];
  project: ProjectView;
  topicDocuments: TopicDocument[];
  exportTables: ExportTables;

  constructor(project: ProjectView) {
    this.project = structuredClone(project);
    this.topicDocuments = loadFixture<TopicDocument[]>("topic20_documents.json");
    this.exportTables = loadFixture<ExportTables>("export.json");
  }

  /** Mutating requests recorded, GETs not counted. */
  get mutationCount(): number {
    return this.calls.filter((c) => c.method !== "GET").length;
  }

  fetch: FetchLike = async (url, init) => {
    const method = (init?.method ?? "GET").toUpperCase();
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    if (method !== "GET") {
      this.calls.push({ method, url, body });
    }
    return this.route(method, url, body);
  };

  private view(): ProjectView {
    const view = structuredClone(this.project);
    for (const code of view.codes) {
      const ratings = code.expert_labels.map((l) => l.rating);
      code.average_rating =
        ratings.length > 0
          ? ratings.reduce((a, b) => a + b, 0) / ratings.length
          : null;
    }
    return view;
  }

  private code(topicId: number): Code {
    const code = this.project.codes.find((c) => c.topic_id === topicId);
    if (!code) {
      throw new Error(`fixture has no topic ${topicId}`);
    }
    return code;
  }

  private nextId(prefix: string): string {
    this.project.id_counter += 1;
    return `${prefix}_${this.project.id_counter}`;
  }

  private route(method: string, url: string, body: any): Response {
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const pid = this.project.project_id;
    const base = `/api/v1/projects/${pid}`;

    if (method === "GET" && path === base) {
      return json(this.view());
    }
    if (method === "GET" && path === "/api/v1/projects") {
      return json([
        { project_id: pid, stage: this.project.stage },
      ]);
    }
    if (method === "POST" && path === `${base}/advance`) {
      const index = STAGES.indexOf(this.project.stage);
      if (index === STAGES.length - 1) {
        return envelope(
          409,
          "stage_rule_violation",
          `project is already at the final stage ${this.project.stage}`,
        );
      }
      this.project.stage = STAGES[index + 1]!;
      return json(this.view());
    }
    if (method === "POST" && path === `${base}/outliers`) {
      const code = this.code(body.topic_id);
      code.status = "OUTLIER_REMOVED";
      code.removal_reason = body.reason;
      return json(this.view());
    }
    if (method === "POST" && path === `${base}/labels`) {
      if (
        typeof body.rating !== "number" ||
        !Number.isInteger(body.rating) ||
        body.rating < 1 ||
        body.rating > 5
      ) {
        return envelope(
          400,
          "contract_violation",
          "rating must be an integer in 1..5",
          "rating",
        );
      }
      const code = this.code(body.topic_id);
      code.expert_labels = code.expert_labels.filter(
        (l) => l.expert_id !== body.expert_id,
      );
      code.expert_labels.push({
        expert_id: body.expert_id,
        label: body.label,
        rating: body.rating,
      });
      return json(this.view());
    }
    if (method === "POST" && path === `${base}/aggregate-labels`) {
      this.code(body.topic_id).aggregate_label = body.label;
      return json(this.view());
    }
    if (method === "POST" && path === `${base}/prune-rated`) {
      for (const code of this.project.codes) {
        if (code.status !== "ACTIVE" || code.expert_labels.length === 0) {
          continue;
        }
        const ratings = code.expert_labels.map((l) => l.rating);
        const mean = ratings.reduce((a, b) => a + b, 0) / ratings.length;
        if (mean < body.threshold) {
          code.status = "RATING_REMOVED";
          code.removal_reason = `average rating ${mean} below threshold ${body.threshold}`;
        }
      }
      return json({ removed: [], project: this.view() });
    }
    if (method === "POST" && path === `${base}/categories`) {
      const category: Category = {
        category_id: this.nextId("cat"),
        name: body.name,
        kind: body.kind ?? "GENERIC",
        member_codes: [],
      };
      this.project.categories.push(category);
      return json({ category, project: this.view() }, 201);
    }
    const patchMatch = path.match(
      new RegExp(`^${base}/categories/([^/]+)$`),
    );
    if (method === "PATCH" && patchMatch) {
      const category = this.project.categories.find(
        (c) => c.category_id === patchMatch[1],
      );
      if (!category) {
        return envelope(404, "unknown_resource", `unknown category ${patchMatch[1]}`);
      }
      if (body.name !== undefined) {
        category.name = body.name;
      }
      if (body.kind !== undefined) {
        category.kind = body.kind;
      }
      return json({ category, project: this.view() });
    }
    const assignMatch = path.match(
      new RegExp(`^${base}/categories/([^/]+)/codes$`),
    );
    if (method === "POST" && assignMatch) {
      const category = this.project.categories.find(
        (c) => c.category_id === assignMatch[1],
      );
      if (!category) {
        return envelope(404, "unknown_resource", `unknown category ${assignMatch[1]}`);
      }
      if (category.member_codes.includes(body.topic_id)) {
        return envelope(
          400,
          "contract_violation",
          `topic ${body.topic_id} is already a member`,
          "topic_id",
        );
      }
      category.member_codes.push(body.topic_id);
      category.member_codes.sort((a, b) => a - b);
      return json(this.view());
    }
    const unassignMatch = path.match(
      new RegExp(`^${base}/categories/([^/]+)/codes/(\\d+)$`),
    );
    if (method === "DELETE" && unassignMatch) {
      const category = this.project.categories.find(
        (c) => c.category_id === unassignMatch[1],
      );
      if (!category) {
        return envelope(404, "unknown_resource", `unknown category ${unassignMatch[1]}`);
      }
      category.member_codes = category.member_codes.filter(
        (t) => t !== Number(unassignMatch[2]),
      );
      return json(this.view());
    }
    if (method === "POST" && path === `${base}/prune-singletons`) {
      const removed = this.project.categories.filter(
        (c) => c.member_codes.length < 2,
      );
      this.project.categories = this.project.categories.filter(
        (c) => c.member_codes.length >= 2,
      );
      return json({ removed, project: this.view() });
    }
    if (method === "POST" && path === `${base}/dimensions`) {
      const dimension: Dimension = {
        dimension_id: this.nextId("dim"),
        name: body.name,
        member_categories: [],
      };
      this.project.dimensions.push(dimension);
      return json({ dimension, project: this.view() }, 201);
    }
    const dimAssign = path.match(
      new RegExp(`^${base}/dimensions/([^/]+)/categories$`),
    );
    if (method === "POST" && dimAssign) {
      const dimension = this.project.dimensions.find(
        (d) => d.dimension_id === dimAssign[1],
      );
      if (!dimension) {
        return envelope(404, "unknown_resource", `unknown dimension ${dimAssign[1]}`);
      }
      const taken = this.project.dimensions.find((d) =>
        d.member_categories.includes(body.category_id),
      );
      if (taken) {
        return envelope(
          400,
          "contract_violation",
          `category ${body.category_id} is already in dimension ${taken.dimension_id}`,
          "category_id",
        );
      }
      dimension.member_categories.push(body.category_id);
      dimension.member_categories.sort();
      return json(this.view());
    }
    if (method === "POST" && path === `${base}/memos`) {
      const memo: Memo = {
        memo_id: this.nextId("memo"),
        author: body.author,
        attached_to: { kind: body.kind, id: body.ref_id },
        text: body.text,
        created_at: "2026-01-01T00:00:00+00:00",
      };
      this.project.memos.push(memo);
      return json({ memo, project: this.view() }, 201);
    }
    if (method === "GET" && path === `${base}/export?format=json`) {
      return json(this.exportTables);
    }
    if (
      method === "GET" &&
      /^\/api\/v1\/models\/[^/]+\/topics\/\d+\/documents\?n=\d+$/.test(path)
    ) {
      return json(this.topicDocuments);
    }
    throw new Error(`FakeBackend has no route for ${method} ${path}`);
  }
}
