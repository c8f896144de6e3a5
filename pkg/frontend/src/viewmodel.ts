/**
 * Pure projections from server state to view state. Nothing in here owns
 * data: every view model is derived from the latest ProjectView, so a
 * re-render after a reload is pixel-identical to the pre-reload render.
 */

import type {
  Category,
  Code,
  Dimension,
  Memo,
  ProjectView,
} from "./models.js";

export interface CategoryChip {
  categoryId: string;
  name: string;
  kind: string;
}

export interface TopicCardView {
  topicId: number;
  topWords: string[];
  status: string;
  removalReason: string | null;
  averageRating: number | null;
  aggregateLabel: string | null;
  /** The session expert's own label/rating, if submitted. */
  myLabel: string | null;
  myRating: number | null;
  /** Every category this code belongs to (multi-membership allowed). */
  chips: CategoryChip[];
  /** Removed codes render read-only. */
  readOnly: boolean;
}

export interface BoardColumn {
  categoryId: string | null; // null = uncategorized pool
  name: string;
  kind: string | null;
  singleton: boolean;
  cards: TopicCardView[];
}

export interface DimensionGroup {
  dimensionId: string;
  name: string;
  categories: Category[];
}

export interface LabelProgress {
  expertId: string;
  labeled: number;
  total: number;
}

function byTopic(a: Code, b: Code): number {
  return a.topic_id - b.topic_id;
}

function byId<T extends { category_id: string }>(a: T, b: T): number {
  return a.category_id < b.category_id ? -1 : a.category_id > b.category_id ? 1 : 0;
}

export function chipsFor(project: ProjectView, topicId: number): CategoryChip[] {
  return [...project.categories]
    .sort(byId)
    .filter((c) => c.member_codes.includes(topicId))
    .map((c) => ({ categoryId: c.category_id, name: c.name, kind: c.kind }));
}

export function buildTopicCard(
  project: ProjectView,
  code: Code,
  expertId: string | null,
): TopicCardView {
  const mine = expertId
    ? (code.expert_labels.find((l) => l.expert_id === expertId) ?? null)
    : null;
  return {
    topicId: code.topic_id,
    topWords: [...code.top_words],
    status: code.status,
    removalReason: code.removal_reason,
    averageRating: code.average_rating ?? null,
    aggregateLabel: code.aggregate_label,
    myLabel: mine ? mine.label : null,
    myRating: mine ? mine.rating : null,
    chips: chipsFor(project, code.topic_id),
    readOnly: code.status !== "ACTIVE",
  };
}

/** Cards for the expert-coding screen: every code, ACTIVE first by topic. */
export function buildTopicCards(
  project: ProjectView,
  expertId: string | null,
): TopicCardView[] {
  const active = project.codes.filter((c) => c.status === "ACTIVE").sort(byTopic);
  const removed = project.codes.filter((c) => c.status !== "ACTIVE").sort(byTopic);
  return [...active, ...removed].map((c) => buildTopicCard(project, c, expertId));
}

/** Per-expert progress over ACTIVE codes: labeled / total. */
export function labelProgress(
  project: ProjectView,
  expertId: string,
): LabelProgress {
  const active = project.codes.filter((c) => c.status === "ACTIVE");
  const labeled = active.filter((c) =>
    c.expert_labels.some((l) => l.expert_id === expertId),
  ).length;
  return { expertId, labeled, total: active.length };
}

/** Every expert id that appears anywhere in the project's labels. */
export function knownExperts(project: ProjectView): string[] {
  const ids = new Set<string>();
  for (const code of project.codes) {
    for (const label of code.expert_labels) {
      ids.add(label.expert_id);
    }
  }
  return [...ids].sort();
}

/**
 * The focus-coding board: one column per category plus the uncategorized
 * pool. A card appears in every column whose category holds it.
 */
export function buildBoard(
  project: ProjectView,
  expertId: string | null,
): BoardColumn[] {
  const active = project.codes.filter((c) => c.status === "ACTIVE").sort(byTopic);
  const categorized = new Set<number>();
  for (const category of project.categories) {
    for (const topicId of category.member_codes) {
      categorized.add(topicId);
    }
  }
  const pool: BoardColumn = {
    categoryId: null,
    name: "uncategorized",
    kind: null,
    singleton: false,
    cards: active
      .filter((c) => !categorized.has(c.topic_id))
      .map((c) => buildTopicCard(project, c, expertId)),
  };
  const columns = [...project.categories].sort(byId).map((category) => ({
    categoryId: category.category_id,
    name: category.name,
    kind: category.kind,
    singleton: category.member_codes.length < 2,
    cards: active
      .filter((c) => category.member_codes.includes(c.topic_id))
      .map((c) => buildTopicCard(project, c, expertId)),
  }));
  return [pool, ...columns];
}

export function dimensionGroups(project: ProjectView): DimensionGroup[] {
  const byIdMap = new Map(project.categories.map((c) => [c.category_id, c]));
  return [...project.dimensions]
    .sort((a, b) => (a.dimension_id < b.dimension_id ? -1 : 1))
    .map((dimension: Dimension) => ({
      dimensionId: dimension.dimension_id,
      name: dimension.name,
      categories: [...dimension.member_categories]
        .sort()
        .map((id) => byIdMap.get(id))
        .filter((c): c is Category => c !== undefined),
    }));
}

/** Categories not yet aggregated into any dimension. */
export function unassignedCategories(project: ProjectView): Category[] {
  const taken = new Set(
    project.dimensions.flatMap((d) => d.member_categories),
  );
  return [...project.categories]
    .sort(byId)
    .filter((c) => !taken.has(c.category_id));
}

export function memosFor(
  project: ProjectView,
  kind: string,
  id: string,
): Memo[] {
  return project.memos.filter(
    (m) => m.attached_to.kind === kind && m.attached_to.id === id,
  );
}
