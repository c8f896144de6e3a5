/**
 * HTML renderers. Every function is a pure string projection of server
 * state (via the view models), so the same ProjectView always produces
 * byte-identical markup — the reload-fidelity guarantee lives here.
 */

import type { Category, Memo, ProjectView, TopicDocument } from "./models.js";
import {
  buildBoard,
  buildTopicCards,
  dimensionGroups,
  knownExperts,
  labelProgress,
  memosFor,
  unassignedCategories,
  type BoardColumn,
  type TopicCardView,
} from "./viewmodel.js";

export function escapeHtml(raw: string): string {
  return raw
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

const esc = escapeHtml;

function chipRow(card: TopicCardView): string {
  if (card.chips.length === 0) {
    return "";
  }
  const chips = card.chips
    .map(
      (chip) =>
        `<span class="chip chip-${chip.kind.toLowerCase()}" data-category="${esc(chip.categoryId)}">${esc(chip.name)}</span>`,
    )
    .join("");
  return `<div class="chips">${chips}</div>`;
}

function ratingText(card: TopicCardView): string {
  return card.averageRating === null
    ? "unrated"
    : `avg ${card.averageRating.toFixed(2)}`;
}

function expertLabelList(card: TopicCardView, project: ProjectView): string {
  const code = project.codes.find((c) => c.topic_id === card.topicId);
  if (!code || code.expert_labels.length === 0) {
    return "";
  }
  const items = code.expert_labels
    .map(
      (l) =>
        `<li><span class="label-expert">${esc(l.expert_id)}</span> &ldquo;${esc(l.label)}&rdquo; <span class="label-rating">${l.rating}/5</span></li>`,
    )
    .join("");
  return `<ul class="expert-labels">${items}</ul>`;
}

export function renderTopicCard(
  project: ProjectView,
  card: TopicCardView,
  options: { editable: boolean; outlierControls: boolean },
): string {
  const removedClass = card.readOnly ? " removed" : "";
  const words = card.topWords.map((w) => `<li>${esc(w)}</li>`).join("");
  const aggregate = card.aggregateLabel
    ? `<p class="aggregate-label">${esc(card.aggregateLabel)}</p>`
    : "";
  const removal = card.removalReason
    ? `<p class="removal-reason">${esc(card.removalReason)}</p>`
    : "";
  const form =
    options.editable && !card.readOnly
      ? `<div class="label-form">
  <input class="label-input" data-topic="${card.topicId}" placeholder="label" value="${esc(card.myLabel ?? "")}">
  <input class="rating-input" data-topic="${card.topicId}" inputmode="numeric" placeholder="1-5" value="${card.myRating ?? ""}">
  <button data-action="submit-label" data-topic="${card.topicId}">save</button>
  <span class="error" data-error-for="${card.topicId}"></span>
</div>
<div class="aggregate-form">
  <input class="aggregate-input" data-topic="${card.topicId}" placeholder="aggregate label" value="${esc(card.aggregateLabel ?? "")}">
  <button data-action="submit-aggregate" data-topic="${card.topicId}">agree</button>
</div>`
      : "";
  const outlier =
    options.outlierControls && !card.readOnly
      ? `<div class="outlier-form">
  <input class="outlier-reason" data-topic="${card.topicId}" placeholder="outlier reason">
  <button data-action="mark-outlier" data-topic="${card.topicId}">mark outlier</button>
</div>`
      : "";
  const evidence = card.readOnly
    ? ""
    : `<button data-action="evidence" data-topic="${card.topicId}">evidence</button>
<div class="evidence" data-evidence-for="${card.topicId}"></div>`;
  return `<article class="topic-card${removedClass}" data-topic="${card.topicId}">
<header>
  <span class="topic-name">topic_${card.topicId}</span>
  <span class="status-badge status-${card.status.toLowerCase()}">${card.status}</span>
  <span class="avg-rating">${ratingText(card)}</span>
</header>
<ul class="top-words">${words}</ul>
${chipRow(card)}${aggregate}${expertLabelList(card, project)}${removal}${form}${outlier}${evidence}
</article>`;
}

function renderProgress(project: ProjectView, sessionExpert: string): string {
  const experts = new Set(knownExperts(project));
  experts.add(sessionExpert);
  const rows = [...experts]
    .sort()
    .map((id) => {
      const p = labelProgress(project, id);
      return `<div class="progress-row" data-expert="${esc(id)}">${esc(id)}: ${p.labeled}/${p.total} labeled</div>`;
    })
    .join("");
  return `<section class="progress">${rows}</section>`;
}

export function renderRawScreen(
  project: ProjectView,
  expertId: string,
): string {
  const cards = buildTopicCards(project, expertId)
    .map((card) =>
      renderTopicCard(project, card, { editable: false, outlierControls: true }),
    )
    .join("\n");
  return `<section class="cards raw-screen">${cards}</section>`;
}

export function renderExpertScreen(
  project: ProjectView,
  expertId: string,
): string {
  const cards = buildTopicCards(project, expertId)
    .map((card) =>
      renderTopicCard(project, card, { editable: true, outlierControls: false }),
    )
    .join("\n");
  return `${renderProgress(project, expertId)}
<div class="prune-form">
  <input class="prune-threshold" value="2">
  <button data-action="prune-rated">prune low-rated</button>
</div>
<section class="cards expert-screen">${cards}</section>`;
}

function categorySelect(project: ProjectView, topicId: number): string {
  const options = [...project.categories]
    .sort((a, b) => (a.category_id < b.category_id ? -1 : 1))
    .map(
      (c) =>
        `<option value="${esc(c.category_id)}">${esc(c.name)}</option>`,
    )
    .join("");
  return `<select class="assign-select" data-topic="${topicId}">${options}</select>
<button data-action="assign" data-topic="${topicId}">assign</button>`;
}

function renderBoardColumn(
  project: ProjectView,
  column: BoardColumn,
): string {
  const singleton = column.singleton ? " singleton" : "";
  const kindBadge = column.kind
    ? `<span class="kind-badge">${esc(column.kind)}</span>`
    : "";
  const header =
    column.categoryId === null
      ? `<header><h3>${esc(column.name)}</h3></header>`
      : `<header>
  <h3>${esc(column.name)}</h3>${kindBadge}
  <input class="rename-input" data-category="${esc(column.categoryId)}" value="${esc(column.name)}">
  <button data-action="rename-category" data-category="${esc(column.categoryId)}">rename</button>
  <button data-action="toggle-kind" data-category="${esc(column.categoryId)}">toggle kind</button>
</header>`;
  const cards = column.cards
    .map((card) => {
      const unassign =
        column.categoryId === null
          ? ""
          : `<button data-action="unassign" data-category="${esc(column.categoryId)}" data-topic="${card.topicId}">remove</button>`;
      return `<div class="board-card" data-topic="${card.topicId}">
  <span class="topic-name">topic_${card.topicId}</span>
  <span class="board-label">${esc(card.aggregateLabel ?? "")}</span>
  ${chipRow(card)}${categorySelect(project, card.topicId)}${unassign}
</div>`;
    })
    .join("\n");
  const columnId =
    column.categoryId === null ? "pool" : esc(column.categoryId);
  return `<section class="board-column${singleton}" data-column="${columnId}">
${header}
<div class="column-cards">${cards}</div>
</section>`;
}

export function renderBoardScreen(
  project: ProjectView,
  expertId: string,
): string {
  const columns = buildBoard(project, expertId)
    .map((column) => renderBoardColumn(project, column))
    .join("\n");
  return `<div class="board-actions">
  <input class="new-category-name" placeholder="new category">
  <select class="new-category-kind"><option value="GENERIC">GENERIC</option><option value="CORE">CORE</option></select>
  <button data-action="create-category">create category</button>
  <button data-action="prune-singletons">prune singletons</button>
</div>
<section class="board">${columns}</section>`;
}

function renderMemos(memos: Memo[]): string {
  if (memos.length === 0) {
    return "";
  }
  const items = memos
    .map(
      (m) =>
        `<li class="memo" data-memo="${esc(m.memo_id)}"><span class="memo-by">${esc(m.author)}</span>: ${esc(m.text)}</li>`,
    )
    .join("");
  return `<ul class="memos">${items}</ul>`;
}

function renderCategoryPanel(
  project: ProjectView,
  category: Category,
): string {
  const codes = [...category.member_codes]
    .sort((a, b) => a - b)
    .map((topicId) => {
      const code = project.codes.find((c) => c.topic_id === topicId);
      const label = code?.aggregate_label ?? "";
      return `<li data-topic="${topicId}">topic_${topicId} ${esc(label)}</li>`;
    })
    .join("");
  return `<details class="category-panel" data-category="${esc(category.category_id)}">
<summary>${esc(category.name)} <span class="kind-badge">${esc(category.kind)}</span></summary>
<ul class="panel-codes">${codes}</ul>
${renderMemos(memosFor(project, "category", category.category_id))}
</details>`;
}

export function renderTheoryScreen(project: ProjectView): string {
  const groups = dimensionGroups(project)
    .map((group) => {
      const members = group.categories
        .map((category) => renderCategoryPanel(project, category))
        .join("");
      return `<section class="dimension" data-dimension="${esc(group.dimensionId)}">
<h3>${esc(group.name)}</h3>
${members}
</section>`;
    })
    .join("\n");
  const pool = unassignedCategories(project)
    .map((category) => {
      const options = [...project.dimensions]
        .sort((a, b) => (a.dimension_id < b.dimension_id ? -1 : 1))
        .map(
          (d) =>
            `<option value="${esc(d.dimension_id)}">${esc(d.name)}</option>`,
        )
        .join("");
      return `<div class="pool-category" data-category="${esc(category.category_id)}">
${renderCategoryPanel(project, category)}
<select class="dimension-select" data-category="${esc(category.category_id)}">${options}</select>
<button data-action="assign-category" data-category="${esc(category.category_id)}">aggregate</button>
</div>`;
    })
    .join("\n");
  return `<div class="theory-actions">
  <input class="new-dimension-name" placeholder="new dimension">
  <button data-action="create-dimension">create dimension</button>
  <button data-action="export-json">export tables (json)</button>
  <button data-action="export-csv">export tables (csv)</button>
</div>
<section class="dimensions">${groups}</section>
<h3 class="pool-heading">categories without a dimension</h3>
<section class="category-pool">${pool}</section>
<div class="memo-form">
  <select class="memo-kind">
    <option value="project">project</option>
    <option value="code">code</option>
    <option value="category">category</option>
    <option value="dimension">dimension</option>
  </select>
  <input class="memo-ref" placeholder="attach to id">
  <input class="memo-author" placeholder="author">
  <input class="memo-text" placeholder="memo text">
  <button data-action="add-memo">add memo</button>
</div>
${renderMemos(memosFor(project, "project", project.project_id))}
<pre class="export-output" data-export-output></pre>`;
}

export function renderStageBody(
  project: ProjectView,
  expertId: string,
): string {
  switch (project.stage) {
    case "RAW_CODING":
      return renderRawScreen(project, expertId);
    case "EXPERT_CODING":
      return renderExpertScreen(project, expertId);
    case "FOCUS_CODING":
      return renderBoardScreen(project, expertId);
    case "THEORY_BUILDING":
      return renderTheoryScreen(project);
  }
}

export function renderApp(project: ProjectView, expertId: string): string {
  const advance =
    project.stage === "THEORY_BUILDING"
      ? ""
      : `<button data-action="advance">advance stage</button>`;
  return `<header class="topbar">
  <h1>topicgt</h1>
  <span class="project-id">${esc(project.project_id)}</span>
  <span class="stage-badge">${esc(project.stage)}</span>
  <span class="session-expert">expert: ${esc(expertId)}</span>
  ${advance}
</header>
<main id="view">
${renderStageBody(project, expertId)}
</main>
<div id="toast" role="status"></div>`;
}

export function renderEvidence(documents: TopicDocument[]): string {
  const items = documents
    .map(
      (d) =>
        `<li><span class="evidence-doc">${esc(d.doc_id)}</span> <span class="evidence-theta">${d.theta.toFixed(4)}</span></li>`,
    )
    .join("");
  return `<ol class="evidence-list">${items}</ol>`;
}
