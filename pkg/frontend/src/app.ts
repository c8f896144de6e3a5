/**
 * Application controller. The only state it holds is the most recent
 * server response; every interaction issues exactly one API call and
 * re-renders from the returned project view, so reloading the page (a
 * fresh GET + render) reproduces the identical screen.
 */

import { ApiClient, ApiError } from "./api.js";
import type { ProjectView } from "./models.js";
import { renderApp, renderEvidence } from "./render.js";
import { parseRating, parseRequiredText } from "./validate.js";

export interface Session {
  projectId: string;
  expertId: string;
}

export interface AppOptions {
  /** Confirmation hook for destructive actions (defaults to window.confirm). */
  confirmFn?: (message: string) => boolean;
}

const EVIDENCE_DOC_COUNT = 5;

export class App {
  private project: ProjectView | null = null;
  private pending: Promise<void> = Promise.resolve();
  private readonly confirmFn: (message: string) => boolean;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly session: Session,
    options: AppOptions = {},
  ) {
    this.confirmFn =
      options.confirmFn ??
      ((message: string) =>
        typeof globalThis.confirm === "function"
          ? globalThis.confirm(message)
          : true);
    this.root.addEventListener("click", (event) => {
      const target = event.target;
      if (!(target instanceof Element)) {
        return;
      }
      const button = target.closest("[data-action]");
      if (!(button instanceof HTMLElement)) {
        return;
      }
      const action = button.dataset["action"];
      if (!action) {
        return;
      }
      this.pending = this.pending.then(() =>
        this.dispatch(action, button).catch((error: unknown) => {
          this.toast(error instanceof Error ? error.message : String(error));
        }),
      );
    });
  }

  /** Fetch the project and draw the screen for its current stage. */
  async start(): Promise<void> {
    this.project = await this.api.getProject(this.session.projectId);
    this.render();
  }

  /** Resolves when every queued interaction has settled (for tests). */
  flush(): Promise<void> {
    return this.pending;
  }

  get view(): ProjectView | null {
    return this.project;
  }

  private render(): void {
    if (this.project) {
      this.root.innerHTML = renderApp(this.project, this.session.expertId);
    }
  }

  private toast(message: string): void {
    const toast = this.root.querySelector("#toast");
    if (toast) {
      toast.textContent = message;
    }
  }

  private inlineError(topicId: number, message: string): void {
    const slot = this.root.querySelector(`[data-error-for="${topicId}"]`);
    if (slot) {
      slot.textContent = message;
    } else {
      this.toast(message);
    }
  }

  private input(selector: string): HTMLInputElement | null {
    const element = this.root.querySelector(selector);
    return element instanceof HTMLInputElement ? element : null;
  }

  private select(selector: string): HTMLSelectElement | null {
    const element = this.root.querySelector(selector);
    return element instanceof HTMLSelectElement ? element : null;
  }

  /** Apply the server's response as the new authoritative state. */
  private accept(project: ProjectView): void {
    this.project = project;
    this.render();
  }

  private async recover(error: unknown): Promise<void> {
    if (error instanceof ApiError && error.status === 409) {
      // someone else moved the project; refetch and surface the reason
      this.project = await this.api.getProject(this.session.projectId);
      this.render();
      this.toast(error.message);
      return;
    }
    throw error;
  }

  private async dispatch(action: string, element: HTMLElement): Promise<void> {
    if (!this.project) {
      return;
    }
    const projectId = this.project.project_id;
    const topicId = Number(element.dataset["topic"] ?? "");
    const categoryId = element.dataset["category"] ?? "";
    try {
      switch (action) {
        case "advance": {
          this.accept(await this.api.advance(projectId));
          return;
        }
        case "mark-outlier": {
          const reason = parseRequiredText(
            this.input(`.outlier-reason[data-topic="${topicId}"]`)?.value,
          );
          if (reason === null) {
            this.toast("an outlier needs a non-empty reason");
            return;
          }
          this.accept(await this.api.markOutlier(projectId, topicId, reason));
          return;
        }
        case "submit-label": {
          const label = parseRequiredText(
            this.input(`.label-input[data-topic="${topicId}"]`)?.value,
          );
          const rating = parseRating(
            this.input(`.rating-input[data-topic="${topicId}"]`)?.value,
          );
          if (rating === null) {
            this.inlineError(topicId, "rating must be an integer 1-5");
            return;
          }
          if (label === null) {
            this.inlineError(topicId, "label must not be empty");
            return;
          }
          this.accept(
            await this.api.submitLabel(
              projectId,
              this.session.expertId,
              topicId,
              label,
              rating,
            ),
          );
          return;
        }
        case "submit-aggregate": {
          const label = parseRequiredText(
            this.input(`.aggregate-input[data-topic="${topicId}"]`)?.value,
          );
          if (label === null) {
            this.inlineError(topicId, "aggregate label must not be empty");
            return;
          }
          this.accept(
            await this.api.setAggregateLabel(projectId, topicId, label),
          );
          return;
        }
        case "prune-rated": {
          const raw = this.input(".prune-threshold")?.value ?? "";
          const threshold = Number(raw.trim());
          if (raw.trim() === "" || Number.isNaN(threshold)) {
            this.toast("threshold must be a number");
            return;
          }
          const result = await this.api.pruneRated(projectId, threshold);
          this.accept(result.project);
          this.toast(`${result.removed.length} codes pruned`);
          return;
        }
        case "create-category": {
          const name = parseRequiredText(
            this.input(".new-category-name")?.value,
          );
          if (name === null) {
            this.toast("a category needs a non-empty name");
            return;
          }
          const kind = this.select(".new-category-kind")?.value ?? "GENERIC";
          const result = await this.api.createCategory(projectId, name, kind);
          this.accept(result.project);
          return;
        }
        case "rename-category": {
          const name = parseRequiredText(
            this.input(`.rename-input[data-category="${categoryId}"]`)?.value,
          );
          if (name === null) {
            this.toast("a category needs a non-empty name");
            return;
          }
          const result = await this.api.patchCategory(projectId, categoryId, {
            name,
          });
          this.accept(result.project);
          return;
        }
        case "toggle-kind": {
          const category = this.project.categories.find(
            (c) => c.category_id === categoryId,
          );
          if (!category) {
            return;
          }
          const kind = category.kind === "CORE" ? "GENERIC" : "CORE";
          const result = await this.api.patchCategory(projectId, categoryId, {
            kind,
          });
          this.accept(result.project);
          return;
        }
        case "assign": {
          const card = element.closest(".board-card, .topic-card");
          const select = card?.querySelector(".assign-select");
          if (!(select instanceof HTMLSelectElement) || select.value === "") {
            this.toast("create a category first");
            return;
          }
          this.accept(
            await this.api.assignCode(projectId, select.value, topicId),
          );
          return;
        }
        case "unassign": {
          this.accept(
            await this.api.unassignCode(projectId, categoryId, topicId),
          );
          return;
        }
        case "prune-singletons": {
          if (!this.confirmFn("Delete every category with fewer than 2 codes?")) {
            return;
          }
          const result = await this.api.pruneSingletons(projectId);
          this.accept(result.project);
          this.toast(`${result.removed.length} categories pruned`);
          return;
        }
        case "create-dimension": {
          const name = parseRequiredText(
            this.input(".new-dimension-name")?.value,
          );
          if (name === null) {
            this.toast("a dimension needs a non-empty name");
            return;
          }
          const result = await this.api.createDimension(projectId, name);
          this.accept(result.project);
          return;
        }
        case "assign-category": {
          const select = this.select(
            `.dimension-select[data-category="${categoryId}"]`,
          );
          if (!select || select.value === "") {
            this.toast("create a dimension first");
            return;
          }
          this.accept(
            await this.api.assignCategory(projectId, select.value, categoryId),
          );
          return;
        }
        case "add-memo": {
          const kind = this.select(".memo-kind")?.value ?? "project";
          const refRaw = this.input(".memo-ref")?.value.trim() ?? "";
          const refId = refRaw === "" && kind === "project" ? projectId : refRaw;
          const author = parseRequiredText(this.input(".memo-author")?.value);
          const text = parseRequiredText(this.input(".memo-text")?.value);
          if (refId === "" || author === null || text === null) {
            this.toast("a memo needs a target, an author, and text");
            return;
          }
          const result = await this.api.addMemo(
            projectId,
            kind as "project" | "code" | "category" | "dimension",
            refId,
            author,
            text,
          );
          this.accept(result.project);
          return;
        }
        case "export-json": {
          const tables = await this.api.exportTables(projectId);
          this.showExport(JSON.stringify(tables, null, 2));
          return;
        }
        case "export-csv": {
          const tables = await this.api.exportCsv(projectId);
          const text = `${tables.table2}\n${tables.table3}`;
          this.showExport(text);
          this.download("tables.csv", text);
          return;
        }
        case "evidence": {
          const slot = this.root.querySelector(
            `[data-evidence-for="${topicId}"]`,
          );
          if (!(slot instanceof HTMLElement)) {
            return;
          }
          if (slot.innerHTML !== "") {
            slot.innerHTML = "";
            return;
          }
          const documents = await this.api.topicDocuments(
            this.project.model_ref,
            topicId,
            EVIDENCE_DOC_COUNT,
          );
          slot.innerHTML = renderEvidence(documents);
          return;
        }
        default:
          return;
      }
    } catch (error) {
      await this.recover(error);
    }
  }

  private showExport(text: string): void {
    const output = this.root.querySelector("[data-export-output]");
    if (output) {
      output.textContent = text;
    }
  }

  private download(filename: string, text: string): void {
    if (
      typeof URL === "undefined" ||
      typeof URL.createObjectURL !== "function" ||
      typeof Blob === "undefined"
    ) {
      return; // environment without downloads; the export panel shows the text
    }
    const url = URL.createObjectURL(new Blob([text], { type: "text/csv" }));
    const anchor = document.createElement("a");
    anchor.href = url;
    anchor.download = filename;
    anchor.click();
    URL.revokeObjectURL(url);
  }
}
