/** Browser entry point: a session picker, then the workbench itself. */

import { ApiClient } from "./api.js";
import { App } from "./app.js";
import { escapeHtml } from "./render.js";

function renderPicker(
  root: HTMLElement,
  projects: Array<{ project_id: string; stage: string }>,
): void {
  const options = projects
    .map(
      (p) =>
        `<option value="${escapeHtml(p.project_id)}">${escapeHtml(p.project_id)} (${escapeHtml(p.stage)})</option>`,
    )
    .join("");
  root.innerHTML = `<form class="session-picker">
  <h1>topicgt</h1>
  <label>project <select name="project">${options}</select></label>
  <label>expert id <input name="expert" required placeholder="your id"></label>
  <button type="submit">open workbench</button>
</form>`;
  const form = root.querySelector("form");
  form?.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(form);
    const project = String(data.get("project") ?? "");
    const expert = String(data.get("expert") ?? "").trim();
    if (project && expert) {
      const params = new URLSearchParams({ project, expert });
      window.location.search = params.toString();
    }
  });
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) {
    return;
  }
  const api = new ApiClient();
  const params = new URLSearchParams(window.location.search);
  const projectId = params.get("project");
  const expertId = params.get("expert");
  if (!projectId || !expertId) {
    try {
      renderPicker(root, await api.listProjects());
    } catch (error) {
      root.textContent =
        error instanceof Error ? error.message : "failed to list projects";
    }
    return;
  }
  const app = new App(root, api, { projectId, expertId });
  try {
    await app.start();
  } catch (error) {
    root.textContent =
      error instanceof Error ? error.message : "failed to load the project";
  }
}

void boot();
