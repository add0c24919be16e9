/** Browser wiring: controls on the left, results on the right.  All numbers
 * on screen come from engine responses; this file only moves them around. */

import { ApiClient, ApiError } from "./api.js";
import { renderCompare } from "./compare.js";
import { renderDbList, renderEmptyState, renderSummaryView } from "./render.js";
import { SessionState } from "./state.js";
import type { EntityKind, Mode } from "./types.js";
import { ConstraintKind, PRESETS, applyPreset, validateDraft } from "./validate.js";

const api = new ApiClient("");
const session = new SessionState(api);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function readControls() {
  session.update({
    mode: el<HTMLSelectElement>("mode").value as Mode,
    func: el<HTMLSelectElement>("function").value,
    constraintKind: el<HTMLSelectElement>("constraint-kind").value as ConstraintKind,
    k: Number(el<HTMLInputElement>("k").value),
    budgetS: Number(el<HTMLInputElement>("budget").value),
    cover: Number(el<HTMLInputElement>("cover").value),
    query: el<HTMLInputElement>("query").value.trim(),
    snippets: el<HTMLInputElement>("snippets").value.trim() || "fixed:2",
    entityKind: el<HTMLSelectElement>("entity-kind").value as EntityKind | "",
    kernel: el<HTMLInputElement>("kernel").value.trim(),
    knn: el<HTMLInputElement>("knn").value ? Number(el<HTMLInputElement>("knn").value) : null,
  });
}

function showProblems() {
  const problems = validateDraft(session.draft);
  el("problems").innerHTML = problems.map((p) => `<li>${p}</li>`).join("");
  el<HTMLButtonElement>("run").disabled = problems.length > 0;
  return problems;
}

async function run() {
  readControls();
  if (showProblems().length) return;
  el("results").innerHTML = `<p class="busy">running…</p>`;
  try {
    const report = await session.submit();
    el("results").innerHTML = renderSummaryView(report, {
      thumbUrlFor: (frame) => api.thumbnailUrl(session.draft.dbId, frame),
    });
  } catch (err) {
    if (err instanceof ApiError && err.isEmptyResult) {
      el("results").innerHTML = renderEmptyState("Nothing matched that query.");
    } else {
      el("results").innerHTML = renderEmptyState(`Request failed: ${String(err)}`);
    }
  }
}

function compareWithPinned() {
  const pinned = session.pinned;
  const last = session.history[session.history.length - 1];
  if (!pinned || !last) {
    el("results").innerHTML = renderEmptyState("Pin a run, then run another to compare.");
    return;
  }
  try {
    el("results").innerHTML = renderCompare(pinned.report, last.report);
  } catch (err) {
    el("results").innerHTML = renderEmptyState(String(err));
  }
}

async function init() {
  const dbs = await api.listDbs();
  el("db-holder").innerHTML = renderDbList(dbs);
  if (dbs.length) session.setDb(dbs[0].id);
  el<HTMLSelectElement>("db-select").addEventListener("change", (ev) => {
    session.setDb((ev.target as HTMLSelectElement).value);
  });

  const presetRow = el("presets");
  presetRow.innerHTML = PRESETS.map(
    (p, i) => `<button class="preset" data-preset="${i}">${p.label}</button>`,
  ).join("");
  presetRow.addEventListener("click", (ev) => {
    const idx = (ev.target as HTMLElement).dataset?.preset;
    if (idx === undefined) return;
    session.draft = applyPreset(session.draft, PRESETS[Number(idx)].patch);
    el<HTMLSelectElement>("mode").value = session.draft.mode;
    el<HTMLSelectElement>("function").value = session.draft.func;
    el<HTMLSelectElement>("constraint-kind").value = session.draft.constraintKind;
    el<HTMLInputElement>("k").value = String(session.draft.k);
    el<HTMLInputElement>("budget").value = String(session.draft.budgetS);
    el<HTMLInputElement>("cover").value = String(session.draft.cover);
    el<HTMLSelectElement>("entity-kind").value = session.draft.entityKind;
    el<HTMLInputElement>("snippets").value = session.draft.snippets;
    showProblems();
  });

  el("run").addEventListener("click", run);
  el("pin").addEventListener("click", () => session.pinCurrent());
  el("compare").addEventListener("click", compareWithPinned);
  el("advanced-toggle").addEventListener("click", () => {
    el("advanced").classList.toggle("hidden");
  });
  for (const id of ["mode", "function", "constraint-kind", "k", "budget", "cover",
                    "query", "snippets", "entity-kind", "kernel", "knn"]) {
    el(id).addEventListener("input", () => {
      readControls();
      showProblems();
    });
  }
  showProblems();
}

init().catch((err) => {
  el("results").innerHTML = renderEmptyState(`Cannot reach the engine: ${String(err)}`);
});
