/** Side-by-side comparison of two runs: common and unique picks highlighted.
 * Useful for contrasting representation vs diversity vs coverage objectives
 * on the same ground set. */

import type { RunReport } from "./types.js";
import { escapeHtml, renderSummaryView } from "./render.js";

export interface SelectionDiff {
  common: number[];
  onlyA: number[];
  onlyB: number[];
}

function selectionKey(report: RunReport): number[] {
  return report.selected;
}

export function diffSelections(a: RunReport, b: RunReport): SelectionDiff {
  const setA = new Set(selectionKey(a));
  const setB = new Set(selectionKey(b));
  return {
    common: [...setA].filter((x) => setB.has(x)).sort((p, q) => p - q),
    onlyA: [...setA].filter((x) => !setB.has(x)).sort((p, q) => p - q),
    onlyB: [...setB].filter((x) => !setA.has(x)).sort((p, q) => p - q),
  };
}

/** Both runs must come from the same database; comparing selections across
 * different ground sets is meaningless and rejected client-side. */
export function renderCompare(a: RunReport, b: RunReport): string {
  if (a.db !== b.db) {
    throw new Error(`cannot compare runs from different databases (${a.db} vs ${b.db})`);
  }
  const diff = diffSelections(a, b);
  const zero = diff.onlyA.length === 0 && diff.onlyB.length === 0;
  const badge = zero
    ? `<p class="diff-zero">identical selections</p>`
    : `<p class="diff-summary">${diff.common.length} shared · ` +
      `${diff.onlyA.length} only in A · ${diff.onlyB.length} only in B</p>`;
  const list = (items: number[], cls: string) =>
    `<ul class="${cls}">${items.map((i) => `<li>${i}</li>`).join("")}</ul>`;
  return (
    `<section class="compare">` +
    `<header><h3>${escapeHtml(a.function)} vs ${escapeHtml(b.function)}</h3>${badge}</header>` +
    `<div class="columns">` +
    `<div class="col">${renderSummaryView(a)}${list(diff.onlyA, "only only-a")}</div>` +
    `<div class="col">${renderSummaryView(b)}${list(diff.onlyB, "only only-b")}</div>` +
    `</div>` +
    `<div class="common">shared: ${list(diff.common, "shared")}</div>` +
    `</section>`
  );
}
