/** HTML renderers for run reports.  Pure string-producing functions: every
 * number shown is read straight off the engine response, never recomputed. */

import type { EntityRow, RunReport } from "./types.js";
import { isEntities, isKeyframes, isSkim } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const fmt = (x: number, digits = 3) => Number(x.toFixed(digits)).toString();

function thumbnail(thumbUrl: string | null, label: string): string {
  if (thumbUrl) {
    return (
      `<img class="thumb" src="${escapeHtml(thumbUrl)}" alt="${escapeHtml(label)}" ` +
      `onerror="this.outerHTML='<div class=\\'glyph\\'>${escapeHtml(label)}</div>'">`
    );
  }
  return `<div class="glyph">${escapeHtml(label)}</div>`;
}

export interface RenderOptions {
  /** Maps a frame index to a thumbnail URL, or null for the glyph fallback. */
  thumbUrlFor?: (frame: number) => string | null;
}

export function renderGainChart(gains: number[]): string {
  if (!gains.length) return '<svg class="gains" width="0" height="40"></svg>';
  const max = Math.max(...gains.map(Math.abs), 1e-12);
  const barWidth = 8;
  const bars = gains
    .map((g, i) => {
      const h = Math.max(1, Math.round((Math.abs(g) / max) * 36));
      const cls = g < 0 ? "bar neg" : "bar";
      return `<rect class="${cls}" x="${i * (barWidth + 2)}" y="${40 - h}" width="${barWidth}" height="${h}"><title>step ${i}: ${g}</title></rect>`;
    })
    .join("");
  return `<svg class="gains" width="${gains.length * (barWidth + 2)}" height="40">${bars}</svg>`;
}

export function renderTimeline(
  cuts: [number, number][],
  durationS: number,
  width = 640,
): string {
  const scale = width / Math.max(durationS, 1e-9);
  const spans = cuts
    .map(([s, e]) => {
      const x = s * scale;
      const w = Math.max(1, (e - s) * scale);
      return `<rect class="cut" x="${fmt(x, 2)}" y="4" width="${fmt(w, 2)}" height="16"><title>${fmt(s)}s – ${fmt(e)}s</title></rect>`;
    })
    .join("");
  return (
    `<svg class="timeline" width="${width}" height="24">` +
    `<rect class="track" x="0" y="8" width="${width}" height="8"></rect>${spans}</svg>`
  );
}

function keyframeTiles(report: RunReport, options: RenderOptions): string {
  if (!isKeyframes(report.result)) return "";
  const { frames, timestamps } = report.result;
  return frames
    .map((frame, i) => {
      const url = options.thumbUrlFor ? options.thumbUrlFor(frame) : null;
      return (
        `<figure class="tile" data-frame="${frame}">` +
        thumbnail(url, `#${frame}`) +
        `<figcaption>frame ${frame} · ${fmt(timestamps[i], 2)}s` +
        `<span class="gain-badge">+${fmt(report.gains[i])}</span></figcaption></figure>`
      );
    })
    .join("");
}

function entityTiles(rows: EntityRow[], report: RunReport, options: RenderOptions): string {
  return rows
    .map((row, i) => {
      const url = options.thumbUrlFor ? options.thumbUrlFor(row.frame) : null;
      const box = row.bbox
        ? `<span class="bbox">[${row.bbox.map((v) => fmt(v, 0)).join(", ")}]</span>`
        : "";
      return (
        `<figure class="tile entity" data-entity="${row.entity}">` +
        thumbnail(url, `${row.kind} ${row.entity}`) +
        `<figcaption>${escapeHtml(row.kind)} ${row.entity} · frame ${row.frame} · ` +
        `${fmt(row.t, 2)}s ${box}` +
        `<span class="gain-badge">+${fmt(report.gains[i])}</span></figcaption></figure>`
      );
    })
    .join("");
}

export function renderEmptyState(message: string): string {
  return (
    `<section class="summary-view empty-state"><p>${escapeHtml(message)}</p>` +
    `<p class="hint">Adjust the query or controls and run again.</p></section>`
  );
}

/** Ground-set strip (what was searched) and summary strip (what was picked)
 * side by side, plus the per-step gain chart. */
export function renderSummaryView(report: RunReport, options: RenderOptions = {}): string {
  const header =
    `<header class="run-header">` +
    `<span class="mode">${escapeHtml(report.mode)}</span>` +
    `<span class="function">${escapeHtml(report.function)}</span>` +
    (report.query ? `<span class="query">query: ${escapeHtml(report.query)}</span>` : "") +
    `<span class="objective">f = ${fmt(report.objective_value)}</span>` +
    `<span class="cost">cost ${fmt(report.cost_used)}</span>` +
    (report.short ? `<span class="short-warning">stopped short</span>` : "") +
    `</header>`;

  const groundStrip =
    `<aside class="ground-strip">` +
    `<h3>ground set</h3><p>${report.n_candidates} candidates</p></aside>`;

  let body: string;
  if (isSkim(report.result)) {
    const duration = Math.max(...report.result.cuts.map(([, e]) => e), 1);
    body =
      `<div class="skim">` +
      renderTimeline(report.result.cuts, duration) +
      `<p>${report.result.cuts.length} cuts totalling ${fmt(report.result.total_s)}s</p></div>`;
  } else if (isEntities(report.result)) {
    body = `<div class="grid">${entityTiles(report.result.entities, report, options)}</div>`;
  } else {
    body = `<div class="grid">${keyframeTiles(report, options)}</div>`;
  }

  const timings = report.timings
    ? `<footer class="timings">ground set ${fmt(report.timings.groundset_s)}s · ` +
      `kernel ${fmt(report.timings.kernel_s)}s · ` +
      `optimize ${fmt(report.timings.optimize_s)}s</footer>`
    : "";

  return (
    `<section class="summary-view">${header}` +
    `<div class="strips">${groundStrip}<div class="summary-strip">${body}` +
    renderGainChart(report.gains) +
    `</div></div>${timings}</section>`
  );
}

export function renderDbList(dbs: { id: string; duration_s: number; n_frames: number }[]): string {
  const options = dbs
    .map(
      (db) =>
        `<option value="${escapeHtml(db.id)}">${escapeHtml(db.id)} · ` +
        `${fmt(db.duration_s, 0)}s · ${db.n_frames} frames</option>`,
    )
    .join("");
  return `<select id="db-select">${options}</select>`;
}
