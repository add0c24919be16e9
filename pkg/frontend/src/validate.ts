/** Client-side draft validation mirroring the engine's compatibility rules,
 * and the draft -> request-body serialization.  The UI never invents its own
 * relaxations: anything rejected here would be rejected by the engine too. */

import type { EntityKind, Mode, SummarizeBody } from "./types.js";

export type ConstraintKind = "k" | "budget_s" | "cover";

/** Editable form state; `serializeDraft` turns it into the POST body. */
export interface Draft {
  dbId: string;
  mode: Mode;
  func: string;
  constraintKind: ConstraintKind;
  k: number;
  budgetS: number;
  cover: number;
  query: string;
  snippets: string;
  entityKind: EntityKind | "";
  kernel: string;
  knn: number | null;
  includeTimings: boolean;
}

export function defaultDraft(dbId = ""): Draft {
  return {
    dbId,
    mode: "keyframes",
    func: "fl",
    constraintKind: "k",
    k: 5,
    budgetS: 30,
    cover: 0.9,
    query: "",
    snippets: "fixed:2",
    entityKind: "",
    kernel: "",
    knn: null,
    includeTimings: true,
  };
}

const FUNCTION_RE = /^(fl|dm|sc|psc|fb(:(sqrt|log|ratio|identity))?)$/;
const SNIPPETS_RE = /^(shots|subtitles|fixed:\d+(\.\d+)?)$/;
const QUERY_TERM_RE = /^\s*\w+\s*:\s*\d+\s*(>=\s*(0(\.\d+)?|1(\.0+)?)\s*)?$/;

export function validateQuery(query: string): string | null {
  for (const clause of query.split("|")) {
    for (const term of clause.split("&")) {
      if (!QUERY_TERM_RE.test(term)) {
        return `cannot parse query term "${term.trim()}"`;
      }
    }
  }
  return null;
}

/** Returns a list of human-readable problems; empty means submittable. */
export function validateDraft(draft: Draft): string[] {
  const problems: string[] = [];
  if (!draft.dbId) problems.push("pick a database");
  if (!["keyframes", "skim", "entities"].includes(draft.mode)) {
    problems.push(`unknown mode "${draft.mode}"`);
  }
  if (!FUNCTION_RE.test(draft.func)) {
    problems.push(`unknown objective "${draft.func}" (fl | fb[:psi] | sc | psc | dm)`);
  }
  if (draft.mode === "entities" && !draft.entityKind) {
    problems.push("entities mode needs an entity kind");
  }
  if (draft.mode === "skim" && !SNIPPETS_RE.test(draft.snippets)) {
    problems.push(`bad snippet spec "${draft.snippets}" (fixed:<s> | shots | subtitles)`);
  }
  if (draft.constraintKind === "k" && (!Number.isInteger(draft.k) || draft.k < 1)) {
    problems.push("k must be a positive integer");
  }
  if (draft.constraintKind === "budget_s" && !(draft.budgetS > 0)) {
    problems.push("budget must be positive seconds");
  }
  if (draft.constraintKind === "cover" && !(draft.cover > 0 && draft.cover <= 1)) {
    problems.push("cover fraction must be in (0, 1]");
  }
  if (draft.constraintKind === "cover" && draft.func.startsWith("dm")) {
    problems.push("disparity-min cannot run under a cover constraint");
  }
  if (draft.query) {
    const queryProblem = validateQuery(draft.query);
    if (queryProblem) problems.push(queryProblem);
  }
  if (draft.knn !== null && (!Number.isInteger(draft.knn) || draft.knn < 1)) {
    problems.push("knn must be a positive integer");
  }
  return problems;
}

/** Draft -> POST body.  Exactly one constraint field is emitted; empty
 * optional controls are omitted rather than sent as empty strings. */
export function serializeDraft(draft: Draft): SummarizeBody {
  const body: SummarizeBody = {
    mode: draft.mode,
    function: draft.func,
    include_timings: draft.includeTimings,
  };
  if (draft.constraintKind === "k") body.k = draft.k;
  if (draft.constraintKind === "budget_s") body.budget_s = draft.budgetS;
  if (draft.constraintKind === "cover") body.cover = draft.cover;
  if (draft.query) body.query = draft.query;
  if (draft.mode === "skim") body.snippets = draft.snippets;
  if (draft.mode === "entities" && draft.entityKind) body.entity_kind = draft.entityKind;
  if (draft.kernel) body.kernel = draft.kernel;
  if (draft.knn !== null) body.knn = draft.knn;
  return body;
}

/** One-click presets for common model comparisons. */
export const PRESETS: { label: string; patch: Partial<Draft> }[] = [
  { label: "5 keyframes / representation", patch: { mode: "keyframes", func: "fl", constraintKind: "k", k: 5 } },
  { label: "5 keyframes / diversity", patch: { mode: "keyframes", func: "dm", constraintKind: "k", k: 5 } },
  { label: "5 keyframes / coverage", patch: { mode: "keyframes", func: "fb:log", constraintKind: "k", k: 5 } },
  { label: "30 s skim", patch: { mode: "skim", func: "fl", constraintKind: "budget_s", budgetS: 30, snippets: "fixed:2" } },
  { label: "full concept cover", patch: { mode: "keyframes", func: "sc", constraintKind: "cover", cover: 1.0 } },
  { label: "diverse faces", patch: { mode: "entities", func: "dm", entityKind: "face", constraintKind: "k", k: 6 } },
];

export function applyPreset(draft: Draft, patch: Partial<Draft>): Draft {
  return { ...draft, ...patch };
}
