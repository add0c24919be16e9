/** Wire types mirroring the engine's HTTP API. */

export type Mode = "keyframes" | "skim" | "entities";
export type EntityKind = "object" | "face" | "human" | "scene";

/** Body of POST /dbs/{id}/summarize; exactly one of k/budget_s/cover set. */
export interface SummarizeBody {
  mode: Mode;
  function: string;
  k?: number;
  budget_s?: number;
  cover?: number;
  query?: string;
  snippets?: string;
  entity_kind?: EntityKind;
  kernel?: string;
  knn?: number;
  lazy?: boolean;
  include_timings?: boolean;
}

export interface ConstraintInfo {
  kind: "cardinality" | "knapsack" | "cover";
  k?: number;
  budget_s?: number;
  fraction?: number;
}

export interface KeyframeResult {
  frames: number[];
  timestamps: number[];
}

export interface SkimResult {
  cuts: [number, number][];
  total_s: number;
}

export interface EntityRow {
  entity: number;
  kind: EntityKind;
  frame: number;
  t: number;
  bbox: [number, number, number, number] | null;
}

export interface EntityResult {
  entities: EntityRow[];
}

export interface RunReport {
  db: string;
  mode: Mode;
  function: string;
  constraint: ConstraintInfo;
  query: string | null;
  n_candidates: number;
  selected: number[];
  gains: number[];
  objective_value: number;
  cost_used: number;
  resort_count: number;
  probe_count: number;
  lazy: boolean;
  short: boolean;
  result: KeyframeResult | SkimResult | EntityResult;
  timings?: { groundset_s: number; kernel_s: number; optimize_s: number; total_s: number };
  cache?: { groundset: string; kernel: string };
}

export interface DbInfo {
  id: string;
  path: string | null;
  duration_s: number;
  fps: number;
  n_frames: number;
  n_entities: number;
}

export interface DbStats {
  duration_s: number;
  fps: number;
  n_frames: number;
  n_entities: number;
  entity_counts: Record<string, number>;
  frame_labels: Record<string, Record<string, number>>;
}

export function isSkim(r: RunReport["result"]): r is SkimResult {
  return (r as SkimResult).cuts !== undefined;
}

export function isEntities(r: RunReport["result"]): r is EntityResult {
  return (r as EntityResult).entities !== undefined;
}

export function isKeyframes(r: RunReport["result"]): r is KeyframeResult {
  return (r as KeyframeResult).frames !== undefined;
}
