import { describe, expect, it } from "vitest";

import {
  PRESETS,
  applyPreset,
  defaultDraft,
  serializeDraft,
  validateDraft,
  validateQuery,
} from "../src/validate.js";

describe("draft validation mirrors engine compatibility rules", () => {
  it("accepts the default draft once a db is chosen", () => {
    expect(validateDraft(defaultDraft("demo"))).toEqual([]);
    expect(validateDraft(defaultDraft())).toContain("pick a database");
  });

  it("rejects disparity-min under a cover constraint", () => {
    const draft = { ...defaultDraft("demo"), func: "dm", constraintKind: "cover" as const };
    expect(validateDraft(draft).join(" ")).toMatch(/disparity-min/);
  });

  it("requires an entity kind in entities mode", () => {
    const draft = { ...defaultDraft("demo"), mode: "entities" as const };
    expect(validateDraft(draft).join(" ")).toMatch(/entity kind/);
    expect(validateDraft({ ...draft, entityKind: "face" })).toEqual([]);
  });

  it("checks constraint ranges", () => {
    const base = defaultDraft("demo");
    expect(validateDraft({ ...base, k: 0 })).not.toEqual([]);
    expect(validateDraft({ ...base, constraintKind: "budget_s", budgetS: -3 })).not.toEqual([]);
    expect(validateDraft({ ...base, constraintKind: "cover", cover: 1.2 })).not.toEqual([]);
    expect(validateDraft({ ...base, constraintKind: "cover", cover: 0.8 })).toEqual([]);
  });

  it("validates snippet specs only in skim mode", () => {
    const base = { ...defaultDraft("demo"), mode: "skim" as const };
    expect(validateDraft({ ...base, snippets: "fixed:2" })).toEqual([]);
    expect(validateDraft({ ...base, snippets: "shots" })).toEqual([]);
    expect(validateDraft({ ...base, snippets: "every:3" })).not.toEqual([]);
    expect(validateDraft({ ...defaultDraft("demo"), snippets: "every:3" })).toEqual([]);
  });

  it("validates the query grammar", () => {
    expect(validateQuery("scene:3")).toBeNull();
    expect(validateQuery("object:1>=0.6 & color:2 | scene:4")).toBeNull();
    expect(validateQuery("scene=3")).toMatch(/cannot parse/);
    expect(validateQuery("scene:abc")).toMatch(/cannot parse/);
  });

  it("rejects unknown objectives", () => {
    expect(validateDraft({ ...defaultDraft("demo"), func: "dpp" })).not.toEqual([]);
    expect(validateDraft({ ...defaultDraft("demo"), func: "fb:log" })).toEqual([]);
  });

  it("every preset yields a submittable draft", () => {
    for (const preset of PRESETS) {
      const draft = applyPreset(defaultDraft("demo"), preset.patch);
      expect(validateDraft(draft), preset.label).toEqual([]);
    }
  });
});

describe("draft serialization (request round-trip schema)", () => {
  it("emits exactly one constraint field", () => {
    const body = serializeDraft(defaultDraft("demo"));
    expect(body.k).toBe(5);
    expect(body.budget_s).toBeUndefined();
    expect(body.cover).toBeUndefined();
    const budget = serializeDraft({
      ...defaultDraft("demo"),
      constraintKind: "budget_s",
      budgetS: 42,
    });
    expect(budget.budget_s).toBe(42);
    expect(budget.k).toBeUndefined();
  });

  it("omits empty optionals instead of sending empty strings", () => {
    const body = serializeDraft(defaultDraft("demo"));
    expect("query" in body).toBe(false);
    expect("kernel" in body).toBe(false);
    expect("knn" in body).toBe(false);
    expect("snippets" in body).toBe(false); // keyframes mode
  });

  it("round-trips every populated field", () => {
    const draft = {
      ...defaultDraft("demo"),
      mode: "skim" as const,
      func: "fb:log",
      constraintKind: "budget_s" as const,
      budgetS: 18,
      query: "scene:2>=0.7",
      snippets: "shots",
      kernel: "scene:0.6,hist:0.4",
      knn: 32,
      includeTimings: false,
    };
    const body = serializeDraft(draft);
    expect(body).toEqual({
      mode: "skim",
      function: "fb:log",
      budget_s: 18,
      query: "scene:2>=0.7",
      snippets: "shots",
      kernel: "scene:0.6,hist:0.4",
      knn: 32,
      include_timings: false,
    });
    expect(JSON.parse(JSON.stringify(body))).toEqual(body);
  });
});
