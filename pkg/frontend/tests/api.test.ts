import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import type { DbInfo, DbStats } from "../src/types.js";
import { fakeFetch, fixture, jsonResponse } from "./helpers.js";

describe("api client", () => {
  it("lists databases from GET /dbs", async () => {
    const dbs = fixture<DbInfo[]>("dbs.json");
    const { fn, calls } = fakeFetch([jsonResponse(dbs)]);
    const got = await new ApiClient("http://engine", fn).listDbs();
    expect(calls[0].url).toBe("http://engine/dbs");
    expect(got[0].id).toBe("demo");
    expect(got[0].n_frames).toBe(40);
  });

  it("fetches stats for a database", async () => {
    const stats = fixture<DbStats>("stats.json");
    const { fn, calls } = fakeFetch([jsonResponse(stats)]);
    const got = await new ApiClient("", fn).stats("demo");
    expect(calls[0].url).toBe("/dbs/demo/stats");
    expect(got.entity_counts.face).toBe(6);
  });

  it("posts summarize bodies as JSON", async () => {
    const report = fixture("keyframes.json");
    const { fn, calls } = fakeFetch([jsonResponse(report)]);
    const got = await new ApiClient("", fn).summarize("demo", {
      mode: "keyframes",
      function: "fl",
      k: 5,
    });
    expect(calls[0].init?.method).toBe("POST");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({
      mode: "keyframes",
      function: "fl",
      k: 5,
    });
    expect(got.selected).toEqual(report.selected);
  });

  it("raises ApiError carrying the engine's structured detail", async () => {
    const errorBody = fixture<{ detail: { error: string } }>("empty_query_error.json");
    const { fn } = fakeFetch([jsonResponse(errorBody, 422)]);
    const client = new ApiClient("", fn);
    try {
      await client.summarize("demo", { mode: "keyframes", function: "fl", k: 3, query: "scene:15" });
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      expect((err as ApiError).status).toBe(422);
      expect((err as ApiError).isEmptyResult).toBe(true);
    }
  });

  it("non-query failures are not flagged as empty results", async () => {
    const { fn } = fakeFetch([jsonResponse({ detail: "unknown objective" }, 400)]);
    const client = new ApiClient("", fn);
    await expect(client.listDbs()).rejects.toMatchObject({ status: 400 });
    const { fn: fn2 } = fakeFetch([jsonResponse({ detail: "unknown objective" }, 400)]);
    try {
      await new ApiClient("", fn2).listDbs();
    } catch (err) {
      expect((err as ApiError).isEmptyResult).toBe(false);
    }
  });

  it("builds thumbnail urls without fetching", () => {
    const client = new ApiClient("http://engine");
    expect(client.thumbnailUrl("demo", 7)).toBe("http://engine/dbs/demo/frames/7");
  });
});
