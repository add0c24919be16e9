/** Thin fetch client for the engine's HTTP API.  The fetch function is
 * injectable so tests can run against recorded fixtures. */

import type { DbInfo, DbStats, RunReport, SummarizeBody } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
  }

  /** The engine reports an empty query result as a distinct, non-fatal case. */
  get isEmptyResult(): boolean {
    return (
      typeof this.detail === "object" &&
      this.detail !== null &&
      (this.detail as { error?: string }).error === "no_relevant_content"
    );
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    const body = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, (body as { detail?: unknown }).detail ?? body);
    }
    return body as T;
  }

  listDbs(): Promise<DbInfo[]> {
    return this.request<DbInfo[]>("/dbs");
  }

  stats(dbId: string): Promise<DbStats> {
    return this.request<DbStats>(`/dbs/${encodeURIComponent(dbId)}/stats`);
  }

  summarize(dbId: string, body: SummarizeBody): Promise<RunReport> {
    return this.request<RunReport>(`/dbs/${encodeURIComponent(dbId)}/summarize`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  thumbnailUrl(dbId: string, frame: number): string {
    return `${this.baseUrl}/dbs/${encodeURIComponent(dbId)}/frames/${frame}`;
  }
}
