/** Session state: the current draft, the last response, and the request
 * history.  At most one summarize call is in flight; extra submissions are
 * queued client-side and replayed in order. */

import type { ApiClient } from "./api.js";
import type { RunReport } from "./types.js";
import { Draft, defaultDraft, serializeDraft, validateDraft } from "./validate.js";

export interface HistoryEntry {
  draft: Draft;
  report: RunReport;
}

export class SessionState {
  draft: Draft = defaultDraft();
  lastReport: RunReport | null = null;
  history: HistoryEntry[] = [];
  pinned: HistoryEntry | null = null;

  private inFlight: Promise<unknown> = Promise.resolve();

  constructor(private readonly api: ApiClient) {}

  setDb(dbId: string) {
    this.draft = { ...this.draft, dbId };
  }

  update(patch: Partial<Draft>) {
    this.draft = { ...this.draft, ...patch };
  }

  /** Validate and submit the current draft; resolves with the report.
   * Submissions are serialized through an internal queue. */
  submit(): Promise<RunReport> {
    const problems = validateDraft(this.draft);
    if (problems.length) {
      return Promise.reject(new Error(problems.join("; ")));
    }
    const draft = { ...this.draft };
    const run = this.inFlight.then(() =>
      this.api.summarize(draft.dbId, serializeDraft(draft)),
    );
    // Keep the queue alive whether or not this run fails.
    this.inFlight = run.catch(() => undefined);
    return run.then((report) => {
      this.lastReport = report;
      this.history.push({ draft, report });
      return report;
    });
  }

  pinCurrent() {
    if (this.history.length) {
      this.pinned = this.history[this.history.length - 1];
    }
  }
}
