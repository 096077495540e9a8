/** API client with stale-response discarding.
 *
 * Design calls are synchronous on the server; the client tags each
 * request with a sequence number per scenario and drops any response
 * that resolves after a newer request was issued.
 */

import type { DesignReport, EngineErrorBody, RunConfig } from "./types.js";

export class EngineError extends Error {
  body: EngineErrorBody;
  constructor(body: EngineErrorBody) {
    super(body.message);
    this.body = body;
  }
}

export class ValidationError extends Error {
  errors: { message: string; field?: string }[];
  constructor(errors: { message: string; field?: string }[]) {
    super(errors.map((e) => e.message).join("; "));
    this.errors = errors;
  }
}

/** Resolves to null when a newer request superseded this one. */
export type MaybeStale<T> = T | null;

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private base: string;
  private fetchImpl: FetchLike;
  private sequences = new Map<string, number>();

  constructor(base = "", fetchImpl: FetchLike = (...a) => fetch(...a)) {
    this.base = base;
    this.fetchImpl = fetchImpl;
  }

  /** Latest-wins design request for one scenario lane. */
  async postDesign(
    config: RunConfig,
    lane = "default",
  ): Promise<MaybeStale<DesignReport>> {
    const seq = (this.sequences.get(lane) ?? 0) + 1;
    this.sequences.set(lane, seq);
    const resp = await this.fetchImpl(`${this.base}/api/design`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config),
    });
    if (this.sequences.get(lane) !== seq) {
      return null; // superseded while in flight
    }
    if (resp.status === 400) {
      const body = await resp.json();
      throw new ValidationError(body.errors ?? [{ message: "bad request" }]);
    }
    if (resp.status === 422) {
      throw new EngineError((await resp.json()) as EngineErrorBody);
    }
    if (!resp.ok) {
      throw new Error(`design request failed: HTTP ${resp.status}`);
    }
    const report = (await resp.json()) as DesignReport;
    if (this.sequences.get(lane) !== seq) {
      return null;
    }
    return report;
  }

  async health(): Promise<{ status: string; name: string; version: string }> {
    const resp = await this.fetchImpl(`${this.base}/api/health`);
    if (!resp.ok) throw new Error(`health check failed: HTTP ${resp.status}`);
    return resp.json();
  }
}
