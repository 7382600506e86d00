/** Typed client for the decision-service HTTP API.
 *
 * All traffic goes through this module: the dashboard never touches files or
 * recomputes service results. Errors carry the service's own detail string.
 */

import type { GeoDoc, Job, ScenarioDoc, SolutionDoc } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

export interface ClientOptions {
  baseUrl?: string;
  /** Injectable for tests; defaults to the global fetch. */
  fetchFn?: typeof fetch;
}

async function detailOf(res: Response): Promise<string> {
  try {
    const body = (await res.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
    return JSON.stringify(body);
  } catch {
    return res.statusText || `HTTP ${res.status}`;
  }
}

export class ServiceClient {
  private readonly base: string;
  private readonly fetchFn: typeof fetch;

  constructor(opts: ClientOptions = {}) {
    this.base = (opts.baseUrl ?? "").replace(/\/$/, "");
    this.fetchFn = opts.fetchFn ?? fetch;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(`${this.base}${path}`, init);
    if (!res.ok) throw new ApiError(res.status, await detailOf(res));
    return (await res.json()) as T;
  }

  ingestInstance(doc: unknown): Promise<{ id: string }> {
    return this.request("/api/instances", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(doc),
    });
  }

  /** Starts a solve job. A 409 means the same job is already queued or
   * running; the service answers with that job's id, so it is a success
   * here, not an error. */
  async startSolve(
    instanceId: string,
    overrides: Record<string, unknown> = {},
  ): Promise<{ id: string }> {
    const res = await this.fetchFn(`${this.base}/api/solve`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ instance_id: instanceId, overrides }),
    });
    if (res.status === 409) return (await res.json()) as { id: string };
    if (!res.ok) throw new ApiError(res.status, await detailOf(res));
    return (await res.json()) as { id: string };
  }

  getJob(jobId: string): Promise<Job> {
    return this.request(`/api/jobs/${encodeURIComponent(jobId)}`);
  }

  async waitForJob(jobId: string, pollMs = 250, signal?: AbortSignal): Promise<Job> {
    for (;;) {
      const job = await this.getJob(jobId);
      if (job.state === "done" || job.state === "failed") return job;
      await new Promise<void>((resolve, reject) => {
        const timer = setTimeout(resolve, pollMs);
        signal?.addEventListener(
          "abort",
          () => {
            clearTimeout(timer);
            reject(new DOMException("aborted", "AbortError"));
          },
          { once: true },
        );
      });
    }
  }

  getSolution(solutionId: string): Promise<SolutionDoc> {
    return this.request(`/api/solutions/${encodeURIComponent(solutionId)}`);
  }

  getScenario(
    solutionId: string,
    t: string,
    minLineSize: number,
    signal?: AbortSignal,
  ): Promise<ScenarioDoc> {
    const query = new URLSearchParams({ t, min_line_size: String(minLineSize) });
    return this.request(
      `/api/solutions/${encodeURIComponent(solutionId)}/scenario?${query}`,
      signal ? { signal } : undefined,
    );
  }

  getGeojson(
    solutionId: string,
    t?: string,
    minLineSize?: number,
    signal?: AbortSignal,
  ): Promise<GeoDoc> {
    const query = new URLSearchParams();
    if (t !== undefined) query.set("t", t);
    if (minLineSize !== undefined) query.set("min_line_size", String(minLineSize));
    const suffix = query.size ? `?${query}` : "";
    return this.request(
      `/api/solutions/${encodeURIComponent(solutionId)}/geojson${suffix}`,
      signal ? { signal } : undefined,
    );
  }
}
