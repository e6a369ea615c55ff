// Thin fetch wrapper around the review service endpoints.

import type {
  DecisionsResponse,
  IrmModel,
  Report,
  ServiceError,
  StateResponse,
  SubmitAccepted,
} from "./types.js";

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export type SubmitResult =
  | { ok: true; body: SubmitAccepted }
  | { ok: false; status: number; body: ServiceError };

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ServiceError,
  ) {
    super(`${body.error ?? "request failed"} (${status})`);
  }
}

export class ApiClient {
  private fetchFn: FetchLike;

  constructor(
    private base = "",
    private session = "default",
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  url(path: string): string {
    return `${this.base}/api/sessions/${encodeURIComponent(this.session)}/${path}`;
  }

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(this.url(path));
    const body = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, body as ServiceError);
    }
    return body as T;
  }

  state(): Promise<StateResponse> {
    return this.getJson("state");
  }

  decisions(): Promise<DecisionsResponse> {
    return this.getJson("decisions");
  }

  async revision(): Promise<number> {
    const body = await this.getJson<{ revision: number }>("revision");
    return body.revision;
  }

  // null while the pipeline has not produced the artifact yet
  async modelIfReady(): Promise<IrmModel | null> {
    try {
      return await this.getJson<IrmModel>("model");
    } catch (err) {
      if (err instanceof ApiError && err.body.error === "NotReady") {
        return null;
      }
      throw err;
    }
  }

  async reportIfReady(): Promise<Report | null> {
    try {
      return await this.getJson<Report>("report");
    } catch (err) {
      if (err instanceof ApiError && err.body.error === "NotReady") {
        return null;
      }
      throw err;
    }
  }

  async submit(
    decisionId: string,
    choice: unknown,
    expectedRevision: number,
    author = "reviewer",
  ): Promise<SubmitResult> {
    const resp = await this.fetchFn(
      this.url(`decisions/${encodeURIComponent(decisionId)}`),
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({
          choice,
          author,
          expected_revision: expectedRevision,
        }),
      },
    );
    const body = await resp.json();
    if (resp.ok) {
      return { ok: true, body: body as SubmitAccepted };
    }
    return { ok: false, status: resp.status, body: body as ServiceError };
  }
}
