import { describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError, FetchLike } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("builds session-scoped urls", () => {
    const client = new ApiClient("http://host:1234", "demo");
    expect(client.url("state")).toBe(
      "http://host:1234/api/sessions/demo/state",
    );
  });

  it("escapes awkward session and decision ids", async () => {
    const fetchFn = vi.fn<Parameters<FetchLike>, ReturnType<FetchLike>>(
      async () => jsonResponse({ revision: 1, pending: [] }),
    );
    const client = new ApiClient("", "a b", fetchFn);
    await client.submit("alias:car|e-car", "accept", 0);
    const [url, init] = fetchFn.mock.calls[0];
    expect(url).toBe("/api/sessions/a%20b/decisions/alias%3Acar%7Ce-car");
    expect(init?.method).toBe("POST");
    expect(JSON.parse(String(init?.body))).toEqual({
      choice: "accept",
      author: "reviewer",
      expected_revision: 0,
    });
  });

  it("returns submit conflicts instead of throwing", async () => {
    const fetchFn: FetchLike = async () =>
      jsonResponse(
        { error: "RevisionConflict", expected: 5, actual: 7 },
        409,
      );
    const client = new ApiClient("", "default", fetchFn);
    const result = await client.submit("x", "accept", 5);
    expect(result.ok).toBe(false);
    if (!result.ok) {
      expect(result.status).toBe(409);
      expect(result.body.error).toBe("RevisionConflict");
    }
  });

  it("maps NotReady to null for model and report", async () => {
    const fetchFn: FetchLike = async () =>
      jsonResponse({ error: "NotReady", detail: "model.json" }, 404);
    const client = new ApiClient("", "default", fetchFn);
    expect(await client.modelIfReady()).toBeNull();
    expect(await client.reportIfReady()).toBeNull();
  });

  it("throws ApiError for other failures", async () => {
    const fetchFn: FetchLike = async () =>
      jsonResponse({ error: "UnknownSession", session: "default" }, 404);
    const client = new ApiClient("", "default", fetchFn);
    await expect(client.state()).rejects.toThrowError(ApiError);
    await expect(client.modelIfReady()).rejects.toThrowError(
      "UnknownSession (404)",
    );
  });

  it("unwraps the revision number", async () => {
    const fetchFn: FetchLike = async () => jsonResponse({ revision: 35 });
    const client = new ApiClient("", "default", fetchFn);
    expect(await client.revision()).toBe(35);
  });
});
