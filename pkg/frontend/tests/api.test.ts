import { describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError, FetchLike } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("fetches and parses the status payload", async () => {
    const status = {
      round: 2,
      labeled_count: 120,
      unlabeled_count: 30,
      pending_batch: [],
      history: [
        { round: 1, selected: [], dev_f1: 0.8, model_snapshot_id: "aa" },
        { round: 2, selected: [], dev_f1: 0.9, model_snapshot_id: "bb" },
      ],
      should_stop: false,
    };
    const fetchMock = vi.fn<Parameters<FetchLike>, ReturnType<FetchLike>>(
      async () => jsonResponse(status),
    );
    const client = new ApiClient("http://svc", fetchMock);
    expect(await client.status()).toEqual(status);
    expect(fetchMock).toHaveBeenCalledWith("http://svc/api/status", undefined);
  });

  it("requests the queue with the requested size", async () => {
    const fetchMock = vi.fn<Parameters<FetchLike>, ReturnType<FetchLike>>(
      async () => jsonResponse({ batch_id: "b1", pairs: [] }),
    );
    const client = new ApiClient("", fetchMock);
    await client.fetchQueue(50);
    expect(fetchMock.mock.calls[0][0]).toBe("/api/queue?n=50");
  });

  it("posts labels with the idempotency batch id", async () => {
    const fetchMock = vi.fn<Parameters<FetchLike>, ReturnType<FetchLike>>(
      async () => jsonResponse({ applied: true, labeled_count: 7 }),
    );
    const client = new ApiClient("", fetchMock);
    const ack = await client.submitLabels("batch-9", [{ pair_id: "p1", label: 1 }]);
    expect(ack).toEqual({ applied: true, labeled_count: 7 });
    const [url, init] = fetchMock.mock.calls[0];
    expect(url).toBe("/api/labels");
    expect(init?.method).toBe("POST");
    expect(JSON.parse(init?.body as string)).toEqual({
      batch_id: "batch-9",
      labels: [{ pair_id: "p1", label: 1 }],
    });
  });

  it("surfaces the server error message on non-2xx responses", async () => {
    const fetchMock: FetchLike = async () =>
      jsonResponse({ error: "unknown or stale batch id 'zz'" }, 409);
    const client = new ApiClient("", fetchMock);
    await expect(client.submitLabels("zz", [])).rejects.toMatchObject({
      name: "ApiError",
      status: 409,
      message: "unknown or stale batch id 'zz'",
    });
  });

  it("falls back to the HTTP status for non-JSON error bodies", async () => {
    const fetchMock: FetchLike = async () => new Response("boom", { status: 500 });
    const client = new ApiClient("", fetchMock);
    await expect(client.status()).rejects.toMatchObject({ message: "HTTP 500" });
  });

  it("propagates transport failures", async () => {
    const fetchMock: FetchLike = async () => {
      throw new TypeError("fetch failed");
    };
    const client = new ApiClient("", fetchMock);
    await expect(client.status()).rejects.toThrow("fetch failed");
    await expect(client.status()).rejects.not.toBeInstanceOf(ApiError);
  });
});
