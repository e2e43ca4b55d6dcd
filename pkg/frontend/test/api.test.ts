import { describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { jsonResponse, mixedStatusAsk, momentDetail } from "./fixtures.js";

describe("ApiClient", () => {
  it("posts /ask with the query and optional max_docs", async () => {
    const fetchMock = vi.fn(async () => jsonResponse(mixedStatusAsk()));
    vi.stubGlobal("fetch", fetchMock);

    const client = new ApiClient("http://api.test");
    const body = await client.ask("find launch footage", 25);

    expect(body.references).toHaveLength(3);
    expect(fetchMock).toHaveBeenCalledTimes(1);
    const [url, init] = fetchMock.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe("http://api.test/ask");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body as string)).toEqual({
      query: "find launch footage",
      max_docs: 25,
    });
  });

  it("omits max_docs when not given", async () => {
    const fetchMock = vi.fn(async () => jsonResponse(mixedStatusAsk()));
    vi.stubGlobal("fetch", fetchMock);
    await new ApiClient().ask("q");
    const [, init] = fetchMock.mock.calls[0] as unknown as [string, RequestInit];
    expect(JSON.parse(init.body as string)).toEqual({ query: "q" });
  });

  it("throws ApiError with status and detail on non-2xx", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () =>
        jsonResponse({ detail: { stage: "query_generation", reason: "boom" } }, 502),
      ),
    );
    const client = new ApiClient();
    await expect(client.ask("q")).rejects.toBeInstanceOf(ApiError);
    await expect(client.ask("q")).rejects.toMatchObject({
      status: 502,
      detail: { stage: "query_generation", reason: "boom" },
    });
  });

  it("fetches moment details with an encoded id", async () => {
    const fetchMock = vi.fn(async () => jsonResponse(momentDetail()));
    vi.stubGlobal("fetch", fetchMock);
    const detail = await new ApiClient().getMoment("V001 m0/ä");
    expect(detail.moment.moment_id).toBe("V001_m0");
    const [url] = fetchMock.mock.calls[0] as unknown as [string];
    expect(url).toBe("/moments/V001%20m0%2F%C3%A4");
  });

  it("posts /search with top_k", async () => {
    const fetchMock = vi.fn(async () => jsonResponse([]));
    vi.stubGlobal("fetch", fetchMock);
    await new ApiClient().search("rover", 3);
    const [url, init] = fetchMock.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe("/search");
    expect(JSON.parse(init.body as string)).toEqual({ query: "rover", top_k: 3 });
  });

  it("gets /health", async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse({ status: "ok", docs: 5, generation: 1 }),
    );
    vi.stubGlobal("fetch", fetchMock);
    const health = await new ApiClient().health();
    expect(health.docs).toBe(5);
  });
});
