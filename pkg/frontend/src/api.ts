import type { AskResponse, HealthResponse, MomentDetail, MomentSummary } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(typeof detail === "string" ? detail : `HTTP ${status}`);
    this.name = "ApiError";
  }
}

async function readDetail(response: Response): Promise<unknown> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    return body.detail ?? body;
  } catch {
    return `HTTP ${response.status}`;
  }
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(`${this.base}${path}`, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      throw new ApiError(response.status, await readDetail(response));
    }
    return (await response.json()) as T;
  }

  ask(query: string, maxDocs?: number): Promise<AskResponse> {
    const body: Record<string, unknown> = { query };
    if (maxDocs !== undefined) body.max_docs = maxDocs;
    return this.request<AskResponse>("/ask", {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  search(query: string, topK?: number): Promise<MomentSummary[]> {
    const body: Record<string, unknown> = { query };
    if (topK !== undefined) body.top_k = topK;
    return this.request<MomentSummary[]>("/search", {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  getMoment(momentId: string): Promise<MomentDetail> {
    return this.request<MomentDetail>(`/moments/${encodeURIComponent(momentId)}`);
  }

  health(): Promise<HealthResponse> {
    return this.request<HealthResponse>("/health");
  }
}
