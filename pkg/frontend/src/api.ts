import type {
  PairDetail,
  PairList,
  PairSummary,
  RatingBody,
  RefineBody,
  RefineResponse,
  StatsPayload,
} from "./types";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
    this.name = "ApiError";
  }
}

export function describeError(err: unknown): string {
  if (err instanceof ApiError) return `HTTP ${err.status}: ${err.message}`;
  return err instanceof Error ? err.message : String(err);
}

/**
 * Typed client for the review service. All writes go through here; the UI
 * never touches annotation state any other way. baseUrl is configurable
 * (empty string means same origin) and fetch is injectable for tests.
 */
export class ReviewApi {
  private base: string;

  constructor(
    baseUrl = "",
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {
    this.base = baseUrl.replace(/\/+$/, "");
  }

  get baseUrl(): string {
    return this.base;
  }

  url(path: string): string {
    return this.base + path;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(this.url(path), init);
    let body: unknown = null;
    try {
      body = await res.json();
    } catch {
      body = null;
    }
    if (!res.ok) {
      const detail =
        body !== null && typeof body === "object" && "detail" in body
          ? (body as { detail: unknown }).detail
          : res.statusText;
      throw new ApiError(res.status, detail);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  listPairs(status?: string): Promise<PairList> {
    const q = status ? `?status=${encodeURIComponent(status)}` : "";
    return this.request<PairList>(`/api/pairs${q}`);
  }

  getPair(recordId: string): Promise<PairDetail> {
    return this.request<PairDetail>(`/api/pairs/${encodeURIComponent(recordId)}`);
  }

  submitRating(recordId: string, body: RatingBody): Promise<PairSummary> {
    return this.post<PairSummary>(
      `/api/pairs/${encodeURIComponent(recordId)}/rating`,
      body,
    );
  }

  submitRefine(recordId: string, body: RefineBody): Promise<RefineResponse> {
    return this.post<RefineResponse>(
      `/api/pairs/${encodeURIComponent(recordId)}/refine`,
      body,
    );
  }

  getStats(): Promise<StatsPayload> {
    return this.request<StatsPayload>("/api/stats");
  }

  imageUrl(rel: string): string {
    return this.url(rel);
  }
}
