/** Thin typed client for the discovery service; all numbers pass through untouched. */

import type {
  DashboardDto,
  ExtendResponseDto,
  LogSummaryDto,
  SessionDetailDto,
  SessionSummaryDto,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(
    private readonly baseUrl: string = "",
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`, {
        method,
        headers: body === undefined ? undefined : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (error) {
      throw new ApiError(0, `network failure: ${String(error)}`);
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const payload = (await response.json()) as { detail?: unknown };
        if (payload.detail !== undefined) {
          detail = typeof payload.detail === "string" ? payload.detail : JSON.stringify(payload.detail);
        }
      } catch {
        // non-JSON error body: keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  uploadLog(source: { csv_text?: string; path?: string }, schema: unknown): Promise<LogSummaryDto> {
    return this.request("POST", "/logs", { ...source, schema });
  }

  createSession(logId: string, config: unknown): Promise<SessionSummaryDto> {
    return this.request("POST", "/sessions", { log_id: logId, config });
  }

  getSession(sessionId: string): Promise<SessionDetailDto> {
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}`);
  }

  extend(
    sessionId: string,
    patternIds: string[],
    rules?: string[],
    minCaseFrequency?: number | null,
  ): Promise<ExtendResponseDto> {
    const body: Record<string, unknown> = { pattern_ids: patternIds };
    if (rules !== undefined) {
      body.rules = rules;
    }
    if (minCaseFrequency !== undefined && minCaseFrequency !== null) {
      body.min_case_frequency = minCaseFrequency;
    }
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/extend`, body);
  }

  dashboard(sessionId: string, patternId: string): Promise<DashboardDto> {
    return this.request(
      "GET",
      `/sessions/${encodeURIComponent(sessionId)}/patterns/${encodeURIComponent(patternId)}/dashboard`,
    );
  }

  exportSession(sessionId: string): Promise<Record<string, unknown>> {
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}/export`);
  }
}
