/** Typed fetch client for the /v1 annotation and reporting API. */

import type {
  AnnotateRequest,
  AnnotationPayload,
  MonthPeriod,
  Report,
  SitesResponse,
} from "./types";

export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
  }
}

async function errorMessage(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (body && typeof body.error === "string") {
      return body.error;
    }
  } catch {
    /* non-JSON error body; fall through to the status line */
  }
  return `request failed with status ${response.status}`;
}

export class ApiClient {
  readonly baseUrl: string;
  readonly token: string;

  constructor(baseUrl: string, token: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.token = token;
  }

  private async request<T>(
    path: string,
    init: RequestInit,
    signal?: AbortSignal,
  ): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      ...init,
      signal,
      headers: {
        Authorization: `Bearer ${this.token}`,
        "Content-Type": "application/json",
        ...(init.headers ?? {}),
      },
    });
    if (!response.ok) {
      throw new ApiError(response.status, await errorMessage(response));
    }
    return (await response.json()) as T;
  }

  annotate(
    request: AnnotateRequest,
    signal?: AbortSignal,
  ): Promise<AnnotationPayload> {
    return this.request("/v1/annotate", {
      method: "POST",
      body: JSON.stringify(request),
    }, signal);
  }

  siteReport(
    siteId: string,
    period?: MonthPeriod,
    signal?: AbortSignal,
  ): Promise<Report> {
    const query = period
      ? `?from=${encodeURIComponent(period.from)}&to=${encodeURIComponent(period.to)}`
      : "";
    return this.request(
      `/v1/reports/site/${encodeURIComponent(siteId)}${query}`,
      { method: "GET" },
      signal,
    );
  }

  authorReport(
    siteId: string,
    author: string,
    period?: MonthPeriod,
    signal?: AbortSignal,
  ): Promise<Report> {
    const query = period
      ? `?from=${encodeURIComponent(period.from)}&to=${encodeURIComponent(period.to)}`
      : "";
    return this.request(
      `/v1/reports/author/${encodeURIComponent(siteId)}/${encodeURIComponent(author)}${query}`,
      { method: "GET" },
      signal,
    );
  }

  sites(signal?: AbortSignal): Promise<SitesResponse> {
    return this.request("/v1/sites", { method: "GET" }, signal);
  }
}
