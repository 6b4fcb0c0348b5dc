// Typed fetch client for the backend REST API. Non-2xx responses raise
// ApiError carrying the backend's error envelope; 409 on review becomes
// ConflictError so callers can refresh instead of retrying.

import type {
  AlertPage,
  AlertRecord,
  AlertState,
  ChunkMeta,
  MetricsSummary,
  RetrainingQueue,
  Thumb,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ConflictError extends ApiError {
  constructor(code: string, message: string) {
    super(409, code, message);
    this.name = "ConflictError";
  }
}

export interface ClientConfig {
  baseUrl: string;
  token?: string;
}

export interface ListAlertsParams {
  state?: AlertState;
  streamId?: string;
  sinceTs?: number;
  page?: number;
  pageSize?: number;
}

async function parseError(resp: Response): Promise<ApiError> {
  let code = "http_error";
  let message = `${resp.status} ${resp.statusText}`;
  try {
    const body = (await resp.json()) as { error?: { code?: string; message?: string } };
    if (body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  if (resp.status === 409) return new ConflictError(code, message);
  return new ApiError(resp.status, code, message);
}

export class VigilClient {
  constructor(private readonly config: ClientConfig) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const headers: Record<string, string> = {
      ...(init?.headers as Record<string, string> | undefined),
    };
    if (this.config.token) headers["Authorization"] = `Bearer ${this.config.token}`;
    if (init?.body) headers["Content-Type"] = "application/json";
    const resp = await fetch(`${this.config.baseUrl}${path}`, { ...init, headers });
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  async health(): Promise<boolean> {
    try {
      const resp = await fetch(`${this.config.baseUrl}/healthz`);
      return resp.ok;
    } catch {
      return false;
    }
  }

  listAlerts(params: ListAlertsParams = {}): Promise<AlertPage> {
    const query = new URLSearchParams();
    if (params.state) query.set("state", params.state);
    if (params.streamId) query.set("stream_id", params.streamId);
    if (params.sinceTs !== undefined) query.set("since_ts", String(params.sinceTs));
    if (params.page) query.set("page", String(params.page));
    if (params.pageSize) query.set("page_size", String(params.pageSize));
    const suffix = query.toString() ? `?${query}` : "";
    return this.request<AlertPage>(`/v1/alerts${suffix}`);
  }

  review(
    alertId: string,
    decision: "confirmed" | "dismissed",
    reviewer: string,
    correctedLabel?: number,
  ): Promise<AlertRecord> {
    return this.request<AlertRecord>(`/v1/alerts/${encodeURIComponent(alertId)}/review`, {
      method: "POST",
      body: JSON.stringify({
        decision,
        reviewer,
        corrected_label: correctedLabel ?? null,
      }),
    });
  }

  chunk(chunkId: string): Promise<ChunkMeta> {
    return this.request<ChunkMeta>(`/v1/chunks/${encodeURIComponent(chunkId)}`);
  }

  chunkThumbs(chunkId: string, count?: number): Promise<{ chunk_id: string; thumbs: Thumb[] }> {
    const suffix = count ? `?count=${count}` : "";
    return this.request(`/v1/chunks/${encodeURIComponent(chunkId)}/thumbs${suffix}`);
  }

  retrainingQueue(): Promise<RetrainingQueue> {
    return this.request<RetrainingQueue>("/v1/retraining-queue");
  }

  metricsSummary(): Promise<MetricsSummary> {
    return this.request<MetricsSummary>("/v1/metrics/summary");
  }

  // test/tooling helper, mirrors what the prediction system submits
  postInference(body: {
    chunk_id: string;
    label: number;
    scores: number[];
    model_id: string;
    latency_ms?: number;
  }): Promise<{ inference_id: number; duplicate: boolean; alert: AlertRecord | null }> {
    return this.request("/v1/inferences", { method: "POST", body: JSON.stringify(body) });
  }
}
