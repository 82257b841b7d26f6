// Typed client for the enhancement service. Every request the UI makes
// goes through ApiClient; no endpoint strings exist anywhere else, and
// the transport is injectable so tests run without a live backend.

export interface TargetBody {
  reference_image?: string;
  zfc_target?: number;
  fixed_iterations?: number;
}

export interface EnhanceRequest {
  input_image: string;
  target: TargetBody;
  epsilon?: number;
  max_iterations?: number;
  return_steps?: boolean;
}

export interface TrajectoryPoint {
  step: number;
  zfc: number;
}

export interface EnhanceResponse {
  output_image: string;
  iterations_used: number;
  converged: boolean;
  zfc_trajectory: TrajectoryPoint[];
  input_histogram: number[];
  output_histogram: number[];
  reference_histogram?: number[];
  step_images?: string[];
}

export interface ScoreResponse {
  quality_score: number;
  normalized_zfc: number;
  histogram: number[];
}

export interface HealthResponse {
  status: string;
  model_loaded: boolean;
  checkpoint_round: number | null;
}

export interface ApiFailure {
  status: number;
  detail: string;
}

export type ApiResult<T> = { ok: true; value: T } | { ok: false; error: ApiFailure };

/** Minimal transport: post/get JSON, resolve with status + parsed body. */
export interface Transport {
  (method: "GET" | "POST", path: string, body?: unknown): Promise<{
    status: number;
    body: unknown;
  }>;
}

export const fetchTransport: Transport = async (method, path, body) => {
  const response = await fetch(path, {
    method,
    headers: body === undefined ? undefined : { "content-type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  let parsed: unknown = null;
  try {
    parsed = await response.json();
  } catch {
    parsed = null;
  }
  return { status: response.status, body: parsed };
};

function failure(status: number, body: unknown): ApiFailure {
  const detail =
    body && typeof body === "object" && "detail" in body
      ? String((body as { detail: unknown }).detail)
      : `request failed with status ${status}`;
  return { status, detail };
}

export class ApiClient {
  constructor(private readonly transport: Transport = fetchTransport) {}

  async health(): Promise<ApiResult<HealthResponse>> {
    const { status, body } = await this.transport("GET", "/api/health");
    if (status !== 200) return { ok: false, error: failure(status, body) };
    return { ok: true, value: body as HealthResponse };
  }

  async score(imageBase64: string): Promise<ApiResult<ScoreResponse>> {
    const { status, body } = await this.transport("POST", "/api/score", {
      image: imageBase64,
    });
    if (status !== 200) return { ok: false, error: failure(status, body) };
    return { ok: true, value: body as ScoreResponse };
  }

  async enhance(request: EnhanceRequest): Promise<ApiResult<EnhanceResponse>> {
    const { status, body } = await this.transport("POST", "/api/enhance", request);
    if (status !== 200) return { ok: false, error: failure(status, body) };
    return { ok: true, value: body as EnhanceResponse };
  }
}
