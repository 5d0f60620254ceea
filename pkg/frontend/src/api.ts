/** Typed client for the graphforge service.
 *
 * The fetch function is injectable so tests can mock the server; every
 * number the UI displays originates from these responses.
 */

import type {
  ApiErrorItem,
  BattleConfig,
  BattleResult,
  DatasetSpec,
  GraphCreateResponse,
  GraphGetResponse,
  MetricPoint,
  TrainConfig,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export type ApiResult<T> =
  | { ok: true; data: T }
  | { ok: false; status: number; errors: ApiErrorItem[]; detail: string };

async function asFailure(resp: Response): Promise<{ ok: false; status: number; errors: ApiErrorItem[]; detail: string }> {
  let errors: ApiErrorItem[] = [];
  let detail = resp.statusText;
  try {
    const body = await resp.json();
    if (Array.isArray(body.errors)) errors = body.errors;
    if (typeof body.detail === "string") detail = body.detail;
  } catch {
    /* non-JSON error body */
  }
  return { ok: false, status: resp.status, errors, detail };
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<ApiResult<T>> {
    const resp = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) return asFailure(resp);
    return { ok: true, data: (await resp.json()) as T };
  }

  createGraph(dsl: string): Promise<ApiResult<GraphCreateResponse>> {
    return this.request("POST", "/graphs", { dsl });
  }

  getGraph(id: string): Promise<ApiResult<GraphGetResponse>> {
    return this.request("GET", `/graphs/${id}`);
  }

  createSession(graphId: string, trainConfig: TrainConfig, dataset: DatasetSpec): Promise<ApiResult<{ session_id: string }>> {
    return this.request("POST", "/sessions", {
      graph_id: graphId,
      train_config: trainConfig,
      dataset,
    });
  }

  step(sessionId: string, n: number): Promise<ApiResult<{ step: number; latest: MetricPoint | null }>> {
    return this.request("POST", `/sessions/${sessionId}/step`, { n });
  }

  metrics(sessionId: string, sinceStep: number): Promise<ApiResult<{ points: MetricPoint[] }>> {
    return this.request("GET", `/sessions/${sessionId}/metrics?since_step=${sinceStep}`);
  }

  battle(graphA: string, graphB: string, config: BattleConfig): Promise<ApiResult<BattleResult>> {
    return this.request("POST", "/battles", { graph_a: graphA, graph_b: graphB, config });
  }

  async healthz(): Promise<boolean> {
    try {
      const resp = await this.fetchFn(this.baseUrl + "/healthz");
      return resp.ok;
    } catch {
      return false;
    }
  }
}
