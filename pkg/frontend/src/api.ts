/** Typed client for the scoring service API. Every number the UI shows
 * comes through here; nothing is computed client-side. */

export interface TeamInfo {
  name: string;
  label: string;
}

export interface SprintInfo {
  title: string;
  ordinal: number;
  start: string;
  end: string;
}

export interface MetricDef {
  id: string;
  name: string;
  category: string;
  severity: "Low" | "Medium" | "High";
  data_source: string;
  description: string;
  kind: "query" | "native";
  query: string;
  context_queries: Record<string, string>;
  params: Record<string, number>;
  rating: string;
  aliases: Record<string, string>;
  revision: number;
}

export interface MetricScore {
  id: string;
  name: string;
  category: string;
  severity: string;
  status: "scored" | "inapplicable" | "error";
  score: number | null;
  violation_count: number;
  revision: number;
  detail: string;
}

export interface ScoresPayload {
  team: string;
  sprint: string;
  overall: number | null;
  categories: { name: string; score: number | null }[];
  metrics: MetricScore[];
}

export interface RadarPayload {
  sprint: string;
  categories: string[];
  teams: { team: string; scores: (number | null)[] }[];
}

export interface TrendPoint {
  sprint: string;
  ordinal: number;
  score: number | null;
}

export interface TrendPayload {
  team: string;
  target: string;
  points: TrendPoint[];
}

export interface ViolationRow {
  kind: string;
  ref: string;
  columns: Record<string, unknown>;
}

export interface ViolationsPayload {
  metric: string;
  team: string;
  sprint: string;
  status: string;
  score: number | null;
  violations: ViolationRow[];
}

export interface FieldError {
  metric: string;
  field: string;
  reason: string;
  offset?: number;
}

export type PutMetricResult =
  | { kind: "ok"; metric: MetricDef }
  | { kind: "stale"; currentRevision: number }
  | { kind: "invalid"; errors: FieldError[] };

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: unknown,
  ) {
    super(`API error ${status}`);
  }
}

async function parseBody(response: Response): Promise<unknown> {
  const text = await response.text();
  try {
    return text ? JSON.parse(text) : null;
  } catch {
    return text;
  }
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetcher: typeof fetch = fetch,
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetcher(this.base + path);
    const body = await parseBody(response);
    if (!response.ok) {
      throw new ApiError(response.status, body);
    }
    return body as T;
  }

  async teams(): Promise<TeamInfo[]> {
    const body = await this.getJson<{ teams: TeamInfo[] }>("/api/teams");
    return body.teams;
  }

  async sprints(): Promise<SprintInfo[]> {
    const body = await this.getJson<{ sprints: SprintInfo[] }>("/api/sprints");
    return body.sprints;
  }

  async metrics(): Promise<{ category_order: string[]; metrics: MetricDef[] }> {
    return this.getJson("/api/metrics");
  }

  async scores(team: string, sprint: string): Promise<ScoresPayload> {
    const query = new URLSearchParams({ team, sprint });
    return this.getJson(`/api/scores?${query}`);
  }

  async radar(sprint: string): Promise<RadarPayload> {
    const query = new URLSearchParams({ sprint });
    return this.getJson(`/api/radar?${query}`);
  }

  async trend(team: string, target?: { metric?: string; category?: string }): Promise<TrendPayload> {
    const query = new URLSearchParams({ team });
    if (target?.metric) query.set("metric", target.metric);
    if (target?.category) query.set("category", target.category);
    return this.getJson(`/api/trend?${query}`);
  }

  async violations(metric: string, team: string, sprint: string): Promise<ViolationsPayload> {
    const query = new URLSearchParams({ metric, team, sprint });
    return this.getJson(`/api/violations?${query}`);
  }

  async putMetric(id: string, revision: number, fields: Partial<MetricDef>): Promise<PutMetricResult> {
    const response = await this.fetcher(`${this.base}/api/metrics/${encodeURIComponent(id)}`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ ...fields, revision }),
    });
    const body = (await parseBody(response)) as Record<string, unknown> | null;
    if (response.status === 200 && body) {
      return { kind: "ok", metric: body["metric"] as MetricDef };
    }
    if (response.status === 409 && body) {
      return { kind: "stale", currentRevision: body["current_revision"] as number };
    }
    if (response.status === 422 && body) {
      return { kind: "invalid", errors: body["errors"] as FieldError[] };
    }
    throw new ApiError(response.status, body);
  }

  async evaluate(): Promise<{ data_version: string; results: number }> {
    const response = await this.fetcher(`${this.base}/api/evaluate`, { method: "POST" });
    const body = await parseBody(response);
    if (!response.ok) {
      throw new ApiError(response.status, body);
    }
    return body as { data_version: string; results: number };
  }
}
