/** Thin typed client over the lake service.
 *
 * The console is a pure client: every method returns the parsed response
 * body verbatim, never re-ranked, re-scored or recomputed. The fetch
 * implementation is injectable so tests can run without a network.
 */

import type {
  ComplianceReport,
  HealthDoc,
  LakeHealth,
  LineageBundle,
  ProjectView,
  RecordDoc,
  SearchHit,
  TraversalDoc,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiFailure extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.status = status;
    this.code = code;
  }
}

export interface SearchParams {
  text?: string;
  kinds?: string[];
  tags?: string[];
  user?: string;
  limit?: number;
}

export function searchPath(params: SearchParams): string {
  const query = new URLSearchParams();
  if (params.text) query.set("text", params.text);
  for (const kind of params.kinds ?? []) query.append("kind", kind);
  for (const tag of params.tags ?? []) query.append("tag", tag);
  if (params.user) query.set("user", params.user);
  if (params.limit !== undefined) query.set("limit", String(params.limit));
  return `/search?${query.toString()}`;
}

export function compliancePath(model: string, approved: string[]): string {
  const suffix = approved.length
    ? `?approved=${encodeURIComponent(approved.join(","))}`
    : "";
  return `/audit/compliance/${encodeURIComponent(model)}${suffix}`;
}

export class ApiClient {
  readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async get<T>(path: string): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path);
    } catch (err) {
      throw new ApiFailure(0, "unreachable", `cannot reach ${this.baseUrl}: ${err}`);
    }
    const body = await response.text();
    if (!response.ok) {
      let code = "internal";
      let message = body || `HTTP ${response.status}`;
      try {
        const doc = JSON.parse(body);
        code = doc.code ?? code;
        message = doc.message ?? message;
      } catch {
        // non-JSON error body; keep raw text
      }
      throw new ApiFailure(response.status, code, message);
    }
    return JSON.parse(body) as T;
  }

  health(): Promise<HealthDoc> {
    return this.get("/health");
  }

  search(params: SearchParams): Promise<SearchHit[]> {
    return this.get(searchPath(params));
  }

  project(studyRef: string): Promise<ProjectView> {
    return this.get(`/projects/${encodeURIComponent(studyRef)}`);
  }

  lineage(nodeRef: string): Promise<LineageBundle> {
    return this.get(`/lineage/${encodeURIComponent(nodeRef)}`);
  }

  record(nodeRef: string): Promise<RecordDoc> {
    return this.get(`/records/${encodeURIComponent(nodeRef)}`);
  }

  compliance(model: string, approved: string[]): Promise<ComplianceReport> {
    return this.get(compliancePath(model, approved));
  }

  traversal(nodeRef: string, direction: "upstream" | "downstream"): Promise<TraversalDoc> {
    return this.get(`/${direction}/${encodeURIComponent(nodeRef)}`);
  }

  lakeHealth(): Promise<LakeHealth> {
    return this.get("/audit/health");
  }
}
