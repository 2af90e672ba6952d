/**
 * Typed client for the stress-test service /v1 API.
 *
 * The UI performs no security computation of its own: every count,
 * weight, and verdict rendered comes from these calls. The fetch
 * implementation is injectable so contract tests can replay recorded
 * responses.
 */

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface NodeRef {
  label: string;
  name: string;
}

export interface EdgeRef {
  a: NodeRef;
  b: NodeRef;
  relation: string;
}

export interface GraphStats {
  nodes: number;
  edges: number;
  per_label: Record<string, number>;
  containers: string[];
}

export interface VulnEntry {
  id: string;
  cvss_v3: number;
  mitre_tactic: string;
  mitre_technique: string;
  category: string;
  andor_nodes: number;
  andor_edges: number;
}

export interface Verdict {
  container: string;
  cve_id: string;
  satisfied: boolean;
  witness: string[];
  satisfied_assumptions: { leaf: string; atom: string; polarity: string }[];
}

export interface ScanResponse {
  report: {
    verdicts: Verdict[];
    totals: Record<string, Record<string, { satisfied: number; total: number }>>;
    resilience_score: number;
  };
  exit_hint: number;
}

export interface PatchView {
  description: string;
  add_options: string[];
  remove_options: string[];
  advisory: boolean;
}

export interface Suggestion {
  index: number;
  fix_kind: string | null;
  label: string;
  weight: number;
  leaf: string;
  atom: string;
  bound_edge: EdgeRef | null;
  patch: PatchView;
}

export interface CandidateView {
  fix_kind: string | null;
  label: string;
  weight: number;
  leaf: string;
}

export interface SessionView {
  id: string;
  state: string;
  vulnerability: string;
  container: string;
  resilience_score: number;
  risk_accepted: boolean;
  verdict: { satisfied: boolean; witness: string[] } | null;
  current_suggestion: Suggestion | null;
  candidates: CandidateView[];
  journal_tail: Record<string, unknown>[];
}

export interface WhatIfMutation {
  op: "add_edge" | "remove_edge";
  a: NodeRef;
  b: NodeRef;
  relation: string;
}

export interface WhatIfResponse {
  id: string;
  stats: GraphStats;
  verdicts: Verdict[];
}

export type Decision = "accept" | "reject" | "stop" | "accept_risk";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public detail: string = "",
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  try {
    const body = await response.json();
    return new ApiError(response.status, body.code ?? "error",
      body.message ?? response.statusText, body.detail ?? "");
  } catch {
    return new ApiError(response.status, "error", response.statusText);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      throw await parseError(response);
    }
    return response.json() as Promise<T>;
  }

  graphStats(): Promise<GraphStats> {
    return this.request("GET", "/v1/graph/stats");
  }

  vulns(): Promise<VulnEntry[]> {
    return this.request("GET", "/v1/vulns");
  }

  scan(): Promise<ScanResponse> {
    return this.request("POST", "/v1/scan", {});
  }

  createSession(cveId: string, container: string,
                preferences?: Record<string, number>): Promise<SessionView> {
    const body: Record<string, unknown> = { cve_id: cveId, container };
    if (preferences) {
      body.preferences = preferences;
    }
    return this.request("POST", "/v1/sessions", body);
  }

  getSession(id: string): Promise<SessionView> {
    return this.request("GET", `/v1/sessions/${id}`);
  }

  setPreferences(id: string, scores: Record<string, number>): Promise<SessionView> {
    return this.request("POST", `/v1/sessions/${id}/preferences`, { scores });
  }

  decide(id: string, decision: Decision): Promise<SessionView> {
    return this.request("POST", `/v1/sessions/${id}/decision`, { decision });
  }

  createWhatIf(mutations: WhatIfMutation[]): Promise<WhatIfResponse> {
    return this.request("POST", "/v1/whatif", { mutations });
  }

  discardWhatIf(id: string): Promise<{ discarded: string }> {
    return this.request("DELETE", `/v1/whatif/${id}`);
  }

  applyWhatIf(id: string): Promise<{ applied: unknown[]; stats: GraphStats }> {
    return this.request("POST", `/v1/whatif/${id}/apply`);
  }
}
