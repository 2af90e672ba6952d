/**
 * View model: everything the panels render, derived from the last
 * successful API responses. A view that failed to refresh is flagged
 * stale rather than silently shown.
 */

import type {
  GraphStats,
  ScanResponse,
  SessionView,
  Verdict,
  VulnEntry,
} from "./api.js";

export interface VulnCard {
  id: string;
  cvss: number;
  tactic: string;
  technique: string;
  category: string;
  exploitable: boolean;
  witness: string[];
}

export interface GraphSummary {
  nodes: number;
  edges: number;
  perLabel: Record<string, number>;
  containers: string[];
}

export interface SessionPanel {
  id: string;
  state: string;
  vulnerability: string;
  container: string;
  resilienceScore: number;
  riskAccepted: boolean;
  exploitable: boolean | null;
  suggestionLabel: string | null;
  fixKind: string | null;
  patchDescription: string | null;
  journalTail: string[];
}

export interface ViewModel {
  graph: GraphSummary;
  vulnCards: VulnCard[];
  stale: boolean;
}

export function buildGraphSummary(stats: GraphStats): GraphSummary {
  return {
    nodes: stats.nodes,
    edges: stats.edges,
    perLabel: stats.per_label,
    containers: stats.containers,
  };
}

function verdictFor(verdicts: Verdict[], cveId: string): Verdict | undefined {
  return verdicts.find((v) => v.cve_id === cveId);
}

export function buildVulnCards(vulns: VulnEntry[], verdicts: Verdict[]): VulnCard[] {
  return vulns.map((v) => {
    const verdict = verdictFor(verdicts, v.id);
    return {
      id: v.id,
      cvss: v.cvss_v3,
      tactic: v.mitre_tactic,
      technique: v.mitre_technique,
      category: v.category,
      exploitable: verdict ? verdict.satisfied : false,
      witness: verdict ? verdict.witness : [],
    };
  });
}

export function buildViewModel(stats: GraphStats, vulns: VulnEntry[],
                               scan: ScanResponse): ViewModel {
  return {
    graph: buildGraphSummary(stats),
    vulnCards: buildVulnCards(vulns, scan.report.verdicts),
    stale: false,
  };
}

/** Mark a model stale after a failed refresh; rendering shows the flag. */
export function markStale(model: ViewModel): ViewModel {
  return { ...model, stale: true };
}

export function buildSessionPanel(session: SessionView): SessionPanel {
  const suggestion = session.current_suggestion;
  return {
    id: session.id,
    state: session.state,
    vulnerability: session.vulnerability,
    container: session.container,
    resilienceScore: session.resilience_score,
    riskAccepted: session.risk_accepted,
    exploitable: session.verdict ? session.verdict.satisfied : null,
    suggestionLabel: suggestion ? suggestion.label : null,
    fixKind: suggestion ? suggestion.fix_kind : null,
    patchDescription: suggestion ? suggestion.patch.description : null,
    journalTail: session.journal_tail.map((e) => String(e.event ?? "")),
  };
}
