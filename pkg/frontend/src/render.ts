/**
 * Deterministic render helpers. Panels render to plain strings so the
 * contract tests can assert output without a DOM.
 */

import type { CandidateView } from "./api.js";
import type { DecisionPanelState } from "./decisionPanel.js";
import { verdictBadge } from "./decisionPanel.js";
import type { GraphSummary, SessionPanel, VulnCard } from "./viewModel.js";

export function renderGraphSummary(summary: GraphSummary, stale = false): string {
  const labels = Object.entries(summary.perLabel)
    .sort(([a], [b]) => a.localeCompare(b))
    .map(([label, count]) => `  ${label}: ${count}`);
  const head = `graph: ${summary.nodes} nodes, ${summary.edges} edges` +
    (stale ? " (stale)" : "");
  return [head, `containers: ${summary.containers.join(", ") || "(none)"}`,
          ...labels].join("\n");
}

export function renderVulnCard(card: VulnCard): string {
  const badge = card.exploitable ? "EXPLOITABLE" : "not exploitable";
  return [
    `${card.id} [${badge}]`,
    `  cvss ${card.cvss.toFixed(1)} | ${card.category} | ` +
      `${card.tactic} / ${card.technique}`,
    card.witness.length ? `  witness: ${card.witness.join(" -> ")}` : "  witness: -",
  ].join("\n");
}

export function renderRanking(candidates: CandidateView[]): string[] {
  return candidates.map((c, i) =>
    `${i + 1}. ${c.fix_kind ?? "(advisory)"} — ${c.label} ` +
    `(weight ${c.weight.toFixed(3)})`);
}

export function renderSessionPanel(panel: SessionPanel): string {
  const lines = [
    `session ${panel.id} [${panel.state}]`,
    `vulnerability: ${panel.vulnerability} on ${panel.container}`,
    `resilience score: ${panel.resilienceScore}`,
  ];
  if (panel.exploitable !== null) {
    lines.push(`verdict: ${panel.exploitable ? "exploitable" : "not exploitable"}`);
  }
  if (panel.suggestionLabel) {
    lines.push(`suggestion: ${panel.suggestionLabel} [${panel.fixKind}]`);
    lines.push(`patch: ${panel.patchDescription}`);
  }
  if (panel.riskAccepted) {
    lines.push("resolved with accepted risk");
  }
  return lines.join("\n");
}

export function renderDecisionPanel(state: DecisionPanelState): string {
  const suggestion = state.session.current_suggestion;
  const lines = [`verdict badge: ${verdictBadge(state)}`];
  if (suggestion) {
    lines.push(`assumption: ${suggestion.atom}`);
    lines.push(`fix: ${suggestion.fix_kind ?? "(advisory)"} — ${suggestion.label}`);
    lines.push(`patch: ${suggestion.patch.description}`);
    if (state.predicted) {
      lines.push(`predicted after accept: ` +
        `${state.predicted.satisfied ? "exploitable" : "not exploitable"}`);
    }
  }
  if (state.conflictNotice) {
    lines.push(`conflict: ${state.conflictNotice}`);
  }
  lines.push(`score: ${state.session.resilience_score}`);
  return lines.join("\n");
}
