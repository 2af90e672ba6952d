/**
 * Browser bootstrap: wires the panels to a service at the same origin
 * (or ?api=http://host:port). All state transitions flow through the
 * API; the panels re-render from each response.
 */

import { ApiClient } from "./api.js";
import { fetchPredictedVerdict, panelFromSession, postDecision } from "./decisionPanel.js";
import type { Decision } from "./api.js";
import {
  FIX_KINDS,
  initialWizardState,
  localPreview,
  serviceRanking,
  setScore,
  submitPreferences,
} from "./preferenceWizard.js";
import type { FixKind } from "./preferenceWizard.js";
import {
  renderDecisionPanel,
  renderGraphSummary,
  renderRanking,
  renderSessionPanel,
  renderVulnCard,
} from "./render.js";
import { buildSessionPanel, buildViewModel } from "./viewModel.js";
import {
  applyToBase,
  discardOverlay,
  emptyBoard,
  evaluateStaged,
  stageMutation,
} from "./whatifBoard.js";

const apiBase = new URLSearchParams(window.location.search).get("api") ?? "";
const client = new ApiClient(apiBase);

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node;
}

async function refreshOverview(): Promise<void> {
  try {
    const [stats, vulns, scan] = await Promise.all([
      client.graphStats(), client.vulns(), client.scan()]);
    const model = buildViewModel(stats, vulns, scan);
    el("graph-summary").textContent = renderGraphSummary(model.graph, model.stale);
    el("vuln-cards").textContent = model.vulnCards.map(renderVulnCard).join("\n\n");
  } catch {
    const previous = el("graph-summary").textContent ?? "";
    el("graph-summary").textContent = previous.includes("(stale)")
      ? previous : previous + " (stale)";
  }
}

let wizard = initialWizardState();
let sessionId: string | null = null;

async function startSession(): Promise<void> {
  const cve = (el("session-cve") as HTMLInputElement).value;
  const container = (el("session-container") as HTMLInputElement).value;
  const session = await client.createSession(cve, container);
  sessionId = session.id;
  el("wizard-preview").textContent =
    "preview (your scores): " + localPreview(wizard.scores).join(" > ");
  el("session-panel").textContent = renderSessionPanel(buildSessionPanel(session));
}

function wireSliders(): void {
  for (const kind of FIX_KINDS) {
    const slider = el(`slider-${kind}`) as HTMLInputElement;
    slider.addEventListener("input", () => {
      wizard = setScore(wizard, kind as FixKind, Number(slider.value));
      el("wizard-preview").textContent =
        "preview (your scores): " + localPreview(wizard.scores).join(" > ");
      const error = wizard.fieldErrors[kind as FixKind];
      el(`error-${kind}`).textContent = error ?? "";
    });
  }
}

async function submitWizard(): Promise<void> {
  if (!sessionId) {
    return;
  }
  wizard = await submitPreferences(client, sessionId, wizard);
  if (wizard.submitted) {
    el("wizard-preview").textContent =
      renderRanking(serviceRanking(wizard.submitted)).join("\n");
    await refreshDecisionPanel(wizard.submitted.id);
  }
  for (const kind of FIX_KINDS) {
    el(`error-${kind}`).textContent = wizard.fieldErrors[kind as FixKind] ?? "";
  }
}

async function refreshDecisionPanel(id: string): Promise<void> {
  const session = await client.getSession(id);
  let panel = panelFromSession(session);
  if (session.current_suggestion?.bound_edge) {
    panel = await fetchPredictedVerdict(client, panel);
  }
  el("decision-panel").textContent = renderDecisionPanel(panel);
  el("session-panel").textContent = renderSessionPanel(buildSessionPanel(session));
}

async function decide(decision: Decision): Promise<void> {
  if (!sessionId) {
    return;
  }
  const session = await client.getSession(sessionId);
  const next = await postDecision(client, panelFromSession(session), decision);
  el("decision-panel").textContent = renderDecisionPanel(next);
  el("session-panel").textContent =
    renderSessionPanel(buildSessionPanel(next.session));
  await refreshOverview();
}

let board = emptyBoard([]);

async function initBoard(): Promise<void> {
  const scan = await client.scan();
  const stats = await client.graphStats();
  board = emptyBoard(scan.report.verdicts, stats);
}

function wireWhatIf(): void {
  el("whatif-stage").addEventListener("click", async () => {
    const raw = (el("whatif-input") as HTMLTextAreaElement).value;
    board = stageMutation(board, JSON.parse(raw));
    board = await evaluateStaged(client, board);
    el("whatif-verdicts").textContent = board.overlay
      ? board.overlay.verdicts.map((v) =>
          `${v.cve_id}: ${v.satisfied ? "exploitable" : "not exploitable"}`).join("\n")
      : "";
  });
  el("whatif-discard").addEventListener("click", async () => {
    board = await discardOverlay(client, board);
    el("whatif-verdicts").textContent = "";
    await refreshOverview();
  });
  el("whatif-apply").addEventListener("click", async () => {
    board = await applyToBase(client, board, (preview) =>
      window.confirm("Apply to base graph?\n" + preview.join("\n")));
    el("whatif-notice").textContent = board.notice ?? "";
    await refreshOverview();
  });
}

window.addEventListener("DOMContentLoaded", () => {
  wireSliders();
  wireWhatIf();
  el("session-start").addEventListener("click", () => void startSession());
  el("wizard-submit").addEventListener("click", () => void submitWizard());
  el("decide-accept").addEventListener("click", () => void decide("accept"));
  el("decide-reject").addEventListener("click", () => void decide("reject"));
  el("decide-stop").addEventListener("click", () => void decide("stop"));
  void refreshOverview();
  void initBoard();
});
