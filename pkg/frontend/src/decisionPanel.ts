/**
 * Fix decision panel: shows the suggested assumption, its fix kind and
 * concrete patch, plus the predicted verdict after acceptance (fetched
 * through a throwaway what-if overlay). Decisions are never optimistic:
 * the panel state always comes from the service response.
 */

import type { ApiClient, Decision, SessionView, Suggestion, Verdict } from "./api.js";
import { ApiError } from "./api.js";

export interface DecisionPanelState {
  session: SessionView;
  predicted: Verdict | null;
  conflictNotice: string | null;
}

export function panelFromSession(session: SessionView): DecisionPanelState {
  return { session, predicted: null, conflictNotice: null };
}

/**
 * Predicted verdict for the current suggestion: stage the removal of the
 * suggestion's bound edge in an overlay, read the re-evaluated verdict
 * for this session's vulnerability, discard the overlay.
 */
export async function fetchPredictedVerdict(
  client: ApiClient,
  state: DecisionPanelState,
): Promise<DecisionPanelState> {
  const suggestion: Suggestion | null = state.session.current_suggestion;
  if (!suggestion || !suggestion.bound_edge) {
    return { ...state, predicted: null };
  }
  const overlay = await client.createWhatIf([
    { op: "remove_edge", ...suggestion.bound_edge },
  ]);
  try {
    const verdict = overlay.verdicts.find(
      (v) => v.cve_id === state.session.vulnerability
        && v.container === state.session.container,
    );
    return { ...state, predicted: verdict ?? null };
  } finally {
    await client.discardWhatIf(overlay.id);
  }
}

/**
 * Post one decision. A 409 means another decision won the race; the
 * panel reloads the session and shows a conflict notice instead of
 * guessing.
 */
export async function postDecision(
  client: ApiClient,
  state: DecisionPanelState,
  decision: Decision,
): Promise<DecisionPanelState> {
  try {
    const session = await client.decide(state.session.id, decision);
    return { session, predicted: null, conflictNotice: null };
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      const session = await client.getSession(state.session.id);
      return {
        session,
        predicted: null,
        conflictNotice: `decision not applied: ${err.message}`,
      };
    }
    throw err;
  }
}

export function verdictBadge(state: DecisionPanelState): string {
  const verdict = state.session.verdict;
  if (verdict === null) {
    return "unknown";
  }
  return verdict.satisfied ? "exploitable" : "not exploitable";
}
