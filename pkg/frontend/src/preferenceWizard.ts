/**
 * Preference wizard: seven 1..9 sliders, one per fix kind, with a live
 * ranking preview. The preview before submission only orders the user's
 * own scores; the authoritative candidate ranking always comes back from
 * the service and replaces it.
 */

import type { ApiClient, CandidateView, SessionView } from "./api.js";
import { ApiError } from "./api.js";

export const FIX_KINDS = [
  "version_upgrade",
  "not_privileged",
  "not_root",
  "not_capability",
  "not_syscall",
  "read_only_fs",
  "no_new_priv",
] as const;

export type FixKind = (typeof FIX_KINDS)[number];

export type SliderScores = Record<FixKind, number>;

export interface WizardState {
  scores: SliderScores;
  fieldErrors: Partial<Record<FixKind, string>>;
  submitted: SessionView | null;
}

export function initialWizardState(): WizardState {
  const scores = Object.fromEntries(FIX_KINDS.map((k) => [k, 5])) as SliderScores;
  return { scores, fieldErrors: {}, submitted: null };
}

export function setScore(state: WizardState, kind: FixKind, value: number): WizardState {
  const fieldErrors = { ...state.fieldErrors };
  if (!Number.isInteger(value) || value < 1 || value > 9) {
    fieldErrors[kind] = "score must be an integer between 1 and 9";
    return { ...state, fieldErrors };
  }
  delete fieldErrors[kind];
  return { ...state, scores: { ...state.scores, [kind]: value }, fieldErrors };
}

/**
 * Pre-submission preview: fix kinds ordered by the user's own scores,
 * descending, ties broken lexically. Purely a view of the input.
 */
export function localPreview(scores: SliderScores): FixKind[] {
  return [...FIX_KINDS].sort((a, b) =>
    scores[b] - scores[a] || a.localeCompare(b));
}

/** The authoritative ranking: the service's candidate order, verbatim. */
export function serviceRanking(session: SessionView): CandidateView[] {
  return session.candidates;
}

/**
 * Submit the scores. On success the session transitions to Suggesting
 * and the returned candidate order becomes the preview; on API rejection
 * the offending field is surfaced inline.
 */
export async function submitPreferences(
  client: ApiClient,
  sessionId: string,
  state: WizardState,
): Promise<WizardState> {
  try {
    const session = await client.setPreferences(sessionId, state.scores);
    return { ...state, submitted: session, fieldErrors: {} };
  } catch (err) {
    if (err instanceof ApiError && err.code === "bad_preferences") {
      const fieldErrors: Partial<Record<FixKind, string>> = {};
      for (const kind of FIX_KINDS) {
        if (err.message.includes(kind)) {
          fieldErrors[kind] = err.message;
        }
      }
      return { ...state, fieldErrors };
    }
    throw err;
  }
}
