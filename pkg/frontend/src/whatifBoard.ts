/**
 * What-if board: stage edge additions/removals, evaluate them in an
 * overlay, then either apply them to the base graph (with explicit
 * confirmation, previewing the journal entries the apply will create)
 * or discard everything.
 */

import type {
  ApiClient,
  GraphStats,
  Verdict,
  WhatIfMutation,
  WhatIfResponse,
} from "./api.js";
import { ApiError } from "./api.js";

export interface WhatIfBoardState {
  staged: WhatIfMutation[];
  overlay: WhatIfResponse | null;
  baseVerdicts: Verdict[];
  baseStats: GraphStats | null;
  notice: string | null;
}

export function emptyBoard(baseVerdicts: Verdict[],
                           baseStats: GraphStats | null = null): WhatIfBoardState {
  return { staged: [], overlay: null, baseVerdicts, baseStats, notice: null };
}

export function stageMutation(state: WhatIfBoardState,
                              mutation: WhatIfMutation): WhatIfBoardState {
  return { ...state, staged: [...state.staged, mutation], overlay: null };
}

/** With nothing staged the board shows the base verdicts unchanged. */
export function currentVerdicts(state: WhatIfBoardState): Verdict[] {
  return state.overlay ? state.overlay.verdicts : state.baseVerdicts;
}

export async function evaluateStaged(
  client: ApiClient,
  state: WhatIfBoardState,
): Promise<WhatIfBoardState> {
  if (state.staged.length === 0) {
    return { ...state, overlay: null };
  }
  const overlay = await client.createWhatIf(state.staged);
  return { ...state, overlay, notice: null };
}

export async function discardOverlay(
  client: ApiClient,
  state: WhatIfBoardState,
): Promise<WhatIfBoardState> {
  if (state.overlay) {
    await client.discardWhatIf(state.overlay.id);
  }
  return { ...state, staged: [], overlay: null };
}

/** The journal entries an apply will create, shown before confirmation. */
export function applyPreview(state: WhatIfBoardState): string[] {
  return state.staged.map((m) =>
    `${m.op} ${m.a.label}:${m.a.name} -[${m.relation}]- ${m.b.label}:${m.b.name}`);
}

/**
 * Convert the overlay into journaled base mutations. Requires an
 * explicit confirmation callback; an overlay that expired server-side is
 * transparently re-created from the staged list and offered again.
 */
export async function applyToBase(
  client: ApiClient,
  state: WhatIfBoardState,
  confirm: (journalPreview: string[]) => boolean,
): Promise<WhatIfBoardState> {
  if (!state.overlay) {
    return { ...state, notice: "nothing staged" };
  }
  if (!confirm(applyPreview(state))) {
    return { ...state, notice: "apply cancelled" };
  }
  try {
    const result = await client.applyWhatIf(state.overlay.id);
    return {
      staged: [],
      overlay: null,
      baseVerdicts: state.baseVerdicts,
      baseStats: result.stats,
      notice: `applied ${state.staged.length} mutation(s)`,
    };
  } catch (err) {
    if (err instanceof ApiError && err.status === 404) {
      // overlay expired server-side: re-create from the staged list
      const fresh = await evaluateStaged(client, { ...state, overlay: null });
      return { ...fresh, notice: "overlay expired; re-created from staged list" };
    }
    throw err;
  }
}
