// UI state is a pure function of the last server payload plus in-flight
// optimistic decisions; rebuilding from the same payloads reproduces the
// same state (hard refresh safe).

import type { CandidateRow, CandidatesPayload, Decision, RetrainReport } from "./types.js";

export const PAGE_SIZE = 50;

export interface AppState {
  payload: CandidatesPayload | null;
  optimistic: Record<string, Decision>;
  page: number;
  banner: string | null; // network failure: retry prompt
  error: string | null; // server rejection, surfaced verbatim
  retraining: boolean;
  report: RetrainReport | null;
}

export function initialState(): AppState {
  return {
    payload: null,
    optimistic: {},
    page: 0,
    banner: null,
    error: null,
    retraining: false,
    report: null,
  };
}

export function withPayload(state: AppState, payload: CandidatesPayload): AppState {
  return { ...state, payload, banner: null };
}

export function withNetworkFailure(state: AppState, message: string): AppState {
  return { ...state, banner: message };
}

export function withServerError(state: AppState, message: string | null): AppState {
  return { ...state, error: message };
}

export function withOptimisticDecision(
  state: AppState,
  term: string,
  decision: Decision,
): AppState {
  return { ...state, optimistic: { ...state.optimistic, [term]: decision }, error: null };
}

/** The server's reply wins over whatever the optimistic entry guessed. */
export function reconcileAnnotation(
  state: AppState,
  term: string,
  decision: Decision,
  revision: number,
): AppState {
  const optimistic = { ...state.optimistic };
  delete optimistic[term];
  if (!state.payload) return { ...state, optimistic };
  const candidates = state.payload.candidates.map((row) =>
    row.term === term ? { ...row, decision } : row,
  );
  return { ...state, optimistic, payload: { ...state.payload, candidates, revision } };
}

/** Drop the optimistic entry without applying it (request failed). */
export function rollbackOptimistic(state: AppState, term: string): AppState {
  const optimistic = { ...state.optimistic };
  delete optimistic[term];
  return { ...state, optimistic };
}

export function withRetraining(state: AppState, retraining: boolean): AppState {
  return { ...state, retraining };
}

export function withReport(
  state: AppState,
  report: RetrainReport,
  revision?: number,
): AppState {
  const payload =
    state.payload && revision !== undefined ? { ...state.payload, revision } : state.payload;
  return { ...state, payload, report, retraining: false };
}

export function effectiveDecision(state: AppState, row: CandidateRow): Decision | null {
  return state.optimistic[row.term] ?? row.decision;
}

/** Rows sorted by |coefficient| descending, as the table contract requires. */
export function sortedRows(state: AppState): CandidateRow[] {
  if (!state.payload) return [];
  return [...state.payload.candidates].sort(
    (a, b) => Math.abs(b.coefficient) - Math.abs(a.coefficient) || a.term.localeCompare(b.term),
  );
}

export function pageCount(state: AppState): number {
  return Math.max(1, Math.ceil(sortedRows(state).length / PAGE_SIZE));
}

export function visibleRows(state: AppState): CandidateRow[] {
  const start = state.page * PAGE_SIZE;
  return sortedRows(state).slice(start, start + PAGE_SIZE);
}

export function withPage(state: AppState, page: number): AppState {
  const clamped = Math.min(Math.max(page, 0), pageCount(state) - 1);
  return { ...state, page: clamped };
}

export function decidedCount(state: AppState): number {
  return sortedRows(state).filter((row) => effectiveDecision(state, row) !== null).length;
}

export function causalTermsReady(state: AppState): number {
  return sortedRows(state).filter((row) => {
    const decision = effectiveDecision(state, row);
    return decision?.causal && (decision.antonyms.length > 0 || row.antonym_candidates.length > 0);
  }).length;
}
