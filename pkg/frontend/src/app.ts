// DOM-free controller: holds the state, talks to the API client, and asks
// the host to re-render after every transition. main.ts supplies the DOM
// side; tests supply a scripted fetch.

import { ApiClient, ApiError, BusyError } from "./api.js";
import {
  AppState,
  effectiveDecision,
  initialState,
  reconcileAnnotation,
  rollbackOptimistic,
  sortedRows,
  withNetworkFailure,
  withOptimisticDecision,
  withPage,
  withPayload,
  withReport,
  withRetraining,
  withServerError,
} from "./state.js";
import type { Decision } from "./types.js";

export class AnnotationApp {
  state: AppState = initialState();
  private retrainInFlight = false;

  constructor(
    readonly api: ApiClient,
    readonly onRender: (state: AppState) => void,
  ) {}

  private set(state: AppState): void {
    this.state = state;
    this.onRender(state);
  }

  async refresh(): Promise<void> {
    try {
      const payload = await this.api.candidates();
      this.set(withPayload(this.state, payload));
    } catch (err) {
      this.set(withNetworkFailure(this.state, `could not reach the service: ${String(err)}`));
    }
  }

  /** Optimistically apply a decision, then reconcile with the server's answer. */
  async submitDecision(term: string, decision: Decision): Promise<void> {
    this.set(withOptimisticDecision(this.state, term, decision));
    try {
      const reply = await this.api.submitAnnotation(term, decision);
      this.set(reconcileAnnotation(this.state, reply.term, reply.decision, reply.revision));
    } catch (err) {
      const rolledBack = rollbackOptimistic(this.state, term);
      if (err instanceof ApiError) {
        this.set(withServerError(rolledBack, err.message)); // server's words, verbatim
      } else {
        this.set(withNetworkFailure(rolledBack, `annotation failed: ${String(err)}`));
      }
    }
  }

  markCausal(term: string): Promise<void> {
    const row = sortedRows(this.state).find((r) => r.term === term);
    if (!row) return Promise.resolve();
    const current = effectiveDecision(this.state, row);
    const antonyms =
      current?.causal && current.antonyms.length > 0
        ? current.antonyms
        : row.antonym_candidates.slice(0, 1);
    return this.submitDecision(term, { causal: true, antonyms });
  }

  markNonCausal(term: string): Promise<void> {
    return this.submitDecision(term, { causal: false, antonyms: [] });
  }

  toggleAntonym(term: string, antonym: string): Promise<void> {
    const row = sortedRows(this.state).find((r) => r.term === term);
    if (!row) return Promise.resolve();
    const current = effectiveDecision(this.state, row);
    const chosen = new Set(current?.antonyms ?? []);
    if (chosen.has(antonym)) {
      chosen.delete(antonym);
    } else {
      chosen.add(antonym);
    }
    return this.submitDecision(term, { causal: true, antonyms: [...chosen].sort() });
  }

  /** At most one retrain request is in flight at a time. */
  async retrain(seed = 7): Promise<void> {
    if (this.retrainInFlight) return;
    this.retrainInFlight = true;
    this.set(withRetraining(this.state, true));
    try {
      const reply = await this.api.retrain(seed);
      this.set(withReport(this.state, reply.report, reply.revision));
    } catch (err) {
      const idle = withRetraining(this.state, false);
      if (err instanceof BusyError) {
        this.set(withServerError(idle, err.message));
      } else if (err instanceof ApiError) {
        this.set(withServerError(idle, err.message));
      } else {
        this.set(withNetworkFailure(idle, `retrain failed: ${String(err)}`));
      }
    } finally {
      this.retrainInFlight = false;
    }
  }

  async loadLastReport(): Promise<void> {
    try {
      const reply = await this.api.lastReport();
      this.set(withReport(this.state, reply.report));
    } catch {
      // no report yet: the dashboard shows its empty state
    }
  }

  changePage(delta: number): void {
    this.set(withPage(this.state, this.state.page + delta));
  }

  dismissError(): void {
    this.set(withServerError(this.state, null));
  }
}
