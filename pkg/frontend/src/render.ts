// Pure HTML-string renderers; main.ts assigns the output to the DOM and
// handles events by delegation on data-* attributes.

import {
  AppState,
  causalTermsReady,
  effectiveDecision,
  pageCount,
  visibleRows,
} from "./state.js";
import type { CandidateRow } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function evidenceHtml(row: CandidateRow): string {
  const match = row.best_match;
  if (!match) return `<span class="muted">no opposite match</span>`;
  return `
    <details class="evidence">
      <summary>score ${match.score.toFixed(3)}</summary>
      <p class="doc">${escapeHtml(match.doc_text)}</p>
      <p class="doc matched">${escapeHtml(match.matched_doc_text)}
        <em>(matched on “${escapeHtml(match.matched_term)}”)</em></p>
    </details>`;
}

function antonymChips(row: CandidateRow, chosen: Set<string>): string {
  if (row.antonym_candidates.length === 0) {
    return `<span class="muted">no antonym candidates</span>`;
  }
  return row.antonym_candidates
    .map((antonym) => {
      const on = chosen.has(antonym);
      return `<button class="chip${on ? " on" : ""}" data-action="toggle-antonym"
        data-term="${escapeHtml(row.term)}" data-antonym="${escapeHtml(antonym)}">
        ${escapeHtml(antonym)}</button>`;
    })
    .join(" ");
}

function rowHtml(state: AppState, row: CandidateRow): string {
  const decision = effectiveDecision(state, row);
  const decided = decision !== null;
  const classes = [
    decided ? "decided" : "undecided",
    decision?.causal ? "causal" : "",
    state.optimistic[row.term] ? "pending" : "",
  ]
    .filter(Boolean)
    .join(" ");
  const chosen = new Set(decision?.antonyms ?? []);
  const badge = row.predicted_causal ? `<span class="badge">predicted causal</span>` : "";
  const decisionLabel = !decided ? "undecided" : decision!.causal ? "causal" : "not causal";
  return `
    <tr class="${classes}" data-term="${escapeHtml(row.term)}">
      <td class="term">${escapeHtml(row.term)} ${badge}</td>
      <td class="coef">${row.coefficient.toFixed(3)}</td>
      <td>${evidenceHtml(row)}</td>
      <td class="decision" data-state="${decisionLabel}">
        <button data-action="mark-causal" data-term="${escapeHtml(row.term)}"
          ${decision?.causal ? "disabled" : ""}>causal</button>
        <button data-action="mark-noncausal" data-term="${escapeHtml(row.term)}"
          ${decided && !decision!.causal ? "disabled" : ""}>not causal</button>
        <span class="state">${decisionLabel}</span>
      </td>
      <td class="antonyms">${decision?.causal ? antonymChips(row, chosen) : ""}</td>
    </tr>`;
}

export function renderBanner(state: AppState): string {
  if (state.banner) {
    return `<div class="banner error-banner">${escapeHtml(state.banner)}
      <button data-action="retry">retry</button></div>`;
  }
  if (state.error) {
    return `<div class="banner reject-banner">${escapeHtml(state.error)}
      <button data-action="dismiss-error">dismiss</button></div>`;
  }
  return "";
}

export function renderTable(state: AppState): string {
  const rows = visibleRows(state);
  if (!state.payload || state.payload.candidates.length === 0) {
    return `<p class="empty">No candidate terms yet. Train a model and compute matches first.</p>`;
  }
  const pages = pageCount(state);
  const pager =
    pages > 1
      ? `<nav class="pager">
          <button data-action="prev-page" ${state.page === 0 ? "disabled" : ""}>prev</button>
          <span>page ${state.page + 1} / ${pages}</span>
          <button data-action="next-page" ${state.page >= pages - 1 ? "disabled" : ""}>next</button>
        </nav>`
      : "";
  return `
    <table class="candidates">
      <thead>
        <tr><th>term</th><th>coefficient</th><th>closest opposite match</th>
            <th>decision</th><th>antonyms</th></tr>
      </thead>
      <tbody>${rows.map((row) => rowHtml(state, row)).join("")}</tbody>
    </table>
    ${pager}`;
}

export function renderDashboard(state: AppState): string {
  const ready = causalTermsReady(state);
  const retrain = `<button data-action="retrain"
    ${state.retraining || ready === 0 ? "disabled" : ""}>
    ${state.retraining ? "retraining…" : "retrain"}</button>
    <span class="status">${state.retraining ? "retrain in progress" : `${ready} causal terms ready`}</span>`;
  if (!state.report) {
    return `<section class="dashboard">${retrain}<p class="muted">no retrain yet</p></section>`;
  }
  const report = state.report;
  const ctf = report.ctf_accuracy === null ? "n/a" : report.ctf_accuracy.toFixed(3);
  const deltas = report.coefficient_deltas
    .map(
      (d) => `<li><code>${escapeHtml(d.term)}</code>
        ${d.before.toFixed(3)} → ${d.after.toFixed(3)}
        <span class="delta">(${d.delta >= 0 ? "+" : ""}${d.delta.toFixed(3)})</span></li>`,
    )
    .join("");
  return `
    <section class="dashboard">
      ${retrain}
      <div class="accuracy-pair">
        <div class="metric"><span class="label">Orig</span>
          <span class="value orig-acc">${report.orig_accuracy.toFixed(3)}</span></div>
        <div class="metric"><span class="label">CTF</span>
          <span class="value ctf-acc">${ctf}</span></div>
      </div>
      <p class="muted">${report.n_counterfactuals} counterfactuals from
        ${report.n_causal_terms} causal terms (train size ${report.n_train},
        seed ${report.seed})</p>
      <ul class="deltas">${deltas}</ul>
    </section>`;
}

export function renderApp(state: AppState): string {
  const dataset = state.payload ? escapeHtml(state.payload.dataset) : "…";
  return `
    ${renderBanner(state)}
    <header><h1>causal term annotation</h1>
      <p class="muted">dataset ${dataset}, revision ${state.payload?.revision ?? 0}</p></header>
    ${renderDashboard(state)}
    ${renderTable(state)}`;
}
