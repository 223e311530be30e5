// Payload shapes of the annotation service JSON API. The UI mirrors these
// exactly and never recomputes scores or coefficients client-side.

export interface MatchEvidence {
  term: string;
  doc_id: string;
  matched_doc_id: string;
  matched_term: string;
  score: number;
  doc_text: string;
  matched_doc_text: string;
}

export interface Decision {
  causal: boolean;
  antonyms: string[];
}

export interface CandidateRow {
  term: string;
  coefficient: number;
  best_match: MatchEvidence | null;
  predicted_causal: boolean;
  antonym_candidates: string[];
  decision: Decision | null;
}

export interface CandidatesPayload {
  session_id: string;
  dataset: string;
  revision: number;
  candidates: CandidateRow[];
}

export interface AnnotationReply {
  session_id: string;
  revision: number;
  term: string;
  decision: Decision;
}

export interface CoefficientDelta {
  term: string;
  before: number;
  after: number;
  delta: number;
}

export interface RetrainReport {
  dataset: string;
  orig_accuracy: number;
  ctf_accuracy: number | null;
  n_train: number;
  n_counterfactuals: number;
  n_causal_terms: number;
  seed: number;
  config_hash: string;
  coefficient_deltas: CoefficientDelta[];
}

export interface RetrainReply {
  revision: number;
  report: RetrainReport;
}
