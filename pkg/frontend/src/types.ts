// Response shapes of the decision-support service. The client renders these
// verbatim; it never computes probabilities or decisions on its own.

export interface CaseSummary {
  case_id: string;
  tier: 'hard' | 'medium' | 'easy';
  probability?: number;
  fields: Record<string, number>;
}

export interface CasesResponse {
  cases: CaseSummary[];
  guidance: string;
}

export interface PredictResponse {
  probability: number;
  decision: 0 | 1;
  model: string;
  threshold: number;
}

export interface WhatIfResponse {
  baseline_probability: number;
  modified_probability: number;
  baseline_decision: 0 | 1;
  modified_decision: 0 | 1;
  flipped: boolean;
  model: string;
  threshold: number;
}

export interface Attribution {
  feature: string;
  value: number;
  phi: number;
}

export interface GlobalImportanceEntry {
  feature: string;
  mean_drop: number;
  std_drop: number;
}

export interface ExplainResponse {
  attributions: Attribution[];
  base_value: number;
  fx: number;
  efficiency_residual: number;
  mode: string;
  global_importance: GlobalImportanceEntry[];
  model: string;
}

export interface LabelRecord {
  case_id?: string;
  call: 0 | 1;
  confidence: number;
  revision: number;
  timestamp?: number;
}

export interface LabelsResponse {
  rater: string;
  labels: LabelRecord[];
  history?: LabelRecord[];
  history_length?: number;
}

export interface SubmitLabelResponse {
  case_id: string;
  call: 0 | 1;
  confidence: number;
  revision: number;
  history_length: number;
}

export interface SessionResponse {
  rater: string;
  cursor: number;
}

export interface ServiceError {
  error: string;
  message?: string;
  violations?: string[];
}
