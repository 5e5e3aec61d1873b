/** Shapes of the service's JSON payloads. */

export interface TokenInfo {
  index: number;
  start: number;
  end: number;
  surface: string;
}

export interface EntityInfo {
  start_token: number;
  end_token: number;
  type: string;
}

export interface DocumentPayload {
  uid: string;
  text: string;
  tokens: TokenInfo[];
  sentences: [number, number][];
  entities: EntityInfo[];
  concept_matches: Record<string, [number, number][]>;
}

export interface ConceptElementInfo {
  kind: 'token' | 'regex';
  pattern: string;
}

export interface ConceptInfo {
  name: string;
  color_hint: number;
  elements: ConceptElementInfo[];
}

export interface Candidate {
  rule_id: string;
  rendering: string;
  score: number;
  coverage: number;
  dev_stats: { coverage: number; accuracy: number | null } | null;
}

export interface InteractionResponse {
  suggestion_token: string;
  candidates: Candidate[];
}

export interface FunctionInfo {
  rule_id: string;
  accepted_at: number;
  enabled: boolean;
  rendering: string;
}

export interface LfStats {
  rule_id: string;
  coverage: number;
  overlap: number;
  conflict: number;
  dev_accuracy: number | null;
  dev_correct: number;
  dev_incorrect: number;
}

export interface ModelStats {
  accuracy: number;
  precision: number;
  recall: number;
  f1: number;
  coverage: number;
  deltas: Partial<Record<'accuracy' | 'precision' | 'recall' | 'f1' | 'coverage', number>>;
}

export interface EndMetrics {
  split: string | null;
  accuracy?: number;
  precision?: number;
  recall?: number;
  f1?: number;
  n_train_covered: number;
  n_test?: number;
}

export interface Statistics {
  revision: number;
  n_functions: number;
  lf_stats: LfStats[];
  model_stats: ModelStats | null;
  end_metrics: EndMetrics | null;
}

export interface SpanInput {
  id: string;
  start_token: number;
  end_token: number;
  concept?: string | null;
}

export interface ApiError {
  code: string;
  message: string;
}
