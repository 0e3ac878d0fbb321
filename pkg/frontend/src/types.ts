/** Payload shapes of the relex HTTP API, mirrored verbatim. */

export interface Breakdown {
  sr: number;
  cr: number;
  alpha: number;
  score: number;
}

export interface ResultItem {
  entity1: string;
  entity1_label: string;
  entity2: string;
  entity2_label: string;
  relationship_type: string;
  metadata: Record<string, string>;
  label: string;
  explanation: string;
  backend_id: string;
  breakdown: Breakdown;
}

export interface ExploreFailure {
  entity1: string;
  entity2: string;
  error: string;
}

export interface ExploreResponse {
  status: string;
  results: ResultItem[];
  failures: ExploreFailure[];
}

export interface ContextDraft {
  search_history: string[];
  expertise: string;
  interests: string[];
}

export interface ExploreRequest {
  entity1?: string;
  entity2?: string;
  context: ContextDraft;
  alpha?: number;
  k: number;
}

export interface EntityHit {
  id: string;
  label: string;
}

export interface BaselineResponse {
  found: boolean;
  explanation: string | null;
  path_length?: number;
}

export type FacetCounts = Record<string, number>;
