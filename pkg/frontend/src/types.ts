/** Wire types mirroring the discovery service's JSON payloads. */

export type RelationKind = "direct" | "eventual" | "concurrent";

export const EXTENSION_RULES = ["df", "dp", "conc", "ef", "ep", "dc"] as const;
export type ExtensionRule = (typeof EXTENSION_RULES)[number];

export const RULE_LABELS: Record<ExtensionRule, string> = {
  df: "directly follows",
  dp: "directly precedes",
  conc: "concurrent",
  ef: "eventually follows",
  ep: "eventually precedes",
  dc: "direct context",
};

export interface PatternNodeDto {
  id: number;
  label: string;
}

export interface PatternRelationDto {
  from: number;
  to: number;
  kind: RelationKind;
}

export interface PatternDto {
  nodes: PatternNodeDto[];
  relations: PatternRelationDto[];
  foundational: string | null;
}

export interface InterestDto {
  cc: number;
  oi: number;
  cd: number;
  degenerate: string[];
}

export type InterestDimension = "cc" | "oi" | "cd";
export const INTEREST_DIMENSIONS: InterestDimension[] = ["cc", "oi", "cd"];

export interface CandidateDto {
  pattern: PatternDto;
  id: string;
  interest: InterestDto;
  front: boolean;
}

export interface IterationDto {
  index: number;
  candidates: CandidateDto[];
  front_ids: string[];
  selected_foundational_ids: string[];
  rules: string[];
  off_front_selections: string[];
  min_case_frequency: number | null;
}

export interface SessionSummaryDto {
  session_id: string;
  log_id: string;
  status: string;
  created_at: string;
  iteration: IterationDto;
}

export interface SessionDetailDto {
  session_id: string;
  log_id: string;
  status: string;
  created_at: string;
  config: Record<string, unknown>;
  iterations: IterationDto[];
}

export interface ExtendResponseDto {
  status: string;
  iteration: IterationDto | null;
}

export interface LogSummaryDto {
  log_id: string;
  n_cases: number;
  n_activities: number;
  n_events: number;
  n_variants: number;
  alphabet: string[];
  outcome_kind: string;
  warnings: string[];
}

export interface HistogramDto {
  count: number;
  mean: number | null;
  median: number | null;
  bin_edges: number[];
  bin_counts: number[];
}

export interface CohortHistogramsDto {
  in: HistogramDto;
  out: HistogramDto;
}

export interface CohortProportionsDto {
  in: Record<string, number>;
  out: Record<string, number>;
}

export interface DashboardDto {
  pattern: PatternDto;
  interest: InterestDto;
  n_in: number;
  n_out: number;
  categorical: Record<string, CohortProportionsDto>;
  numeric: Record<string, CohortHistogramsDto>;
  median_outcome_in: number | null;
  median_outcome_out: number | null;
  outcome_classes_in: Record<string, number> | null;
  outcome_classes_out: Record<string, number> | null;
  km_in: [number, number][] | null;
  km_out: [number, number][] | null;
  log_rank_stat: number | null;
  log_rank_p: number | null;
}

/** Short human-readable structure summary, e.g. "a -> b || c". */
export function patternSummary(pattern: PatternDto): string {
  if (pattern.nodes.length === 1) {
    return pattern.nodes[0]!.label;
  }
  const symbol: Record<RelationKind, string> = {
    direct: "->",
    eventual: "~>",
    concurrent: "||",
  };
  const byId = new Map(pattern.nodes.map((node) => [node.id, node.label]));
  return pattern.relations
    .map((rel) => `${byId.get(rel.from)} ${symbol[rel.kind]} ${byId.get(rel.to)}`)
    .join(", ");
}
