// Payload shapes mirrored from the review service JSON. Field names stay
// snake_case so responses are usable without remapping.

export const RATING_TIERS = ["good", "ok", "not_good"] as const;
export type Tier = (typeof RATING_TIERS)[number];

export const RATING_CRITERIA = [
  "semantic_relevance",
  "spatial_accuracy",
  "coverage",
] as const;
export type CriterionKey = (typeof RATING_CRITERIA)[number];
export type CriterionValue = "pass" | "fail";
export type Criteria = Record<CriterionKey, CriterionValue>;

export interface PairSummary {
  record_id: string;
  object_id: string;
  query_id: string;
  text: string;
  affordance_phrase: string;
  object_class: string;
  status: string;
  tier: Tier | null;
  low_support: boolean;
  all_zero: boolean;
  refined_views: number[];
}

export interface PairList {
  pairs: PairSummary[];
  total: number;
}

export interface ViewPayload {
  view_id: number;
  width: number;
  height: number;
  image_url: string;
  has_contribution: boolean;
  refined: boolean;
  heatmap_b64: string | null;
  interaction_points: number[][];
}

export interface FusedPayload {
  values_b64: string;
  support_b64: string;
}

export interface SelectionPayload {
  best: number;
  challenge: number;
  all_zero: boolean;
}

export interface PairDetail extends PairSummary {
  criteria: Record<string, string> | null;
  rater_id: string | null;
  point_count: number;
  selection: SelectionPayload | null;
  contributing_views: number[];
  missing_views: number[];
  fused: FusedPayload;
  refined_fused: FusedPayload | null;
  views: ViewPayload[];
}

export interface RatingBody {
  rater_id: string;
  tier: Tier;
  criteria: Criteria;
}

export interface RefineBody {
  view_id: number;
  width: number;
  height: number;
  values_b64: string;
  rater_id: string | null;
}

export interface RefineResponse extends PairSummary {
  refined_fused: FusedPayload;
}

export interface StatsPayload {
  total: number;
  rated: number;
  unreviewed: number;
  tiers: Record<Tier, number>;
  tier_fractions: Record<Tier, number | null>;
  refined: number;
  splits: { train: number; test: number; excluded: number };
}
