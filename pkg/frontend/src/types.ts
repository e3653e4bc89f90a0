// Payload shapes of the fairplan HTTP API. The dashboard never computes
// fairness numbers itself; everything rendered comes from these bodies.

export type FloorAreas = Record<string, number>;

export type Feature = {
  type: 'Feature';
  id: string;
  geometry: { type: 'Polygon'; coordinates: number[][][] };
  properties: { block_id: string; floors: number; floor_areas: FloorAreas };
};

export type DesignDoc = {
  schema_version: number;
  type: 'FeatureCollection';
  crs_note: string;
  revision: number;
  features: Feature[];
};

export type DesignResponse = { revision: number; design: DesignDoc };

export type GroupStat = { count: number; mean: number; sd: number };

export type GroupStats = {
  per_group: Record<string, GroupStat>;
  total_count: number;
  global_mean: number;
};

export type GroupTerm = { between_term: number; within_term: number };

export type InequalityReport = {
  total: number;
  between: number;
  within: number;
  per_group: Record<string, GroupTerm>;
  alpha: number;
  display_scale: number;
};

export type SimulateResponse = {
  revision: number;
  result: {
    seed: number;
    allocated: number;
    assignments: Record<string, string | null>;
    realized_benefits: Record<string, number>;
    inequality: InequalityReport | null;
    group_stats: GroupStats | null;
    gamma: number;
    ipf_iterations: number;
  };
};

export type IndicatorsResponse = {
  revision: number;
  floor_areas: FloorAreas;
  site_area: number;
  total_capacity: number;
  residents: number;
  population: Record<string, { name: string; count: number; mean_preferences: Record<string, number> }>;
};

export type HeatmapEntry = {
  id?: string;
  block_id: string;
  occupancy: number;
  mean_benefit: number | null;
  relative_benefit: number | null;
};

export type HeatmapResponse = {
  revision: number;
  seed: number;
  global_mean_benefit: number;
  buildings: HeatmapEntry[];
  blocks: HeatmapEntry[];
};

export type BuildingDetail = {
  revision: number;
  id: string;
  block_id: string;
  floors: number;
  floor_areas: FloorAreas;
  footprint_area: number;
  capacity: number;
  accessibility: Record<string, number>;
  utility_per_type: Record<string, number>;
  occupants: number;
  benefit_distribution: number[];
  mean_benefit: number | null;
};

export type GroupDirection = 'increase' | 'decrease' | 'fixed' | 'free';

export type ConstraintsBody = {
  budget_fraction?: number;
  budget?: number;
  residential_change_fraction?: number;
  max_height_increase?: number;
  tau?: number;
  lambda?: number;
  group_directions?: Record<string, GroupDirection>;
};

export type RecommendationResult = {
  plan: {
    deltas: Record<string, FloorAreas>;
    predicted_inequality: number;
    predicted_group_benefits: Record<string, number>;
    objective_trace: number[];
    no_improvement: boolean;
  };
  attribution: {
    per_block: Record<string, number>;
    method: 'exact' | 'sampled';
    permutations_used: number;
    seed: number | null;
    residual: number;
  };
  blocks_ranked: string[];
  constraints: {
    budget: number;
    max_height_increase: number;
    residential_change_cap: number;
    group_directions: Record<string, GroupDirection>;
    tau: number;
    lambda: number;
  };
  soft_inequality_before: number;
  simulated_inequality_before: number | null;
  simulated_inequality_after: number | null;
  simulated_group_benefits_after: Record<string, number> | null;
  seed: number;
};

export type Job = {
  job_id: string;
  status: 'queued' | 'running' | 'done' | 'failed';
  result: RecommendationResult | null;
  error: { code: string; message: string } | null;
};

export type TimelineEntry = {
  revision: number;
  timestamp: string;
  label: string;
  parent_revision: number | null;
  seed: number;
  indicators: {
    total_inequality: number | null;
    mean_benefit: number | null;
    per_group_mean: Record<string, number>;
    floor_areas: FloorAreas;
  };
};

export type EditBody =
  | { action: 'add'; building: { id: string; block_id: string; footprint: number[][]; floors: number; floor_areas: FloorAreas } }
  | { action: 'modify'; building_id: string; changes: Partial<{ block_id: string; floors: number; floor_areas: FloorAreas; footprint: number[][] }> }
  | { action: 'delete'; building_id: string };

export type ApiErrorBody = { code: string; message: string; details: Record<string, unknown> };
