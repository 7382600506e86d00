/** Service response shapes, mirrored field for field.
 *
 * Every number shown in the dashboard comes straight from these payloads;
 * nothing is recomputed client-side.
 */

/** Zone slack; "neg_inf" marks a zone left without any reachable stop. */
export type UfValue = number | "neg_inf";

/** Histogram bin edge; the trailing "unreachable" bucket counts neg_inf. */
export type BinEdge = number | "unreachable";

export interface JobProgress {
  nodes_explored: number;
  incumbent: number | null;
  lower_bound: number | null;
}

export interface Job {
  id: string;
  instance_id: string;
  overrides: Record<string, unknown>;
  state: "queued" | "running" | "done" | "failed";
  result: string | null;
  error: string | null;
  progress: JobProgress;
}

export interface SolutionBody {
  kept: string[];
  twt: number | null;
  delay: number | null;
  feasible: boolean;
  d_acc_sol: Record<string, number | null>;
  violations: { kind: string; subject: unknown; margin: number }[];
  params_echo: Record<string, unknown>;
  instance_hash: string;
}

export interface SolutionDoc {
  proof: string;
  lower_bound: number | null;
  pc_const: number;
  nodes_explored: number;
  wall_time: number;
  seed: number;
  root_bound: number | null;
  infeasible_zone: string | null;
  instance_id: string | null;
  overrides: Record<string, unknown>;
  solution: SolutionBody | null;
}

export interface ScenarioDoc {
  t: number;
  analyzed: string[];
  kept_lines: string[];
  deleted_lines: string[];
  v_s: string[];
  violated: string[];
  uf: Record<string, UfValue>;
  p_ros: Record<string, number>;
  histograms: {
    uf: [BinEdge, number][];
    p_ros: [BinEdge, number][];
  };
}

export interface GeoFeature {
  type: "Feature";
  geometry: { type: "Point"; coordinates: [number, number] };
  properties: {
    kind: "stop" | "zone";
    id: string;
    status: string;
    uf?: UfValue;
  };
}

export interface GeoDoc {
  type: "FeatureCollection";
  features: GeoFeature[];
}
