/** Pure view-model builders: service payload in, render-ready rows out.
 *
 * No DOM, no network, no state. Counts and statuses are copied from the
 * response fields, never derived a second time, so what the user sees is
 * exactly what the service computed.
 */

import { ApiError } from "./api.js";
import type { BinEdge, GeoDoc, ScenarioDoc, SolutionDoc, UfValue } from "./types.js";

export interface SummaryRow {
  t: number;
  deletedLines: number;
  violatedZones: number;
  scenarioStops: number;
  analyzedLines: number;
}

export function summaryRow(scn: ScenarioDoc): SummaryRow {
  return {
    t: scn.t,
    deletedLines: scn.deleted_lines.length,
    violatedZones: scn.violated.length,
    scenarioStops: scn.v_s.length,
    analyzedLines: scn.analyzed.length,
  };
}

export interface LineRow {
  id: string;
  pRos: number;
  status: "kept" | "deleted";
}

export type LineSort = "id" | "p_ros" | "status";

export function lineTable(scn: ScenarioDoc, sort: LineSort = "p_ros"): LineRow[] {
  const deleted = new Set(scn.deleted_lines);
  const rows: LineRow[] = scn.analyzed.map((id) => ({
    id,
    pRos: scn.p_ros[id] ?? 0,
    status: deleted.has(id) ? "deleted" : "kept",
  }));
  rows.sort((a, b) => {
    if (sort === "p_ros" && a.pRos !== b.pRos) return a.pRos - b.pRos;
    if (sort === "status" && a.status !== b.status) return a.status === "deleted" ? -1 : 1;
    return a.id < b.id ? -1 : a.id > b.id ? 1 : 0;
  });
  return rows;
}

export interface ZoneRow {
  id: string;
  uf: UfValue;
  violated: boolean;
}

export function zoneTable(scn: ScenarioDoc): ZoneRow[] {
  const violated = new Set(scn.violated);
  return Object.keys(scn.uf)
    .sort()
    .map((id) => ({ id, uf: scn.uf[id] as UfValue, violated: violated.has(id) }));
}

export interface HistogramBar {
  label: string;
  count: number;
  /** Share of the tallest bar, for widths; 0 when the histogram is empty. */
  frac: number;
}

function edgeLabel(edge: BinEdge): string {
  if (edge === "unreachable") return "unreachable";
  return Number.isInteger(edge) ? String(edge) : edge.toFixed(3).replace(/0+$/, "").replace(/\.$/, "");
}

export function histogramBars(hist: [BinEdge, number][]): HistogramBar[] {
  const top = hist.reduce((m, [, count]) => Math.max(m, count), 0);
  return hist.map(([edge, count]) => ({
    label: edgeLabel(edge),
    count,
    frac: top === 0 ? 0 : count / top,
  }));
}

export interface MapPoint {
  id: string;
  kind: "stop" | "zone";
  x: number;
  y: number;
  status: string;
  /** CSS class list, e.g. "stop scenario_removed". */
  cls: string;
  title: string;
}

export function mapPoints(geo: GeoDoc): MapPoint[] {
  return geo.features.map((f) => {
    const { kind, id, status, uf } = f.properties;
    const title = uf === undefined ? `${id}: ${status}` : `${id}: ${status}, slack ${uf}`;
    return {
      id,
      kind,
      x: f.geometry.coordinates[0],
      y: f.geometry.coordinates[1],
      status,
      cls: `${kind} ${status}`,
      title,
    };
  });
}

export interface ViewBox {
  x: number;
  y: number;
  w: number;
  h: number;
}

export function mapViewBox(points: { x: number; y: number }[], padFrac = 0.08): ViewBox {
  if (points.length === 0) return { x: 0, y: 0, w: 1, h: 1 };
  let xMin = Infinity;
  let xMax = -Infinity;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const p of points) {
    xMin = Math.min(xMin, p.x);
    xMax = Math.max(xMax, p.x);
    yMin = Math.min(yMin, p.y);
    yMax = Math.max(yMax, p.y);
  }
  const pad = Math.max(xMax - xMin, yMax - yMin, 1) * padFrac;
  return {
    x: xMin - pad,
    y: yMin - pad,
    w: xMax - xMin + 2 * pad,
    h: yMax - yMin + 2 * pad,
  };
}

export interface CompareRow {
  t: number;
  deletedLines: number;
  violatedZones: number;
}

export function compareRows(scenarios: ScenarioDoc[]): CompareRow[] {
  return scenarios
    .slice()
    .sort((a, b) => a.t - b.t)
    .map((scn) => ({
      t: scn.t,
      deletedLines: scn.deleted_lines.length,
      violatedZones: scn.violated.length,
    }));
}

/** Comparison needs at least two thresholds; the hint disables the control. */
export function compareHint(thresholds: string[]): string | null {
  return thresholds.length >= 2 ? null : "enter at least two thresholds, e.g. 0.1,0.3,0.5";
}

export interface SolveSummary {
  proof: string;
  twt: number | null;
  keptCount: number | null;
  nodes: number;
  detail: string;
}

export function solveSummary(doc: SolutionDoc): SolveSummary {
  const sol = doc.solution;
  const detail =
    sol === null
      ? doc.infeasible_zone
        ? `no candidate stop for zone ${doc.infeasible_zone}`
        : "proven infeasible"
      : `lower bound ${doc.lower_bound ?? "none"}, seed ${doc.seed}`;
  return {
    proof: doc.proof,
    twt: sol?.twt ?? null,
    keptCount: sol ? sol.kept.length : null,
    nodes: doc.nodes_explored,
    detail,
  };
}

export interface Banner {
  kind: "error" | "retry";
  message: string;
  /** True when previously fetched rows stay on screen behind the banner. */
  keepCached: boolean;
}

export function errorBanner(err: unknown, hasCachedRows: boolean): Banner {
  if (err instanceof ApiError) {
    return { kind: "error", message: err.message, keepCached: hasCachedRows };
  }
  const msg = err instanceof Error ? err.message : String(err);
  return {
    kind: "retry",
    message: `service unreachable (${msg})`,
    keepCached: hasCachedRows,
  };
}
