/// <reference types="node" />
/** Recorded service responses for the corridor demo (see scripts/record_fixtures.py). */

import { readFileSync } from "node:fs";
import { join } from "node:path";

import type { GeoDoc, Job, ScenarioDoc, SolutionDoc } from "../src/types.js";

function load<T>(name: string): T {
  // cwd-relative so the loader works in both the node and jsdom environments
  const path = join(process.cwd(), "test", "fixtures", name);
  return JSON.parse(readFileSync(path, "utf8")) as T;
}

export const job = load<Job>("job.json");
export const solution = load<SolutionDoc>("solution.json");
export const scenarioT0 = load<ScenarioDoc>("scenario_t0.json");
export const scenarioT04 = load<ScenarioDoc>("scenario_t0_4.json");
export const scenarioT06 = load<ScenarioDoc>("scenario_t0_6.json");
export const sweep = load<ScenarioDoc[]>("sweep.json");
export const geojson = load<GeoDoc>("geojson.json");
export const geojsonT06 = load<GeoDoc>("geojson_t0_6.json");
