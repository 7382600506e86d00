/** Dashboard state: one store, one source of truth.
 *
 * Slider moves are debounced and only ever hit the scenario endpoint. Every
 * response is cached by (solution, t, min_line_size); superseded in-flight
 * requests are aborted and their late results discarded by sequence number.
 */

import type { ServiceClient } from "./api.js";
import { errorBanner, type Banner } from "./views.js";
import type { GeoDoc, ScenarioDoc, SolutionDoc } from "./types.js";

export interface UiState {
  instanceId: string | null;
  solutionId: string | null;
  t: string;
  minLineSize: number;
  hovered: string | null;
  solution: SolutionDoc | null;
  scenario: ScenarioDoc | null;
  geo: GeoDoc | null;
  compare: ScenarioDoc[];
  banner: Banner | null;
  busy: boolean;
}

export type Listener = (state: UiState) => void;

const SCENARIO_DEBOUNCE_MS = 150;

export class DashboardStore {
  private state: UiState = {
    instanceId: null,
    solutionId: null,
    t: "0",
    minLineSize: 1,
    hovered: null,
    solution: null,
    scenario: null,
    geo: null,
    compare: [],
    banner: null,
    busy: false,
  };

  private listeners: Listener[] = [];
  private scenarioCache = new Map<string, ScenarioDoc>();
  private geoCache = new Map<string, GeoDoc>();
  private seq = 0;
  private inflight: AbortController | null = null;
  private debounceTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly client: ServiceClient,
    private readonly debounceMs: number = SCENARIO_DEBOUNCE_MS,
  ) {}

  getState(): UiState {
    return this.state;
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private set(patch: Partial<UiState>): void {
    this.state = { ...this.state, ...patch };
    for (const fn of this.listeners) fn(this.state);
  }

  private key(t: string, minLineSize: number): string {
    return `${this.state.solutionId}|${t}|${minLineSize}`;
  }

  hover(id: string | null): void {
    this.set({ hovered: id });
  }

  /** Slider path: debounced, scenario endpoint only, never a solve. */
  setThreshold(t: string): void {
    this.set({ t });
    if (this.debounceTimer !== null) clearTimeout(this.debounceTimer);
    this.debounceTimer = setTimeout(() => {
      this.debounceTimer = null;
      void this.refreshScenario();
    }, this.debounceMs);
  }

  setMinLineSize(n: number): void {
    this.set({ minLineSize: n });
    void this.refreshScenario();
  }

  async refreshScenario(): Promise<void> {
    const { solutionId, t, minLineSize } = this.state;
    if (solutionId === null) return;
    const key = this.key(t, minLineSize);
    const cached = this.scenarioCache.get(key);
    const cachedGeo = this.geoCache.get(key);
    if (cached && cachedGeo) {
      this.set({ scenario: cached, geo: cachedGeo, banner: null });
      return;
    }
    const mySeq = ++this.seq;
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    try {
      const scenario = await this.client.getScenario(solutionId, t, minLineSize, controller.signal);
      const geo = await this.client.getGeojson(solutionId, t, minLineSize, controller.signal);
      if (mySeq !== this.seq) return; // superseded while in flight
      this.scenarioCache.set(key, scenario);
      this.geoCache.set(key, geo);
      this.set({ scenario, geo, banner: null });
    } catch (err) {
      if (mySeq !== this.seq) return;
      if (err instanceof DOMException && err.name === "AbortError") return;
      this.set({ banner: errorBanner(err, this.state.scenario !== null) });
    }
  }

  async loadSolution(solutionId: string): Promise<void> {
    this.set({ busy: true, banner: null });
    try {
      const solution = await this.client.getSolution(solutionId);
      this.scenarioCache.clear();
      this.geoCache.clear();
      this.set({
        solutionId,
        instanceId: solution.instance_id,
        solution,
        scenario: null,
        geo: null,
        compare: [],
      });
      if (solution.solution !== null) await this.refreshScenario();
    } catch (err) {
      this.set({ banner: errorBanner(err, false) });
    } finally {
      this.set({ busy: false });
    }
  }

  /** Guarded button path: the only place the dashboard starts a solve. */
  async solveWithDefaults(instanceId: string): Promise<void> {
    this.set({ busy: true, banner: null, instanceId });
    try {
      const { id } = await this.client.startSolve(instanceId);
      const job = await this.client.waitForJob(id);
      if (job.state === "failed" || job.result === null) {
        this.set({ banner: { kind: "error", message: job.error ?? "solve failed", keepCached: false } });
        return;
      }
      await this.loadSolution(job.result);
    } catch (err) {
      this.set({ banner: errorBanner(err, this.state.scenario !== null) });
    } finally {
      this.set({ busy: false });
    }
  }

  async ingestAndSolve(doc: unknown): Promise<void> {
    this.set({ busy: true, banner: null });
    try {
      const { id } = await this.client.ingestInstance(doc);
      await this.solveWithDefaults(id);
    } catch (err) {
      this.set({ banner: errorBanner(err, this.state.scenario !== null), busy: false });
    }
  }

  /** Side-by-side comparison; reuses the same cache as the slider. */
  async compareAt(thresholds: string[]): Promise<void> {
    const { solutionId, minLineSize } = this.state;
    if (solutionId === null || thresholds.length < 2) return;
    const rows: ScenarioDoc[] = [];
    try {
      for (const t of thresholds) {
        const key = this.key(t, minLineSize);
        let scn = this.scenarioCache.get(key);
        if (!scn) {
          scn = await this.client.getScenario(solutionId, t, minLineSize);
          this.scenarioCache.set(key, scn);
        }
        rows.push(scn);
      }
      this.set({ compare: rows, banner: null });
    } catch (err) {
      // keep whatever rows were already on screen
      this.set({ banner: errorBanner(err, this.state.compare.length > 0) });
    }
  }
}
