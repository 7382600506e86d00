/** Dashboard wiring: store + renderers + controls. */

import { ServiceClient } from "./api.js";
import { DEMO_DOC } from "./demo.js";
import {
  mountMap,
  renderBanner,
  renderCompare,
  renderHistogram,
  renderLineTable,
  renderSolveSummary,
  renderSummary,
  renderZoneTable,
} from "./dom.js";
import { DashboardStore } from "./state.js";
import {
  compareHint,
  compareRows,
  histogramBars,
  lineTable,
  mapPoints,
  mapViewBox,
  solveSummary,
  summaryRow,
  zoneTable,
  type LineSort,
} from "./views.js";

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

function main(): void {
  // same-origin by default (e.g. osdnp serve --ui); ?api=http://host:port overrides
  const apiBase = new URLSearchParams(window.location.search).get("api") ?? "";
  const client = new ServiceClient({ baseUrl: apiBase });
  const store = new DashboardStore(client);
  let lineSort: LineSort = "p_ros";
  let compareThresholds: string[] = [];

  const slider = byId<HTMLInputElement>("threshold");
  const sliderValue = byId<HTMLSpanElement>("threshold-value");
  const minSize = byId<HTMLInputElement>("min-line-size");
  const solutionInput = byId<HTMLInputElement>("solution-id");
  const instanceInput = byId<HTMLInputElement>("instance-id");
  const compareInput = byId<HTMLInputElement>("compare-list");
  const map = mountMap(byId("map"));

  function render(): void {
    const state = store.getState();
    document.body.classList.toggle("busy", state.busy);
    renderBanner(byId("banner"), state.banner, () => void store.refreshScenario());
    renderSolveSummary(byId("solve-summary"), state.solution ? solveSummary(state.solution) : null);
    renderSummary(byId("summary"), state.scenario ? summaryRow(state.scenario) : null);
    if (state.scenario) {
      renderLineTable(
        byId("line-table"),
        lineTable(state.scenario, lineSort),
        (key) => {
          lineSort = key;
          render();
        },
        (id) => store.hover(id),
      );
      renderZoneTable(byId("zone-table"), zoneTable(state.scenario));
      renderHistogram(byId("uf-hist"), histogramBars(state.scenario.histograms.uf), "zone slack");
      renderHistogram(
        byId("p-ros-hist"),
        histogramBars(state.scenario.histograms.p_ros),
        "line survival share",
      );
    }
    if (state.geo) {
      const points = mapPoints(state.geo);
      map.update(points, mapViewBox(points), state.hovered);
    }
    renderCompare(byId("compare"), compareRows(state.compare), compareHint(compareThresholds));
  }

  store.subscribe(render);

  slider.addEventListener("input", () => {
    const t = (Number(slider.value) / 100).toFixed(2);
    sliderValue.textContent = t;
    store.setThreshold(t);
  });
  minSize.addEventListener("change", () => {
    store.setMinLineSize(Math.max(0, Number(minSize.value) || 0));
  });
  byId<HTMLButtonElement>("load-solution").addEventListener("click", () => {
    const sid = solutionInput.value.trim();
    if (sid) void store.loadSolution(sid);
  });
  byId<HTMLButtonElement>("solve-defaults").addEventListener("click", () => {
    const iid = instanceInput.value.trim();
    if (!iid) return;
    if (window.confirm(`Start a solve with default settings for instance ${iid}?`)) {
      void store.solveWithDefaults(iid);
    }
  });
  byId<HTMLButtonElement>("load-demo").addEventListener("click", () => {
    void store.ingestAndSolve(DEMO_DOC);
  });
  byId<HTMLButtonElement>("compare-run").addEventListener("click", () => {
    compareThresholds = compareInput.value
      .split(",")
      .map((s) => s.trim())
      .filter((s) => s.length > 0);
    render();
    void store.compareAt(compareThresholds);
  });

  render();
}

main();
