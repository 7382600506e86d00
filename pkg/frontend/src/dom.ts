/** DOM renderers for the view models. No framework, no dependencies.
 *
 * Each renderer replaces the children of its container; the map keeps its
 * own pan/zoom transform across renders.
 */

import type {
  Banner,
  CompareRow,
  HistogramBar,
  LineRow,
  MapPoint,
  SolveSummary,
  SummaryRow,
  ViewBox,
  ZoneRow,
} from "./views.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderSummary(container: HTMLElement, row: SummaryRow | null): void {
  container.replaceChildren();
  if (row === null) {
    container.append(el("p", "hint", "load a solution to see scenario numbers"));
    return;
  }
  const cells: [string, string][] = [
    ["threshold", String(row.t)],
    ["deleted lines", String(row.deletedLines)],
    ["violated zones", String(row.violatedZones)],
    ["stops in scenario", String(row.scenarioStops)],
    ["analyzed lines", String(row.analyzedLines)],
  ];
  for (const [label, value] of cells) {
    const card = el("div", "card");
    card.append(el("div", "card-value", value), el("div", "card-label", label));
    container.append(card);
  }
}

export function renderSolveSummary(container: HTMLElement, summary: SolveSummary | null): void {
  container.replaceChildren();
  if (summary === null) return;
  const twt = summary.twt === null ? "none" : String(summary.twt);
  const kept = summary.keptCount === null ? "-" : String(summary.keptCount);
  container.append(
    el(
      "span",
      `proof proof-${summary.proof}`,
      `${summary.proof}: twt ${twt}, ${kept} stops kept, ${summary.nodes} nodes (${summary.detail})`,
    ),
  );
}

export function renderLineTable(
  container: HTMLElement,
  rows: LineRow[],
  onSort: (key: "id" | "p_ros" | "status") => void,
  onHover: (id: string | null) => void,
): void {
  container.replaceChildren();
  if (rows.length === 0) {
    container.append(el("p", "hint", "no lines pass the minimum size filter"));
    return;
  }
  const table = el("table", "lines");
  const head = el("tr");
  for (const key of ["id", "p_ros", "status"] as const) {
    const th = el("th", undefined, key);
    th.addEventListener("click", () => onSort(key));
    head.append(th);
  }
  table.append(head);
  for (const row of rows) {
    const tr = el("tr", `line-${row.status}`);
    tr.dataset["id"] = row.id;
    tr.addEventListener("mouseenter", () => onHover(row.id));
    tr.addEventListener("mouseleave", () => onHover(null));
    tr.append(
      el("td", undefined, row.id),
      el("td", "num", row.pRos.toFixed(3)),
      el("td", undefined, row.status),
    );
    table.append(tr);
  }
  container.append(table);
}

export function renderZoneTable(container: HTMLElement, rows: ZoneRow[]): void {
  container.replaceChildren();
  if (rows.length === 0) return;
  const table = el("table", "zones");
  const head = el("tr");
  head.append(el("th", undefined, "zone"), el("th", undefined, "slack"), el("th", undefined, "state"));
  table.append(head);
  for (const row of rows) {
    const tr = el("tr", row.violated ? "zone-violated" : "zone-ok");
    tr.append(
      el("td", undefined, row.id),
      el("td", "num", row.uf === "neg_inf" ? "unreachable" : String(row.uf)),
      el("td", undefined, row.violated ? "violated" : "ok"),
    );
    table.append(tr);
  }
  container.append(table);
}

export function renderHistogram(container: HTMLElement, bars: HistogramBar[], title: string): void {
  container.replaceChildren();
  container.append(el("h3", undefined, title));
  if (bars.length === 0) {
    container.append(el("p", "hint", "empty"));
    return;
  }
  const chart = el("div", "chart");
  for (const bar of bars) {
    const rowEl = el("div", "bar-row");
    const track = el("div", "bar-track");
    const fill = el("div", "bar-fill");
    fill.style.width = `${Math.round(bar.frac * 100)}%`;
    track.append(fill);
    rowEl.append(el("span", "bar-label", bar.label), track, el("span", "bar-count", String(bar.count)));
    chart.append(rowEl);
  }
  container.append(chart);
}

export function renderCompare(
  container: HTMLElement,
  rows: CompareRow[],
  hint: string | null,
): void {
  container.replaceChildren();
  if (hint !== null) {
    container.append(el("p", "hint", hint));
    return;
  }
  if (rows.length === 0) return;
  const table = el("table", "compare");
  const head = el("tr");
  head.append(
    el("th", undefined, "t"),
    el("th", undefined, "deleted lines"),
    el("th", undefined, "violated zones"),
  );
  table.append(head);
  for (const row of rows) {
    const tr = el("tr");
    tr.append(
      el("td", "num", String(row.t)),
      el("td", "num", String(row.deletedLines)),
      el("td", "num", String(row.violatedZones)),
    );
    table.append(tr);
  }
  container.append(table);
}

export function renderBanner(
  container: HTMLElement,
  banner: Banner | null,
  onRetry: () => void,
): void {
  container.replaceChildren();
  if (banner === null) return;
  const box = el("div", `banner banner-${banner.kind}`);
  box.append(el("span", undefined, banner.message));
  if (banner.kind === "retry") {
    const btn = el("button", undefined, "retry");
    btn.addEventListener("click", onRetry);
    box.append(btn);
    if (banner.keepCached) box.append(el("span", "hint", "showing last loaded data"));
  }
  container.append(box);
}

export interface MapHandle {
  update(points: MapPoint[], viewBox: ViewBox, hovered: string | null): void;
}

/** SVG map with wheel zoom and drag pan; planar coordinates as-is. */
export function mountMap(container: HTMLElement): MapHandle {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("class", "map");
  container.replaceChildren(svg);
  let box: ViewBox = { x: 0, y: 0, w: 1, h: 1 };
  let userBox: ViewBox | null = null; // sticky pan/zoom, reset on data change
  let dragging = false;
  let lastX = 0;
  let lastY = 0;

  function apply(): void {
    const b = userBox ?? box;
    svg.setAttribute("viewBox", `${b.x} ${b.y} ${b.w} ${b.h}`);
  }

  svg.addEventListener("wheel", (ev) => {
    ev.preventDefault();
    const b = userBox ?? box;
    const factor = ev.deltaY > 0 ? 1.2 : 1 / 1.2;
    const cx = b.x + b.w / 2;
    const cy = b.y + b.h / 2;
    userBox = {
      x: cx - (b.w * factor) / 2,
      y: cy - (b.h * factor) / 2,
      w: b.w * factor,
      h: b.h * factor,
    };
    apply();
  });
  svg.addEventListener("pointerdown", (ev) => {
    dragging = true;
    lastX = ev.clientX;
    lastY = ev.clientY;
    svg.setPointerCapture(ev.pointerId);
  });
  svg.addEventListener("pointermove", (ev) => {
    if (!dragging) return;
    const b = userBox ?? box;
    const rect = svg.getBoundingClientRect();
    const scale = b.w / Math.max(rect.width, 1);
    userBox = {
      x: b.x - (ev.clientX - lastX) * scale,
      y: b.y - (ev.clientY - lastY) * scale,
      w: b.w,
      h: b.h,
    };
    lastX = ev.clientX;
    lastY = ev.clientY;
    apply();
  });
  svg.addEventListener("pointerup", () => {
    dragging = false;
  });

  return {
    update(points: MapPoint[], viewBox: ViewBox, hovered: string | null): void {
      if (viewBox.x !== box.x || viewBox.y !== box.y || viewBox.w !== box.w || viewBox.h !== box.h) {
        box = viewBox;
        userBox = null;
      }
      svg.replaceChildren();
      const r = Math.max(box.w, box.h) / 80;
      for (const p of points) {
        const node = document.createElementNS(SVG_NS, p.kind === "stop" ? "circle" : "rect");
        if (p.kind === "stop") {
          node.setAttribute("cx", String(p.x));
          node.setAttribute("cy", String(p.y));
          node.setAttribute("r", String(p.id === hovered ? r * 1.6 : r));
        } else {
          const side = (p.id === hovered ? 3.2 : 2) * r;
          node.setAttribute("x", String(p.x - side / 2));
          node.setAttribute("y", String(p.y - side / 2));
          node.setAttribute("width", String(side));
          node.setAttribute("height", String(side));
        }
        node.setAttribute("class", p.cls + (p.id === hovered ? " hovered" : ""));
        const title = document.createElementNS(SVG_NS, "title");
        title.textContent = p.title;
        node.append(title);
        svg.append(node);
      }
      apply();
    },
  };
}
