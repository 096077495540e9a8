/** DOM rendering. Every number shown comes straight off a report field;
 * no statistics happen here. */

import { buildCurveView, geometryFor, xPixel } from "./curves.js";
import type { DesignReport } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

function fmt(x: number, digits = 4): string {
  return Number.isInteger(x) ? String(x) : x.toFixed(digits);
}

export function renderSummary(report: DesignReport): HTMLElement {
  const root = el("div", { class: "summary" });
  const s = report.sssd;
  const rows: [string, string][] = [
    ["mean sample size", fmt(s.mu, 2)],
    ["sd", fmt(s.sigma, 2)],
    ["target length", fmt(s.l)],
    ["alpha", fmt(s.alpha)],
    ["stage", s.stage],
    ["classification", report.classification],
  ];
  if (report.recommendation) {
    rows.push(["recommended n per group", String(report.recommendation.n)]);
    rows.push(["p_tilde", fmt(report.recommendation.p_tilde)]);
  }
  const table = el("table", { class: "summary-table" });
  for (const [label, value] of rows) {
    const tr = el("tr");
    tr.appendChild(el("th", {}, label));
    const td = el("td", { "data-field": label.replace(/\s+/g, "-") }, value);
    tr.appendChild(td);
    table.appendChild(tr);
  }
  root.appendChild(table);

  const warnings = el("ul", { class: "warnings" });
  for (const w of report.warnings) {
    warnings.appendChild(el("li", { class: "warning" }, w));
  }
  root.appendChild(warnings);
  return root;
}

export interface RenderOptions {
  logScale?: boolean;
  width?: number;
  height?: number;
}

export function renderCurves(
  report: DesignReport,
  opts: RenderOptions = {},
): SVGElement {
  const geom = geometryFor(
    report,
    opts.width ?? 640,
    opts.height ?? 360,
    opts.logScale ?? false,
  );
  const view = buildCurveView(report, geom);
  const svg = svgEl("svg", {
    viewBox: `0 0 ${geom.width} ${geom.height}`,
    class: "curves",
    "data-log-scale": String(geom.logScale),
  });
  svg.appendChild(
    svgEl("rect", {
      class: "probable-band",
      x: String(Math.min(view.probableBand.x1, view.probableBand.x2)),
      width: String(Math.abs(view.probableBand.x2 - view.probableBand.x1)),
      y: "0",
      height: String(geom.height),
    }),
  );
  if (view.fStar) {
    svg.appendChild(
      svgEl("polyline", { class: "f-star", points: view.fStar, fill: "none" }),
    );
  }
  if (view.fTilde) {
    svg.appendChild(
      svgEl("polyline", { class: "f-tilde", points: view.fTilde, fill: "none" }),
    );
  }
  if (view.targetPowerY !== null) {
    svg.appendChild(
      svgEl("line", {
        class: "target-power",
        x1: "0",
        x2: String(geom.width),
        y1: String(view.targetPowerY),
        y2: String(view.targetPowerY),
      }),
    );
  }
  if (view.anchor) {
    svg.appendChild(
      svgEl("circle", {
        class: "anchor",
        cx: String(view.anchor.x),
        cy: String(view.anchor.y),
        r: "4",
      }),
    );
  }
  if (view.recommendationX !== null) {
    svg.appendChild(
      svgEl("line", {
        class: "recommendation-marker",
        "data-n": String(report.recommendation!.n),
        x1: String(view.recommendationX),
        x2: String(view.recommendationX),
        y1: "0",
        y2: String(geom.height),
      }),
    );
  }
  return svg;
}

export function renderReport(report: DesignReport, opts: RenderOptions = {}): HTMLElement {
  const root = el("div", { class: "report", "data-hash": report.config_hash });
  root.appendChild(renderSummary(report));
  root.appendChild(renderCurves(report, opts) as unknown as HTMLElement);
  return root;
}

/** Side-by-side comparison of saved scenarios (>= 2, deduplicated by hash). */
export function renderComparison(
  reports: DesignReport[],
  opts: RenderOptions = {},
): HTMLElement {
  const unique = new Map<string, DesignReport>();
  for (const r of reports) unique.set(r.config_hash, r);
  const distinct = [...unique.values()];
  const root = el("div", { class: "comparison" });
  if (distinct.length < 2) {
    root.setAttribute("data-disabled", "true");
    root.appendChild(
      el("p", { class: "comparison-hint" }, "save at least two scenarios to compare"),
    );
    return root;
  }
  // shared geometry across all scenarios so curves overlay honestly
  const geoms = distinct.map((r) =>
    geometryFor(r, opts.width ?? 640, opts.height ?? 360, opts.logScale ?? false),
  );
  const shared = {
    width: opts.width ?? 640,
    height: opts.height ?? 360,
    logScale: opts.logScale ?? false,
    nMin: Math.min(...geoms.map((g) => g.nMin)),
    nMax: Math.max(...geoms.map((g) => g.nMax)),
  };
  const svg = svgEl("svg", {
    viewBox: `0 0 ${shared.width} ${shared.height}`,
    class: "comparison-curves",
  });
  const list = el("ol", { class: "comparison-list" });
  distinct.forEach((r, i) => {
    const view = buildCurveView(r, shared);
    if (view.fTilde) {
      svg.appendChild(
        svgEl("polyline", {
          class: `f-tilde scenario-${i}`,
          "data-hash": r.config_hash,
          points: view.fTilde,
          fill: "none",
        }),
      );
    }
    if (r.recommendation) {
      svg.appendChild(
        svgEl("line", {
          class: `recommendation-marker scenario-${i}`,
          "data-hash": r.config_hash,
          "data-n": String(r.recommendation.n),
          x1: String(xPixel(shared, r.recommendation.n)),
          x2: String(xPixel(shared, r.recommendation.n)),
          y1: "0",
          y2: String(shared.height),
        }),
      );
      list.appendChild(
        el(
          "li",
          { "data-hash": r.config_hash },
          `${r.config_hash.slice(0, 12)}: n = ${r.recommendation.n}`,
        ),
      );
    }
  });
  root.appendChild(svg as unknown as HTMLElement);
  root.appendChild(list);
  return root;
}
