/** Curve geometry: maps report knots to SVG coordinates.
 *
 * Pure functions only; polylines pass through every knot exactly (no
 * smoothing, no resampling), so each rendered point is traceable to a
 * report field.  An optional log scale on the n axis helps with wide
 * probable domains.
 */

import type { DesignReport, Knot } from "./types.js";

export interface CurveGeometry {
  width: number;
  height: number;
  logScale: boolean;
  nMin: number;
  nMax: number;
}

export function geometryFor(
  report: DesignReport,
  width = 640,
  height = 360,
  logScale = false,
): CurveGeometry {
  const xs: number[] = [];
  for (const key of ["f_star", "f_tilde"] as const) {
    for (const [n] of report.curves[key] ?? []) xs.push(n);
  }
  const [lo, hi] = report.sssd.probable_domain;
  xs.push(Math.max(lo, 1), hi);
  if (report.recommendation) xs.push(report.recommendation.n);
  const nMin = Math.max(Math.min(...xs), logScale ? 1e-9 : 0);
  const nMax = Math.max(...xs);
  return { width, height, logScale, nMin, nMax };
}

export function xPixel(geom: CurveGeometry, n: number): number {
  const { nMin, nMax, width, logScale } = geom;
  if (logScale) {
    const span = Math.log(nMax) - Math.log(nMin);
    return ((Math.log(n) - Math.log(nMin)) / span) * width;
  }
  return ((n - nMin) / (nMax - nMin)) * width;
}

export function yPixel(geom: CurveGeometry, p: number): number {
  return (1 - p) * geom.height;
}

/** SVG polyline "points" attribute through the exact knots. */
export function polylinePoints(geom: CurveGeometry, knots: Knot[]): string {
  return knots
    .map(([n, p]) => `${xPixel(geom, n)},${yPixel(geom, p)}`)
    .join(" ");
}

export interface CurveView {
  fStar: string;
  fTilde: string;
  probableBand: { x1: number; x2: number };
  targetPowerY: number | null;
  anchor: { x: number; y: number } | null;
  recommendationX: number | null;
}

export function buildCurveView(report: DesignReport, geom: CurveGeometry): CurveView {
  const [lo, hi] = report.sssd.probable_domain;
  const s2 = report.stage_two;
  const target = report.config.test.target_power ?? null;
  return {
    fStar: polylinePoints(geom, report.curves.f_star ?? []),
    fTilde: polylinePoints(geom, report.curves.f_tilde ?? []),
    probableBand: {
      x1: xPixel(geom, Math.max(lo, geom.nMin)),
      x2: xPixel(geom, Math.min(hi, geom.nMax)),
    },
    targetPowerY: target === null ? null : yPixel(geom, target),
    anchor:
      s2 === null
        ? null
        : { x: xPixel(geom, s2.mu_tilde), y: yPixel(geom, s2.gamma_tilde) },
    recommendationX: report.recommendation
      ? xPixel(geom, report.recommendation.n)
      : null,
  };
}
