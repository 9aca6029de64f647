/**
 * Figure data assembly: grid pivots, per-protocol series, and the
 * maximum-entanglement locus. Everything here is a pure rearrangement of
 * parsed CSV rows; no physics is recomputed.
 */

import type { MeasureRow } from "./csv.js";

export interface Grid {
  lambdas: number[];
  ts: number[];
  /** values[lambdaIndex][tIndex]; null marks absent measures. */
  values: (number | null)[][];
}

export type MeasureField = "logNegativity" | "probability" | "nonGaussianity" | "rate";

export function pivotGrid(rows: MeasureRow[], field: MeasureField): Grid {
  const lambdas = [...new Set(rows.map((r) => r.lambda))].sort((a, b) => a - b);
  const ts = [...new Set(rows.map((r) => r.t))].sort((a, b) => a - b);
  const lambdaIndex = new Map(lambdas.map((v, i) => [v, i]));
  const tIndex = new Map(ts.map((v, i) => [v, i]));
  const values: (number | null)[][] = lambdas.map(() => ts.map(() => null));
  const seen = new Set<string>();
  for (const row of rows) {
    const key = `${row.lambda}|${row.t}`;
    if (seen.has(key)) {
      throw new Error(`duplicate grid point (lambda=${row.lambda}, t=${row.t})`);
    }
    seen.add(key);
    values[lambdaIndex.get(row.lambda)!][tIndex.get(row.t)!] = row[field];
  }
  return { lambdas, ts, values };
}

export interface LocusPoint {
  lambda: number;
  t: number;
}

/**
 * Per-lambda argmax of a grid: the exact plotted locus, computed from the
 * same data that feeds the panel. Rows without any finite value are
 * skipped; ties resolve to the lowest t (deterministic).
 */
export function locusOfMaxima(grid: Grid): LocusPoint[] {
  const points: LocusPoint[] = [];
  grid.values.forEach((rowValues, li) => {
    let best = -1;
    for (let ti = 0; ti < rowValues.length; ti += 1) {
      const v = rowValues[ti];
      if (v === null) continue;
      if (best === -1 || v > (rowValues[best] as number)) best = ti;
    }
    if (best >= 0) points.push({ lambda: grid.lambdas[li], t: grid.ts[best] });
  });
  return points;
}

export interface SeriesPoint {
  t: number;
  value: number | null;
}

export function seriesByProtocol(
  rows: MeasureRow[],
  field: MeasureField,
): Map<string, SeriesPoint[]> {
  const out = new Map<string, SeriesPoint[]>();
  for (const row of rows) {
    if (!out.has(row.protocol)) out.set(row.protocol, []);
    out.get(row.protocol)!.push({ t: row.t, value: row[field] });
  }
  for (const series of out.values()) series.sort((a, b) => a.t - b.t);
  return out;
}

/** The single lambda a cross-section file refers to; errors on mixtures. */
export function uniqueLambda(rows: MeasureRow[], source: string): number {
  const lambdas = new Set(rows.map((r) => r.lambda));
  if (lambdas.size !== 1) {
    throw new Error(`${source}: expected a single lambda, found ${lambdas.size}`);
  }
  return rows[0].lambda;
}

/** The single k of a sweep file; errors on mixtures. */
export function uniqueK(rows: MeasureRow[], source: string): number {
  const ks = new Set(rows.map((r) => r.k));
  if (ks.size !== 1) {
    throw new Error(`${source}: expected a single k, found ${ks.size}`);
  }
  return rows[0].k;
}

/** True when every row sits at the exact identity endpoint t = 1. */
export function isReferenceColumn(rows: MeasureRow[]): boolean {
  return rows.every((r) => r.t === 1.0);
}
