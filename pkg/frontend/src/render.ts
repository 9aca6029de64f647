/**
 * Per-figure SVG renderers.
 *
 * fig2a  heatmaps of log-negativity over (lambda, t), one panel per step
 *        count, with an optional enhancement boundary from a t=1 reference
 *        column.
 * fig2b  log-negativity vs t cross-sections at fixed lambda.
 * fig2c  success probability vs t (log axis).
 * fig3   dual-axis trend: maximum entanglement and its probability vs k.
 * fig4   contour panels of log-negativity, probability, non-Gaussianity
 *        with the maximum-entanglement locus overlaid.
 * fig5   replacement/addition/subtraction comparison panels.
 *
 * The t axis always spans [0, 1] with dashed markers at the exact
 * endpoints; data stays inside the clamp domain it was generated on.
 */

import { contours } from "d3-contour";

import type { MeasureRow, TrendRow } from "./csv.js";
import {
  Grid,
  LocusPoint,
  MeasureField,
  isReferenceColumn,
  locusOfMaxima,
  pivotGrid,
  seriesByProtocol,
  uniqueK,
  uniqueLambda,
} from "./model.js";
import {
  PROTOCOL_STYLE,
  Scale,
  SERIES_COLORS,
  SvgBuilder,
  decadeTicks,
  fmtTick,
  linearScale,
  log10Scale,
  niceTicks,
  viridis,
} from "./svg.js";

export interface NamedInput {
  source: string;
  rows: MeasureRow[];
}

export interface RenderResult {
  svg: string;
  /** side-channel for tests: plotted fig4 locus, exact grid points */
  locus?: LocusPoint[];
}

export const FIGURE_IDS = ["fig2a", "fig2b", "fig2c", "fig3", "fig4", "fig5"] as const;
export type FigureId = (typeof FIGURE_IDS)[number];

interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

const AXIS = "#333333";
const GRID_LINE = "#dddddd";
const ANCHOR = "#888888";

function drawFrame(svg: SvgBuilder, box: Box): void {
  svg.rect(box.x, box.y, box.w, box.h, "none", ` stroke="${AXIS}" stroke-width="1"`);
}

function drawXAxis(svg: SvgBuilder, box: Box, scale: Scale, ticks: number[], label: string): void {
  for (const tick of ticks) {
    const x = scale(tick);
    if (x < box.x - 0.5 || x > box.x + box.w + 0.5) continue;
    svg.line(x, box.y + box.h, x, box.y + box.h + 4, AXIS);
    svg.text(x, box.y + box.h + 16, fmtTick(tick), ' text-anchor="middle" font-size="10"');
  }
  svg.text(
    box.x + box.w / 2,
    box.y + box.h + 32,
    label,
    ' text-anchor="middle" font-size="11"',
  );
}

function drawYAxis(
  svg: SvgBuilder,
  box: Box,
  scale: Scale,
  ticks: number[],
  label: string,
  side: "left" | "right" = "left",
  color = AXIS,
): void {
  const edge = side === "left" ? box.x : box.x + box.w;
  const direction = side === "left" ? -1 : 1;
  for (const tick of ticks) {
    const y = scale(tick);
    if (y < box.y - 0.5 || y > box.y + box.h + 0.5) continue;
    svg.line(edge, y, edge + 4 * direction, y, color);
    svg.text(
      edge + 7 * direction,
      y + 3,
      fmtTick(tick),
      ` text-anchor="${side === "left" ? "end" : "start"}" font-size="10" fill="${color}"`,
    );
  }
  const lx = side === "left" ? box.x - 42 : box.x + box.w + 46;
  svg.raw(
    `<text x="${lx}" y="${box.y + box.h / 2}" text-anchor="middle" font-size="11" fill="${color}" ` +
      `transform="rotate(-90 ${lx} ${box.y + box.h / 2})">${label}</text>`,
  );
}

/** Dashed markers at the exact endpoints t=0 and t=1 (analytic anchors). */
function drawEndpointAnchors(svg: SvgBuilder, box: Box, scale: Scale): void {
  for (const t of [0.0, 1.0]) {
    const x = scale(t);
    svg.line(x, box.y, x, box.y + box.h, ANCHOR, ' stroke-dasharray="3,3" stroke-width="1"');
  }
}

function finiteValues(grid: Grid): number[] {
  return grid.values.flat().filter((v): v is number => v !== null && Number.isFinite(v));
}

function heatmapPanel(
  svg: SvgBuilder,
  box: Box,
  grid: Grid,
  title: string,
  vmin: number,
  vmax: number,
  xScale: Scale,
  yScale: Scale,
): void {
  const span = vmax - vmin || 1;
  const dt = grid.ts.length > 1 ? grid.ts[1] - grid.ts[0] : 0.02;
  const dl = grid.lambdas.length > 1 ? grid.lambdas[1] - grid.lambdas[0] : 0.05;
  grid.values.forEach((rowValues, li) => {
    rowValues.forEach((value, ti) => {
      if (value === null) return;
      const x0 = xScale(grid.ts[ti] - dt / 2);
      const x1 = xScale(grid.ts[ti] + dt / 2);
      const y0 = yScale(grid.lambdas[li] + dl / 2);
      const y1 = yScale(grid.lambdas[li] - dl / 2);
      svg.rect(x0, y0, x1 - x0, y1 - y0, viridis((value - vmin) / span));
    });
  });
  drawFrame(svg, box);
  svg.text(box.x + box.w / 2, box.y - 6, title, ' text-anchor="middle" font-size="11"');
}

function contourOverlay(
  svg: SvgBuilder,
  grid: Grid,
  levels: number[],
  xScale: Scale,
  yScale: Scale,
  stroke: string,
): void {
  const width = grid.ts.length;
  const height = grid.lambdas.length;
  if (width < 2 || height < 2) return;
  const flat = new Array<number>(width * height);
  const finite = finiteValues(grid);
  const floor = Math.min(...finite);
  grid.values.forEach((rowValues, li) => {
    rowValues.forEach((value, ti) => {
      flat[li * width + ti] = value === null ? floor : value;
    });
  });
  const dt = grid.ts[1] - grid.ts[0];
  const dl = grid.lambdas[1] - grid.lambdas[0];
  const toT = (i: number) => grid.ts[0] + (i - 0.5) * dt;
  const toLambda = (j: number) => grid.lambdas[0] + (j - 0.5) * dl;
  const generator = contours().size([width, height]).thresholds(levels);
  for (const contour of generator(flat)) {
    const pieces: string[] = [];
    for (const polygon of contour.coordinates) {
      for (const ring of polygon) {
        ring.forEach(([i, j], index) => {
          pieces.push(
            `${index === 0 ? "M" : "L"}${Math.round(xScale(toT(i)) * 100) / 100},` +
              `${Math.round(yScale(toLambda(j)) * 100) / 100}`,
          );
        });
        pieces.push("Z");
      }
    }
    if (pieces.length > 0) {
      svg.path(pieces.join(""), stroke, "none", ' stroke-width="0.8" opacity="0.7"');
    }
  }
}

function colorbar(
  svg: SvgBuilder,
  box: Box,
  vmin: number,
  vmax: number,
  label: string,
): void {
  const steps = 64;
  for (let i = 0; i < steps; i += 1) {
    const y = box.y + box.h - ((i + 1) / steps) * box.h;
    svg.rect(box.x, y, box.w, box.h / steps + 0.5, viridis(i / (steps - 1)));
  }
  drawFrame(svg, box);
  svg.text(box.x + box.w / 2, box.y - 6, label, ' text-anchor="middle" font-size="10"');
  svg.text(box.x + box.w + 4, box.y + box.h, fmtTick(vmin), ' font-size="9"');
  svg.text(box.x + box.w + 4, box.y + 8, fmtTick(vmax), ' font-size="9"');
}

function polylineSeries(
  svg: SvgBuilder,
  points: { t: number; value: number | null }[],
  xScale: Scale,
  yScale: Scale,
  stroke: string,
  extra = "",
): void {
  let run: [number, number][] = [];
  const flush = () => {
    if (run.length > 1) svg.polyline(run, stroke, ` stroke-width="1.6"${extra}`);
    run = [];
  };
  for (const point of points) {
    if (point.value === null || !Number.isFinite(point.value)) {
      flush();
      continue;
    }
    run.push([xScale(point.t), yScale(point.value)]);
  }
  flush();
}

// ---------------------------------------------------------------------------
// figure layouts
// ---------------------------------------------------------------------------

function renderFig2a(inputs: NamedInput[]): RenderResult {
  const referenceInput = inputs.find((input) => isReferenceColumn(input.rows));
  const panels = inputs.filter((input) => input !== referenceInput);
  if (panels.length === 0) throw new Error("fig2a needs sweep grids over (lambda, t)");
  const grids = panels.map((input) => ({
    k: uniqueK(input.rows, input.source),
    grid: pivotGrid(input.rows, "logNegativity"),
  }));
  const reference = referenceInput
    ? new Map(referenceInput.rows.map((r) => [r.lambda, r.logNegativity]))
    : null;
  const all = grids.flatMap(({ grid }) => finiteValues(grid));
  const vmin = Math.min(...all);
  const vmax = Math.max(...all);

  const panelW = 240;
  const panelH = 260;
  const svg = new SvgBuilder(80 + grids.length * (panelW + 26) + 70, panelH + 90);
  grids.forEach(({ k, grid }, index) => {
    const box: Box = { x: 62 + index * (panelW + 26), y: 42, w: panelW, h: panelH };
    const xScale = linearScale([0, 1], [box.x, box.x + box.w]);
    const lambdaLo = grid.lambdas[0];
    const lambdaHi = grid.lambdas[grid.lambdas.length - 1];
    const yScale = linearScale([lambdaLo, lambdaHi], [box.y + box.h, box.y]);
    heatmapPanel(svg, box, grid, `k = ${k} operations`, vmin, vmax, xScale, yScale);
    drawEndpointAnchors(svg, box, xScale);
    if (reference) {
      // boundary of the region outperforming the unprocessed input
      const gap: Grid = {
        lambdas: grid.lambdas,
        ts: grid.ts,
        values: grid.values.map((rowValues, li) =>
          rowValues.map((value) => {
            const base = reference.get(grid.lambdas[li]);
            return value === null || base == null ? null : value - base;
          }),
        ),
      };
      contourOverlay(svg, gap, [0], xScale, yScale, "#ffffff");
    }
    drawXAxis(svg, box, xScale, niceTicks(0, 1, 6), "t (amplitude transmissivity)");
    if (index === 0) {
      drawYAxis(svg, box, yScale, niceTicks(lambdaLo, lambdaHi, 6), "lambda (initial squeezing)");
    }
  });
  const barBox: Box = { x: 62 + grids.length * (panelW + 26), y: 42, w: 14, h: panelH };
  colorbar(svg, barBox, vmin, vmax, "E_N");
  return { svg: svg.toString() };
}

function renderLineFamily(
  inputs: NamedInput[],
  field: MeasureField,
  yLabel: string,
  logY: boolean,
): RenderResult {
  const series = inputs.map((input) => ({
    k: uniqueK(input.rows, input.source),
    lambda: uniqueLambda(input.rows, input.source),
    points: [...input.rows]
      .sort((a, b) => a.t - b.t)
      .map((r) => ({ t: r.t, value: r[field] })),
  }));
  const values = series
    .flatMap((s) => s.points.map((p) => p.value))
    .filter((v): v is number => v !== null && Number.isFinite(v) && (!logY || v > 0));
  if (values.length === 0) throw new Error(`no plottable values for ${field}`);
  const box: Box = { x: 66, y: 30, w: 460, h: 300 };
  const svg = new SvgBuilder(720, 392);
  const xScale = linearScale([0, 1], [box.x, box.x + box.w]);
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const yScale = logY
    ? log10Scale([lo, hi], [box.y + box.h, box.y])
    : linearScale([0, hi * 1.05], [box.y + box.h, box.y]);
  drawFrame(svg, box);
  drawEndpointAnchors(svg, box, xScale);
  series.forEach((s, index) => {
    const color = SERIES_COLORS[index % SERIES_COLORS.length];
    const points = logY
      ? s.points.map((p) => ({ t: p.t, value: p.value !== null && p.value > 0 ? p.value : null }))
      : s.points;
    polylineSeries(svg, points, xScale, yScale, color);
    svg.line(box.x + box.w + 14, box.y + 14 + index * 16, box.x + box.w + 38, box.y + 14 + index * 16, color, ' stroke-width="2"');
    svg.text(box.x + box.w + 44, box.y + 18 + index * 16, `k = ${s.k}`, ' font-size="10"');
  });
  drawXAxis(svg, box, xScale, niceTicks(0, 1, 6), "t (amplitude transmissivity)");
  drawYAxis(
    svg,
    box,
    yScale,
    logY ? decadeTicks(lo, hi) : niceTicks(0, hi * 1.05, 6),
    yLabel,
  );
  svg.text(
    box.x,
    16,
    `lambda = ${series[0].lambda}`,
    ' font-size="11"',
  );
  return { svg: svg.toString() };
}

function renderFig3(rows: TrendRow[], slope: number | null): RenderResult {
  const box: Box = { x: 66, y: 30, w: 460, h: 300 };
  const svg = new SvgBuilder(720, 392);
  const ks = rows.map((r) => r.k);
  const xScale = linearScale([Math.min(...ks) - 0.5, Math.max(...ks) + 0.5], [box.x, box.x + box.w]);
  const eMax = Math.max(...rows.map((r) => r.eMax));
  const eScale = linearScale([0, eMax * 1.1], [box.y + box.h, box.y]);
  const ps = rows.map((r) => r.pAtMax).filter((p) => p > 0);
  const pScale = log10Scale([Math.min(...ps), Math.max(...ps)], [box.y + box.h, box.y]);
  drawFrame(svg, box);
  polylineSeries(
    svg,
    rows.map((r) => ({ t: r.k, value: r.eMax })),
    xScale,
    eScale,
    "#c02020",
  );
  rows.forEach((r) => svg.circle(xScale(r.k), eScale(r.eMax), 2.6, "#c02020"));
  polylineSeries(
    svg,
    rows.map((r) => ({ t: r.k, value: r.pAtMax > 0 ? r.pAtMax : null })),
    xScale,
    pScale,
    "#3060c0",
    ' stroke-dasharray="8,5"',
  );
  rows.forEach((r) => r.pAtMax > 0 && svg.circle(xScale(r.k), pScale(r.pAtMax), 2.6, "#3060c0"));
  drawXAxis(svg, box, xScale, ks, "number of operations k");
  drawYAxis(svg, box, eScale, niceTicks(0, eMax * 1.1, 6), "maximum E_N (bits)", "left", "#c02020");
  drawYAxis(
    svg,
    box,
    pScale,
    decadeTicks(Math.min(...ps), Math.max(...ps)),
    "success probability at t_max",
    "right",
    "#3060c0",
  );
  if (slope !== null) {
    svg.text(
      box.x + 8,
      box.y + 14,
      `fitted slope of log10 P per operation: ${slope.toFixed(4)}`,
      ' font-size="10"',
    );
  }
  return { svg: svg.toString() };
}

function renderFig4(input: NamedInput): RenderResult {
  const fields: { field: MeasureField; label: string; log: boolean }[] = [
    { field: "logNegativity", label: "E_N (bits)", log: false },
    { field: "probability", label: "success probability (log10)", log: true },
    { field: "nonGaussianity", label: "non-Gaussianity (bits)", log: false },
  ];
  const negativityGrid = pivotGrid(input.rows, "logNegativity");
  const locus = locusOfMaxima(negativityGrid);
  const panelW = 240;
  const panelH = 260;
  const svg = new SvgBuilder(80 + fields.length * (panelW + 58), panelH + 90);
  fields.forEach(({ field, label, log }, index) => {
    const grid = pivotGrid(input.rows, field);
    const shown: Grid = log
      ? {
          ...grid,
          values: grid.values.map((rowValues) =>
            rowValues.map((v) => (v !== null && v > 0 ? Math.log10(v) : null)),
          ),
        }
      : grid;
    const finite = finiteValues(shown);
    const vmin = Math.min(...finite);
    const vmax = Math.max(...finite);
    const box: Box = { x: 62 + index * (panelW + 58), y: 42, w: panelW, h: panelH };
    const xScale = linearScale([0, 1], [box.x, box.x + box.w]);
    const lambdaLo = grid.lambdas[0];
    const lambdaHi = grid.lambdas[grid.lambdas.length - 1];
    const yScale = linearScale([lambdaLo, lambdaHi], [box.y + box.h, box.y]);
    heatmapPanel(svg, box, shown, label, vmin, vmax, xScale, yScale);
    contourOverlay(svg, shown, niceTicks(vmin, vmax, 7), xScale, yScale, "#404040");
    drawEndpointAnchors(svg, box, xScale);
    svg.polyline(
      locus.map((p) => [xScale(p.t), yScale(p.lambda)]),
      "#00a020",
      ' stroke-width="2.2"',
    );
    drawXAxis(svg, box, xScale, niceTicks(0, 1, 6), "t (amplitude transmissivity)");
    if (index === 0) {
      drawYAxis(svg, box, yScale, niceTicks(lambdaLo, lambdaHi, 6), "lambda (initial squeezing)");
    }
    colorbar(svg, { x: box.x + box.w + 8, y: box.y, w: 12, h: box.h }, vmin, vmax, "");
  });
  return { svg: svg.toString(), locus };
}

function renderFig5(input: NamedInput): RenderResult {
  const lambda = uniqueLambda(input.rows, input.source);
  const panels: { field: MeasureField; label: string; log: boolean }[] = [
    { field: "logNegativity", label: "E_N (bits)", log: false },
    { field: "probability", label: "success probability", log: true },
    { field: "rate", label: "entanglement rate", log: true },
  ];
  const panelW = 250;
  const panelH = 240;
  const svg = new SvgBuilder(72 + panels.length * (panelW + 52), panelH + 118);
  panels.forEach(({ field, label, log }, index) => {
    const box: Box = { x: 58 + index * (panelW + 52), y: 36, w: panelW, h: panelH };
    const xScale = linearScale([0, 1], [box.x, box.x + box.w]);
    const byProtocol = seriesByProtocol(input.rows, field);
    const values = [...byProtocol.values()]
      .flat()
      .map((p) => p.value)
      .filter((v): v is number => v !== null && Number.isFinite(v) && (!log || v > 0));
    if (values.length === 0) throw new Error(`no plottable values for ${field}`);
    const lo = Math.min(...values);
    const hi = Math.max(...values);
    const yScale = log
      ? log10Scale([lo, hi], [box.y + box.h, box.y])
      : linearScale([0, hi * 1.05], [box.y + box.h, box.y]);
    drawFrame(svg, box);
    drawEndpointAnchors(svg, box, xScale);
    for (const [protocol, points] of byProtocol) {
      const style = PROTOCOL_STYLE[protocol] ?? { dash: "", label: protocol };
      const clean = log
        ? points.map((p) => ({ t: p.t, value: p.value !== null && p.value > 0 ? p.value : null }))
        : points;
      polylineSeries(svg, clean, xScale, yScale, "#202020", style.dash);
    }
    drawXAxis(svg, box, xScale, niceTicks(0, 1, 6), "t (amplitude transmissivity)");
    drawYAxis(
      svg,
      box,
      yScale,
      log ? decadeTicks(lo, hi) : niceTicks(0, hi * 1.05, 6),
      label,
    );
  });
  Object.values(PROTOCOL_STYLE).forEach((style, index) => {
    const y = panelH + 86 + index * 14;
    svg.line(58, y, 94, y, "#202020", ` stroke-width="1.6"${style.dash}`);
    svg.text(100, y + 4, style.label, ' font-size="10"');
  });
  svg.text(58, panelH + 72, `lambda = ${lambda}, four-step protocols`, ' font-size="11"');
  return { svg: svg.toString() };
}

export function renderFigure(
  figure: FigureId,
  inputs: NamedInput[],
  trend?: { rows: TrendRow[]; slope: number | null },
): RenderResult {
  switch (figure) {
    case "fig2a":
      return renderFig2a(inputs);
    case "fig2b":
      return renderLineFamily(inputs, "logNegativity", "E_N (bits)", false);
    case "fig2c":
      return renderLineFamily(inputs, "probability", "success probability", true);
    case "fig3":
      if (!trend) throw new Error("fig3 needs a trend CSV");
      return renderFig3(trend.rows, trend.slope);
    case "fig4":
      if (inputs.length !== 1) throw new Error("fig4 takes exactly one sweep CSV");
      return renderFig4(inputs[0]);
    case "fig5":
      if (inputs.length !== 1) throw new Error("fig5 takes exactly one comparison CSV");
      return renderFig5(inputs[0]);
  }
}
