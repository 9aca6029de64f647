/**
 * Parsers for the simulator's CSV schemas.
 *
 * Measure files carry the fixed header
 * `protocol,k,lambda,t,log_negativity,probability,non_gaussianity,rate`;
 * trend files carry `k,t_max,e_max,p_at_max` plus a `#` footer with the
 * fitted slope. Lines starting with `#` are comments. All errors carry the
 * 1-based row number of the offending line.
 */

export const MEASURE_HEADER = [
  "protocol",
  "k",
  "lambda",
  "t",
  "log_negativity",
  "probability",
  "non_gaussianity",
  "rate",
] as const;

export const TREND_HEADER = ["k", "t_max", "e_max", "p_at_max"] as const;

export class ParseError extends Error {
  constructor(
    readonly source: string,
    readonly row: number,
    detail: string,
  ) {
    super(`${source}:${row}: ${detail}`);
    this.name = "ParseError";
  }
}

export interface MeasureRow {
  protocol: string;
  k: number;
  lambda: number;
  t: number;
  logNegativity: number | null;
  probability: number;
  nonGaussianity: number | null;
  rate: number | null;
}

export interface TrendRow {
  k: number;
  tMax: number;
  eMax: number;
  pAtMax: number;
}

interface Line {
  row: number;
  text: string;
}

function contentLines(text: string): { body: Line[]; comments: Line[] } {
  const body: Line[] = [];
  const comments: Line[] = [];
  text.split(/\r?\n/).forEach((raw, index) => {
    const line = { row: index + 1, text: raw };
    if (raw.trim() === "") return;
    (raw.startsWith("#") ? comments : body).push(line);
  });
  return { body, comments };
}

function number_(cell: string, source: string, row: number, column: string): number {
  const value = Number(cell);
  if (cell.trim() === "" || !Number.isFinite(value)) {
    throw new ParseError(source, row, `column '${column}' is not a finite number: '${cell}'`);
  }
  return value;
}

function optionalNumber(
  cell: string,
  source: string,
  row: number,
  column: string,
): number | null {
  if (cell === "") return null;
  return number_(cell, source, row, column);
}

export function parseMeasureCsv(text: string, source = "<memory>"): MeasureRow[] {
  const { body } = contentLines(text);
  if (body.length === 0) throw new ParseError(source, 1, "file is empty");
  if (body[0].text !== MEASURE_HEADER.join(",")) {
    throw new ParseError(source, body[0].row, `unexpected header '${body[0].text}'`);
  }
  const rows: MeasureRow[] = [];
  for (const line of body.slice(1)) {
    const cells = line.text.split(",");
    if (cells.length !== MEASURE_HEADER.length) {
      throw new ParseError(
        source,
        line.row,
        `expected ${MEASURE_HEADER.length} cells, got ${cells.length}`,
      );
    }
    if (cells[0] === "") {
      throw new ParseError(source, line.row, "column 'protocol' must not be empty");
    }
    rows.push({
      protocol: cells[0],
      k: number_(cells[1], source, line.row, "k"),
      lambda: number_(cells[2], source, line.row, "lambda"),
      t: number_(cells[3], source, line.row, "t"),
      logNegativity: optionalNumber(cells[4], source, line.row, "log_negativity"),
      probability: number_(cells[5], source, line.row, "probability"),
      nonGaussianity: optionalNumber(cells[6], source, line.row, "non_gaussianity"),
      rate: optionalNumber(cells[7], source, line.row, "rate"),
    });
  }
  if (rows.length === 0) throw new ParseError(source, body[0].row, "no data rows");
  return rows;
}

export function parseTrendCsv(
  text: string,
  source = "<memory>",
): { rows: TrendRow[]; slope: number | null } {
  const { body, comments } = contentLines(text);
  if (body.length === 0) throw new ParseError(source, 1, "file is empty");
  if (body[0].text !== TREND_HEADER.join(",")) {
    throw new ParseError(source, body[0].row, `unexpected header '${body[0].text}'`);
  }
  const rows: TrendRow[] = [];
  for (const line of body.slice(1)) {
    const cells = line.text.split(",");
    if (cells.length !== TREND_HEADER.length) {
      throw new ParseError(
        source,
        line.row,
        `expected ${TREND_HEADER.length} cells, got ${cells.length}`,
      );
    }
    rows.push({
      k: number_(cells[0], source, line.row, "k"),
      tMax: number_(cells[1], source, line.row, "t_max"),
      eMax: number_(cells[2], source, line.row, "e_max"),
      pAtMax: number_(cells[3], source, line.row, "p_at_max"),
    });
  }
  if (rows.length === 0) throw new ParseError(source, body[0].row, "no data rows");
  let slope: number | null = null;
  for (const comment of comments) {
    const match = /^#\s*slope\S*\s*=\s*(\S+)/.exec(comment.text);
    if (match) {
      const value = Number(match[1]);
      slope = Number.isFinite(value) ? value : null;
    }
  }
  return { rows, slope };
}
