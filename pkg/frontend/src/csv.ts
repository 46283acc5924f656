/** Minimal CSV handling for the documented polepi schemas (no quoting, comma-separated). */

export class SchemaError extends Error {}

export interface Table {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string, label = "<csv>"): Table {
  const lines = text.split(/\r?\n/).filter((ln) => ln.trim().length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${label}: empty CSV`);
  }
  const header = lines[0].split(",").map((c) => c.trim());
  const rows = lines.slice(1).map((ln) => ln.split(",").map((c) => c.trim()));
  for (const row of rows) {
    if (row.length !== header.length) {
      throw new SchemaError(`${label}: row with ${row.length} cells, expected ${header.length}`);
    }
  }
  return { header, rows };
}

export function requireColumns(table: Table, needed: string[], label: string): Map<string, number> {
  const index = new Map<string, number>();
  table.header.forEach((name, i) => index.set(name, i));
  const missing = needed.filter((c) => !index.has(c));
  if (missing.length > 0) {
    throw new SchemaError(`${label}: missing columns: ${missing.join(", ")}`);
  }
  return index;
}

export function numericColumn(table: Table, index: Map<string, number>, name: string, label: string): number[] {
  const col = index.get(name)!;
  return table.rows.map((row, r) => {
    const value = Number(row[col]);
    if (Number.isNaN(value) && row[col] !== "nan") {
      throw new SchemaError(`${label}: non-numeric value '${row[col]}' in ${name} (row ${r + 2})`);
    }
    return value;
  });
}
