// Display formatting. Inequality is shown at the server-provided display
// scale (×1000); the raw index stays in tooltips and payloads.

export function fmtNumber(v: number | null | undefined, digits = 1): string {
  if (v === null || v === undefined || !isFinite(v)) return '–';
  return v.toFixed(digits);
}

export function fmtArea(v: number): string {
  return `${Math.round(v).toLocaleString('en-US')} m²`;
}

export function scaledInequality(total: number | null, displayScale: number): string {
  if (total === null) return '–';
  return (total * displayScale).toFixed(2);
}

export function fmtDelta(v: number): string {
  const sign = v > 0 ? '+' : '';
  return `${sign}${Math.round(v).toLocaleString('en-US')} m²`;
}

export function fmtPercent(v: number | null): string {
  if (v === null || !isFinite(v)) return '–';
  return `${(100 * v).toFixed(1)}%`;
}
