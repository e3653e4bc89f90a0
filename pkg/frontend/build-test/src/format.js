// Display formatting. Inequality is shown at the server-provided display
// scale (×1000); the raw index stays in tooltips and payloads.
export function fmtNumber(v, digits = 1) {
    if (v === null || v === undefined || !isFinite(v))
        return '–';
    return v.toFixed(digits);
}
export function fmtArea(v) {
    return `${Math.round(v).toLocaleString('en-US')} m²`;
}
export function scaledInequality(total, displayScale) {
    if (total === null)
        return '–';
    return (total * displayScale).toFixed(2);
}
export function fmtDelta(v) {
    const sign = v > 0 ? '+' : '';
    return `${sign}${Math.round(v).toLocaleString('en-US')} m²`;
}
export function fmtPercent(v) {
    if (v === null || !isFinite(v))
        return '–';
    return `${(100 * v).toFixed(1)}%`;
}
