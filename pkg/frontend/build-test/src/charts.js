// SVG chart builders. Pure string functions so the contract tests can run
// them against recorded fixtures without a DOM; every rendered number is
// stamped into data-* attributes straight from the service payload.
import { functionColor } from './color.js';
import { fmtNumber } from './format.js';
const esc = (s) => s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/"/g, '&quot;');
function linearScale(domainMax, rangePx) {
    const d = domainMax > 0 ? domainMax : 1;
    return (v) => (v / d) * rangePx;
}
/** Per-type benefit means as bars with sd error bars and a global mean line. */
export function benefitChart(stats, width = 360, height = 180) {
    const groups = Object.keys(stats.per_group).sort();
    const pad = { left: 42, right: 10, top: 14, bottom: 38 };
    const plotW = width - pad.left - pad.right;
    const plotH = height - pad.top - pad.bottom;
    const maxVal = Math.max(1e-9, ...groups.map((g) => stats.per_group[g].mean + stats.per_group[g].sd), stats.global_mean);
    const y = linearScale(maxVal, plotH);
    const bw = plotW / Math.max(groups.length, 1);
    const parts = [];
    groups.forEach((g, i) => {
        const s = stats.per_group[g];
        const h = Math.max(0, y(s.mean));
        const x0 = pad.left + i * bw + bw * 0.18;
        const cx = pad.left + i * bw + bw * 0.5;
        parts.push(`<rect class="benefit-bar" data-group="${esc(g)}" data-mean="${s.mean}" data-sd="${s.sd}" ` +
            `data-count="${s.count}" x="${x0.toFixed(1)}" y="${(pad.top + plotH - h).toFixed(1)}" ` +
            `width="${(bw * 0.64).toFixed(1)}" height="${h.toFixed(1)}" fill="#4a90b8"/>`);
        const top = pad.top + plotH - y(s.mean + s.sd);
        const bot = pad.top + plotH - y(Math.max(0, s.mean - s.sd));
        parts.push(`<line class="benefit-err" data-group="${esc(g)}" x1="${cx.toFixed(1)}" x2="${cx.toFixed(1)}" ` +
            `y1="${top.toFixed(1)}" y2="${bot.toFixed(1)}" stroke="#1d3d4f" stroke-width="1.5"/>`);
        parts.push(`<text x="${cx.toFixed(1)}" y="${height - 22}" class="tick" text-anchor="middle" ` +
            `transform="rotate(30 ${cx.toFixed(1)} ${height - 22})">${esc(g)}</text>`);
    });
    const meanY = pad.top + plotH - y(stats.global_mean);
    parts.push(`<line class="global-mean" data-mean="${stats.global_mean}" x1="${pad.left}" ` +
        `x2="${width - pad.right}" y1="${meanY.toFixed(1)}" y2="${meanY.toFixed(1)}" ` +
        `stroke="#333" stroke-dasharray="4 3"/>`);
    parts.push(`<text x="${pad.left}" y="${Math.max(10, meanY - 4).toFixed(1)}" class="tick">mean ${fmtNumber(stats.global_mean)}</text>`);
    return `<svg class="benefit-chart" viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">${parts.join('')}</svg>`;
}
/** Stacked between/within inequality per type, plus the total line label. */
export function inequalityChart(report, width = 360, height = 180) {
    const groups = Object.keys(report.per_group).sort();
    const pad = { left: 42, right: 10, top: 20, bottom: 38 };
    const plotW = width - pad.left - pad.right;
    const plotH = height - pad.top - pad.bottom;
    const stackMax = Math.max(1e-12, ...groups.map((g) => Math.max(0, report.per_group[g].between_term) + Math.max(0, report.per_group[g].within_term)));
    const y = linearScale(stackMax, plotH);
    const bw = plotW / Math.max(groups.length, 1);
    const parts = [];
    groups.forEach((g, i) => {
        const t = report.per_group[g];
        const between = Math.max(0, t.between_term);
        const within = Math.max(0, t.within_term);
        const x0 = pad.left + i * bw + bw * 0.18;
        const wpx = bw * 0.64;
        const hB = y(between);
        const hW = y(within);
        const yB = pad.top + plotH - hB;
        parts.push(`<rect class="ineq-between" data-group="${esc(g)}" data-value="${t.between_term}" ` +
            `x="${x0.toFixed(1)}" y="${yB.toFixed(1)}" width="${wpx.toFixed(1)}" height="${hB.toFixed(1)}" fill="#8c1d1d"/>`);
        parts.push(`<rect class="ineq-within" data-group="${esc(g)}" data-value="${t.within_term}" ` +
            `x="${x0.toFixed(1)}" y="${(yB - hW).toFixed(1)}" width="${wpx.toFixed(1)}" height="${hW.toFixed(1)}" fill="#e48a8a"/>`);
        const cx = pad.left + i * bw + bw * 0.5;
        parts.push(`<text x="${cx.toFixed(1)}" y="${height - 22}" class="tick" text-anchor="middle" ` +
            `transform="rotate(30 ${cx.toFixed(1)} ${height - 22})">${esc(g)}</text>`);
    });
    parts.push(`<text class="ineq-total" data-total="${report.total}" data-between="${report.between}" ` +
        `data-within="${report.within}" x="${pad.left}" y="12">` +
        `total ${(report.total * report.display_scale).toFixed(2)} ` +
        `(between ${(report.between * report.display_scale).toFixed(2)}, ` +
        `within ${(report.within * report.display_scale).toFixed(2)})</text>`);
    return `<svg class="inequality-chart" viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">${parts.join('')}</svg>`;
}
/** One small preference bar chart per resident type. */
export function preferenceChart(name, preferences, width = 170, height = 90) {
    const types = Object.keys(preferences).sort();
    const pad = { left: 6, right: 6, top: 16, bottom: 6 };
    const plotW = width - pad.left - pad.right;
    const plotH = height - pad.top - pad.bottom;
    const maxW = Math.max(1e-9, ...types.map((t) => preferences[t]));
    const y = linearScale(maxW, plotH);
    const bw = plotW / Math.max(types.length, 1);
    const parts = [`<text x="${pad.left}" y="11" class="pref-title">${esc(name)}</text>`];
    types.forEach((t, i) => {
        const h = y(preferences[t]);
        parts.push(`<rect class="pref-bar" data-type="${esc(t)}" data-weight="${preferences[t]}" ` +
            `x="${(pad.left + i * bw + bw * 0.15).toFixed(1)}" y="${(pad.top + plotH - h).toFixed(1)}" ` +
            `width="${(bw * 0.7).toFixed(1)}" height="${h.toFixed(1)}" fill="${functionColor(t)}">` +
            `<title>${esc(t)}: ${(100 * preferences[t]).toFixed(0)}%</title></rect>`);
    });
    return `<svg class="preference-chart" viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">${parts.join('')}</svg>`;
}
/** Ranked attribution bars (green, widest = most inequality reduction). */
export function attributionChart(perBlock, ranked, width = 340) {
    const rowH = 24;
    const height = ranked.length * rowH + 6;
    const maxVal = Math.max(1e-12, ...ranked.map((b) => Math.abs(perBlock[b] ?? 0)));
    const labelW = 104;
    const x = linearScale(maxVal, width - labelW - 60);
    const parts = [];
    ranked.forEach((b, i) => {
        const v = perBlock[b] ?? 0;
        const w = Math.max(1, x(Math.abs(v)));
        const yPos = 4 + i * rowH;
        parts.push(`<text x="2" y="${yPos + 13}" class="tick">${esc(b)}</text>`);
        parts.push(`<rect class="attr-bar" data-block="${esc(b)}" data-value="${v}" x="${labelW}" y="${yPos}" ` +
            `width="${w.toFixed(1)}" height="${rowH - 8}" fill="${v >= 0 ? '#2e8b57' : '#b5651d'}"/>`);
        parts.push(`<text x="${(labelW + w + 4).toFixed(1)}" y="${yPos + 13}" class="tick">${v.toExponential(2)}</text>`);
    });
    return `<svg class="attribution-chart" viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">${parts.join('')}</svg>`;
}
/** Indicator sparkline for the timeline strip. */
export function sparkline(values, width = 220, height = 36) {
    const pts = values
        .map((v, i) => ({ v, i }))
        .filter((p) => p.v !== null && isFinite(p.v));
    if (pts.length === 0) {
        return `<svg class="sparkline" viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg"></svg>`;
    }
    const min = Math.min(...pts.map((p) => p.v));
    const max = Math.max(...pts.map((p) => p.v));
    const span = max - min || 1;
    const stepX = width / Math.max(values.length - 1, 1);
    const coords = pts
        .map((p) => `${(p.i * stepX).toFixed(1)},${(height - 4 - ((p.v - min) / span) * (height - 8)).toFixed(1)}`)
        .join(' ');
    return (`<svg class="sparkline" viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">` +
        `<polyline points="${coords}" fill="none" stroke="#8c1d1d" stroke-width="1.5" data-n="${pts.length}"/></svg>`);
}
