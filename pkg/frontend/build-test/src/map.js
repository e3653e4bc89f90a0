// 2D map rendering: building footprints colored by dominant function type
// or by the benefit heatmap, occupancy-scaled markers, and cyan outlines
// for filter-matched buildings. Pure SVG-string builder.
import { HIGHLIGHT_COLOR, benefitColor, dominantType, functionColor, heatmapScale } from './color.js';
function ring(feature) {
    return feature.geometry.coordinates[0] ?? [];
}
function bounds(design) {
    let minX = Infinity, minY = Infinity, maxX = -Infinity, maxY = -Infinity;
    for (const f of design.features) {
        for (const [x, y] of ring(f)) {
            minX = Math.min(minX, x);
            minY = Math.min(minY, y);
            maxX = Math.max(maxX, x);
            maxY = Math.max(maxY, y);
        }
    }
    if (!isFinite(minX))
        return { minX: 0, minY: 0, maxX: 1, maxY: 1 };
    return { minX, minY, maxX, maxY };
}
export function passesFilter(filter, occupancy, meanBenefit) {
    if (!filter || (filter.minOccupancy === undefined && filter.minMeanBenefit === undefined)) {
        return false; // no filter, nothing highlighted
    }
    if (filter.minOccupancy !== undefined && occupancy < filter.minOccupancy)
        return false;
    if (filter.minMeanBenefit !== undefined) {
        if (meanBenefit === null || meanBenefit < filter.minMeanBenefit)
            return false;
    }
    return true;
}
export function mapSvg(design, options = {}) {
    const { heatmap = null, filter = null, selectedId = null } = options;
    const width = options.width ?? 760;
    const height = options.height ?? 520;
    const b = bounds(design);
    const pad = 24;
    const scale = Math.min((width - 2 * pad) / Math.max(b.maxX - b.minX, 1), (height - 2 * pad) / Math.max(b.maxY - b.minY, 1));
    const tx = (x) => pad + (x - b.minX) * scale;
    const ty = (y) => height - pad - (y - b.minY) * scale; // north up
    const byBuilding = new Map((heatmap?.buildings ?? []).map((e) => [e.id, e]));
    const hmScale = heatmap ? heatmapScale(heatmap.buildings.map((e) => e.relative_benefit)) : 0;
    const maxOccupancy = Math.max(1, ...(heatmap?.buildings ?? []).map((e) => e.occupancy));
    const polys = [];
    const markers = [];
    for (const f of design.features) {
        const entry = byBuilding.get(f.id);
        const fill = heatmap
            ? benefitColor(entry?.relative_benefit ?? null, hmScale)
            : functionColor(dominantType(f.properties.floor_areas));
        const highlighted = passesFilter(filter, entry?.occupancy ?? 0, entry?.mean_benefit ?? null);
        const stroke = highlighted ? HIGHLIGHT_COLOR : f.id === selectedId ? '#ff9800' : '#37474f';
        const strokeWidth = highlighted || f.id === selectedId ? 3 : 0.8;
        const points = ring(f)
            .map(([x, y]) => `${tx(x).toFixed(1)},${ty(y).toFixed(1)}`)
            .join(' ');
        polys.push(`<polygon class="building${highlighted ? ' highlighted' : ''}" data-id="${f.id}" ` +
            `data-block="${f.properties.block_id}" data-dominant="${dominantType(f.properties.floor_areas)}" ` +
            (entry && entry.relative_benefit !== null ? `data-relative="${entry.relative_benefit}" ` : '') +
            `points="${points}" fill="${fill}" stroke="${stroke}" stroke-width="${strokeWidth}">` +
            `<title>${f.id} (${f.properties.block_id}), ${f.properties.floors} floors</title></polygon>`);
        if (heatmap && entry && entry.occupancy > 0) {
            const cx = ring(f).reduce((s, [x]) => s + tx(x), 0) / Math.max(ring(f).length, 1);
            const cy = ring(f).reduce((s, [, y]) => s + ty(y), 0) / Math.max(ring(f).length, 1);
            const r = 3 + 9 * Math.sqrt(entry.occupancy / maxOccupancy);
            markers.push(`<circle class="occupancy-marker" data-id="${f.id}" data-occupancy="${entry.occupancy}" ` +
                `cx="${cx.toFixed(1)}" cy="${cy.toFixed(1)}" r="${r.toFixed(1)}" ` +
                `fill="#263238" fill-opacity="0.35" stroke="#263238"/>`);
        }
    }
    return (`<svg class="city-map" viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">` +
        `<rect x="0" y="0" width="${width}" height="${height}" fill="#f4f1ea"/>` +
        polys.join('') +
        markers.join('') +
        `</svg>`);
}
