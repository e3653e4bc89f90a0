// Benefit heatmap palette: white at the mean, green above, red below,
// darker the farther from the mean. Function type colors for the base map.
const ABOVE = { r: 13, g: 108, b: 45 }; // dark green endpoint
const BELOW = { r: 161, g: 24, b: 24 }; // dark red endpoint
function mix(t, to) {
    const r = Math.round(255 + (to.r - 255) * t);
    const g = Math.round(255 + (to.g - 255) * t);
    const b = Math.round(255 + (to.b - 255) * t);
    return ('#' + [r, g, b].map((v) => Math.max(0, Math.min(255, v)).toString(16).padStart(2, '0')).join(''));
}
/** Color for a relative benefit (value minus mean), normalized by `scale`
 * (the largest |relative| on the map). White exactly at the mean. */
export function benefitColor(relative, scale) {
    if (relative === null || !isFinite(relative) || scale <= 0)
        return '#ffffff';
    const t = Math.min(Math.abs(relative) / scale, 1);
    return relative >= 0 ? mix(t, ABOVE) : mix(t, BELOW);
}
/** Largest |relative_benefit| across heatmap entries, for normalization. */
export function heatmapScale(relatives) {
    let m = 0;
    for (const r of relatives) {
        if (r !== null && isFinite(r))
            m = Math.max(m, Math.abs(r));
    }
    return m;
}
export const FUNCTION_COLORS = {
    Residential: '#e8c468',
    Office: '#7094c9',
    Commercial: '#d87fa5',
    Cultural: '#9b72c9',
    Educational: '#6bc9b8',
    Park: '#7fbf6e',
};
export const HIGHLIGHT_COLOR = '#00e5ff'; // cyan outline for filtered buildings
/** Dominant function type of a building (largest floor area). */
export function dominantType(floorAreas) {
    let best = 'Residential';
    let bestArea = -Infinity;
    for (const [f, a] of Object.entries(floorAreas)) {
        if (a > bestArea) {
            best = f;
            bestArea = a;
        }
    }
    return best;
}
export function functionColor(ftype) {
    return FUNCTION_COLORS[ftype] ?? '#bdbdbd';
}
