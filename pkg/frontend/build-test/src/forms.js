// Recommendation constraint form: markup builder and input -> request
// body mapping, kept DOM-free so the contract tests can cover them.
const esc = (s) => s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/"/g, '&quot;');
export const DIRECTIONS = ['free', 'increase', 'decrease', 'fixed'];
/** One direction selector per resident type in the indicators payload. */
export function directionRowsHtml(indicators) {
    return Object.keys(indicators.population)
        .sort()
        .map((tid) => {
        const options = DIRECTIONS.map((d) => `<option value="${d}">${d}</option>`).join('');
        return `<label class="dir-row">${esc(tid)}<select data-type="${esc(tid)}">${options}</select></label>`;
    })
        .join('');
}
/** Map form inputs to the recommend request body. Budget arrives as a
 * percentage; "free" rows are omitted (the server default). */
export function constraintsFromInputs(budgetPercent, heightCap, directions) {
    const group_directions = {};
    for (const [tid, d] of Object.entries(directions)) {
        if (d !== 'free')
            group_directions[tid] = d;
    }
    return {
        budget_fraction: budgetPercent / 100,
        max_height_increase: heightCap,
        group_directions,
    };
}
