// Recommendation constraint form: markup builder and input -> request
// body mapping, kept DOM-free so the contract tests can cover them.

import type { ConstraintsBody, GroupDirection, IndicatorsResponse } from './types.js';

const esc = (s: string) => s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/"/g, '&quot;');

export const DIRECTIONS: GroupDirection[] = ['free', 'increase', 'decrease', 'fixed'];

/** One direction selector per resident type in the indicators payload. */
export function directionRowsHtml(indicators: IndicatorsResponse): string {
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
export function constraintsFromInputs(
  budgetPercent: number,
  heightCap: number,
  directions: Record<string, GroupDirection>,
): ConstraintsBody {
  const group_directions: Record<string, GroupDirection> = {};
  for (const [tid, d] of Object.entries(directions)) {
    if (d !== 'free') group_directions[tid] = d;
  }
  return {
    budget_fraction: budgetPercent / 100,
    max_height_increase: heightCap,
    group_directions,
  };
}
