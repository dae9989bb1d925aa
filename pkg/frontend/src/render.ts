/**
 * HTML fragments shared by the scenario and pipeline result panels.
 * Numbers always go through the numCell/signedCell helpers so the raw
 * service values stay inspectable on hover.
 */

import { escapeHtml, numCell, signedCell } from './format.js';
import type { Posterior } from './types.js';

/** The state the big readout highlights: "Yes" when present. */
export const hotState = (posterior: Posterior): string => {
  const states = Object.keys(posterior);
  return states.includes('Yes') ? 'Yes' : states[0];
};

export const bloomReadout = (
  target: string,
  posterior: Posterior,
  delta: Record<string, number>,
): string => {
  const hot = hotState(posterior);
  return `
<div class="readout-main" data-role="bloom">
  <span class="readout-label">P(${escapeHtml(target)} = ${escapeHtml(hot)})</span>
  ${numCell(posterior[hot])}
  <span class="readout-delta">${signedCell(delta[hot])} vs baseline</span>
</div>`;
};

export const posteriorTable = (
  posterior: Posterior,
  baseline: Posterior,
  delta: Record<string, number>,
): string => {
  const hot = hotState(posterior);
  const rows = Object.keys(posterior)
    .map(
      (state) => `
<tr class="${state === hot ? 'hot' : ''}">
  <td>${escapeHtml(state)}</td>
  <td>${numCell(posterior[state])}</td>
  <td>${numCell(baseline[state])}</td>
  <td>${signedCell(delta[state])}</td>
</tr>`,
    )
    .join('');
  return `
<table class="posterior">
  <thead><tr><th>state</th><th>posterior</th><th>baseline</th><th>delta</th></tr></thead>
  <tbody>${rows}</tbody>
</table>`;
};
