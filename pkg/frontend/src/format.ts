/**
 * Display formatting. Every numeric cell carries the raw service value in
 * its title attribute so on-screen rounding never hides the real number,
 * and contract tests can trace each display back to a response field.
 */

export const escapeHtml = (value: unknown): string =>
  String(value ?? '')
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');

/** Two-decimal rendering used for every displayed probability or index. */
export const fmtNum = (value: number): string => value.toFixed(2);

/** Signed two-decimal rendering used for deltas. */
export const fmtSigned = (value: number): string =>
  (value >= 0 ? '+' : '') + value.toFixed(2);

/** Span showing a service number to 2 decimals with the raw value on hover. */
export const numCell = (value: number): string =>
  `<span class="num" title="${String(value)}">${fmtNum(value)}</span>`;

/** Same as numCell but with an explicit sign, for deltas. */
export const signedCell = (value: number): string =>
  `<span class="num num-signed" title="${String(value)}">${fmtSigned(value)}</span>`;
