import { describe, expect, it } from 'vitest';
import { escapeHtml, fmtNum, fmtSigned, numCell, signedCell } from '../src/format.js';

describe('fmtNum', () => {
  it('renders two decimals', () => {
    expect(fmtNum(0.2800000000000001)).toBe('0.28');
    expect(fmtNum(0.42000000000000004)).toBe('0.42');
    expect(fmtNum(1)).toBe('1.00');
    expect(fmtNum(1.088)).toBe('1.09');
  });
});

describe('fmtSigned', () => {
  it('adds an explicit plus sign', () => {
    expect(fmtSigned(0.13999999999999996)).toBe('+0.14');
    expect(fmtSigned(0)).toBe('+0.00');
    expect(fmtSigned(-0.05000000000000002)).toBe('-0.05');
  });
});

describe('numCell', () => {
  it('keeps the raw value on the title attribute', () => {
    const html = numCell(0.2800000000000001);
    expect(html).toContain('title="0.2800000000000001"');
    expect(html).toContain('>0.28<');
  });

  it('round-trips integers', () => {
    expect(numCell(1)).toContain('title="1"');
    expect(numCell(1)).toContain('>1.00<');
  });
});

describe('signedCell', () => {
  it('marks the cell so tests can tell signed and plain apart', () => {
    const html = signedCell(-0.01);
    expect(html).toContain('num-signed');
    expect(html).toContain('title="-0.01"');
    expect(html).toContain('>-0.01<');
  });
});

describe('escapeHtml', () => {
  it('neutralizes markup and quotes', () => {
    expect(escapeHtml('<b a="c">&')).toBe('&lt;b a=&quot;c&quot;&gt;&amp;');
    expect(escapeHtml(null)).toBe('');
  });
});
