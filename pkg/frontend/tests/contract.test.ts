/**
 * Recorded-response contract suite. The fake fetch serves only verbatim
 * recorded service exchanges, so everything these tests see on screen
 * could only have come from a service response; the traceability walker
 * then checks exactly that for every numeric cell.
 */

import { beforeAll, describe, expect, it } from 'vitest';
import { RequestGate, ServiceClient } from '../src/api.js';
import { createPipelineView } from '../src/pipelineView.js';
import { createScenarioView } from '../src/scenarioView.js';
import type { PipelineResponse, ScenarioResponse, SensitivityResponse } from '../src/types.js';
import {
  Recorded,
  assertTraceable,
  bloomText,
  errorBox,
  loadFixtures,
  makeDom,
  recordedFetch,
  recordedNumbers,
} from './helpers.js';

let fixtures: Recorded;
let allowed: Set<string>;

beforeAll(() => {
  fixtures = loadFixtures();
  allowed = recordedNumbers(fixtures);
});

const body = <T>(name: string): T => {
  const hit = fixtures.exchanges.find((e) => e.name === name);
  if (!hit) throw new Error(`missing fixture ${name}`);
  return hit.response.body as T;
};

const mountScenario = async (target = 'BloomInitiation') => {
  const { root } = makeDom();
  const client = new ServiceClient('', recordedFetch(fixtures));
  const view = createScenarioView(root, client, new RequestGate(), 'demo_science', target);
  await view.init();
  return { root, view };
};

const mountPipeline = async () => {
  const { root } = makeDom();
  const client = new ServiceClient('', recordedFetch(fixtures));
  const view = createPipelineView(root, client, new RequestGate(), 'demo_catalogue');
  await view.init();
  return { root, view };
};

const click = (root: HTMLElement, selector: string): void => {
  const el = root.querySelector<HTMLElement>(selector);
  expect(el, `no element matches ${selector}`).toBeTruthy();
  el!.click();
};

const deltaText = (root: HTMLElement): string =>
  root.querySelector<HTMLElement>('[data-role="bloom"] .num-signed')?.textContent ?? '';

describe('scenario view', () => {
  it('shows the no-evidence baseline readout after init', async () => {
    const { root } = await mountScenario();
    expect(bloomText(root)).toBe('0.28');
    expect(deltaText(root)).toBe('+0.00');
    expect(assertTraceable(root, allowed)).toBeGreaterThan(4);
  });

  it('groups the evidence form by subnetwork with service states', async () => {
    const { root } = await mountScenario();
    const legends = [...root.querySelectorAll('legend')].map((l) => l.textContent);
    expect(legends).toEqual(['water', 'sea water', 'air', 'light', 'nutrients', 'target']);
    const pool = root.querySelector<HTMLSelectElement>(
      'select[data-node="nutrients.AvailableNutrientPool"]',
    );
    expect(pool).toBeTruthy();
    const nodes = body<{ nodes: { name: string; states: string[] }[] }>('nodes');
    const states = nodes.nodes.find((n) => n.name === 'nutrients.AvailableNutrientPool')!.states;
    const options = Array.from(pool!.querySelectorAll('option'));
    expect(options.map((o) => o.value)).toEqual(['', ...states]);
    expect(root.querySelectorAll('select[data-node]').length).toBe(nodes.nodes.length);
  });

  it('reproduces the typical year readout from its preset', async () => {
    const { root, view } = await mountScenario();
    click(root, '[data-preset="typical year"]');
    await view.whenIdle();
    expect(bloomText(root)).toBe('0.28');
    expect(root.textContent).toContain('scenario: typical year');
    const recordedValue = body<ScenarioResponse>('scenario: typical year').posterior['Yes'];
    const cell = root.querySelector<HTMLElement>('[data-role="bloom"] .num');
    expect(cell!.getAttribute('title')).toBe(String(recordedValue));
    assertTraceable(root, allowed);
  });

  it('reproduces the storm event readout and delta from its preset', async () => {
    const { root, view } = await mountScenario();
    click(root, '[data-preset="storm event"]');
    await view.whenIdle();
    expect(bloomText(root)).toBe('0.42');
    expect(deltaText(root)).toBe('+0.14');
    assertTraceable(root, allowed);
  });

  it('reproduces the nutrient pool preset at certainty', async () => {
    const { root, view } = await mountScenario();
    click(root, '[data-preset="nutrient pool enough"]');
    await view.whenIdle();
    expect(bloomText(root)).toBe('1.00');
    assertTraceable(root, allowed);
  });

  it('clearing all evidence shows a zero delta', async () => {
    const { root, view } = await mountScenario();
    click(root, '[data-preset="storm event"]');
    await view.whenIdle();
    click(root, '[data-role="clearEvidence"]');
    await view.whenIdle();
    expect(bloomText(root)).toBe('0.28');
    expect(deltaText(root)).toBe('+0.00');
  });

  it('keeps unsaved form selections across a preset result refresh', async () => {
    const { root, view } = await mountScenario();
    await view.setEvidence('nutrients.AvailableNutrientPool', 'Enough');
    expect(bloomText(root)).toBe('1.00');
    click(root, '[data-preset="storm event"]');
    await view.whenIdle();
    expect(bloomText(root)).toBe('0.42');
    const pool = root.querySelector<HTMLSelectElement>(
      'select[data-node="nutrients.AvailableNutrientPool"]',
    );
    expect(pool!.value).toBe('Enough');
  });

  it('surfaces a validation error inline and keeps the previous result', async () => {
    const { root, view } = await mountScenario();
    await view.setEvidence('nutrients.AvailableNutrientPool', 'Enough');
    expect(bloomText(root)).toBe('1.00');
    await view.setEvidence('BloomInitiation', 'No');
    const box = errorBox(root);
    expect(box!.hidden).toBe(false);
    expect(box!.textContent).toContain('validation');
    expect(bloomText(root)).toBe('1.00');
  });

  it('surfaces impossible evidence as an inline 422 and keeps the previous result', async () => {
    const { root, view } = await mountScenario('air.WindSpeed');
    await view.setEvidence('nutrients.AvailableNutrientPool', 'Enough');
    const before = bloomText(root);
    expect(before).not.toBe('');
    await view.setEvidence('BloomInitiation', 'No');
    const box = errorBox(root);
    expect(box!.hidden).toBe(false);
    expect(box!.textContent).toContain('impossible_evidence');
    expect(bloomText(root)).toBe(before);
    assertTraceable(root, allowed);
  });

  it('renders the full sensitivity ranking in service order', async () => {
    const { root } = await mountScenario();
    const report = body<SensitivityResponse>('sensitivity');
    const rows = root.querySelectorAll('.sens-row');
    expect(rows.length).toBe(report.entries.length);
    expect(rows[0].getAttribute('title')).toBe(report.entries[0][0]);
    const first = rows[0].querySelector<HTMLElement>('.num');
    expect(first!.getAttribute('title')).toBe(String(report.entries[0][1]));
  });
});

describe('pipeline view', () => {
  it('lists every source with practice and land-use pickers', async () => {
    const { root } = await mountPipeline();
    const catalogue = body<{ body: { sources: unknown[]; profiles: Record<string, unknown> } }>(
      'catalogue',
    );
    const rows = root.querySelectorAll('tr[data-source]');
    expect(rows.length).toBe(catalogue.body.sources.length);
    const landuse = rows[0].querySelector<HTMLSelectElement>('[data-role="landuse"]');
    expect(Array.from(landuse!.querySelectorAll('option')).map((o) => o.value)).toEqual([
      '',
      ...Object.keys(catalogue.body.profiles),
    ]);
    const practice = rows[0].querySelector<HTMLSelectElement>('[data-role="practice"]');
    expect(Array.from(practice!.querySelectorAll('option')).map((o) => o.value)).toEqual([
      'current',
      'planned',
      'best',
    ]);
  });

  it('reproduces all five whole-catchment land-use readouts', async () => {
    const { root, view } = await mountPipeline();
    const expected: [string, string][] = [
      ['waste water treatment plant', '0.23'],
      ['grazing', '0.27'],
      ['waste disposal', '0.63'],
      ['aquaculture', '0.63'],
      ['poultry', '0.62'],
    ];
    for (const [category, readout] of expected) {
      click(root, `[data-preset="all ${category}"]`);
      await view.whenIdle();
      expect(bloomText(root), category).toBe(readout);
      expect(root.textContent).toContain(`run: all ${category}`);
    }
    assertTraceable(root, allowed);
  });

  it('syncs the form with the preset it ran', async () => {
    const { root, view } = await mountPipeline();
    click(root, '[data-preset="all poultry"]');
    await view.whenIdle();
    for (const select of root.querySelectorAll<HTMLSelectElement>('[data-role="landuse"]')) {
      expect(select.value).toBe('poultry');
    }
  });

  it('reproduces the conversion preset with its staged results', async () => {
    const { root, view } = await mountPipeline();
    click(root, '[data-preset="clear the bush"]');
    await view.whenIdle();
    const recorded = body<PipelineResponse>('pipeline: clear the bush');
    expect(bloomText(root)).toBe('0.62');
    expect(root.textContent).toContain('run: clear the bush');
    const totalCell = root.querySelector<HTMLElement>('tr.total .num');
    expect(totalCell!.textContent).toBe('1.09');
    expect(totalCell!.getAttribute('title')).toBe(String(recorded.total_index));
    const loadRows = root.querySelectorAll('table.loads tr');
    expect(loadRows.length).toBe(Object.keys(recorded.load).length + 1);
    const chips = root.querySelectorAll('.chip');
    expect(chips.length).toBe(Object.keys(recorded.evidence).length);
    const firstNode = Object.keys(recorded.evidence)[0];
    expect(chips[0].textContent).toBe(`${firstNode} = ${recorded.evidence[firstNode]}`);
    assertTraceable(root, allowed);
  });

  it('matches the scenario-view baseline when nothing is overridden', async () => {
    const pipeline = await mountPipeline();
    click(pipeline.root, '[data-preset="baseline"]');
    await pipeline.view.whenIdle();
    const scenario = await mountScenario();
    expect(bloomText(pipeline.root)).toBe(bloomText(scenario.root));
    expect(deltaText(pipeline.root)).toBe('+0.00');
  });

  it('returns to the original result after toggling a source and reverting', async () => {
    const { root, view } = await mountPipeline();
    click(root, '[data-preset="baseline"]');
    await view.whenIdle();
    const original = root.querySelector<HTMLElement>('[data-role="result"]')!.innerHTML;
    view.setLanduse('nv-1', 'poultry');
    view.setLanduse('nv-1', '');
    await view.run();
    expect(root.querySelector<HTMLElement>('[data-role="result"]')!.innerHTML).toBe(original);
  });
});
