/**
 * Scenario explorer: evidence selectors grouped by subnetwork, a bloom
 * probability readout with its baseline delta, and a sensitivity ranking.
 *
 * The form is built once from the node list the service reports, so every
 * selectable state is one the model actually has. Result refreshes repaint
 * only the readout panel; the form is never rebuilt, which keeps unsaved
 * selections intact across refreshes and failed requests.
 */

import { ApiError, RequestGate, ServiceClient, requestKey } from './api.js';
import { escapeHtml, numCell } from './format.js';
import { SCENARIO_PRESETS } from './presets.js';
import { bloomReadout, posteriorTable } from './render.js';
import type { NodeInfo, ScenarioResponse, SensitivityResponse } from './types.js';

const GROUP_LABELS: Record<string, string> = {
  water: 'water',
  sea: 'sea water',
  air: 'air',
  light: 'light',
  nutrients: 'nutrients',
};

const GROUP_ORDER = ['water', 'sea water', 'air', 'light', 'nutrients', 'target'];

const groupOf = (name: string): string => {
  const dot = name.indexOf('.');
  if (dot < 0) return 'target';
  return GROUP_LABELS[name.slice(0, dot)] ?? name.slice(0, dot);
};

const shortName = (name: string): string => {
  const dot = name.indexOf('.');
  return dot < 0 ? name : name.slice(dot + 1);
};

export interface ScenarioView {
  readonly root: HTMLElement;
  init(): Promise<void>;
  setEvidence(node: string, state: string): Promise<void>;
  clearEvidence(): Promise<void>;
  runPreset(name: string): Promise<void>;
  whenIdle(): Promise<void>;
}

export const createScenarioView = (
  root: HTMLElement,
  client: ServiceClient,
  gate: RequestGate,
  model = 'demo_science',
  target = 'BloomInitiation',
): ScenarioView => {
  const selection = new Map<string, string>();
  let result: ScenarioResponse | null = null;
  let errorText: string | null = null;
  let pending: Promise<void> = Promise.resolve();

  const track = (p: Promise<void>): Promise<void> => {
    pending = p;
    return p;
  };

  const renderForm = (nodes: NodeInfo[]): void => {
    const groups = new Map<string, NodeInfo[]>();
    for (const node of nodes) {
      const label = groupOf(node.name);
      const bucket = groups.get(label);
      if (bucket) bucket.push(node);
      else groups.set(label, [node]);
    }
    const order = [
      ...GROUP_ORDER.filter((g) => groups.has(g)),
      ...[...groups.keys()].filter((g) => !GROUP_ORDER.includes(g)),
    ];
    const presets = SCENARIO_PRESETS.map(
      ({ label, scenario }) =>
        `<button type="button" class="btn" data-preset="${escapeHtml(scenario)}">${escapeHtml(label)}</button>`,
    ).join('');
    const fieldsets = order
      .map((label) => {
        const rows = (groups.get(label) ?? [])
          .map(
            (node) => `
<label class="evidence-row" title="${escapeHtml(node.name)}">
  <span>${escapeHtml(shortName(node.name))}</span>
  <select data-node="${escapeHtml(node.name)}">
    <option value="">(none)</option>
    ${node.states.map((s) => `<option value="${escapeHtml(s)}">${escapeHtml(s)}</option>`).join('')}
  </select>
</label>`,
          )
          .join('');
        return `<fieldset><legend>${escapeHtml(label)}</legend>${rows}</fieldset>`;
      })
      .join('');
    root.innerHTML = `
<div class="toolbar">
  ${presets}
  <button type="button" class="btn" data-role="clearEvidence">Clear evidence</button>
</div>
<div class="error" data-role="error" hidden></div>
<div class="scenario-layout">
  <form class="evidence" data-role="evidence">${fieldsets}</form>
  <div class="results">
    <div class="readout" data-role="readout"></div>
    <div class="sensitivity" data-role="sensitivity"></div>
  </div>
</div>`;
  };

  const renderError = (): void => {
    let box = root.querySelector<HTMLElement>('[data-role="error"]');
    if (!box) {
      // failures before the form exists (e.g. init) still need a surface
      if (errorText === null) return;
      root.insertAdjacentHTML('afterbegin', '<div class="error" data-role="error"></div>');
      box = root.querySelector<HTMLElement>('[data-role="error"]')!;
    }
    box.hidden = errorText === null;
    box.textContent = errorText ?? '';
  };

  const renderResult = (): void => {
    renderError();
    const panel = root.querySelector<HTMLElement>('[data-role="readout"]');
    if (!panel || !result) return;
    panel.innerHTML = `
<h3>scenario: ${escapeHtml(result.scenario)}</h3>
${bloomReadout(result.target, result.posterior, result.delta)}
${posteriorTable(result.posterior, result.baseline, result.delta)}`;
  };

  const renderSensitivity = (report: SensitivityResponse): void => {
    const panel = root.querySelector<HTMLElement>('[data-role="sensitivity"]');
    if (!panel) return;
    const top = report.entries[0];
    const scale = top && top[1] > 0 ? top[1] : 1;
    const rows = report.entries
      .map(
        ([name, mi]) => `
<div class="sens-row" title="${escapeHtml(name)}">
  <span class="sens-name">${escapeHtml(shortName(name))}</span>
  <span class="sens-bar"><span class="sens-fill" style="width: ${(mi / scale) * 100}%"></span></span>
  ${numCell(mi)}
</div>`,
      )
      .join('');
    panel.innerHTML = `<h3>sensitivity of ${escapeHtml(report.target)} (mutual information)</h3>${rows}`;
  };

  const fail = (err: unknown): void => {
    errorText = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    renderError();
  };

  const refresh = (): Promise<void> =>
    track(
      (async () => {
        const evidence = Object.fromEntries(selection);
        const res = await gate.run(
          'scenario',
          requestKey('scenario', { model, target, evidence }),
          () => client.scenarioInline(model, evidence, target),
        );
        if (res === null) return; // superseded by a newer request
        result = res;
        errorText = null;
        renderResult();
      })().catch(fail),
    );

  const runPreset = (name: string): Promise<void> =>
    track(
      (async () => {
        const res = await gate.run('scenario', requestKey('preset', { model, target, name }), () =>
          client.scenarioByName(model, name, target),
        );
        if (res === null) return;
        result = res;
        errorText = null;
        renderResult();
      })().catch(fail),
    );

  const setEvidence = (node: string, state: string): Promise<void> => {
    if (state === '') selection.delete(node);
    else selection.set(node, state);
    for (const select of root.querySelectorAll<HTMLSelectElement>('select[data-node]')) {
      if (select.getAttribute('data-node') === node && select.value !== state) {
        select.value = state;
      }
    }
    return refresh();
  };

  const clearEvidence = (): Promise<void> => {
    selection.clear();
    for (const select of root.querySelectorAll<HTMLSelectElement>('select[data-node]')) {
      select.value = '';
    }
    return refresh();
  };

  const bind = (): void => {
    root.addEventListener('change', (event) => {
      const select = event.target as HTMLSelectElement;
      const node = select?.getAttribute?.('data-node');
      if (node) void setEvidence(node, select.value);
    });
    root.addEventListener('click', (event) => {
      const el = (event.target as HTMLElement).closest?.('[data-preset], [data-role]');
      if (!el) return;
      const preset = el.getAttribute('data-preset');
      if (preset) void runPreset(preset);
      else if (el.getAttribute('data-role') === 'clearEvidence') void clearEvidence();
    });
  };

  const init = (): Promise<void> =>
    track(
      (async () => {
        const [nodes, sens] = await Promise.all([
          client.nodes(model),
          client.sensitivity(model, target),
        ]);
        renderForm(nodes.nodes);
        bind();
        renderSensitivity(sens);
        await refresh();
      })().catch(fail),
    );

  return {
    root,
    init,
    setEvidence,
    clearEvidence,
    runPreset,
    whenIdle: () => pending,
  };
};
