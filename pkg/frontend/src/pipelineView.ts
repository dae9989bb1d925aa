/**
 * Catchment pipeline: per-source practice toggles and land-use override
 * pickers, plus one-click conversion presets. A run shows the staged
 * results the service computed: nutrient loads, the derived evidence
 * entering the model, and the bloom posterior with its baseline delta.
 */

import { ApiError, RequestGate, ServiceClient, requestKey } from './api.js';
import { escapeHtml, numCell } from './format.js';
import {
  CONVERSION_PRESET,
  LANDUSE_PRESETS,
  baselineIntervention,
  conversionIntervention,
  wholeCatchmentIntervention,
} from './presets.js';
import { bloomReadout, posteriorTable } from './render.js';
import type {
  CatalogueBody,
  InterventionRequest,
  PipelineResponse,
  PipelineRunRequest,
} from './types.js';

const PRACTICES = ['current', 'planned', 'best'];

export interface PipelineView {
  readonly root: HTMLElement;
  init(): Promise<void>;
  setLanduse(sourceId: string, category: string): void;
  setPractice(sourceId: string, practice: string): void;
  run(): Promise<void>;
  runPreset(name: string): Promise<void>;
  whenIdle(): Promise<void>;
}

export const createPipelineView = (
  root: HTMLElement,
  client: ServiceClient,
  gate: RequestGate,
  catalogueId = 'demo_catalogue',
): PipelineView => {
  let body: CatalogueBody | null = null;
  let presetLabel: string | null = null; // null = derive the label from the form
  let result: PipelineResponse | null = null;
  let errorText: string | null = null;
  let pending: Promise<void> = Promise.resolve();

  const track = (p: Promise<void>): Promise<void> => {
    pending = p;
    return p;
  };

  const renderForm = (): void => {
    if (!body) return;
    const categories = Object.keys(body.profiles);
    const presetButtons = [
      `<button type="button" class="btn" data-preset="baseline">Baseline</button>`,
      ...LANDUSE_PRESETS.map(
        (cat) =>
          `<button type="button" class="btn" data-preset="all ${escapeHtml(cat)}">All ${escapeHtml(cat)}</button>`,
      ),
      `<button type="button" class="btn" data-preset="${escapeHtml(CONVERSION_PRESET.label)}">Clear the bush</button>`,
      `<button type="button" class="btn btn-run" data-role="run">Run pipeline</button>`,
    ].join('');
    const rows = body.sources
      .map(
        (source) => `
<tr data-source="${escapeHtml(source.id)}">
  <td>${escapeHtml(source.id)}</td>
  <td>${escapeHtml(source.category)}</td>
  <td>${escapeHtml(source.kind)}</td>
  <td>
    <select data-role="practice">
      ${PRACTICES.map((p) => `<option value="${escapeHtml(p)}">${escapeHtml(p)}</option>`).join('')}
    </select>
  </td>
  <td>
    <select data-role="landuse">
      <option value="">(keep)</option>
      ${categories.map((c) => `<option value="${escapeHtml(c)}">${escapeHtml(c)}</option>`).join('')}
    </select>
  </td>
</tr>`,
      )
      .join('');
    root.innerHTML = `
<div class="toolbar">${presetButtons}</div>
<div class="error" data-role="error" hidden></div>
<div class="pipeline-layout">
  <table class="sources">
    <thead><tr><th>source</th><th>category</th><th>kind</th><th>practice</th><th>land use</th></tr></thead>
    <tbody>${rows}</tbody>
  </table>
  <div class="results" data-role="result"></div>
</div>`;
  };

  const renderError = (): void => {
    let box = root.querySelector<HTMLElement>('[data-role="error"]');
    if (!box) {
      if (errorText === null) return;
      root.insertAdjacentHTML('afterbegin', '<div class="error" data-role="error"></div>');
      box = root.querySelector<HTMLElement>('[data-role="error"]')!;
    }
    box.hidden = errorText === null;
    box.textContent = errorText ?? '';
  };

  const renderResult = (): void => {
    renderError();
    const panel = root.querySelector<HTMLElement>('[data-role="result"]');
    if (!panel || !result) return;
    const loads = Object.entries(result.load)
      .map(([nutrient, v]) => `<tr><td>${escapeHtml(nutrient)}</td><td>${numCell(v)}</td></tr>`)
      .join('');
    const chips = Object.entries(result.evidence)
      .map(
        ([node, state]) =>
          `<span class="chip">${escapeHtml(node)} = ${escapeHtml(state)}</span>`,
      )
      .join('');
    const conflicts = result.conflicts.length
      ? `<div class="stage conflicts"><h4>conflicts</h4>${result.conflicts
          .map((c) => `<div>${escapeHtml(c.join(' / '))}</div>`)
          .join('')}</div>`
      : '';
    panel.innerHTML = `
<h3>run: ${escapeHtml(result.label || '(baseline)')}</h3>
<div class="stage">
  <h4>nutrient loads</h4>
  <table class="loads"><tbody>
    ${loads}
    <tr class="total"><td>total index</td><td>${numCell(result.total_index)}</td></tr>
  </tbody></table>
</div>
<div class="stage">
  <h4>derived evidence</h4>
  <div class="chips">${chips}</div>
</div>
<div class="stage">
  <h4>bloom posterior</h4>
  ${bloomReadout('BloomInitiation', result.posterior, result.delta)}
  ${posteriorTable(result.posterior, result.baseline, result.delta)}
</div>
${conflicts}`;
  };

  const fail = (err: unknown): void => {
    errorText = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    renderError();
  };

  const assemble = (): InterventionRequest => {
    const spec = baselineIntervention();
    for (const row of root.querySelectorAll<HTMLElement>('tr[data-source]')) {
      const id = row.getAttribute('data-source')!;
      const practice = row.querySelector<HTMLSelectElement>('[data-role="practice"]')?.value;
      const landuse = row.querySelector<HTMLSelectElement>('[data-role="landuse"]')?.value;
      if (practice && practice !== 'current') spec.practice_overrides[id] = practice;
      if (landuse) spec.landuse_overrides[id] = landuse;
    }
    const touched =
      Object.keys(spec.practice_overrides).length + Object.keys(spec.landuse_overrides).length;
    spec.label = presetLabel ?? (touched ? 'custom' : '');
    return spec;
  };

  const applyToForm = (spec: InterventionRequest): void => {
    for (const row of root.querySelectorAll<HTMLElement>('tr[data-source]')) {
      const id = row.getAttribute('data-source')!;
      const practice = row.querySelector<HTMLSelectElement>('[data-role="practice"]');
      const landuse = row.querySelector<HTMLSelectElement>('[data-role="landuse"]');
      if (practice) practice.value = spec.practice_overrides[id] ?? 'current';
      if (landuse) landuse.value = spec.landuse_overrides[id] ?? '';
    }
  };

  const run = (): Promise<void> =>
    track(
      (async () => {
        const payload: PipelineRunRequest = {
          catalogue: catalogueId,
          intervention: assemble(),
        };
        const res = await gate.run('pipeline', requestKey('pipeline', payload), () =>
          client.runPipeline(payload),
        );
        if (res === null) return; // superseded by a newer run
        result = res;
        errorText = null;
        renderResult();
      })().catch(fail),
    );

  const runPreset = (name: string): Promise<void> => {
    if (!body) return pending;
    let spec = baselineIntervention();
    if (name === CONVERSION_PRESET.label) spec = conversionIntervention(body.sources);
    else if (name.startsWith('all ')) {
      spec = wholeCatchmentIntervention(body.sources, name.slice(4));
    }
    applyToForm(spec);
    presetLabel = spec.label;
    return run();
  };

  const setLanduse = (sourceId: string, category: string): void => {
    const select = root.querySelector<HTMLSelectElement>(
      `tr[data-source="${sourceId}"] [data-role="landuse"]`,
    );
    if (select) select.value = category;
    presetLabel = null;
  };

  const setPractice = (sourceId: string, practice: string): void => {
    const select = root.querySelector<HTMLSelectElement>(
      `tr[data-source="${sourceId}"] [data-role="practice"]`,
    );
    if (select) select.value = practice;
    presetLabel = null;
  };

  const bind = (): void => {
    root.addEventListener('change', (event) => {
      const el = event.target as HTMLElement;
      const role = el?.getAttribute?.('data-role');
      // manual edits drop the preset label; the next run derives its own
      if (role === 'practice' || role === 'landuse') presetLabel = null;
    });
    root.addEventListener('click', (event) => {
      const el = (event.target as HTMLElement).closest?.('[data-preset], [data-role]');
      if (!el) return;
      const preset = el.getAttribute('data-preset');
      if (preset) void runPreset(preset);
      else if (el.getAttribute('data-role') === 'run') void run();
    });
  };

  const init = (): Promise<void> =>
    track(
      (async () => {
        const doc = await client.catalogue(catalogueId);
        body = doc.body;
        renderForm();
        bind();
      })().catch(fail),
    );

  return {
    root,
    init,
    setLanduse,
    setPractice,
    run,
    runPreset,
    whenIdle: () => pending,
  };
};
