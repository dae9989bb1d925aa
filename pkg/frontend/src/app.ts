/**
 * Entry point: check the service is reachable, mount the two views, and
 * wire the tab bar. A failed health check shows a banner whose retry
 * button reruns the whole boot sequence.
 */

import { RequestGate, ServiceClient } from './api.js';
import { createPipelineView } from './pipelineView.js';
import { createScenarioView } from './scenarioView.js';

export const boot = async (doc: Document, baseUrl = ''): Promise<void> => {
  const client = new ServiceClient(baseUrl);
  const gate = new RequestGate();
  const banner = doc.querySelector<HTMLElement>('#banner');
  const message = doc.querySelector<HTMLElement>('#banner [data-role="message"]');

  let models;
  try {
    models = await client.models();
  } catch (err) {
    if (banner && message) {
      banner.hidden = false;
      message.textContent = `service unreachable: ${String(err)}`;
    }
    return;
  }
  if (banner) banner.hidden = true;

  const scienceId =
    models.models.find((m) => m.queryable && m.scenarios.length > 0)?.id ?? 'demo_science';
  const catalogueId = models.models.find((m) => m.kind === 'catalogue')?.id ?? 'demo_catalogue';

  const scenarioRoot = doc.querySelector<HTMLElement>('#scenario-view');
  const pipelineRoot = doc.querySelector<HTMLElement>('#pipeline-view');
  if (scenarioRoot) {
    await createScenarioView(scenarioRoot, client, gate, scienceId).init();
  }
  if (pipelineRoot) {
    await createPipelineView(pipelineRoot, client, gate, catalogueId).init();
  }
};

export const bindChrome = (doc: Document, baseUrl = ''): void => {
  doc.querySelector('#banner [data-role="retry"]')?.addEventListener('click', () => {
    void boot(doc, baseUrl);
  });
  for (const tab of doc.querySelectorAll<HTMLElement>('[data-tab]')) {
    tab.addEventListener('click', () => {
      const wanted = tab.getAttribute('data-tab');
      for (const other of doc.querySelectorAll<HTMLElement>('[data-tab]')) {
        other.classList.toggle('active', other === tab);
      }
      for (const panel of doc.querySelectorAll<HTMLElement>('[data-panel]')) {
        panel.hidden = panel.getAttribute('data-panel') !== wanted;
      }
    });
  }
};

if (typeof document !== 'undefined') {
  bindChrome(document);
  void boot(document);
}
