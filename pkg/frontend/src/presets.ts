/**
 * One-click presets for the bundled demo model and catchment catalogue.
 * Scenario presets refer to named scenarios in the model's scenario set;
 * pipeline presets assemble interventions from catalogue source listings.
 */

import type { CatalogueSource, InterventionRequest } from './types.js';

export interface ScenarioPreset {
  label: string;
  scenario: string;
}

export const SCENARIO_PRESETS: ScenarioPreset[] = [
  { label: 'Typical year', scenario: 'typical year' },
  { label: 'Storm event', scenario: 'storm event' },
  { label: 'Nutrient pool enough', scenario: 'nutrient pool enough' },
];

/** Whole-catchment conversions: every source switched to one land use. */
export const LANDUSE_PRESETS: string[] = [
  'waste water treatment plant',
  'grazing',
  'waste disposal',
  'aquaculture',
  'poultry',
];

export const CONVERSION_PRESET = {
  label: 'clear the bush',
  from: 'natural vegetation',
  to: 'agriculture',
};

const emptyIntervention = (label: string): InterventionRequest => ({
  practice_overrides: {},
  landuse_overrides: {},
  label,
});

export const baselineIntervention = (): InterventionRequest => emptyIntervention('');

export const wholeCatchmentIntervention = (
  sources: CatalogueSource[],
  category: string,
): InterventionRequest => {
  const spec = emptyIntervention(`all ${category}`);
  for (const source of sources) spec.landuse_overrides[source.id] = category;
  return spec;
};

export const conversionIntervention = (sources: CatalogueSource[]): InterventionRequest => {
  const spec = emptyIntervention(CONVERSION_PRESET.label);
  for (const source of sources) {
    if (source.category === CONVERSION_PRESET.from) {
      spec.landuse_overrides[source.id] = CONVERSION_PRESET.to;
    }
  }
  return spec;
};
