/** Coding-form state: one entry per codebook field, prefilled from the
 * service's suggestion, with dirty tracking and client-side validation
 * mirrored from /api/schema. Validation gates submission; it never invents
 * codes of its own. */

import type { CodedPayload, SchemaPayload } from "./types.js";

export type FieldName =
  | "company_names"
  | "sector"
  | "salutation"
  | "threat"
  | "urgency"
  | "actions_generic"
  | "action_specific"
  | "main_topic"
  | "indirect_flag";

export const FIELD_ORDER: FieldName[] = [
  "company_names",
  "sector",
  "salutation",
  "threat",
  "urgency",
  "actions_generic",
  "action_specific",
  "main_topic",
  "indirect_flag",
];

export interface CodingFormState {
  emailId: string;
  values: {
    company_names: string[];
    sector: string;
    salutation: string;
    threat: string;
    urgency: string;
    actions_generic: string[];
    action_specific: string[];
    main_topic: string;
    indirect_flag: boolean;
  };
  /** fields still carrying the untouched autocoder suggestion */
  suggested: Set<FieldName>;
  dirty: Set<FieldName>;
  /** violations keyed by field; empty object means submittable */
  violations: Partial<Record<FieldName, string>>;
  serverViolations: string[];
}

export function formFromSuggestion(suggestion: CodedPayload, schema: SchemaPayload): CodingFormState {
  const state: CodingFormState = {
    emailId: suggestion.email_id,
    values: {
      company_names: [...suggestion.company_names],
      sector: suggestion.sector,
      salutation: suggestion.salutation,
      threat: suggestion.threat,
      urgency: suggestion.urgency,
      actions_generic: [...suggestion.actions_generic],
      action_specific: [...suggestion.action_specific],
      main_topic: suggestion.main_topic,
      indirect_flag: suggestion.indirect_flag,
    },
    suggested: new Set(FIELD_ORDER),
    dirty: new Set(),
    violations: {},
    serverViolations: [],
  };
  state.violations = validate(state, schema);
  return state;
}

export function setField<K extends FieldName>(
  state: CodingFormState,
  field: K,
  value: CodingFormState["values"][K],
  schema: SchemaPayload,
): CodingFormState {
  const next: CodingFormState = {
    ...state,
    values: { ...state.values, [field]: value },
    suggested: new Set(state.suggested),
    dirty: new Set(state.dirty),
    serverViolations: [],
  };
  next.suggested.delete(field);
  next.dirty.add(field);
  next.violations = validate(next, schema);
  return next;
}

const NORMALIZE_HINT = /[A-Z]/;

export function validate(
  state: CodingFormState,
  schema: SchemaPayload,
): Partial<Record<FieldName, string>> {
  const out: Partial<Record<FieldName, string>> = {};
  const v = state.values;
  if (v.company_names.length === 0) {
    out.company_names = "at least one company entry (use \"none\" when unnamed)";
  } else if (v.company_names.includes("none") && v.company_names.length > 1) {
    out.company_names = '"none" must be the sole entry';
  }
  if (!schema.sectors.includes(v.sector)) {
    out.sector = `unknown sector: ${v.sector}`;
  }
  if (!schema.salutations.includes(v.salutation)) {
    out.salutation = `unknown salutation: ${v.salutation}`;
  }
  if (!schema.threat_values.includes(v.threat)) {
    out.threat = `unknown threat value: ${v.threat}`;
  }
  if (!schema.urgency_values.includes(v.urgency)) {
    out.urgency = `unknown urgency value: ${v.urgency}`;
  }
  if (v.actions_generic.length === 0) {
    out.actions_generic = "pick at least one action (or \"none\")";
  } else if (v.actions_generic.includes("none") && v.actions_generic.length > 1) {
    out.actions_generic = '"none" cannot co-occur with another action';
  } else if (v.actions_generic.some((a) => !schema.actions.includes(a))) {
    out.actions_generic = "unknown action label";
  }
  if (v.action_specific.some((p) => NORMALIZE_HINT.test(p))) {
    out.action_specific = "phrases are stored lowercase";
  }
  if (NORMALIZE_HINT.test(v.main_topic)) {
    out.main_topic = "topic is stored lowercase";
  }
  return out;
}

export function canSubmit(state: CodingFormState): boolean {
  return Object.keys(state.violations).length === 0;
}

export function toPayload(state: CodingFormState): CodedPayload {
  const v = state.values;
  return {
    email_id: state.emailId,
    company_names: v.company_names,
    sector: v.sector,
    salutation: v.salutation,
    threat: v.threat,
    urgency: v.urgency,
    actions_generic: v.actions_generic,
    action_specific: v.action_specific,
    main_topic: v.main_topic,
    indirect_flag: v.indirect_flag,
  };
}

/** Maps the service's 422 violation strings onto fields for inline display;
 * unmatched ones stay in serverViolations. */
export function applyServerViolations(
  state: CodingFormState,
  violations: string[],
): CodingFormState {
  const next = { ...state, violations: { ...state.violations }, serverViolations: [] as string[] };
  for (const violation of violations) {
    const lower = violation.toLowerCase();
    let matched: FieldName | null = null;
    if (lower.includes("sector")) matched = "sector";
    else if (lower.includes("salutation")) matched = "salutation";
    else if (lower.includes("threat")) matched = "threat";
    else if (lower.includes("urgency")) matched = "urgency";
    else if (lower.includes("action") && lower.includes("phrase")) matched = "action_specific";
    else if (lower.includes("action")) matched = "actions_generic";
    else if (lower.includes("company")) matched = "company_names";
    else if (lower.includes("topic")) matched = "main_topic";
    if (matched) next.violations[matched] = violation;
    else next.serverViolations.push(violation);
  }
  return next;
}

/** Keyboard-first entry: one keystroke selects a closed-vocabulary
 * sub-code on the focused field. Keys are 1..9 for the nth option, and the
 * option's first letter when unambiguous. Returns null when the key does
 * not bind. */
export function applyKey(
  state: CodingFormState,
  field: FieldName,
  key: string,
  schema: SchemaPayload,
): CodingFormState | null {
  const options: Partial<Record<FieldName, string[]>> = {
    sector: schema.sectors,
    salutation: schema.salutations,
    threat: schema.threat_values,
    urgency: schema.urgency_values,
    actions_generic: schema.actions,
  };
  const opts = options[field];
  if (!opts) return null;
  let choice: string | undefined;
  if (/^[1-9]$/.test(key)) {
    choice = opts[Number(key) - 1];
  } else {
    const byLetter = opts.filter((o) => o.startsWith(key.toLowerCase()));
    if (byLetter.length === 1) choice = byLetter[0];
  }
  if (choice === undefined) return null;
  if (field === "actions_generic") {
    const current = new Set(state.values.actions_generic);
    if (current.has(choice)) current.delete(choice);
    else current.add(choice);
    if (choice === "none") {
      return setField(state, field, ["none"], schema);
    }
    current.delete("none");
    return setField(state, field, [...current].sort(), schema);
  }
  return setField(state, field, choice, schema);
}
