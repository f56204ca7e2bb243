/** DOM rendering for the workbench panes. Renderers are pure functions of
 * their payloads and return detached nodes, which keeps them testable. */

import { agreementTable, groupDisagreements, type AgreementTable } from "./agreement.js";
import { canSubmit, FIELD_ORDER, type CodingFormState, type FieldName } from "./form.js";
import { auditClean, sanitizeHtml } from "./sanitize.js";
import type { AgreementPayload, DisagreementCell, EmailPayload, SchemaPayload } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderErrorBanner(doc: Document, message: string): HTMLElement {
  const banner = el(doc, "div", "error-banner");
  banner.setAttribute("role", "alert");
  banner.textContent = message;
  return banner;
}

function isEmailPayload(payload: unknown): payload is EmailPayload {
  if (typeof payload !== "object" || payload === null) return false;
  const p = payload as Record<string, unknown>;
  return (
    typeof p.id === "string" &&
    typeof p.subject === "string" &&
    typeof p.body_text === "string" &&
    Array.isArray(p.urls)
  );
}

/** Sanitized email pane: headers a client would show, the body as escaped
 * plain text (or sanitized HTML when the toggle is on), and the link table
 * with caption and target side by side, mismatches highlighted. */
export function renderEmail(doc: Document, payload: unknown, showHtml = false): HTMLElement {
  if (!isEmailPayload(payload)) {
    return renderErrorBanner(doc, "malformed email payload; nothing rendered");
  }
  const root = el(doc, "article", "email-view");

  const header = el(doc, "header", "email-headers");
  const sender = payload.sender_display
    ? `${payload.sender_display} <${payload.sender_address}>`
    : payload.sender_address || "(no sender)";
  header.append(
    el(doc, "div", "email-id", payload.id),
    el(doc, "div", "email-from", `From: ${sender}`),
    el(doc, "div", "email-subject", `Subject: ${payload.subject || "(no subject)"}`),
    el(doc, "div", "email-date", `Date: ${payload.date ?? "(none)"}`),
  );
  if (payload.has_attachment) {
    header.append(el(doc, "div", "email-attachment", "Has attachment"));
  }
  root.append(header);

  const body = el(doc, "section", "email-body");
  if (showHtml && payload.body_html) {
    body.append(sanitizeHtml(payload.body_html, doc));
  } else {
    const pre = el(doc, "pre", "email-text");
    pre.textContent = payload.body_text; // textContent: always escaped
    body.append(pre);
  }
  root.append(body);

  if (payload.urls.length > 0) {
    const table = el(doc, "table", "url-table");
    const head = el(doc, "tr");
    head.append(
      el(doc, "th", undefined, "Link text"),
      el(doc, "th", undefined, "Target"),
      el(doc, "th", undefined, "Target domain"),
    );
    table.append(head);
    for (const url of payload.urls) {
      const row = el(doc, "tr", url.mismatch ? "url-row mismatch" : "url-row");
      row.append(
        el(doc, "td", "url-visible", url.visible_text),
        el(doc, "td", "url-href", url.href),
        el(doc, "td", "url-domain", url.href_domain || "(unparsed)"),
      );
      if (url.mismatch) {
        row.title = "link text claims a different domain than the target";
      }
      table.append(row);
    }
    root.append(table);
  }

  if (!auditClean(root)) {
    // should be unreachable; refuse to show a partially-sanitized render
    return renderErrorBanner(doc, "sanitization audit failed; refusing to render");
  }
  return root;
}

const FIELD_LABELS: Record<FieldName, string> = {
  company_names: "From - Company Name",
  sector: "From - Sector",
  salutation: "Salutation",
  threat: "Threatening Language",
  urgency: "Urgency Cues",
  actions_generic: "Action - Generic",
  action_specific: "Action - Specific",
  main_topic: "Main Topic",
  indirect_flag: "Indirect (legitimate service misused)",
};

export interface FormHandlers {
  onText(field: FieldName, value: string): void;
  onToggleAction(label: string): void;
  onSelect(field: FieldName, value: string): void;
  onFlag(value: boolean): void;
  onSubmit(): void;
}

/** The coding form. Suggested (untouched) fields carry the `suggested`
 * class so autocoder prefills stay visually distinct from human entries. */
export function renderForm(
  doc: Document,
  state: CodingFormState,
  schema: SchemaPayload,
  handlers: FormHandlers,
): HTMLElement {
  const root = el(doc, "form", "coding-form");
  root.addEventListener("submit", (event) => {
    event.preventDefault();
    handlers.onSubmit();
  });

  const selects: [FieldName, string[], string][] = [
    ["sector", schema.sectors, state.values.sector],
    ["salutation", schema.salutations, state.values.salutation],
    ["threat", schema.threat_values, state.values.threat],
    ["urgency", schema.urgency_values, state.values.urgency],
  ];

  const textRow = (field: FieldName, value: string): HTMLElement => {
    const row = rowShell(field);
    const input = el(doc, "input") as HTMLInputElement;
    input.type = "text";
    input.value = value;
    input.name = field;
    input.addEventListener("input", () => handlers.onText(field, input.value));
    row.append(input);
    return row;
  };

  const rowShell = (field: FieldName): HTMLElement => {
    const row = el(doc, "div", "field-row");
    row.dataset.field = field;
    if (state.suggested.has(field)) row.classList.add("suggested");
    if (state.dirty.has(field)) row.classList.add("edited");
    row.append(el(doc, "label", "field-label", FIELD_LABELS[field]));
    const violation = state.violations[field];
    if (violation) {
      row.classList.add("invalid");
      row.append(el(doc, "div", "violation", violation));
    }
    return row;
  };

  for (const field of FIELD_ORDER) {
    if (field === "company_names" || field === "action_specific") {
      const row = rowShell(field);
      const input = el(doc, "input") as HTMLInputElement;
      input.type = "text";
      input.name = field;
      input.value = state.values[field].join(", ");
      input.addEventListener("input", () => handlers.onText(field, input.value));
      row.append(input);
      root.append(row);
    } else if (field === "main_topic") {
      root.append(textRow(field, state.values.main_topic));
    } else if (field === "actions_generic") {
      const row = rowShell(field);
      for (const action of schema.actions) {
        const wrap = el(doc, "label", "action-option");
        const box = el(doc, "input") as HTMLInputElement;
        box.type = "checkbox";
        box.value = action;
        box.checked = state.values.actions_generic.includes(action);
        box.addEventListener("change", () => handlers.onToggleAction(action));
        wrap.append(box, doc.createTextNode(action));
        row.append(wrap);
      }
      root.append(row);
    } else if (field === "indirect_flag") {
      const row = rowShell(field);
      const box = el(doc, "input") as HTMLInputElement;
      box.type = "checkbox";
      box.checked = state.values.indirect_flag;
      box.addEventListener("change", () => handlers.onFlag(box.checked));
      row.append(box);
      root.append(row);
    } else {
      const [, options, current] = selects.find(([f]) => f === field)!;
      const row = rowShell(field);
      const select = el(doc, "select") as HTMLSelectElement;
      select.name = field;
      for (const option of options) {
        const opt = el(doc, "option", undefined, option) as HTMLOptionElement;
        opt.value = option;
        opt.selected = option === current;
        select.append(opt);
      }
      select.addEventListener("change", () => handlers.onSelect(field, select.value));
      row.append(select);
      root.append(row);
    }
  }

  for (const violation of state.serverViolations) {
    root.append(el(doc, "div", "violation server", violation));
  }

  const submit = el(doc, "button", "submit", "Save and next") as HTMLButtonElement;
  submit.type = "submit";
  submit.disabled = !canSubmit(state);
  root.append(submit);
  return root;
}

export function renderAgreementPanel(
  doc: Document,
  payload: AgreementPayload,
  disagreements: DisagreementCell[],
): HTMLElement {
  const root = el(doc, "section", "agreement-panel");
  const table: AgreementTable = agreementTable(payload);
  if (table.empty) {
    root.append(el(doc, "div", "empty-state", table.message));
    return root;
  }
  const grid = el(doc, "table", "agreement-table");
  const head = el(doc, "tr");
  head.append(
    el(doc, "th", undefined, "High-Level Code"),
    el(doc, "th", undefined, "C. Kappa"),
    el(doc, "th", undefined, "K. Alpha"),
    el(doc, "th", undefined, "Items"),
  );
  grid.append(head);
  for (const row of table.rows) {
    const tr = el(doc, "tr", "agreement-row");
    tr.append(
      el(doc, "td", undefined, row.code),
      el(doc, "td", "kappa", row.kappa),
      el(doc, "td", "alpha", row.alpha),
      el(doc, "td", undefined, String(row.items)),
    );
    grid.append(tr);
  }
  const overall = el(doc, "tr", "agreement-overall");
  overall.append(
    el(doc, "td", undefined, "Overall"),
    el(doc, "td", "kappa", table.overall!.kappa),
    el(doc, "td", "alpha", table.overall!.alpha),
    el(doc, "td", undefined, ""),
  );
  grid.append(overall);
  root.append(grid);

  const groups = groupDisagreements(disagreements);
  if (groups.length > 0) {
    const list = el(doc, "ul", "disagreement-list");
    for (const group of groups) {
      const item = el(doc, "li", "disagreement");
      const link = el(doc, "a", "disagreement-link", group.emailId);
      link.setAttribute("data-email-id", group.emailId);
      item.append(link);
      for (const cell of group.cells) {
        item.append(el(doc, "div", "cell", `${cell.code}: ${cell.a} vs ${cell.b}`));
      }
      list.append(item);
    }
    root.append(list);
  }
  return root;
}

export function renderCompletion(doc: Document, exportHref: string): HTMLElement {
  const root = el(doc, "section", "completion");
  root.append(el(doc, "h2", undefined, "All emails annotated"));
  const link = el(doc, "a", "export-link", "Download your annotations (JSONL)");
  link.setAttribute("href", exportHref);
  root.append(link);
  return root;
}
