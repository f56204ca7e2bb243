/** Agreement-panel view model. Strictly a formatter: every number shown is
 * the service's value rendered to two decimals, never recomputed here. */

import type { AgreementPayload, DisagreementCell } from "./types.js";

export interface AgreementRow {
  code: string;
  kappa: string;
  alpha: string;
  items: number;
}

export interface AgreementTable {
  empty: boolean;
  message: string;
  rows: AgreementRow[];
  overall: { kappa: string; alpha: string } | null;
}

const CODE_TITLES: Record<string, string> = {
  company: "From - Company Name",
  sector: "From - Sector",
  salutation: "Salutation",
  threat: "Threatening Language",
  urgency: "Urgency Cues",
  action: "Action - Generic",
};

export function agreementTable(payload: AgreementPayload): AgreementTable {
  if (payload.empty || !payload.per_code) {
    return {
      empty: true,
      message: payload.message ?? "no shared annotated emails yet",
      rows: [],
      overall: null,
    };
  }
  const rows: AgreementRow[] = Object.entries(payload.per_code).map(([code, r]) => ({
    code: CODE_TITLES[code] ?? code,
    kappa: r.kappa.toFixed(2),
    alpha: r.alpha.toFixed(2),
    items: r.n_items,
  }));
  return {
    empty: false,
    message: "",
    rows,
    overall: {
      kappa: (payload.overall_kappa ?? 0).toFixed(2),
      alpha: (payload.overall_alpha ?? 0).toFixed(2),
    },
  };
}

export interface DisagreementGroup {
  emailId: string;
  cells: { code: string; a: string; b: string }[];
}

export function groupDisagreements(cells: DisagreementCell[]): DisagreementGroup[] {
  const byEmail = new Map<string, DisagreementGroup>();
  for (const cell of cells) {
    let group = byEmail.get(cell.email_id);
    if (!group) {
      group = { emailId: cell.email_id, cells: [] };
      byEmail.set(cell.email_id, group);
    }
    group.cells.push({ code: cell.code, a: cell.a, b: cell.b });
  }
  return [...byEmail.values()].sort((x, y) => x.emailId.localeCompare(y.emailId));
}
