/** Wire types mirroring the annotation service JSON API. */

export interface UrlRefPayload {
  visible_text: string;
  href: string;
  href_domain: string;
  mismatch: boolean;
  parse_failed: boolean;
}

export interface TransportPayload {
  first_ip: string | null;
  received_count: number;
  dkim_present: boolean;
}

export interface EmailPayload {
  id: string;
  date: string | null;
  sender_display: string;
  sender_address: string;
  sender_domain: string;
  subject: string;
  body_text: string;
  body_html: string | null;
  urls: UrlRefPayload[];
  has_attachment: boolean;
  transport: TransportPayload;
  warnings: string[];
}

export interface CodedPayload {
  email_id: string;
  company_names: string[];
  sector: string;
  salutation: string;
  threat: string;
  urgency: string;
  actions_generic: string[];
  action_specific: string[];
  main_topic: string;
  indirect_flag: boolean;
}

export interface SchemaPayload {
  sectors: string[];
  salutations: string[];
  threat_values: string[];
  urgency_values: string[];
  actions: string[];
}

export interface NextEmailPayload {
  done: boolean;
  email: EmailPayload | null;
  suggestion: CodedPayload | null;
}

export interface CodeAgreementPayload {
  kappa: number;
  alpha: number;
  p_o: number;
  p_e: number;
  n_items: number;
  excluded: number;
  degenerate: boolean;
}

export interface AgreementPayload {
  empty: boolean;
  message?: string;
  coder_a?: string;
  coder_b?: string;
  n_shared?: number;
  overall_kappa?: number;
  overall_alpha?: number;
  per_code?: Record<string, CodeAgreementPayload>;
}

export interface DisagreementCell {
  email_id: string;
  code: string;
  a: string;
  b: string;
}

export interface ServiceError {
  code: string;
  message: string;
  violations: string[];
}
