/** Workbench wiring: fetch next email, edit codes, submit, advance; the
 * agreement panel refreshes on demand. State lives here, views render it. */

import { ApiClient, ApiError, NetworkError } from "./api.js";
import {
  applyKey,
  applyServerViolations,
  canSubmit,
  formFromSuggestion,
  setField,
  toPayload,
  type CodingFormState,
  type FieldName,
} from "./form.js";
import {
  renderAgreementPanel,
  renderCompletion,
  renderEmail,
  renderErrorBanner,
  renderForm,
} from "./views.js";
import type { EmailPayload, SchemaPayload } from "./types.js";

export interface WorkbenchOptions {
  doc: Document;
  mount: HTMLElement;
  client: ApiClient;
  peerCoder?: string;
}

export class Workbench {
  private doc: Document;
  private mount: HTMLElement;
  private client: ApiClient;
  private peerCoder?: string;
  private schema!: SchemaPayload;
  private email: EmailPayload | null = null;
  private form: CodingFormState | null = null;
  private showHtml = false;
  private focusedField: FieldName = "sector";
  private lastError = "";

  constructor(options: WorkbenchOptions) {
    this.doc = options.doc;
    this.mount = options.mount;
    this.client = options.client;
    this.peerCoder = options.peerCoder;
  }

  async start(): Promise<void> {
    this.schema = await this.client.getSchema();
    await this.advance();
  }

  async advance(): Promise<void> {
    let next;
    try {
      next = await this.client.nextEmail();
    } catch (err) {
      this.lastError = err instanceof Error ? err.message : String(err);
      this.render();
      return;
    }
    if (next.done || !next.email || !next.suggestion) {
      this.email = null;
      this.form = null;
      this.render(true);
      return;
    }
    this.email = next.email;
    this.form = formFromSuggestion(next.suggestion, this.schema);
    this.lastError = "";
    this.render();
  }

  /** POST the form; on success move on, on 422 show the per-field
   * violations, on network failure keep the form and offer a retry. */
  async submitAndAdvance(): Promise<void> {
    if (!this.form || !canSubmit(this.form)) return;
    try {
      await this.client.submitAnnotation(toPayload(this.form));
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        this.form = applyServerViolations(this.form, err.payload.violations);
        this.lastError = "";
      } else if (err instanceof NetworkError) {
        this.lastError = "network failure; your entries are preserved - retry";
      } else {
        this.lastError = err instanceof Error ? err.message : String(err);
      }
      this.render();
      return;
    }
    await this.advance();
  }

  handleKey(key: string): void {
    if (!this.form) return;
    const updated = applyKey(this.form, this.focusedField, key, this.schema);
    if (updated) {
      this.form = updated;
      this.render();
    }
  }

  focusField(field: FieldName): void {
    this.focusedField = field;
  }

  toggleHtml(): void {
    this.showHtml = !this.showHtml;
    this.render();
  }

  async refreshAgreement(
    container: HTMLElement,
    a: string = this.client.coder,
    b: string | undefined = this.peerCoder,
  ): Promise<void> {
    if (!b) {
      container.replaceChildren(
        renderErrorBanner(this.doc, "no peer coder configured for agreement"),
      );
      return;
    }
    try {
      const [agreement, cells] = await Promise.all([
        this.client.agreement(a, b),
        this.client.disagreements(a, b),
      ]);
      container.replaceChildren(
        renderAgreementPanel(this.doc, agreement, cells.disagreements),
      );
    } catch (err) {
      container.replaceChildren(
        renderErrorBanner(this.doc, err instanceof Error ? err.message : String(err)),
      );
    }
  }

  render(done = false): void {
    const doc = this.doc;
    this.mount.replaceChildren();
    if (this.lastError) {
      const banner = renderErrorBanner(doc, this.lastError);
      if (this.form) {
        const retry = doc.createElement("button");
        retry.className = "retry";
        retry.textContent = "Retry";
        retry.addEventListener("click", () => void this.submitAndAdvance());
        banner.append(retry);
      }
      this.mount.append(banner);
    }
    if (done) {
      this.mount.append(
        renderCompletion(doc, `/api/export?format=jsonl&coder=${this.client.coder}`),
      );
      return;
    }
    if (!this.email || !this.form) return;

    const toggle = doc.createElement("button");
    toggle.className = "html-toggle";
    toggle.textContent = this.showHtml ? "Show plain text" : "Show raw HTML (sanitized)";
    toggle.addEventListener("click", () => this.toggleHtml());
    this.mount.append(toggle);

    this.mount.append(renderEmail(doc, this.email, this.showHtml));
    this.mount.append(
      renderForm(doc, this.form, this.schema, {
        onText: (field, value) => {
          if (field === "company_names" || field === "action_specific") {
            const parts = value
              .split(",")
              .map((part) => part.trim())
              .filter((part) => part.length > 0);
            this.form = setField(this.form!, field, parts, this.schema);
          } else if (field === "main_topic") {
            this.form = setField(this.form!, field, value, this.schema);
          }
          this.renderFormOnly();
        },
        onToggleAction: (label) => {
          const current = new Set(this.form!.values.actions_generic);
          if (current.has(label)) current.delete(label);
          else current.add(label);
          if (label === "none" && current.has("none")) {
            this.form = setField(this.form!, "actions_generic", ["none"], this.schema);
          } else {
            current.delete("none");
            this.form = setField(
              this.form!,
              "actions_generic",
              [...current].sort(),
              this.schema,
            );
          }
          this.renderFormOnly();
        },
        onSelect: (field, value) => {
          this.form = setField(this.form!, field as FieldName, value, this.schema);
          this.renderFormOnly();
        },
        onFlag: (value) => {
          this.form = setField(this.form!, "indirect_flag", value, this.schema);
          this.renderFormOnly();
        },
        onSubmit: () => void this.submitAndAdvance(),
      }),
    );
  }

  private renderFormOnly(): void {
    // granular re-render keeps input focus handling simple for tests; a
    // full render is equivalent
    this.render();
  }
}
