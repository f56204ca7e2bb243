/** Thin typed client for the annotation service. The workbench computes
 * nothing itself: every number and label shown comes from these calls. */

import type {
  AgreementPayload,
  CodedPayload,
  DisagreementCell,
  NextEmailPayload,
  SchemaPayload,
  ServiceError,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public payload: ServiceError,
  ) {
    super(payload.message);
  }
}

export class NetworkError extends Error {}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string,
    private coderId: string,
    private token: string,
    private fetchImpl: FetchLike = fetch,
  ) {}

  get coder(): string {
    return this.coderId;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, {
        ...init,
        headers: {
          "Content-Type": "application/json",
          "X-Coder-Token": this.token,
          ...(init?.headers ?? {}),
        },
      });
    } catch (err) {
      throw new NetworkError(String(err));
    }
    if (!response.ok) {
      let payload: ServiceError;
      try {
        payload = (await response.json()) as ServiceError;
      } catch {
        payload = { code: "http-error", message: response.statusText, violations: [] };
      }
      throw new ApiError(response.status, payload);
    }
    return (await response.json()) as T;
  }

  getSchema(): Promise<SchemaPayload> {
    return this.request<SchemaPayload>("/api/schema");
  }

  nextEmail(): Promise<NextEmailPayload> {
    return this.request<NextEmailPayload>(
      `/api/emails/next?coder=${encodeURIComponent(this.coderId)}`,
    );
  }

  submitAnnotation(coded: CodedPayload): Promise<{ stored: boolean; coded: CodedPayload }> {
    return this.request("/api/annotations", {
      method: "POST",
      body: JSON.stringify({ coder_id: this.coderId, coded }),
    });
  }

  agreement(a: string, b: string): Promise<AgreementPayload> {
    return this.request<AgreementPayload>(
      `/api/agreement?a=${encodeURIComponent(a)}&b=${encodeURIComponent(b)}`,
    );
  }

  disagreements(a: string, b: string): Promise<{ disagreements: DisagreementCell[] }> {
    return this.request(
      `/api/disagreements?a=${encodeURIComponent(a)}&b=${encodeURIComponent(b)}`,
    );
  }

  exportAnnotations(format: "csv" | "jsonl", coder?: string): Promise<string> {
    const query = coder ? `&coder=${encodeURIComponent(coder)}` : "";
    return this.requestText(`/api/export?format=${format}${query}`);
  }

  private async requestText(path: string): Promise<string> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, {
        headers: { "X-Coder-Token": this.token },
      });
    } catch (err) {
      throw new NetworkError(String(err));
    }
    if (!response.ok) {
      throw new ApiError(response.status, {
        code: "http-error",
        message: response.statusText,
        violations: [],
      });
    }
    return await response.text();
  }
}
