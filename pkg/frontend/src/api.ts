import type {
  AnnotationReply,
  CandidatesPayload,
  Decision,
  RetrainReply,
  RetrainReport,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
  }
}

export class BusyError extends ApiError {}

async function request<T>(input: string, init?: RequestInit): Promise<T> {
  const response = await fetch(input, init);
  if (!response.ok) {
    let detail = `HTTP ${response.status}`;
    try {
      const body = await response.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body: keep the status line
    }
    if (response.status === 409) throw new BusyError(response.status, detail);
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(
    readonly sessionId: string,
    readonly base: string = "",
  ) {}

  private url(path: string): string {
    return `${this.base}/api/session/${encodeURIComponent(this.sessionId)}${path}`;
  }

  candidates(): Promise<CandidatesPayload> {
    return request(this.url("/candidates"));
  }

  submitAnnotation(term: string, decision: Decision): Promise<AnnotationReply> {
    return request(this.url("/annotations"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ term, causal: decision.causal, antonyms: decision.antonyms }),
    });
  }

  retrain(seed: number): Promise<RetrainReply> {
    return request(this.url("/retrain"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ seed }),
    });
  }

  lastReport(): Promise<{ revision: number; report: RetrainReport }> {
    return request(this.url("/report"));
  }
}
