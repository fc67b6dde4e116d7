/** Typed client for the annotation service's /api contract. */

export interface QueuedPair {
  pair_id: string;
  text_a: string;
  text_b: string;
  arg_type: string;
  doc_excerpt: string;
  model_p: number;
}

export interface QueueResponse {
  batch_id: string | null;
  pairs: QueuedPair[];
}

export interface RoundReport {
  round: number;
  selected: string[];
  dev_f1: number;
  model_snapshot_id: string;
}

export interface Status {
  round: number;
  labeled_count: number;
  unlabeled_count: number;
  pending_batch: string[];
  history: RoundReport[];
  should_stop: boolean;
}

export interface LabelSubmission {
  pair_id: string;
  label: 0 | 1;
}

export interface LabelAck {
  applied: boolean;
  labeled_count: number;
}

export class ApiError extends Error {
  constructor(
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = `HTTP ${response.status}`;
      try {
        const body = (await response.json()) as { error?: string };
        if (body.error) detail = body.error;
      } catch {
        // non-JSON error body: keep the status text
      }
      throw new ApiError(detail, response.status);
    }
    return (await response.json()) as T;
  }

  status(): Promise<Status> {
    return this.request<Status>("/api/status");
  }

  fetchQueue(n: number): Promise<QueueResponse> {
    return this.request<QueueResponse>(`/api/queue?n=${n}`);
  }

  submitLabels(batchId: string, labels: LabelSubmission[]): Promise<LabelAck> {
    return this.request<LabelAck>("/api/labels", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ batch_id: batchId, labels }),
    });
  }

  triggerRetrain(): Promise<RoundReport> {
    return this.request<RoundReport>("/api/retrain", { method: "POST" });
  }
}
