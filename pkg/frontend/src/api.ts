/** Typed client for the task service's HTTP+JSON API. */

export type Choice = "first" | "second" | "equal";

export interface Task {
  hit_id: string;
  policy_id: string;
  presentation: string;
  statement_1_id: string;
  statement_1: string;
  statement_2_id: string;
  statement_2: string;
  source_url: string;
  expires_at: number;
}

export interface VoteAck {
  status: string;
  hit_id: string;
  duplicate: boolean;
  votes_for_pair: number;
  pair_complete: boolean;
}

/** Domain error decoded from the service's {error, detail} body. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    detail: string,
  ) {
    super(`${code}: ${detail}`);
    this.name = "ApiError";
  }
}

export interface TaskClient {
  registerWorker(workerId: string): Promise<void>;
  nextTask(workerId: string): Promise<Task>;
  submitVote(workerId: string, hitId: string, choice: Choice): Promise<VoteAck>;
}

type FetchFn = typeof fetch;

export class HttpTaskClient implements TaskClient {
  private readonly fetchFn: FetchFn;

  constructor(
    private readonly baseUrl: string,
    fetchFn: FetchFn = fetch,
  ) {
    // fetch throws if invoked with a foreign `this`
    this.fetchFn = fetchFn.bind(globalThis);
  }

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const body: unknown = await response.json();
    if (!response.ok) {
      const err = body as { error?: string; detail?: string };
      throw new ApiError(
        response.status,
        err.error ?? "HttpError",
        err.detail ?? response.statusText,
      );
    }
    return body;
  }

  async registerWorker(workerId: string): Promise<void> {
    try {
      await this.request("/workers", {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ worker_id: workerId }),
      });
    } catch (err) {
      // an already-known worker token is fine; anything else is not
      if (!(err instanceof ApiError && err.code === "InvalidInput")) {
        throw err;
      }
    }
  }

  async nextTask(workerId: string): Promise<Task> {
    const query = new URLSearchParams({ worker_id: workerId });
    return (await this.request(`/tasks?${query}`)) as Task;
  }

  async submitVote(
    workerId: string,
    hitId: string,
    choice: Choice,
  ): Promise<VoteAck> {
    return (await this.request("/votes", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ worker_id: workerId, hit_id: hitId, choice }),
    })) as VoteAck;
  }
}
