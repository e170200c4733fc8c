/** Session state machine: one task on screen, one request in flight.
 *
 * The machine is deliberately DOM-free so the same code path can be
 * driven by tests against a live service. Rules it enforces:
 * submitting needs a selection; at most one request is ever in flight
 * (extra submit calls are no-ops, so a double-click cannot cast two
 * votes); a stale assignment is informational and rolls straight into
 * the next task; an empty task pool ends the session with the tally.
 */

import { ApiError, type Choice, type Task, type TaskClient } from "./api.js";

export type SessionState =
  | { kind: "loading" }
  | {
      kind: "task";
      task: Task;
      selection: Choice | null;
      submitting: boolean;
      notice: string | null;
    }
  | { kind: "done"; completed: number }
  | { kind: "failed"; message: string };

export class Session {
  private state: SessionState = { kind: "loading" };
  private inFlight = false;
  private listeners: Array<(state: SessionState) => void> = [];
  completed = 0;

  constructor(
    private readonly client: TaskClient,
    private readonly workerId: string,
  ) {}

  current(): SessionState {
    return this.state;
  }

  onChange(listener: (state: SessionState) => void): void {
    this.listeners.push(listener);
  }

  private setState(state: SessionState): void {
    this.state = state;
    for (const listener of this.listeners) {
      listener(state);
    }
  }

  async start(): Promise<void> {
    await this.client.registerWorker(this.workerId);
    await this.fetchNext(null);
  }

  /** Record the worker's choice; legal only while a task is shown. */
  select(choice: Choice): void {
    if (this.state.kind !== "task" || this.state.submitting) {
      return;
    }
    this.setState({ ...this.state, selection: choice });
  }

  /** Submit the current selection, then advance to the next task. */
  async submit(): Promise<void> {
    if (
      this.state.kind !== "task" ||
      this.state.selection === null ||
      this.inFlight
    ) {
      return;
    }
    const { task, selection } = this.state;
    this.inFlight = true;
    this.setState({ ...this.state, submitting: true });
    try {
      await this.client.submitVote(this.workerId, task.hit_id, selection);
      this.completed += 1;
      await this.fetchNext(null);
    } catch (err) {
      if (err instanceof ApiError && err.code === "StaleAssignment") {
        // the lease ran out; nothing was lost, just move on
        await this.fetchNext("That comparison expired; here is a fresh one.");
      } else {
        this.setState({ kind: "failed", message: String(err) });
      }
    } finally {
      this.inFlight = false;
    }
  }

  private async fetchNext(notice: string | null): Promise<void> {
    try {
      const task = await this.client.nextTask(this.workerId);
      this.setState({
        kind: "task",
        task,
        selection: null,
        submitting: false,
        notice,
      });
    } catch (err) {
      if (err instanceof ApiError && err.code === "NoTaskAvailable") {
        this.setState({ kind: "done", completed: this.completed });
      } else {
        this.setState({ kind: "failed", message: String(err) });
      }
    }
  }
}
