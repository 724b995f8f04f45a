/** Session view state: history, selection, and the single in-flight mutation. */

import type { ExtensionRule, IterationDto, SessionDetailDto } from "./types.js";

export type Listener = () => void;

export class SessionStore {
  private session: SessionDetailDto | null = null;
  private listeners: Listener[] = [];

  /** Index of the iteration currently shown; history stays navigable. */
  viewedIteration = 0;
  selection = new Set<string>();
  rules = new Set<ExtensionRule>(["df", "dp", "conc", "ef", "ep"]);
  minCaseFrequency: number | null = null;
  pending = false;
  banner: { kind: "error" | "conflict" | "stale" | "done"; message: string } | null = null;
  scatterMode: "projected" | "pairs" = "projected";

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((entry) => entry !== listener);
    };
  }

  notify(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }

  setSession(session: SessionDetailDto): void {
    this.session = session;
    this.viewedIteration = session.iterations.length - 1;
    this.selection.clear();
    this.banner = null;
    this.notify();
  }

  get current(): SessionDetailDto | null {
    return this.session;
  }

  get iteration(): IterationDto | null {
    if (!this.session) {
      return null;
    }
    return this.session.iterations[this.viewedIteration] ?? null;
  }

  get latestIndex(): number {
    return this.session ? this.session.iterations.length - 1 : -1;
  }

  /** Selection stays within the displayed candidates. */
  toggleSelection(patternId: string): void {
    const iteration = this.iteration;
    if (!iteration || !iteration.candidates.some((candidate) => candidate.id === patternId)) {
      return;
    }
    if (this.selection.has(patternId)) {
      this.selection.delete(patternId);
    } else {
      this.selection.add(patternId);
    }
    this.notify();
  }

  viewIteration(index: number): void {
    if (!this.session || index < 0 || index >= this.session.iterations.length) {
      return;
    }
    this.viewedIteration = index;
    this.selection.clear();
    this.notify();
  }

  appendIteration(iteration: IterationDto, status: string): void {
    if (!this.session) {
      return;
    }
    this.session = {
      ...this.session,
      status,
      iterations: [...this.session.iterations, iteration],
    };
    this.viewedIteration = this.session.iterations.length - 1;
    this.selection.clear();
    this.banner = null;
    this.notify();
  }

  markDone(status: string): void {
    if (this.session) {
      this.session = { ...this.session, status };
    }
    this.banner = { kind: "done", message: "no extensions possible" };
    this.notify();
  }

  /** Extending is only sensible from the latest iteration with a valid choice. */
  canExtend(): boolean {
    return (
      this.session !== null &&
      this.session.status === "awaiting-selection" &&
      this.viewedIteration === this.latestIndex &&
      this.selection.size > 0 &&
      this.rules.size > 0 &&
      !this.pending
    );
  }
}
