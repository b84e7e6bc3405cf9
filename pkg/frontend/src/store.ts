// View state: the latest applied session state plus interaction bookkeeping.
//
// Mutations carry sequence numbers; a response whose sequence is older than
// the newest applied one is discarded, so a slow earlier request can never
// overwrite a newer state.

import type { ProfileId, SessionState } from "./types.js";

export const NODE_COUNT_WARNING_THRESHOLD = 9;

export type Listener = (state: SessionState) => void;

export class ViewStore {
  private state_: SessionState | null = null;
  private nextSeq = 1;
  private appliedSeq = 0;
  private listeners: Listener[] = [];

  selectedProfile: ProfileId = "A";
  radius = 1.0;
  selectedTrackerIndex: number | null = null;
  /** Exiting comparison hides B in the view; the profile stays on the server. */
  comparisonHidden = false;

  get state(): SessionState | null {
    return this.state_;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  /** Reserve a sequence number before issuing a mutation. */
  begin(): number {
    return this.nextSeq++;
  }

  /** Apply a response; returns false (and changes nothing) when stale. */
  apply(seq: number, state: SessionState): boolean {
    if (seq < this.appliedSeq) {
      return false;
    }
    this.appliedSeq = seq;
    this.state_ = state;
    for (const listener of this.listeners) {
      listener(state);
    }
    return true;
  }

  /** Apply a read (no ordering guarantees needed beyond the last mutation). */
  applyRead(state: SessionState): void {
    this.apply(this.appliedSeq, state);
  }

  /** Blurred edges are exactly the service's inactive set, never recomputed. */
  blurredEdges(profile: ProfileId = this.selectedProfile): [string, string][] {
    const p = this.state_?.profiles[profile];
    return p ? p.prediction.inactive_edges : [];
  }

  nonImpacting(profile: ProfileId = this.selectedProfile): string[] {
    const p = this.state_?.profiles[profile];
    return p ? p.prediction.non_impacting : [];
  }

  comparisonActive(): boolean {
    return this.state_?.profiles.B != null && !this.comparisonHidden;
  }

  /** The state as the view should see it (B stripped while hidden). */
  viewState(): SessionState | null {
    if (!this.state_) return null;
    if (!this.comparisonHidden || this.state_.profiles.B == null) return this.state_;
    return { ...this.state_, profiles: { A: this.state_.profiles.A, B: null } };
  }

  /** Nodes whose profile-B value differs from profile A (blue change arrows). */
  changedNodes(): string[] {
    const a = this.state_?.profiles.A;
    const b = this.state_?.profiles.B;
    if (!a || !b) return [];
    const out: string[] = [];
    for (const node of Object.keys(a.prediction.values)) {
      if (a.prediction.values[node] !== b.prediction.values[node]) {
        out.push(node);
      }
    }
    return out.sort();
  }

  tooManyNodes(): boolean {
    const n = this.state_?.model?.variables.length ?? 0;
    return n > NODE_COUNT_WARNING_THRESHOLD;
  }
}
