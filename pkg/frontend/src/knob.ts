// Knob semantics: the display position clamps to the observed [min, max],
// the typed value itself is preserved and transmitted verbatim.

export interface KnobView {
  /** Fraction of the dial in [0, 1] after clamping. */
  position: number;
  /** True when the typed value fell outside [min, max]. */
  pinned: boolean;
  /** The value as typed; this is what computation and the wire see. */
  typed: number;
}

export function knobView(typed: number, min: number, max: number): KnobView {
  const span = max - min;
  const raw = span > 0 ? (typed - min) / span : 0.5;
  const position = Math.min(1, Math.max(0, raw));
  return { position, pinned: raw !== position, typed };
}

/** Value at a dial fraction (used when dragging the grey handle). */
export function valueAtPosition(position: number, min: number, max: number): number {
  return min + Math.min(1, Math.max(0, position)) * (max - min);
}

/**
 * Trailing-edge debounce for knob drags: intermediate moves are coalesced
 * within `waitMs`, and `flush` (mouse release) always sends the final value.
 */
export function debounced<T>(
  send: (value: T) => void,
  waitMs = 60,
  now: () => number = () => performance.now(),
  schedule: (fn: () => void, ms: number) => unknown = (fn, ms) => setTimeout(fn, ms),
  cancel: (handle: unknown) => void = (h) => clearTimeout(h as number),
) {
  let pending: { value: T } | null = null;
  let handle: unknown = null;
  let lastSent = -Infinity;

  const fire = () => {
    handle = null;
    if (pending !== null) {
      const { value } = pending;
      pending = null;
      lastSent = now();
      send(value);
    }
  };

  return {
    push(value: T) {
      pending = { value };
      if (handle === null) {
        const wait = Math.max(0, waitMs - (now() - lastSent));
        handle = schedule(fire, wait);
      }
    },
    /** Mouse release: always emit the final value immediately. */
    flush() {
      if (handle !== null) {
        cancel(handle);
      }
      fire();
    },
    hasPending(): boolean {
      return pending !== null;
    },
  };
}
