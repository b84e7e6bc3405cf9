import { describe, expect, it } from "vitest";

import { debounced, knobView, valueAtPosition } from "../src/knob.js";

describe("knobView", () => {
  it("places in-range values proportionally", () => {
    expect(knobView(5, 0, 10)).toEqual({ position: 0.5, pinned: false, typed: 5 });
    expect(knobView(0, 0, 10).position).toBe(0);
    expect(knobView(10, 0, 10).position).toBe(1);
  });

  it("pins out-of-range values at the nearest extremum but keeps the typed number", () => {
    const above = knobView(25, 0, 10);
    expect(above.position).toBe(1);
    expect(above.pinned).toBe(true);
    expect(above.typed).toBe(25);

    const below = knobView(-3, 0, 10);
    expect(below.position).toBe(0);
    expect(below.pinned).toBe(true);
    expect(below.typed).toBe(-3);
  });

  it("maps dial fractions back to values", () => {
    expect(valueAtPosition(0.5, 0, 10)).toBe(5);
    expect(valueAtPosition(-0.2, 0, 10)).toBe(0);
    expect(valueAtPosition(1.7, 0, 10)).toBe(10);
  });
});

describe("debounced", () => {
  function fakeClock() {
    let now = 0;
    const queue: { at: number; fn: () => void; id: number }[] = [];
    let nextId = 1;
    return {
      now: () => now,
      schedule: (fn: () => void, ms: number) => {
        const id = nextId++;
        queue.push({ at: now + ms, fn, id });
        return id;
      },
      cancel: (handle: unknown) => {
        const index = queue.findIndex((q) => q.id === handle);
        if (index >= 0) queue.splice(index, 1);
      },
      advance(ms: number) {
        now += ms;
        for (const item of [...queue].sort((a, b) => a.at - b.at)) {
          if (item.at <= now) {
            this.cancel(item.id);
            item.fn();
          }
        }
      },
    };
  }

  it("coalesces a burst into one trailing send", () => {
    const clock = fakeClock();
    const sent: number[] = [];
    const d = debounced<number>((v) => sent.push(v), 60, clock.now, clock.schedule, clock.cancel);
    d.push(1);
    d.push(2);
    d.push(3);
    expect(sent).toEqual([]);
    clock.advance(60);
    expect(sent).toEqual([3]);
  });

  it("flush always sends the final value immediately", () => {
    const clock = fakeClock();
    const sent: number[] = [];
    const d = debounced<number>((v) => sent.push(v), 60, clock.now, clock.schedule, clock.cancel);
    d.push(7);
    d.flush();
    expect(sent).toEqual([7]);
    expect(d.hasPending()).toBe(false);
  });

  it("flush after a timer send does not duplicate", () => {
    const clock = fakeClock();
    const sent: number[] = [];
    const d = debounced<number>((v) => sent.push(v), 60, clock.now, clock.schedule, clock.cancel);
    d.push(1);
    clock.advance(60);
    d.flush();
    expect(sent).toEqual([1]);
  });
});
