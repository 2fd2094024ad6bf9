import { describe, expect, it } from "vitest";
import { makeThrottle } from "../src/throttle.js";

/** Deterministic clock + scheduler so throttle behavior is exact. */
function fakeTime() {
  let t = 0;
  const queue: { at: number; fn: () => void }[] = [];
  return {
    now: () => t,
    schedule: (fn: () => void, ms: number) => {
      queue.push({ at: t + ms, fn });
      return 0 as unknown as ReturnType<typeof setTimeout>;
    },
    advance(to: number) {
      while (true) {
        queue.sort((a, b) => a.at - b.at);
        const next = queue[0];
        if (!next || next.at > to) break;
        queue.shift();
        t = next.at;
        next.fn();
      }
      t = to;
    },
  };
}

describe("target throttle", () => {
  it("passes at most 60 messages for 1000 rapid events in one second", () => {
    const clock = fakeTime();
    const times: number[] = [];
    const th = makeThrottle<number>(() => times.push(clock.now()), 60, clock.now, clock.schedule);
    for (let i = 0; i < 1000; i++) {
      clock.advance(i); // 1 event per ms
      th.push(i);
    }
    clock.advance(2000); // let the trailing emit drain
    const within = times.filter((t) => t < 1000).length; // half-open window
    expect(within).toBeLessThanOrEqual(60);
    expect(within).toBeGreaterThan(50);
    // sustained rate bound holds for every sliding one-second window
    for (let i = 0; i < times.length; i++) {
      const windowed = times.filter((t) => t >= times[i]! && t < times[i]! + 1000).length;
      expect(windowed).toBeLessThanOrEqual(60);
    }
  });

  it("always delivers the newest value last", () => {
    const clock = fakeTime();
    const out: number[] = [];
    const th = makeThrottle<number>((v) => out.push(v), 60, clock.now, clock.schedule);
    th.push(1);
    th.push(2);
    th.push(3); // burst: 1 goes out now, 3 should follow, 2 never
    clock.advance(100);
    expect(out[0]).toBe(1);
    expect(out[out.length - 1]).toBe(3);
    expect(out).not.toContain(2);
  });

  it("slow events pass through unthrottled", () => {
    const clock = fakeTime();
    const out: number[] = [];
    const th = makeThrottle<number>((v) => out.push(v), 60, clock.now, clock.schedule);
    for (let i = 0; i < 10; i++) {
      clock.advance(i * 100); // 10 Hz
      th.push(i);
    }
    clock.advance(2000);
    expect(out).toEqual([0, 1, 2, 3, 4, 5, 6, 7, 8, 9]);
  });

  it("cancel drops the pending trailing emit", () => {
    const clock = fakeTime();
    const out: number[] = [];
    const th = makeThrottle<number>((v) => out.push(v), 60, clock.now, clock.schedule);
    th.push(1);
    th.push(2);
    th.cancel();
    clock.advance(1000);
    expect(out).toEqual([1]);
  });
});
