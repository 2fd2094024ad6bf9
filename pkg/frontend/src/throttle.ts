/**
 * Trailing-edge rate limiter for pointer-driven target streaming.
 *
 * At most maxPerSecond calls pass through per sliding second; bursts keep
 * the newest value and emit it when the window frees up, so the robot
 * always converges on the latest pointer position instead of a stale one.
 */
export interface Throttle<T> {
  push(value: T): void;
  /** Cancel any pending trailing emit. */
  cancel(): void;
}

export function makeThrottle<T>(
  emit: (value: T) => void,
  maxPerSecond = 60,
  now: () => number = () => performance.now(),
  schedule: (fn: () => void, ms: number) => ReturnType<typeof setTimeout> = setTimeout,
): Throttle<T> {
  // nudged one part in 1e9 above the exact period so floating-point
  // accumulation over a long emit chain can never squeeze an extra
  // message into a one-second window
  const interval = (1000 / maxPerSecond) * (1 + 1e-9);
  let lastEmit = -Infinity;
  let pending: { value: T } | null = null;
  let timer: ReturnType<typeof setTimeout> | null = null;

  const flush = () => {
    timer = null;
    if (pending === null) return;
    const value = pending.value;
    pending = null;
    lastEmit = now();
    emit(value);
  };

  return {
    push(value: T) {
      const t = now();
      if (t - lastEmit >= interval && timer === null) {
        lastEmit = t;
        emit(value);
        return;
      }
      pending = { value };
      if (timer === null) {
        timer = schedule(flush, Math.max(0, interval - (t - lastEmit)));
      }
    },
    cancel() {
      if (timer !== null) clearTimeout(timer);
      timer = null;
      pending = null;
    },
  };
}
