/** Live metric curves: cursor-based polling and chart geometry.
 *
 * The store is append-only and the cursor only moves forward, so a
 * rendered curve never reorders or loses points; stale server replies
 * cannot push the view backwards.
 */

import type { ApiClient } from "./api.js";
import type { MetricPoint } from "./types.js";

export class CurveStore {
  readonly points: MetricPoint[] = [];
  cursor = 0;

  append(incoming: MetricPoint[]): void {
    for (const p of incoming) {
      if (p.step > this.cursor) {
        this.points.push(p);
        this.cursor = p.step;
      }
    }
  }

  latest(): MetricPoint | null {
    return this.points.length ? this.points[this.points.length - 1] : null;
  }
}

export type PollerState = "running" | "stopped" | "error";

export class SessionPoller {
  state: PollerState = "running";
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly sessionId: string,
    readonly store: CurveStore,
    private readonly onUpdate: () => void,
    private readonly intervalMs = 500,
  ) {}

  /** One poll round; returns false once polling should stop. */
  async pollOnce(): Promise<boolean> {
    const resp = await this.api.metrics(this.sessionId, this.store.cursor);
    if (!resp.ok) {
      this.state = resp.status === 404 ? "stopped" : "error";
      this.stop();
      return false;
    }
    if (resp.data.points.length) {
      this.store.append(resp.data.points);
      this.onUpdate();
    }
    return true;
  }

  start(): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => void this.pollOnce(), this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
    if (this.state === "running") this.state = "stopped";
  }
}

export interface ChartGeometry {
  /** "x,y x,y ..." for an SVG polyline, one vertex per point. */
  polyline: string;
  xs: number[];
  ys: number[];
  yMin: number;
  yMax: number;
}

/** Map a metric series onto pixel coordinates, one vertex per point. */
export function chartGeometry(
  points: MetricPoint[],
  accessor: (p: MetricPoint) => number,
  width: number,
  height: number,
  yDomain?: [number, number],
): ChartGeometry {
  if (!points.length) return { polyline: "", xs: [], ys: [], yMin: 0, yMax: 1 };
  const values = points.map(accessor);
  const steps = points.map((p) => p.step);
  const xMin = steps[0];
  const xSpan = Math.max(steps[steps.length - 1] - xMin, 1);
  let [yMin, yMax] = yDomain ?? [Math.min(...values), Math.max(...values)];
  if (yMax - yMin < 1e-12) {
    yMin -= 0.5;
    yMax += 0.5;
  }
  const xs = steps.map((s) => ((s - xMin) / xSpan) * width);
  const ys = values.map((v) => height - ((v - yMin) / (yMax - yMin)) * height);
  const polyline = xs.map((x, i) => `${x.toFixed(2)},${ys[i].toFixed(2)}`).join(" ");
  return { polyline, xs, ys, yMin, yMax };
}
