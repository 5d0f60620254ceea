import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { battleView, runBattleFlow } from "../src/battle.js";
import type { BattleConfig, BattleResult, MetricPoint } from "../src/types.js";

function point(acc: number, ia: number): MetricPoint {
  return { step: 100, split: "eval", accuracy: acc, infoacc: ia, batch_size: 200 };
}

const CONFIG: BattleConfig = {
  train_config: {
    batch_size: 50,
    learning_rate: 0.5,
    steps: 100,
    seed: 7,
    eval_interval: 20,
    eval_batch_size: 50,
  },
  dataset: { kind: "synthetic", n_classes: 10, dim: 64, m_per_class: 50, seed: 7, spread: 0.2 },
};

function result(winner: "A" | "B" | "draw", a: MetricPoint, b: MetricPoint): BattleResult {
  return {
    contender_a: "alpha",
    contender_b: "beta",
    final_a: a,
    final_b: b,
    curve_a: [a],
    curve_b: [b],
    winner,
    config: CONFIG,
    seed: 7,
  };
}

describe("battleView", () => {
  it("shows Draw for equal finals", () => {
    const final = point(0.9, 1.4);
    const view = battleView(result("draw", final, { ...final }));
    expect(view.banner).toBe("Draw");
    expect(view.overlayCurves).toBe(true);
  });

  it("names the winner", () => {
    expect(battleView(result("A", point(0.95, 2.1), point(0.90, 1.0))).banner).toBe("alpha wins (A)");
    expect(battleView(result("B", point(0.90, 1.0), point(0.95, 2.1))).banner).toBe("beta wins (B)");
  });
});

describe("runBattleFlow", () => {
  it("returns the rendered view on success", async () => {
    const payload = result("draw", point(0.8, 1.0), point(0.8, 1.0));
    const api = new ApiClient("http://test", async () =>
      new Response(JSON.stringify(payload), { status: 201, headers: { "Content-Type": "application/json" } }),
    );
    const outcome = await runBattleFlow(api, "g1", "g2", CONFIG);
    expect(outcome.kind).toBe("view");
    if (outcome.kind === "view") expect(outcome.view.banner).toBe("Draw");
  });

  it("surfaces 422 details per graph without a partial result", async () => {
    const api = new ApiClient("http://test", async () =>
      new Response(JSON.stringify({ detail: "batch_size 500 exceeds dataset size 160" }), { status: 422 }),
    );
    const outcome = await runBattleFlow(api, "g1", "g2", CONFIG);
    expect(outcome).toEqual({ kind: "invalid", detail: "batch_size 500 exceeds dataset size 160" });
  });

  it("asks for a retry when the server is unreachable", async () => {
    const api = new ApiClient("http://test", async () => {
      throw new TypeError("fetch failed");
    });
    const outcome = await runBattleFlow(api, "g1", "g2", CONFIG);
    expect(outcome).toEqual({ kind: "unreachable" });
  });
});
