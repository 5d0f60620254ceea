/** Battle screen flow: post the match, shape the outcome for display. */

import type { ApiClient } from "./api.js";
import type { BattleConfig, BattleResult } from "./types.js";

export interface BattleView {
  banner: string; // "Draw" | "<name> wins (A)" style headline
  overlayCurves: boolean; // draws overlay both contenders' curves
  result: BattleResult;
}

export function battleView(result: BattleResult): BattleView {
  let banner: string;
  if (result.winner === "draw") {
    banner = "Draw";
  } else if (result.winner === "A") {
    banner = `${result.contender_a} wins (A)`;
  } else {
    banner = `${result.contender_b} wins (B)`;
  }
  return { banner, overlayCurves: result.winner === "draw", result };
}

export type BattleOutcome =
  | { kind: "view"; view: BattleView }
  | { kind: "invalid"; detail: string }
  | { kind: "unreachable" }; // retry prompt, never a partial result

export async function runBattleFlow(
  api: ApiClient,
  graphA: string,
  graphB: string,
  config: BattleConfig,
): Promise<BattleOutcome> {
  let resp;
  try {
    resp = await api.battle(graphA, graphB, config);
  } catch {
    return { kind: "unreachable" };
  }
  if (!resp.ok) {
    return { kind: "invalid", detail: resp.detail || `server returned ${resp.status}` };
  }
  return { kind: "view", view: battleView(resp.data) };
}
