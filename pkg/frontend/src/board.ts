/** The motherboard model: chips placed on a board, wired into a graph.
 *
 * The board is the editable surface; the DSL text is its persistent
 * form. Emission is pure and deterministic (chips name-sorted within
 * each section) and may produce invalid programs — the server is the
 * validator, and its positioned errors map back to chips through the
 * line table emitted alongside the text.
 */

export type ChipKind = "input" | "param" | "matmul" | "addbias" | "relu" | "softmax";

export const OP_KINDS: ChipKind[] = ["matmul", "addbias", "relu", "softmax"];

export const OPERAND_COUNT: Record<ChipKind, number> = {
  input: 0,
  param: 0,
  matmul: 2,
  addbias: 2,
  relu: 1,
  softmax: 1,
};

export interface Chip {
  /** Declared name; unique on the board. */
  id: string;
  kind: ChipKind;
  /** Board placement in pixels. */
  x: number;
  y: number;
  /** input/param setting: dimensions, null = batch wildcard. */
  dims?: Array<number | null>;
  /** param setting. */
  init?: "zeros" | "glorot";
  /** Wires: operand slot -> source chip id (null while unwired). */
  operands?: Array<string | null>;
}

export interface BoardState {
  graphName: string;
  chips: Chip[];
  outputChip: string | null;
  lossChip: string | null;
}

export interface EmittedDsl {
  dsl: string;
  /** 1-based source line -> chip id, for error highlighting. */
  chipAtLine: Record<number, string>;
}

/** Placeholder reference for an unwired slot; never declarable (parser
 * rejects it), so the server reliably flags the hole. */
export const UNWIRED = "_unwired";

function shapeText(dims: Array<number | null>): string {
  return "[" + dims.map((d) => (d === null ? "?" : String(d))).join(",") + "]";
}

function byId(chips: Chip[]): Chip[] {
  return [...chips].sort((a, b) => (a.id < b.id ? -1 : a.id > b.id ? 1 : 0));
}

export function emitDsl(state: BoardState): EmittedDsl {
  const lines: string[] = [`graph "${state.graphName}" {`];
  const chipAtLine: Record<number, string> = {};
  const push = (line: string, chipId?: string) => {
    lines.push(line);
    if (chipId !== undefined) chipAtLine[lines.length] = chipId;
  };

  for (const chip of byId(state.chips.filter((c) => c.kind === "input"))) {
    push(`input ${chip.id}: ${shapeText(chip.dims ?? [null, 1])};`, chip.id);
  }
  for (const chip of byId(state.chips.filter((c) => c.kind === "param"))) {
    push(`param ${chip.id}: ${shapeText(chip.dims ?? [1])} init=${chip.init ?? "glorot"};`, chip.id);
  }
  for (const chip of byId(state.chips.filter((c) => OP_KINDS.includes(c.kind)))) {
    const slots = OPERAND_COUNT[chip.kind];
    const wired = (chip.operands ?? []).slice(0, slots);
    while (wired.length < slots) wired.push(null);
    const args = wired.map((w) => w ?? UNWIRED).join(", ");
    push(`node ${chip.id} = ${chip.kind}(${args});`, chip.id);
  }
  if (state.outputChip) {
    push(`output ${state.outputChip};`, state.outputChip);
  }
  if (state.lossChip) {
    push(`loss cross_entropy(${state.lossChip});`, state.lossChip);
  }
  lines.push("}");
  return { dsl: lines.join("\n") + "\n", chipAtLine };
}

export function boardToDsl(state: BoardState): string {
  return emitDsl(state).dsl;
}

/** Chips to highlight for a list of server errors (by error line). */
export function chipsForErrors(
  emitted: EmittedDsl,
  errors: Array<{ line: number }>,
): Set<string> {
  const hit = new Set<string>();
  for (const err of errors) {
    const chip = emitted.chipAtLine[err.line];
    if (chip !== undefined) hit.add(chip);
  }
  return hit;
}

let counter = 0;

export function freshChip(kind: ChipKind, x: number, y: number): Chip {
  counter += 1;
  const prefix: Record<ChipKind, string> = {
    input: "x",
    param: "W",
    matmul: "mm",
    addbias: "ab",
    relu: "rl",
    softmax: "sm",
  };
  const chip: Chip = { id: `${prefix[kind]}${counter}`, kind, x, y };
  if (kind === "input") chip.dims = [null, 784];
  if (kind === "param") {
    chip.dims = [784, 10];
    chip.init = "glorot";
  }
  if (OPERAND_COUNT[kind] > 0) chip.operands = new Array(OPERAND_COUNT[kind]).fill(null);
  return chip;
}

/** The worked example: the six-chip softmax regression board. */
export function referenceBoard(): BoardState {
  return {
    graphName: "mnist_softmax",
    chips: [
      { id: "x", kind: "input", x: 40, y: 160, dims: [null, 784] },
      { id: "W", kind: "param", x: 40, y: 40, dims: [784, 10], init: "glorot" },
      { id: "b", kind: "param", x: 260, y: 40, dims: [10], init: "zeros" },
      { id: "logits", kind: "matmul", x: 260, y: 160, operands: ["x", "W"] },
      { id: "biased", kind: "addbias", x: 480, y: 160, operands: ["logits", "b"] },
      { id: "probs", kind: "softmax", x: 700, y: 160, operands: ["biased"] },
    ],
    outputChip: "probs",
    lossChip: "probs",
  };
}
