/** Motherboard builder: place chips, wire them, train, watch, battle.
 *
 * All state lives client-side until "Validate"/"Train"; the server owns
 * validation, training, scoring and battles. The UI renders only what
 * the API returns.
 */

import { ApiClient } from "./api.js";
import { battleView, runBattleFlow } from "./battle.js";
import {
  BoardState,
  Chip,
  ChipKind,
  OP_KINDS,
  chipsForErrors,
  emitDsl,
  freshChip,
  referenceBoard,
} from "./board.js";
import { PLACEHOLDER_RATING, chipRating } from "./chip.js";
import { CurveStore, SessionPoller, chartGeometry } from "./curves.js";
import type { ApiErrorItem, BattleResult, MetricPoint, SyntheticDataset, TrainConfig } from "./types.js";

const api = new ApiClient("");

const board: BoardState = referenceBoard();
let highlighted = new Set<string>();
let storedGraphs: Array<{ id: string; name: string; nodeCount: number }> = [];
let activePoller: SessionPoller | null = null;

// ---------------------------------------------------------------- helpers

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: Array<Node | string>
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS("http://www.w3.org/2000/svg", tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  return node;
}

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

// ---------------------------------------------------------------- board

function chipSources(exclude: string): string[] {
  return board.chips.filter((c) => c.id !== exclude).map((c) => c.id).sort();
}

function renderWires(container: HTMLElement): void {
  const svg = svgEl("svg", { class: "wires" });
  for (const chip of board.chips) {
    for (const source of chip.operands ?? []) {
      if (!source) continue;
      const from = board.chips.find((c) => c.id === source);
      if (!from) continue;
      svg.append(
        svgEl("line", {
          x1: String(from.x + 80),
          y1: String(from.y + 30),
          x2: String(chip.x + 80),
          y2: String(chip.y + 30),
          class: "wire",
        }),
      );
    }
  }
  container.append(svg);
}

function makeDraggable(card: HTMLElement, chip: Chip): void {
  card.addEventListener("pointerdown", (down) => {
    if ((down.target as HTMLElement).tagName !== "DIV" && (down.target as HTMLElement).tagName !== "SPAN") return;
    const offsetX = down.clientX - chip.x;
    const offsetY = down.clientY - chip.y;
    const move = (ev: PointerEvent) => {
      chip.x = Math.max(0, ev.clientX - offsetX);
      chip.y = Math.max(0, ev.clientY - offsetY);
      card.style.left = `${chip.x}px`;
      card.style.top = `${chip.y}px`;
    };
    const up = () => {
      document.removeEventListener("pointermove", move);
      document.removeEventListener("pointerup", up);
      renderBoard();
    };
    document.addEventListener("pointermove", move);
    document.addEventListener("pointerup", up);
  });
}

function chipSettings(chip: Chip): HTMLElement {
  const settings = el("div", { class: "chip-settings" });
  if (chip.kind === "input" || chip.kind === "param") {
    const dims = el("input", {
      type: "text",
      value: (chip.dims ?? []).map((d) => (d === null ? "?" : String(d))).join(","),
      title: "dimensions, ? = batch",
    });
    dims.addEventListener("change", () => {
      chip.dims = dims.value
        .split(",")
        .map((s) => s.trim())
        .filter((s) => s.length)
        .map((s) => (s === "?" ? null : Number(s)));
      refreshDslPreview();
    });
    settings.append(dims);
  }
  if (chip.kind === "param") {
    const init = el("select", {});
    for (const option of ["glorot", "zeros"]) {
      const opt = el("option", { value: option }, option);
      if (chip.init === option) opt.setAttribute("selected", "");
      init.append(opt);
    }
    init.addEventListener("change", () => {
      chip.init = init.value as "glorot" | "zeros";
      refreshDslPreview();
    });
    settings.append(init);
  }
  (chip.operands ?? []).forEach((wired, slot) => {
    const select = el("select", { title: `operand ${slot + 1}` });
    select.append(el("option", { value: "" }, "(unwired)"));
    for (const source of chipSources(chip.id)) {
      const opt = el("option", { value: source }, source);
      if (wired === source) opt.setAttribute("selected", "");
      select.append(opt);
    }
    select.addEventListener("change", () => {
      chip.operands![slot] = select.value || null;
      renderBoard();
    });
    settings.append(select);
  });
  return settings;
}

function renderBoard(): void {
  const container = byId("board");
  container.replaceChildren();
  renderWires(container);
  for (const chip of board.chips) {
    const card = el(
      "div",
      {
        class:
          `chip kind-${chip.kind}` +
          (highlighted.has(chip.id) ? " error" : "") +
          (board.outputChip === chip.id ? " output" : ""),
      },
      el("div", { class: "chip-title" }, el("span", { class: "chip-kind" }, chip.kind), ` ${chip.id}`),
    );
    card.style.left = `${chip.x}px`;
    card.style.top = `${chip.y}px`;
    if (board.outputChip === chip.id) {
      card.append(el("div", { class: "badge", id: "output-badge" }, badgeText));
    }
    card.append(chipSettings(chip));
    const controls = el("div", { class: "chip-controls" });
    if (OP_KINDS.includes(chip.kind)) {
      const output = el("button", { title: "mark as output + loss target" }, "out");
      output.addEventListener("click", () => {
        board.outputChip = chip.id;
        board.lossChip = chip.id;
        renderBoard();
      });
      controls.append(output);
    }
    const remove = el("button", { title: "remove chip" }, "x");
    remove.addEventListener("click", () => {
      board.chips = board.chips.filter((c) => c.id !== chip.id);
      if (board.outputChip === chip.id) board.outputChip = null;
      if (board.lossChip === chip.id) board.lossChip = null;
      for (const other of board.chips) {
        other.operands = other.operands?.map((o) => (o === chip.id ? null : o));
      }
      renderBoard();
    });
    controls.append(remove);
    card.append(controls);
    makeDraggable(card, chip);
    container.append(card);
  }
  refreshDslPreview();
}

function refreshDslPreview(): void {
  (byId("dsl-preview") as HTMLTextAreaElement).value = emitDsl(board).dsl;
}

// ---------------------------------------------------------------- validate

function showErrors(errors: ApiErrorItem[]): void {
  const list = byId("messages");
  list.replaceChildren(
    ...errors.map((e) =>
      el("div", { class: "message error" }, `${e.line}:${e.col} ${e.category}: ${e.message}`),
    ),
  );
}

function showMessage(text: string, kind = "info"): void {
  byId("messages").replaceChildren(el("div", { class: `message ${kind}` }, text));
}

async function validateBoard(): Promise<string | null> {
  const emitted = emitDsl(board);
  const resp = await api.createGraph(emitted.dsl);
  if (!resp.ok) {
    if (resp.errors.length) {
      highlighted = chipsForErrors(emitted, resp.errors);
      showErrors(resp.errors);
    } else {
      highlighted = new Set();
      showMessage(resp.detail || "validation failed", "error");
    }
    renderBoard();
    return null;
  }
  highlighted = new Set();
  storedGraphs.push({ id: resp.data.id, name: board.graphName, nodeCount: resp.data.node_count });
  refreshGraphList();
  showMessage(`stored as ${resp.data.id} — ${resp.data.node_count} nodes`, "ok");
  renderBoard();
  return resp.data.id;
}

function refreshGraphList(): void {
  for (const select of [byId("battle-a") as HTMLSelectElement, byId("battle-b") as HTMLSelectElement]) {
    const current = select.value;
    select.replaceChildren(
      ...storedGraphs.map((g) => el("option", { value: g.id }, `${g.id} ${g.name} (${g.nodeCount})`)),
    );
    if (current) select.value = current;
  }
}

// ---------------------------------------------------------------- training

let badgeText = PLACEHOLDER_RATING;

function readTrainConfig(): TrainConfig {
  const num = (id: string) => Number((byId(id) as HTMLInputElement).value);
  return {
    batch_size: num("cfg-batch"),
    learning_rate: num("cfg-lr"),
    steps: num("cfg-steps"),
    seed: num("cfg-seed"),
    eval_interval: num("cfg-eval-every"),
    eval_batch_size: num("cfg-eval-batch"),
  };
}

function readDataset(): SyntheticDataset {
  const num = (id: string) => Number((byId(id) as HTMLInputElement).value);
  return {
    kind: "synthetic",
    n_classes: num("data-classes"),
    dim: num("data-dim"),
    m_per_class: num("data-m"),
    seed: num("data-seed"),
    spread: num("data-spread"),
  };
}

function drawCharts(points: MetricPoint[]): void {
  drawChart("chart-acc", [{ points, color: "var(--accent)" }], (p) => p.accuracy, [0, 1]);
  drawChart("chart-ia", [{ points, color: "var(--accent2)" }], (p) => p.infoacc);
}

interface Series {
  points: MetricPoint[];
  color: string;
}

function drawChart(
  id: string,
  series: Series[],
  accessor: (p: MetricPoint) => number,
  yDomain?: [number, number],
): void {
  const host = byId(id);
  host.replaceChildren();
  const width = host.clientWidth || 360;
  const height = 120;
  const svg = svgEl("svg", { viewBox: `0 0 ${width} ${height}`, class: "chart" });
  const all = series.flatMap((s) => s.points.map(accessor));
  let domain = yDomain;
  if (!domain && all.length) {
    domain = [Math.min(...all), Math.max(...all)];
  }
  for (const s of series) {
    const geometry = chartGeometry(s.points, accessor, width, height - 8, domain);
    if (!geometry.polyline) continue;
    svg.append(
      svgEl("polyline", { points: geometry.polyline, fill: "none", stroke: s.color, "stroke-width": "2" }),
    );
  }
  host.append(svg);
}

async function trainBoard(): Promise<void> {
  activePoller?.stop();
  const graphId = await validateBoard();
  if (!graphId) return;
  const resp = await api.createSession(graphId, readTrainConfig(), readDataset());
  if (!resp.ok) {
    showMessage(resp.detail || "session rejected", "error");
    return;
  }
  const sessionId = resp.data.session_id;
  const store = new CurveStore();
  badgeText = PLACEHOLDER_RATING;
  drawCharts(store.points);
  const poller = new SessionPoller(api, sessionId, store, () => {
    drawCharts(store.points);
    const latest = store.latest();
    if (latest) {
      badgeText = chipRating(latest.infoacc);
      const badge = document.getElementById("output-badge");
      if (badge) badge.textContent = badgeText;
    }
  });
  activePoller = poller;
  poller.start();
  showMessage(`training session ${sessionId} running`, "ok");

  // drive the synchronous step endpoint in chunks while the poller watches
  const config = readTrainConfig();
  let done = 0;
  while (done < config.steps) {
    const step = await api.step(sessionId, Math.min(100, config.steps - done));
    if (!step.ok) {
      showMessage(step.detail || "step failed", "error");
      break;
    }
    done = step.data.step;
  }
  await poller.pollOnce();
  poller.stop();
  showMessage(`session ${sessionId} finished at step ${done}`, "ok");
}

// ---------------------------------------------------------------- battles

function finalsTable(result: BattleResult): HTMLElement {
  const row = (label: string, final: MetricPoint) =>
    el(
      "tr",
      {},
      el("td", {}, label),
      el("td", {}, final.accuracy.toFixed(4)),
      el("td", {}, chipRating(final.infoacc)),
    );
  return el(
    "table",
    { class: "finals" },
    el("tr", {}, el("th", {}, "contender"), el("th", {}, "accuracy"), el("th", {}, "infoacc")),
    row(`A: ${result.contender_a}`, result.final_a),
    row(`B: ${result.contender_b}`, result.final_b),
  );
}

async function startBattle(): Promise<void> {
  const graphA = (byId("battle-a") as HTMLSelectElement).value;
  const graphB = (byId("battle-b") as HTMLSelectElement).value;
  if (!graphA || !graphB) {
    showMessage("store two graphs first (Validate), then pick contenders", "error");
    return;
  }
  const host = byId("battle-result");
  host.replaceChildren(el("div", { class: "message" }, "battling..."));
  const outcome = await runBattleFlow(api, graphA, graphB, {
    train_config: readTrainConfig(),
    dataset: readDataset(),
  });
  if (outcome.kind === "unreachable") {
    const retry = el("button", {}, "server unreachable — retry");
    retry.addEventListener("click", () => void startBattle());
    host.replaceChildren(retry);
    return;
  }
  if (outcome.kind === "invalid") {
    host.replaceChildren(el("div", { class: "message error" }, outcome.detail));
    return;
  }
  const view = outcome.view;
  host.replaceChildren(
    el("div", { class: `banner ${view.result.winner}` }, view.banner),
    finalsTable(view.result),
    el("div", { id: "battle-chart" }),
  );
  drawChart(
    "battle-chart",
    [
      { points: view.result.curve_a, color: "var(--accent)" },
      { points: view.result.curve_b, color: "var(--accent2)" },
    ],
    (p) => p.accuracy,
    [0, 1],
  );
}

// ---------------------------------------------------------------- wiring

function init(): void {
  const palette = byId("palette");
  const kinds: ChipKind[] = ["input", "param", ...OP_KINDS];
  for (const kind of kinds) {
    const button = el("button", { class: "palette-chip" }, kind);
    button.addEventListener("click", () => {
      board.chips.push(freshChip(kind, 60 + board.chips.length * 24, 220));
      renderBoard();
    });
    palette.append(button);
  }
  (byId("graph-name") as HTMLInputElement).value = board.graphName;
  byId("graph-name").addEventListener("change", (ev) => {
    board.graphName = (ev.target as HTMLInputElement).value;
    refreshDslPreview();
  });
  byId("validate").addEventListener("click", () => void validateBoard());
  byId("train").addEventListener("click", () => void trainBoard());
  byId("battle-run").addEventListener("click", () => void startBattle());
  void api.healthz().then((up) => {
    if (!up) showMessage("service not reachable — start `forge serve`", "error");
  });
  renderBoard();
}

if (typeof document !== "undefined" && document.getElementById("board")) {
  init();
}

export { battleView, board, validateBoard };
