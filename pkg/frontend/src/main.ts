import { SteeringApi } from "./api.js";
import { SessionController, ConsoleState } from "./controller.js";
import { checkFeasibility } from "./feasibility.js";
import { parseEvents } from "./events.js";
import { binLabel, histogramBars } from "./readout.js";
import { ZooEntry } from "./schema.js";

/** Browser entry point: builds the whole console UI under #app. */

class WeightSliders {
  readonly root: HTMLDivElement;
  private inputs: HTMLInputElement[] = [];
  private warning: HTMLDivElement;
  private names: string[] = [];
  private blocks: string[][] = [];

  constructor(private readonly onValid: (weights: number[]) => void) {
    this.root = document.createElement("div");
    this.warning = document.createElement("div");
    this.warning.className = "warning";
  }

  configure(names: string[], blocks: string[][], weights: number[]): void {
    this.names = names;
    this.blocks = blocks;
    this.inputs = [];
    this.root.replaceChildren();
    names.forEach((name, i) => {
      const row = document.createElement("label");
      row.textContent = `w(${name}) `;
      const input = document.createElement("input");
      input.type = "range";
      input.min = "0";
      input.max = "1";
      input.step = "0.0001";
      input.value = String(weights[i] ?? 1 / names.length);
      input.addEventListener("input", () => this.changed());
      row.appendChild(input);
      this.root.appendChild(row);
      this.inputs.push(input);
    });
    this.root.appendChild(this.warning);
    this.changed();
  }

  values(): number[] {
    return this.inputs.map((inp) => Number(inp.value));
  }

  private changed(): void {
    const report = checkFeasibility(this.names, this.values(), this.blocks);
    if (report.ok) {
      this.warning.textContent = "";
      this.onValid(report.normalized);
    } else {
      // inline violation warning before anything is submitted
      this.warning.textContent = report.violations
        .map((v) => v.message)
        .join("; ");
    }
  }
}

class BarChart {
  readonly canvas: HTMLCanvasElement;
  private ctx: CanvasRenderingContext2D;

  constructor(width: number, height: number, private readonly color: string) {
    this.canvas = document.createElement("canvas");
    this.canvas.width = width;
    this.canvas.height = height;
    const ctx = this.canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context not available");
    this.ctx = ctx;
  }

  draw(values: number[], titles?: string[]): void {
    const { width, height } = this.canvas;
    this.ctx.clearRect(0, 0, width, height);
    if (values.length === 0) return;
    const bars = histogramBars(values, height - 2);
    const barWidth = width / values.length;
    bars.forEach((h, i) => {
      this.ctx.fillStyle = this.color;
      this.ctx.fillRect(i * barWidth, height - h, barWidth - 1, h);
    });
    if (titles) this.canvas.title = titles.join("\n");
  }
}

function readout(label: string): [HTMLDivElement, Text] {
  const div = document.createElement("div");
  div.className = "readout";
  div.append(`${label}: `);
  const value = document.createTextNode("—");
  div.appendChild(value);
  return [div, value];
}

export async function mount(root: HTMLElement, baseUrl: string): Promise<void> {
  const api = new SteeringApi(baseUrl);
  const [etaRow, etaText] = readout("η_max");
  const [alphaRow, alphaText] = readout("α (if complete)");
  const [sizesRow, sizesText] = readout("yolk / shell");
  const banner = document.createElement("div");
  banner.className = "banner";
  const histogram = new BarChart(600, 120, "#3B82F6");
  const levels = new BarChart(600, 120, "#10B981");
  const log = document.createElement("pre");

  const controller = new SessionController(api, (state: ConsoleState) => {
    banner.textContent = state.staleBanner
      ? `snapshot may be stale: ${state.staleBanner}`
      : state.lastError ?? "";
    const m = state.model;
    if (!m) return;
    // the displayed eta/alpha are the server's bytes, never recomputed
    etaText.data = m.etaMaxText;
    alphaText.data = m.alphaText;
    sizesText.data = `${m.yolkSize} / ${m.shellSize}`;
    histogram.draw(
      m.histogram,
      m.histogram.map((count, i) => `${binLabel(i)}: ${count}`),
    );
    const perLevel = new Map<number, number>();
    m.yolkLengths.forEach((l) => perLevel.set(l, (perLevel.get(l) ?? 0) + 1));
    const maxLen = Math.max(0, ...perLevel.keys());
    levels.draw(
      Array.from({ length: maxLen + 1 }, (_, l) => perLevel.get(l) ?? 0),
    );
  });

  const sliders = new WeightSliders(() => {});
  const picker = document.createElement("select");
  const paste = document.createElement("textarea");
  paste.placeholder = "…or paste an automaton here";
  const target = document.createElement("input");
  target.type = "number";
  target.step = "0.01";
  target.value = "0.99";

  const machines: ZooEntry[] = await api.zoo();
  for (const m of machines) {
    const opt = document.createElement("option");
    opt.value = m.name;
    opt.textContent = `${m.name} (${m.states} states, ${m.letters} letters)`;
    picker.appendChild(opt);
  }
  const pickerChanged = () => {
    const chosen = machines.find((m) => m.name === picker.value);
    if (chosen) {
      const names = chosen.blocks.flat();
      sliders.configure(
        names,
        chosen.blocks,
        names.map(() => 1 / names.length),
      );
    }
  };
  picker.addEventListener("change", pickerChanged);
  pickerChanged();

  const actions = document.createElement("div");
  const button = (label: string, run: () => Promise<unknown>) => {
    const b = document.createElement("button");
    b.textContent = label;
    b.addEventListener("click", () => {
      run().catch(() => {
        // state/banner already updated by the controller
      });
    });
    actions.appendChild(b);
    return b;
  };

  button("open", async () => {
    const spec = paste.value.trim()
      ? { text: paste.value, target: Number(target.value) }
      : {
          machine: picker.value,
          weights: sliders.values(),
          target: Number(target.value),
        };
    await controller.open(spec);
  });
  button("expand", () => controller.expand());
  button("optimize", () => controller.optimize());
  button("set target", () => controller.setTarget(Number(target.value)));
  button("checkpoint", () => controller.checkpoint());
  button("rollback to 1", () => controller.rollback(1));
  button("stop", async () => {
    await controller.stop();
    const id = controller.current().sessionId;
    if (id) {
      const events = parseEvents(await api.eventsText(id));
      log.textContent = events
        .map(
          (ev) =>
            `level ${ev.level}: yolk ${ev.yolk_size}, shell ${ev.shell_size}, η_max ${ev.eta_max}`,
        )
        .join("\n");
    }
  });
  button("export run JSON", async () => {
    const blob = new Blob([controller.exportRun()], {
      type: "application/json",
    });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "run.json";
    a.click();
    URL.revokeObjectURL(a.href);
  });

  root.append(
    picker,
    paste,
    target,
    sliders.root,
    actions,
    banner,
    etaRow,
    alphaRow,
    sizesRow,
    histogram.canvas,
    levels.canvas,
    log,
  );
}

declare global {
  interface Window {
    steeringConsole?: { mount: typeof mount };
  }
}

if (typeof window !== "undefined") {
  window.steeringConsole = { mount };
  const root = document.getElementById("app");
  if (root) {
    void mount(root, window.location.origin.replace(/:\d+$/, ":8642"));
  }
}
