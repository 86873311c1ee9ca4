/** Board wiring: snapshot polling + event stream for liveness detection,
 * canvas animation between frames, entry panel, legend, stale banner. */

import { BoardRenderer } from "./board.js";
import { GatewayClient } from "./client.js";
import { FlowController } from "./flow.js";
import { mountEntryPanel } from "./keyboard.js";
import type { Snapshot } from "./types.js";
import { buildViewModel, interpolateSnapshots } from "./viewmodel.js";

const SNAPSHOT_INTERVAL_MS = 120;
const STALE_AFTER_MS = 2000;

const params = new URLSearchParams(location.search);
const gatewayUrl = params.get("gateway") ?? "http://127.0.0.1:8642";

const canvas = document.querySelector<HTMLCanvasElement>("#arena")!;
const legendEl = document.querySelector<HTMLElement>("#legend")!;
const staleEl = document.querySelector<HTMLElement>("#stale-banner")!;
const tooltipEl = document.querySelector<HTMLElement>("#tooltip")!;
const statusEl = document.querySelector<HTMLElement>("#status")!;

const client = new GatewayClient(gatewayUrl);
const renderer = new BoardRenderer(canvas);
const flow = new FlowController(client, (state) => renderPanel(state));
const renderPanel = mountEntryPanel(document.querySelector<HTMLElement>("#entry")!, flow);
renderPanel(flow.state);

let previous: Snapshot | null = null;
let latest: Snapshot | null = null;
let latestAt = 0;
let lastHeard = 0;

async function pollSnapshots(): Promise<void> {
  while (true) {
    try {
      const snapshot = await client.getSnapshot();
      previous = latest ?? snapshot;
      latest = snapshot;
      latestAt = performance.now();
      lastHeard = latestAt;
      for (const tile of snapshot.tiles) {
        flow.observePhase(tile.id, tile.phase);
      }
    } catch {
      // stale banner is driven by lastHeard
    }
    await new Promise((resolve) => setTimeout(resolve, SNAPSHOT_INTERVAL_MS));
  }
}

async function followStream(): Promise<void> {
  // The stream is the liveness signal (and could drive richer views);
  // reconnect with backoff when it drops.
  let since = 0;
  while (true) {
    try {
      await client.streamEvents(since, (record) => {
        lastHeard = performance.now();
        if (typeof record.tick === "number") since = record.tick;
      });
      break; // clean end-of-run
    } catch {
      await new Promise((resolve) => setTimeout(resolve, 1000));
    }
  }
}

function frame(): void {
  if (latest && previous) {
    const t = Math.min(1, (performance.now() - latestAt) / SNAPSHOT_INTERVAL_MS);
    const blended = interpolateSnapshots(previous, latest, t);
    const vm = buildViewModel(
      blended,
      {
        highlightedTile: flow.highlightedTile(),
        stale: performance.now() - lastHeard > STALE_AFTER_MS,
      },
      canvas.width,
      canvas.height,
    );
    renderer.draw(vm);
    staleEl.hidden = !vm.stale;
    statusEl.textContent = vm.done
      ? `run finished at tick ${vm.tick}`
      : `tick ${vm.tick}`;
    renderLegend(vm.legend, vm.unassignedCount);
    canvas.onmousemove = (event) => {
      const rect = canvas.getBoundingClientRect();
      const tile = renderer.tileAt(vm, event.clientX - rect.left, event.clientY - rect.top);
      if (tile && tile.idea) {
        tooltipEl.textContent = `#${tile.id}: ${tile.idea}`;
        tooltipEl.style.left = `${event.clientX + 12}px`;
        tooltipEl.style.top = `${event.clientY + 12}px`;
        tooltipEl.hidden = false;
      } else {
        tooltipEl.hidden = true;
      }
    };
  }
  requestAnimationFrame(frame);
}

function renderLegend(entries: ReturnType<typeof buildViewModel>["legend"], unassigned: number): void {
  legendEl.innerHTML = "";
  for (const entry of entries) {
    const row = document.createElement("div");
    row.className = "legend-row";
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.backgroundColor = entry.css;
    row.appendChild(swatch);
    const label = document.createElement("span");
    label.textContent = `aggregate ${entry.aggregate} (${entry.size}): ${entry.sampleIdeas.join(" · ")}`;
    row.appendChild(label);
    legendEl.appendChild(row);
  }
  if (unassigned > 0) {
    const row = document.createElement("div");
    row.className = "legend-row";
    row.textContent = `${unassigned} idea(s) waiting, no free aggregate`;
    legendEl.appendChild(row);
  }
}

void pollSnapshots();
void followStream();
requestAnimationFrame(frame);
