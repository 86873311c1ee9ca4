/** Acceptance, against a real gateway process:
 *
 *  - submitting an idea through the entry flow highlights the assigned tile,
 *    and the rendered color converges to the gateway-reported aggregate color;
 *  - a board session that only watches (then dies) leaves zero diff in the
 *    simulation's event log.
 *
 * Requires the python package installed so `tileswarm` is on PATH.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, describe, expect, it } from "vitest";

import { GatewayClient } from "../src/client.js";
import { COLOR_CSS } from "../src/colors.js";
import { FlowController } from "../src/flow.js";
import { buildViewModel } from "../src/viewmodel.js";

const workdir = mkdtempSync(join(tmpdir(), "tileswarm-board-"));
const children: ChildProcess[] = [];

afterAll(() => {
  for (const child of children) child.kill("SIGKILL");
});

function scenarioText(durationTicks: number, scripted: boolean): string {
  const lines = [
    JSON.stringify({ kind: "scenario", name: "board-it", duration_ticks: durationTicks }),
    JSON.stringify({ kind: "network", latency_min: 0, latency_max: 0 }),
    JSON.stringify({ kind: "tile", id: 1, x: 1.6, y: 1.4 }),
    JSON.stringify({ kind: "tile", id: 2, x: 2.0, y: 1.8 }),
    JSON.stringify({ kind: "tile", id: 3, x: 2.4, y: 2.2 }),
  ];
  if (scripted) {
    lines.push(
      JSON.stringify({ kind: "script", at_tick: 5, event: "idea", tile: 1, text: "plant more trees" }),
      JSON.stringify({ kind: "script", at_tick: 20, event: "idea", tile: 2, text: "plant trees" }),
      JSON.stringify({ kind: "script", at_tick: 40, event: "idea", tile: 3, text: "bike lanes" }),
    );
  }
  return lines.join("\n") + "\n";
}

interface Gateway {
  base: string;
  child: ChildProcess;
  stdout: string[];
  waitForLine(match: string, timeoutMs?: number): Promise<string>;
}

async function startGateway(args: {
  scenario: string;
  port: number;
  tickHz: number;
  out?: string;
  seed?: number;
}): Promise<Gateway> {
  const argv = [
    "serve", args.scenario,
    "--seed", String(args.seed ?? 5),
    "--port", String(args.port),
    "--tick-hz", String(args.tickHz),
  ];
  if (args.out) argv.push("--out", args.out);
  const child = spawn("tileswarm", argv, { stdio: ["ignore", "pipe", "inherit"] });
  children.push(child);
  const stdout: string[] = [];
  let buffer = "";
  child.stdout!.on("data", (chunk: Buffer) => {
    buffer += chunk.toString();
    let idx;
    while ((idx = buffer.indexOf("\n")) >= 0) {
      stdout.push(buffer.slice(0, idx));
      buffer = buffer.slice(idx + 1);
    }
  });
  const gateway: Gateway = {
    base: `http://127.0.0.1:${args.port}`,
    child,
    stdout,
    waitForLine(match, timeoutMs = 30_000) {
      const deadline = Date.now() + timeoutMs;
      return new Promise((resolve, reject) => {
        const poll = () => {
          const line = stdout.find((l) => l.includes(match));
          if (line) return resolve(line);
          if (Date.now() > deadline) return reject(new Error(`no line matching ${match}`));
          setTimeout(poll, 25);
        };
        poll();
      });
    },
  };
  await gateway.waitForLine("listening");
  return gateway;
}

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

describe("board against a live gateway", () => {
  it(
    "submitting highlights the tile and its color converges to the aggregate color",
    async () => {
      const scenarioPath = join(workdir, "live.scenario");
      writeFileSync(scenarioPath, scenarioText(6000, false));
      const gateway = await startGateway({ scenario: scenarioPath, port: 8931, tickHz: 100 });
      const client = new GatewayClient(gateway.base);
      const flow = new FlowController(client);

      flow.setDraft("plant more trees");
      flow.pressEnter();
      expect(flow.state.view).toBe("confirm");
      const tileId = await flow.putDown();
      expect(tileId).toBe(1);

      // While the tile works toward its marker, the view model must mark it
      // highlighted; afterwards its css must equal the gateway color's css.
      let sawHighlight = false;
      let settledTile = null as ReturnType<typeof buildViewModel>["tiles"][0] | null;
      const deadline = Date.now() + 45_000;
      while (Date.now() < deadline) {
        const snapshot = await client.getSnapshot();
        const vm = buildViewModel(
          snapshot,
          { highlightedTile: flow.highlightedTile(), stale: false },
          840,
          560,
        );
        const tile = vm.tiles.find((t) => t.id === tileId)!;
        if (flow.highlightedTile() === tileId) {
          expect(tile.highlighted).toBe(true);
          sawHighlight = true;
        }
        for (const t of snapshot.tiles) flow.observePhase(t.id, t.phase);
        if (tile.phase === "settled") {
          settledTile = tile;
          break;
        }
        await sleep(100);
      }
      expect(sawHighlight).toBe(true);
      expect(settledTile).not.toBeNull();
      expect(settledTile!.aggregate).toBe(1);
      expect(settledTile!.color).not.toBe("white");
      expect(settledTile!.css).toBe(COLOR_CSS[settledTile!.color]);
      // settling released the highlight and reset the entry flow
      expect(flow.highlightedTile()).toBeNull();
      expect(flow.state.view).toBe("keyboard");

      gateway.child.kill("SIGKILL");
    },
    60_000,
  );

  it(
    "a watching board session leaves zero diff in the event log",
    async () => {
      const scenarioPath = join(workdir, "watched.scenario");
      writeFileSync(scenarioPath, scenarioText(600, true));

      const logWatched = join(workdir, "watched.log");
      const watched = await startGateway({
        scenario: scenarioPath,
        port: 8932,
        tickHz: 200,
        out: logWatched,
      });
      const client = new GatewayClient(watched.base);
      const abort = new AbortController();
      const streaming = client
        .streamEvents(0, () => {}, abort.signal)
        .catch(() => {});
      for (let i = 0; i < 10; i++) {
        await client.getSnapshot();
        await sleep(50);
      }
      abort.abort(); // kill the UI mid-run
      await streaming;
      await watched.waitForLine("log_written");

      const logAlone = join(workdir, "alone.log");
      const alone = await startGateway({
        scenario: scenarioPath,
        port: 8933,
        tickHz: 200,
        out: logAlone,
      });
      await alone.waitForLine("log_written");

      expect(readFileSync(logWatched, "utf-8")).toBe(readFileSync(logAlone, "utf-8"));
      watched.child.kill("SIGKILL");
      alone.child.kill("SIGKILL");
    },
    60_000,
  );
});
