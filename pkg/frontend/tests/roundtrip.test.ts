// Drives one switch click end to end: spawn the real engine in socket mode,
// click through the protocol layer, and watch the shortened choice come back.

import { spawn, type ChildProcess } from "node:child_process";
import { connect, type Socket } from "node:net";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { applyMessage, canSwitch, initModel, noteSent, type UiModel } from "../src/model.js";
import { parseFromEngine, serialize, type FromEngine } from "../src/protocol.js";

const here = dirname(fileURLToPath(import.meta.url));
const sample = join(here, "..", "..", "samples", "bmw.seqc");

class LineFeed {
  private buffer = "";
  private lines: string[] = [];
  private waiters: Array<(line: string) => void> = [];
  private fault: Error | null = null;

  push(chunk: string): void {
    this.buffer += chunk;
    let nl: number;
    while ((nl = this.buffer.indexOf("\n")) >= 0) {
      const line = this.buffer.slice(0, nl);
      this.buffer = this.buffer.slice(nl + 1);
      const waiter = this.waiters.shift();
      if (waiter) waiter(line);
      else this.lines.push(line);
    }
  }

  fail(err: Error): void {
    this.fault = err;
  }

  next(timeoutMs = 5000): Promise<string> {
    const queued = this.lines.shift();
    if (queued !== undefined) return Promise.resolve(queued);
    if (this.fault) return Promise.reject(this.fault);
    return new Promise((resolve, reject) => {
      const timer = setTimeout(
        () => reject(new Error("timed out waiting for an engine line")),
        timeoutMs,
      );
      this.waiters.push((line) => {
        clearTimeout(timer);
        resolve(line);
      });
    });
  }
}

function startEngine(): Promise<{ child: ChildProcess; port: number }> {
  return new Promise((resolve, reject) => {
    const child = spawn("seqc", ["serve", sample, "--listen", "127.0.0.1:0"], {
      stdio: ["ignore", "ignore", "pipe"],
    });
    let noise = "";
    child.stderr!.setEncoding("utf8");
    child.stderr!.on("data", (chunk: string) => {
      noise += chunk;
      const hit = noise.match(/listening on [^:]*:(\d+)/);
      if (hit) resolve({ child, port: Number(hit[1]) });
    });
    child.on("error", reject);
    child.on("exit", (code) => reject(new Error(`engine exited early (${code}): ${noise}`)));
  });
}

async function nextMessage(feed: LineFeed): Promise<FromEngine> {
  return parseFromEngine(await feed.next());
}

async function foldUntil(
  feed: LineFeed,
  model: UiModel,
  done: (m: UiModel) => boolean,
): Promise<UiModel> {
  for (let hops = 0; hops < 40; hops++) {
    if (done(model)) return model;
    model = applyMessage(model, await nextMessage(feed));
  }
  throw new Error("engine never reached the expected state");
}

describe("live engine round trip", () => {
  it("a switch click comes back as a shortened choice", { timeout: 20000 }, async () => {
    const { child, port } = await startEngine();
    let socket: Socket | null = null;
    try {
      const feed = new LineFeed();
      socket = await new Promise<Socket>((resolve, reject) => {
        const s = connect(port, "127.0.0.1", () => resolve(s));
        s.on("error", reject);
      });
      socket.setEncoding("utf8");
      socket.on("data", (chunk: string) => feed.push(chunk));
      socket.on("close", () => feed.fail(new Error("engine closed the connection")));

      // run to the first pause: the machine prints $32,000 and waits
      let model = await foldUntil(feed, initModel(), (m) => m.status === "UserMove");
      expect(model.console).toEqual(["$32,000"]);
      const row = model.choices[0]!;
      expect(row).toEqual({
        path: "0",
        remaining: 3,
        activePretty: "model == BMW320",
        switchEnabled: true,
      });
      expect(canSwitch(model, row)).toBe(true);

      // the click: optimistic disable, then the wire message
      model = noteSent(model, { event: "0" });
      expect(canSwitch(model, model.choices[0]!)).toBe(false);
      socket.write(serialize({ event: "0" }) + "\n");

      // the engine answers with the shortened choice before anything else
      const reply = await nextMessage(feed);
      if (!("state" in reply)) throw new Error("expected a state message after the event");
      expect(reply.state.choices[0]).toEqual({
        path: "0",
        remaining: 2,
        active_pretty: "model == BMW520",
      });
      model = applyMessage(model, reply);
      expect(model.pendingPath).toBeNull();

      // and the run carries on inside the new alternative
      model = await foldUntil(feed, model, (m) => m.status === "UserMove");
      expect(model.console).toEqual(["$32,000", "$54,000"]);
      expect(model.choices[0]!.switchEnabled).toBe(true);
      console.log("[acceptance] protocol round-trip: PASS");
    } catch (err) {
      console.log("[acceptance] protocol round-trip: FAIL");
      throw err;
    } finally {
      socket?.destroy();
      child.kill();
    }
  });
});
