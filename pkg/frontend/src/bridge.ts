// Dev bridge: static files + a relay between the browser and a seqc engine
// serving its session protocol over TCP.  The engine is spawned here so
// `npm run bridge -- ../samples/bmw.seqc` is all it takes.
//
//   GET  /            playground page
//   GET  /events      engine -> browser, one SSE message per protocol line
//   POST /send        browser -> engine, body is one protocol line

import { spawn } from "node:child_process";
import { createServer, ServerResponse } from "node:http";
import { connect, Socket } from "node:net";
import { readFile } from "node:fs/promises";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));
const programFile = process.argv[2] ?? join(here, "..", "..", "samples", "bmw.seqc");
const port = Number(process.env.PORT ?? 8760);

/** Start `seqc serve --listen` and resolve with the port it announces. */
function startEngine(): Promise<number> {
  const child = spawn("seqc", ["serve", programFile, "--listen", "127.0.0.1:0"], {
    stdio: ["ignore", "ignore", "pipe"],
  });
  child.on("exit", (code) => {
    console.error(`engine exited (${code})`);
    process.exit(1);
  });
  process.on("exit", () => child.kill());
  return new Promise((resolve, reject) => {
    let buffer = "";
    child.stderr.setEncoding("utf-8");
    child.stderr.on("data", (chunk: string) => {
      buffer += chunk;
      const match = buffer.match(/listening on [^:]*:(\d+)/);
      if (match) resolve(Number(match[1]));
    });
    child.on("error", reject);
  });
}

const listeners = new Set<ServerResponse>();
// every engine line since the run began, so late subscribers can catch up;
// a load or reset starts a new run and a new backlog
const history: string[] = [];
let engine: Socket;
let pending = "";

function onEngineData(chunk: string): void {
  pending += chunk;
  let nl: number;
  while ((nl = pending.indexOf("\n")) >= 0) {
    const line = pending.slice(0, nl);
    pending = pending.slice(nl + 1);
    history.push(line);
    for (const res of listeners) res.write(`data: ${line}\n\n`);
  }
}

function forwardToEngine(body: string): void {
  try {
    const msg = JSON.parse(body) as Record<string, unknown>;
    if ("load" in msg || "reset" in msg) history.length = 0;
  } catch {
    // let the engine answer bad_json itself
  }
  engine.write(body + "\n");
}

async function main(): Promise<void> {
  const enginePort = await startEngine();
  engine = connect(enginePort, "127.0.0.1");
  engine.setEncoding("utf-8");
  engine.on("data", onEngineData);
  engine.on("close", () => {
    for (const res of listeners) res.end();
    listeners.clear();
  });

  const server = createServer(async (req, res) => {
    if (req.method === "GET" && req.url === "/events") {
      res.writeHead(200, {
        "content-type": "text/event-stream",
        "cache-control": "no-cache",
      });
      for (const line of history) res.write(`data: ${line}\n\n`);
      listeners.add(res);
      req.on("close", () => listeners.delete(res));
      return;
    }
    if (req.method === "POST" && req.url === "/send") {
      let body = "";
      req.setEncoding("utf-8");
      for await (const chunk of req) body += chunk;
      forwardToEngine(body.trimEnd());
      res.writeHead(204).end();
      return;
    }
    const files: Record<string, [string, string]> = {
      "/": ["index.html", "text/html"],
      "/app.js": ["dist/app.js", "text/javascript"],
      "/model.js": ["dist/model.js", "text/javascript"],
      "/render.js": ["dist/render.js", "text/javascript"],
      "/protocol.js": ["dist/protocol.js", "text/javascript"],
    };
    const hit = files[req.url ?? ""];
    if (!hit) {
      res.writeHead(404).end("not found");
      return;
    }
    try {
      const data = await readFile(join(here, "..", hit[0]));
      res.writeHead(200, { "content-type": hit[1] }).end(data);
    } catch {
      res.writeHead(404).end("not built; run npm run build");
    }
  });

  server.listen(port, "127.0.0.1", () => {
    console.log(`playground at http://127.0.0.1:${port}/ (program: ${programFile})`);
  });
}

void main();
