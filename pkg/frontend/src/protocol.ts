// Wire types for the engine's newline-delimited JSON session protocol.
// One JSON object per line, UTF-8, no framing beyond the newline.

export type Status = "MachineMove" | "MachineStuck" | "UserMove" | "Terminal";

export interface ChoiceSnapshot {
  path: string;
  remaining: number;
  active_pretty: string;
}

export interface ThetaEntry {
  var: string;
  kind: "int" | "str" | "sym" | "bool";
  value: number | string | boolean;
}

export interface Snapshot {
  program_pretty: string;
  choices: ChoiceSnapshot[];
  goal_pretty: string;
  theta: ThetaEntry[];
  status: Status | null;
  move_count: number;
  outputs: string[];
}

export type ToEngine =
  | { load: string }
  | { event: string }
  | { reset: true };

export type FromEngine =
  | { state: Snapshot; queued?: boolean }
  | { output: string }
  | { verdict: "Succeeded" | "Failed"; diagnostic?: string }
  | { error: { code: string; message: string } };

export function serialize(msg: ToEngine): string {
  return JSON.stringify(msg);
}

const STATUSES = new Set(["MachineMove", "MachineStuck", "UserMove", "Terminal"]);

export function isSnapshot(x: unknown): x is Snapshot {
  if (typeof x !== "object" || x === null) return false;
  const s = x as Record<string, unknown>;
  return (
    typeof s.program_pretty === "string" &&
    Array.isArray(s.choices) &&
    s.choices.every(
      (c: unknown) =>
        typeof c === "object" &&
        c !== null &&
        typeof (c as ChoiceSnapshot).path === "string" &&
        typeof (c as ChoiceSnapshot).remaining === "number" &&
        typeof (c as ChoiceSnapshot).active_pretty === "string",
    ) &&
    typeof s.goal_pretty === "string" &&
    Array.isArray(s.theta) &&
    (s.status === null || STATUSES.has(s.status as string)) &&
    typeof s.move_count === "number" &&
    Array.isArray(s.outputs)
  );
}

/** Parse one line from the engine; throws on anything off-schema. */
export function parseFromEngine(line: string): FromEngine {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch {
    throw new Error(`engine sent a non-JSON line: ${line.slice(0, 80)}`);
  }
  if (typeof raw !== "object" || raw === null) {
    throw new Error("engine message is not an object");
  }
  const msg = raw as Record<string, unknown>;
  if ("state" in msg && isSnapshot(msg.state)) {
    return msg.queued === true
      ? { state: msg.state, queued: true }
      : { state: msg.state };
  }
  if ("output" in msg && typeof msg.output === "string") {
    return { output: msg.output };
  }
  if ("verdict" in msg && (msg.verdict === "Succeeded" || msg.verdict === "Failed")) {
    return typeof msg.diagnostic === "string"
      ? { verdict: msg.verdict, diagnostic: msg.diagnostic }
      : { verdict: msg.verdict };
  }
  if ("error" in msg) {
    const err = msg.error as Record<string, unknown>;
    if (typeof err?.code === "string" && typeof err?.message === "string") {
      return { error: { code: err.code, message: err.message } };
    }
  }
  throw new Error(`engine message has an unknown shape: ${line.slice(0, 80)}`);
}
