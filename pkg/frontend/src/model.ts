// The playground's whole state as a pure value.  Every incoming engine
// message and every message we send folds into a new model; rendering is a
// function of the model alone, so replaying a recorded message log lands on
// the same screen.

import type { FromEngine, Snapshot, Status, ToEngine } from "./protocol.js";

export interface ChoiceRow {
  path: string;
  remaining: number;
  activePretty: string;
  /** true exactly when remaining >= 2 and the run is paused at UserMove */
  switchEnabled: boolean;
}

export interface UiModel {
  programPretty: string;
  goalPretty: string;
  choices: ChoiceRow[];
  theta: { name: string; kind: string; value: string }[];
  status: Status | null;
  moveCount: number;
  console: string[];
  verdict: "Succeeded" | "Failed" | null;
  diagnostic: string | null;
  /** path of a switch in flight; its button stays disabled until the next state */
  pendingPath: string | null;
  queuedNotice: boolean;
  error: { code: string; message: string } | null;
  connectionLost: boolean;
}

export function initModel(): UiModel {
  return {
    programPretty: "",
    goalPretty: "",
    choices: [],
    theta: [],
    status: null,
    moveCount: 0,
    console: [],
    verdict: null,
    diagnostic: null,
    pendingPath: null,
    queuedNotice: false,
    error: null,
    connectionLost: false,
  };
}

function choiceRows(snapshot: Snapshot): ChoiceRow[] {
  return snapshot.choices.map((c) => ({
    path: c.path,
    remaining: c.remaining,
    activePretty: c.active_pretty,
    switchEnabled: c.remaining >= 2 && snapshot.status === "UserMove",
  }));
}

/** Fold one engine message into the model. */
export function applyMessage(model: UiModel, msg: FromEngine): UiModel {
  if ("state" in msg) {
    return {
      ...model,
      programPretty: msg.state.program_pretty,
      goalPretty: msg.state.goal_pretty,
      choices: choiceRows(msg.state),
      theta: msg.state.theta.map((t) => ({
        name: t.var,
        kind: t.kind,
        value: String(t.value),
      })),
      status: msg.state.status,
      moveCount: msg.state.move_count,
      pendingPath: null,
      queuedNotice: msg.queued === true,
      error: null,
    };
  }
  if ("output" in msg) {
    return { ...model, console: [...model.console, msg.output] };
  }
  if ("verdict" in msg) {
    return { ...model, verdict: msg.verdict, diagnostic: msg.diagnostic ?? null };
  }
  return { ...model, error: msg.error, pendingPath: null };
}

/** Fold a message we are about to send; load/reset begin a fresh run. */
export function noteSent(model: UiModel, msg: ToEngine): UiModel {
  if ("event" in msg) {
    return { ...model, pendingPath: msg.event, queuedNotice: false };
  }
  return { ...initModel(), connectionLost: model.connectionLost };
}

export function markConnectionLost(model: UiModel): UiModel {
  return { ...model, connectionLost: true };
}

export function canSwitch(model: UiModel, row: ChoiceRow): boolean {
  return (
    row.switchEnabled &&
    model.pendingPath === null &&
    model.verdict === null &&
    !model.connectionLost
  );
}

/** The choice the keyboard Esc key targets: the unique switchable one. */
export function uniqueEnabledPath(model: UiModel): string | null {
  const enabled = model.choices.filter((row) => canSwitch(model, row));
  return enabled.length === 1 ? enabled[0]!.path : null;
}

/** Replay a recorded from_engine log from scratch. */
export function replay(lines: FromEngine[]): UiModel {
  return lines.reduce(applyMessage, initModel());
}
