// Browser entry point.  The bridge relays the engine's session protocol:
// engine lines arrive as server-sent events, our messages go out as POSTs.
// All state lives in the UiModel; this file only wires DOM events.

import { parseFromEngine, serialize, ToEngine } from "./protocol.js";
import {
  applyMessage,
  initModel,
  markConnectionLost,
  noteSent,
  uniqueEnabledPath,
  UiModel,
} from "./model.js";
import { renderHtml } from "./render.js";

let model: UiModel = initModel();

const view = document.getElementById("view")!;
const programBox = document.getElementById("program") as HTMLTextAreaElement;

function redraw(): void {
  view.innerHTML = renderHtml(model);
}

function send(msg: ToEngine): void {
  model = noteSent(model, msg);
  redraw();
  void fetch("/send", { method: "POST", body: serialize(msg) });
}

const events = new EventSource("/events");
events.onmessage = (e) => {
  model = applyMessage(model, parseFromEngine(e.data));
  redraw();
};
events.onerror = () => {
  model = markConnectionLost(model);
  redraw();
};

document.getElementById("load")!.addEventListener("click", () => {
  send({ load: programBox.value });
});
document.getElementById("reset")!.addEventListener("click", () => {
  send({ reset: true });
});

// per-choice Esc buttons, wired by delegation since the view re-renders
view.addEventListener("click", (e) => {
  const button = (e.target as HTMLElement).closest("button.esc");
  if (button instanceof HTMLButtonElement && !button.disabled) {
    send({ event: button.dataset.path! });
  }
});

// the keyboard Esc key stands in for the button when exactly one is enabled
document.addEventListener("keydown", (e) => {
  if (e.key !== "Escape") return;
  const path = uniqueEnabledPath(model);
  if (path !== null) send({ event: path });
});

redraw();
