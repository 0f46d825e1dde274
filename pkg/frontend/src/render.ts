// Model -> HTML string.  No framework: the app swaps the container's
// innerHTML and wires clicks by delegation on data attributes.

import { canSwitch, UiModel } from "./model.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const BADGE_CLASS: Record<string, string> = {
  MachineMove: "badge machine",
  MachineStuck: "badge stuck",
  UserMove: "badge user",
  Terminal: "badge terminal",
};

function statusBadge(model: UiModel): string {
  if (model.status === null) return `<span class="badge idle">no program</span>`;
  return `<span class="${BADGE_CLASS[model.status]}">${model.status}</span>`;
}

function choiceList(model: UiModel): string {
  if (model.choices.length === 0) {
    return `<p class="empty">no switchable declarations</p>`;
  }
  const items = model.choices
    .map((row) => {
      const enabled = canSwitch(model, row);
      const pending = model.pendingPath === row.path;
      const button =
        `<button class="esc" data-path="${escapeHtml(row.path)}"` +
        `${enabled && !pending ? "" : " disabled"}>Esc</button>`;
      return (
        `<li class="choice${pending ? " pending" : ""}">` +
        `<span class="path">${escapeHtml(row.path)}</span>` +
        `<span class="active">${escapeHtml(row.activePretty)}</span>` +
        `<span class="remaining">${row.remaining} left</span>` +
        button +
        `</li>`
      );
    })
    .join("");
  return `<ul class="choices">${items}</ul>`;
}

function thetaTable(model: UiModel): string {
  if (model.theta.length === 0) return "";
  const rows = model.theta
    .map(
      (t) =>
        `<tr><td>${escapeHtml(t.name)}</td><td>${t.kind}</td>` +
        `<td>${escapeHtml(t.value)}</td></tr>`,
    )
    .join("");
  return `<table class="theta"><tr><th>var</th><th>kind</th><th>value</th></tr>${rows}</table>`;
}

function consolePanel(model: UiModel): string {
  const lines = model.console.map((line) => escapeHtml(line)).join("\n");
  return `<pre class="console">${lines}</pre>`;
}

function banners(model: UiModel): string {
  let html = "";
  if (model.connectionLost) {
    html += `<div class="banner lost">connection lost</div>`;
  }
  if (model.verdict) {
    const extra = model.diagnostic ? `: ${escapeHtml(model.diagnostic)}` : "";
    html += `<div class="banner verdict ${model.verdict.toLowerCase()}">${model.verdict}${extra}</div>`;
  }
  if (model.queuedNotice) {
    html += `<div class="banner queued">queued</div>`;
  }
  if (model.error) {
    html += `<div class="banner error">${escapeHtml(model.error.code)}: ${escapeHtml(
      model.error.message,
    )}</div>`;
  }
  return html;
}

export function renderHtml(model: UiModel): string {
  return (
    `<div class="playground">` +
    banners(model) +
    `<div class="statusline">${statusBadge(model)}` +
    `<span class="moves">${model.moveCount} moves</span></div>` +
    `<section class="decls"><h2>declarations</h2>` +
    `<pre class="program">${escapeHtml(model.programPretty)}</pre>` +
    choiceList(model) +
    `</section>` +
    `<section class="goal"><h2>goal</h2>` +
    `<pre class="program">${escapeHtml(model.goalPretty)}</pre>` +
    thetaTable(model) +
    `</section>` +
    `<section class="out"><h2>output</h2>` +
    consolePanel(model) +
    `</section>` +
    `</div>`
  );
}
