/**
 * Pure HTML renderers for the view-models.  Kept free of DOM access so the
 * displayed figures can be asserted in tests without a browser.
 */

import { SessionConsole } from "./session.js";
import { Dashboard } from "./dashboard.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderChips(console_: SessionConsole): string {
  const last = console_.history[console_.history.length - 1];
  if (!last) return "";
  return last.chips
    .map(
      (c) =>
        `<span class="chip" data-block="${escapeHtml(c.block_id)}">` +
        `${escapeHtml(c.block_id)} · ${escapeHtml(c.creator_id)} · ` +
        `${escapeHtml(c.usage_role)}</span>`,
    )
    .join("");
}

export function renderHistory(console_: SessionConsole): string {
  return console_.history
    .map((entry) => {
      const chips = entry.chips
        .map(
          (c) =>
            `<span class="chip">${escapeHtml(c.block_id)} · ` +
            `${escapeHtml(c.creator_id)} · ${escapeHtml(c.usage_role)}</span>`,
        )
        .join("");
      const cls = entry.failed ? "turn failed" : "turn";
      return (
        `<div class="${cls}"><div class="prompt">${escapeHtml(entry.prompt)}</div>` +
        `<div class="response">${escapeHtml(entry.responseText)}</div>` +
        `<div class="chips">${chips}</div></div>`
      );
    })
    .join("");
}

export function renderLanes(console_: SessionConsole): string {
  if (!console_.view) return "";
  return console_.view.tracks
    .map(
      (t) =>
        `<div class="lane" data-track="${t.track_id}">` +
        `<span class="label">${escapeHtml(t.label)}</span>` +
        `<span class="duration">${t.duration_seconds.toFixed(2)}s</span>` +
        `<span class="provenance">${t.provenance.map(escapeHtml).join(", ")}</span>` +
        `<button data-action="gain-down" data-track="${t.track_id}">-3 dB</button>` +
        `<button data-action="remove" data-track="${t.track_id}">remove</button>` +
        `</div>`,
    )
    .join("");
}

export function renderInlineError(console_: SessionConsole): string {
  if (!console_.inlineError) return "";
  const col = console_.inlineError.column;
  const caret = col ? `<pre class="caret">${" ".repeat(col - 1)}^</pre>` : "";
  return (
    `<div class="inline-error" data-column="${col ?? ""}">` +
    `${escapeHtml(console_.inlineError.message)}${caret}</div>`
  );
}

export function renderBanner(console_: SessionConsole): string {
  if (!console_.banner) return "";
  return `<div class="banner">${escapeHtml(console_.banner)}</div>`;
}

export function renderSession(console_: SessionConsole): string {
  const view = console_.view;
  const header = view
    ? `<div class="session-meta">${escapeHtml(view.session_id)} · ` +
      `${view.bpm} BPM · ${escapeHtml(view.key)}</div>`
    : "";
  return (
    header +
    renderBanner(console_) +
    renderInlineError(console_) +
    `<div class="history">${renderHistory(console_)}</div>` +
    `<div class="lanes">${renderLanes(console_)}</div>`
  );
}

export function renderDashboard(dash: Dashboard): string {
  if (!dash.report) return `<div class="dashboard empty">no data</div>`;
  const rows = dash
    .usageRows()
    .map(
      (r) =>
        `<tr><td>${escapeHtml(r.blockId)}</td><td>${escapeHtml(r.role)}</td>` +
        `<td class="count">${r.count}</td></tr>`,
    )
    .join("");
  const settlements = dash.settlements
    .map(
      (s) =>
        `<div class="settlement" data-session="${escapeHtml(s.report.session_id)}">` +
        `${escapeHtml(s.report.session_id)} · ${escapeHtml(s.report.rule.method)} · ` +
        `pool ${s.report.pool_microunits} · share ` +
        `<span class="share">${s.report.shares[dash.report!.creator_id] ?? 0}</span>` +
        `</div>`,
    )
    .join("");
  return (
    `<div class="dashboard">` +
    `<div class="totals">events <span class="total-events">${dash.totalEvents()}</span> · ` +
    `earned <span class="earned">${dash.earnedMicrounits()}</span> µu</div>` +
    `<table class="usage">${rows}</table>` +
    `<div class="settlements">${settlements}</div>` +
    `</div>`
  );
}
