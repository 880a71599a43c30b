/**
 * Browser bootstrap: wires the view-models to the DOM.
 *
 * Serve index.html from the same origin as the API (or behind a proxy); the
 * base URL can be overridden with ?api=http://host:port.
 */

import { ApiClient } from "./api.js";
import { Dashboard } from "./dashboard.js";
import { renderDashboard, renderSession } from "./render.js";
import { SessionConsole } from "./session.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const api = new ApiClient(params.get("api") ?? "");
  const console_ = new SessionConsole(api);
  const dashboard = new Dashboard(api);

  const promptInput = el<HTMLInputElement>("prompt");
  const sessionRoot = el<HTMLDivElement>("session");
  const dashboardRoot = el<HTMLDivElement>("dashboard");
  const player = el<HTMLAudioElement>("player");

  const redraw = () => {
    sessionRoot.innerHTML = renderSession(console_);
    dashboardRoot.innerHTML = renderDashboard(dashboard);
    promptInput.disabled = console_.busy;
    const buttons = Array.from(
      sessionRoot.querySelectorAll<HTMLButtonElement>("button[data-action]"),
    );
    for (const button of buttons) {
      const trackId = Number(button.dataset.track);
      button.addEventListener("click", async () => {
        if (button.dataset.action === "gain-down") {
          await console_.modifyTrackGain(trackId, -3);
        } else {
          await console_.removeTrack(trackId);
        }
        redraw();
      });
    }
  };

  await console_.open();
  redraw();

  el<HTMLButtonElement>("send").addEventListener("click", async () => {
    const prompt = promptInput.value.trim();
    if (!prompt) return;
    const response = await console_.submitTurn(prompt);
    if (response) promptInput.value = ""; // 409/parse errors preserve the input
    redraw();
  });

  el<HTMLButtonElement>("play").addEventListener("click", () => {
    player.src = console_.renderUrl() + `?t=${Date.now()}`;
    void player.play();
  });

  el<HTMLButtonElement>("load-dashboard").addEventListener("click", async () => {
    const creator = el<HTMLInputElement>("creator").value.trim();
    if (!creator) return;
    await dashboard.load(creator);
    redraw();
  });
}

void boot();
