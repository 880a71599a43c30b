import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { Dashboard } from "../src/dashboard.js";
import { renderDashboard } from "../src/render.js";
import { SessionConsole } from "../src/session.js";
import { FakeServer } from "./fake_server.js";

async function seededWorld() {
  const server = new FakeServer();
  const api = new ApiClient("", server.fetch);
  const console_ = new SessionConsole(api);
  await console_.open();
  await console_.submitTurn('ADD melody MATCHING "retro synth"');   // alice
  await console_.submitTurn('ADD drums MATCHING "punchy"');          // alice
  await console_.submitTurn('ADD bass MATCHING "warm"');             // bob
  return { server, api, console_, dashboard: new Dashboard(api) };
}

describe("artist dashboard", () => {
  it("fresh creator renders an all-zero dashboard", async () => {
    const server = new FakeServer();
    const dashboard = new Dashboard(new ApiClient("", server.fetch));
    await dashboard.load("nobody");
    expect(dashboard.totalEvents()).toBe(0);
    expect(dashboard.earnedMicrounits()).toBe(0);
    expect(dashboard.usageRows()).toEqual([]);
  });

  it("usage rows come verbatim from the report fields", async () => {
    const { dashboard, api, console_ } = await seededWorld();
    await dashboard.load("alice");
    const report = await api.creatorReport("alice");
    expect(dashboard.totalEvents()).toBe(report.total_events);
    for (const row of dashboard.usageRows()) {
      expect(row.count).toBe(report.usage_by_block[row.blockId]![row.role]);
    }
    expect(console_.view!.tracks).toHaveLength(3);
  });

  it("earnings equal the settlement share after settling", async () => {
    const { dashboard, api, console_ } = await seededWorld();
    const stored = await dashboard.browseSettlement(
      console_.sessionId, "equal_split", 1_000_000,
    );
    await dashboard.load("alice");
    expect(dashboard.earnedMicrounits()).toBe(stored.report.shares["alice"]);
    expect(dashboard.shareIn(console_.sessionId, "equal_split", "alice")).toBe(
      stored.report.shares["alice"],
    );
    const again = await api.settlement(console_.sessionId, "equal_split", 1_000_000);
    expect(again).toEqual(stored); // idempotent per (session, rule, pool)
  });

  it("range excluding all events shows zero counts", async () => {
    const { dashboard } = await seededWorld();
    await dashboard.load("alice", { time_from: 10, time_to: 20 });
    expect(dashboard.totalEvents()).toBe(0);
    expect(dashboard.usageRows()).toEqual([]);
  });

  it("rendered HTML contains exactly the API figures", async () => {
    const { dashboard, api, console_ } = await seededWorld();
    await dashboard.browseSettlement(console_.sessionId, "equal_split", 900_001);
    await dashboard.load("alice");
    const report = await api.creatorReport("alice");
    const html = renderDashboard(dashboard);
    expect(html).toContain(`<span class="total-events">${report.total_events}</span>`);
    expect(html).toContain(`<span class="earned">${report.total_earned_microunits}</span>`);
  });
});
