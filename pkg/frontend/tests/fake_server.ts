/**
 * In-memory stand-in for the blockstudio /v1 API, mirroring the real
 * service's response shapes.  Unknown routes reject loudly, so any UI call
 * that would not replay against the bare API fails the test.
 */

import type {
  AttributionChip,
  CreatorReport,
  FetchLike,
  SessionView,
  StoredSettlement,
  TrackView,
  TurnRecord,
} from "../src/api.js";

interface FakeBlock {
  block_id: string;
  creator_id: string;
  timbral: string;
  caption: string;
  duration_seconds: number;
}

interface FakeEvent {
  event_id: number;
  session_id: string;
  turn_id: number;
  block_id: string;
  creator_id: string;
  usage_role: string;
  timestamp: number;
}

interface FakeSession {
  view: SessionView;
  nextTrackId: number;
}

const TIMBRAL_TYPES = ["drums", "bass", "chords", "melody", "vocal", "fx"];

export class FakeServer {
  readonly blocks: FakeBlock[] = [
    { block_id: "b000001", creator_id: "alice", timbral: "melody",
      caption: "retro-pop synth lead", duration_seconds: 2.0 },
    { block_id: "b000002", creator_id: "bob", timbral: "bass",
      caption: "warm analog bass", duration_seconds: 2.0 },
    { block_id: "b000003", creator_id: "alice", timbral: "drums",
      caption: "punchy retro drums", duration_seconds: 2.0 },
  ];
  readonly events: FakeEvent[] = [];
  readonly sessions = new Map<string, FakeSession>();
  readonly settlements = new Map<string, StoredSettlement>();
  readonly requests: Array<{ method: string; path: string }> = [];
  busySessions = new Set<string>();
  private sessionCounter = 0;
  private clock = 1000;

  fetch: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    this.requests.push({ method, path });
    try {
      return this.route(method, path, init?.body);
    } catch (err) {
      if (err instanceof HttpReject) {
        return jsonResponse(err.status, err.body);
      }
      throw err;
    }
  };

  private route(method: string, path: string, body?: BodyInit): Response {
    const [pathname, query] = splitQuery(path);
    let m: RegExpMatchArray | null;

    if (method === "POST" && pathname === "/v1/sessions") {
      const opts = body ? JSON.parse(String(body)) : {};
      this.sessionCounter += 1;
      const view: SessionView = {
        session_id: `s${String(this.sessionCounter).padStart(6, "0")}`,
        bpm: opts.bpm ?? 120,
        key: opts.key ?? "Cmaj",
        tracks: [],
        upload_count: 0,
        turns: [],
      };
      this.sessions.set(view.session_id, { view, nextTrackId: 1 });
      return jsonResponse(201, view);
    }
    if ((m = pathname.match(/^\/v1\/sessions\/([^/]+)$/)) && method === "GET") {
      const session = this.requireSession(m[1]!);
      return jsonResponse(200, session.view);
    }
    if ((m = pathname.match(/^\/v1\/sessions\/([^/]+)\/uploads$/)) && method === "POST") {
      const session = this.requireSession(m[1]!);
      session.view.upload_count += 1;
      return jsonResponse(201, { upload_index: session.view.upload_count - 1 });
    }
    if ((m = pathname.match(/^\/v1\/sessions\/([^/]+)\/turns$/)) && method === "POST") {
      const session = this.requireSession(m[1]!);
      if (this.busySessions.has(m[1]!)) {
        throw new HttpReject(409, { code: "concurrent_turn", message: "a turn is already running" });
      }
      const prompt = JSON.parse(String(body)).prompt as string;
      return jsonResponse(200, this.runTurn(session, prompt));
    }
    if ((m = pathname.match(/^\/v1\/sessions\/([^/]+)\/render$/)) && method === "GET") {
      this.requireSession(m[1]!);
      return new Response(new Uint8Array([0x52, 0x49, 0x46, 0x46]), {
        status: 200,
        headers: { "content-type": "audio/wav" },
      });
    }
    if ((m = pathname.match(/^\/v1\/attribution\/creators\/([^/]+)$/)) && method === "GET") {
      return jsonResponse(200, this.creatorReport(m[1]!, query));
    }
    if ((m = pathname.match(/^\/v1\/attribution\/sessions\/([^/]+)\/settlement$/)) && method === "GET") {
      return jsonResponse(200, this.settle(m[1]!, query));
    }
    if (pathname === "/v1/ledger/verify" && method === "GET") {
      return jsonResponse(200, { status: "ok", event_count: this.events.length });
    }
    if (pathname === "/v1/blocks" && method === "GET") {
      const creator = new URLSearchParams(query).get("creator_id");
      return jsonResponse(200, {
        blocks: this.blocks.filter((b) => b.creator_id === creator),
      });
    }
    if ((m = pathname.match(/^\/v1\/blocks\/([^/]+)$/)) && method === "GET") {
      const block = this.blocks.find((b) => b.block_id === m![1]);
      if (!block) throw new HttpReject(404, { code: "unknown_block", message: "no such block" });
      return jsonResponse(200, block);
    }
    throw new Error(`fake server: unknown route ${method} ${path}`);
  }

  // -- behavior ------------------------------------------------------------

  private requireSession(sessionId: string): FakeSession {
    const session = this.sessions.get(sessionId);
    if (!session) {
      throw new HttpReject(404, { code: "unknown_session", message: `no such session: ${sessionId}` });
    }
    return session;
  }

  private runTurn(session: FakeSession, prompt: string) {
    const view = session.view;
    const turnId = view.turns.length + 1;
    const finish = (
      responseText: string,
      extras: Partial<{
        new_track_ids: number[];
        modified_track_ids: number[];
        removed_track_ids: number[];
        attribution: AttributionChip[];
      }> = {},
    ) => {
      const turn: TurnRecord = {
        turn_id: turnId,
        prompt,
        command: prompt.split(/\s+/)[0]!.toUpperCase(),
        status: "ok",
        response_text: responseText,
        error: null,
        event_ids: (extras.attribution ?? []).map((_, i) => this.events.length - i),
      };
      view.turns.push(turn);
      return {
        response_text: responseText,
        new_track_ids: extras.new_track_ids ?? [],
        modified_track_ids: extras.modified_track_ids ?? [],
        removed_track_ids: extras.removed_track_ids ?? [],
        attribution: extras.attribution ?? [],
        session: view,
      };
    };

    let m: RegExpMatchArray | null;
    if ((m = prompt.match(/^ADD\s+(\w+)(?:\s+FOR\s+\w+)?\s+MATCHING\s+"([^"]*)"/i))) {
      const timbral = m[1]!.toLowerCase();
      if (!TIMBRAL_TYPES.includes(timbral)) {
        view.turns.push({
          turn_id: turnId, prompt, command: null, status: "failed",
          response_text: "", error: "parse error", event_ids: [],
        });
        throw new HttpReject(422, {
          code: "parse_error",
          message: `expected ${TIMBRAL_TYPES.join(" or ")}`,
          column: 5,
          expected: TIMBRAL_TYPES,
        });
      }
      const block = this.blocks.find((b) => b.timbral === timbral);
      if (!block) {
        view.turns.push({
          turn_id: turnId, prompt, command: "ADD", status: "failed",
          response_text: "", error: "no block matches", event_ids: [],
        });
        throw new HttpReject(422, { code: "no_matching_block", message: "no block matches" });
      }
      const chip: AttributionChip = {
        block_id: block.block_id,
        creator_id: block.creator_id,
        usage_role: "prompt_audio",
      };
      this.events.push({
        event_id: this.events.length + 1,
        session_id: view.session_id,
        turn_id: turnId,
        block_id: block.block_id,
        creator_id: block.creator_id,
        usage_role: "prompt_audio",
        timestamp: (this.clock += 1),
      });
      const track: TrackView = {
        track_id: session.nextTrackId++,
        label: timbral,
        duration_seconds: block.duration_seconds,
        provenance: [block.block_id],
      };
      view.tracks.push(track);
      return finish(
        `Retrieved '${block.caption}' by ${block.creator_id}; added ${timbral} track ${track.track_id} at ${view.bpm} BPM`,
        { new_track_ids: [track.track_id], attribution: [chip] },
      );
    }
    if ((m = prompt.match(/^MODIFY\s+TRACK\s+(\d+)\s+GAIN\s+(-?\d+(?:\.\d+)?)$/i))) {
      const trackId = Number(m[1]);
      if (!view.tracks.some((t) => t.track_id === trackId)) {
        view.turns.push({
          turn_id: turnId, prompt, command: "MODIFY", status: "failed",
          response_text: "", error: "no such track", event_ids: [],
        });
        throw new HttpReject(404, { code: "unknown_reference", message: `no such track: track:${trackId}` });
      }
      return finish(`Applied ${m[2]} dB gain to track ${trackId}`, {
        modified_track_ids: [trackId],
      });
    }
    if ((m = prompt.match(/^REMOVE\s+TRACK\s+(\d+)$/i))) {
      const trackId = Number(m[1]);
      if (!view.tracks.some((t) => t.track_id === trackId)) {
        throw new HttpReject(404, { code: "unknown_reference", message: `no such track: track:${trackId}` });
      }
      view.tracks = view.tracks.filter((t) => t.track_id !== trackId);
      return finish(`Removed track ${trackId}`, { removed_track_ids: [trackId] });
    }
    if (/^RENDER$/i.test(prompt)) {
      if (view.tracks.length === 0) {
        throw new HttpReject(422, { code: "empty_session", message: "session has no tracks" });
      }
      return finish(`Rendered ${view.tracks.length} tracks`);
    }
    // anything else: parse error at column 1; the real service records the
    // failed turn before rejecting, so the fake does too
    view.turns.push({
      turn_id: turnId, prompt, command: null, status: "failed",
      response_text: "", error: "parse error", event_ids: [],
    });
    throw new HttpReject(422, {
      code: "parse_error",
      message: "expected ADD or GENERATE or TRANSCRIBE or MODIFY or REMOVE or RENDER or UNDO or SET",
      column: 1,
      expected: ["ADD", "GENERATE", "TRANSCRIBE", "MODIFY", "REMOVE", "RENDER", "UNDO", "SET"],
    });
  }

  private creatorReport(creatorId: string, query: string): CreatorReport {
    const params = new URLSearchParams(query);
    const from = params.get("time_from");
    const to = params.get("time_to");
    const usage: Record<string, Record<string, number>> = {};
    let total = 0;
    for (const e of this.events) {
      if (e.creator_id !== creatorId) continue;
      if (from !== null && e.timestamp < Number(from)) continue;
      if (to !== null && e.timestamp > Number(to)) continue;
      usage[e.block_id] = usage[e.block_id] ?? {};
      usage[e.block_id]![e.usage_role] = (usage[e.block_id]![e.usage_role] ?? 0) + 1;
      total += 1;
    }
    let earned = 0;
    for (const stored of this.settlements.values()) {
      earned += stored.report.shares[creatorId] ?? 0;
    }
    return {
      creator_id: creatorId,
      usage_by_block: usage,
      total_events: total,
      total_earned_microunits: earned,
      time_from: from === null ? null : Number(from),
      time_to: to === null ? null : Number(to),
    };
  }

  private settle(sessionId: string, query: string): StoredSettlement {
    if (!this.sessions.has(sessionId)) {
      throw new HttpReject(404, { code: "unknown_session", message: "no such session" });
    }
    const params = new URLSearchParams(query);
    const rule = params.get("rule") ?? "weighted_pro_rata";
    const pool = Number(params.get("pool") ?? "0");
    const key = `${sessionId}_${rule}`;
    const existing = this.settlements.get(key);
    if (existing && existing.report.pool_microunits === pool) return existing;

    const creators = [...new Set(
      this.events.filter((e) => e.session_id === sessionId).map((e) => e.creator_id),
    )].sort();
    if (creators.length === 0 && pool > 0) {
      throw new HttpReject(409, { code: "no_qualifying_events", message: "nobody to pay" });
    }
    const shares: Record<string, number> = {};
    if (creators.length > 0) {
      const base = Math.floor(pool / creators.length);
      let leftover = pool - base * creators.length;
      for (const c of creators) {
        shares[c] = base + (leftover > 0 ? 1 : 0);
        leftover -= 1;
      }
    }
    const stored: StoredSettlement = {
      report: {
        session_id: sessionId,
        rule: {
          method: rule,
          role_weights: { prompt_audio: 1.0, context_audio: 0.5,
                          symbolic_source: 0.75, direct_inclusion: 1.0 },
          include_failed_turns: false,
        },
        pool_microunits: pool,
        shares,
        event_count: this.events.filter((e) => e.session_id === sessionId).length,
      },
      settled_at: (this.clock += 1),
    };
    this.settlements.set(key, stored);
    return stored;
  }
}

class HttpReject {
  constructor(
    readonly status: number,
    readonly body: Record<string, unknown>,
  ) {}
}

function splitQuery(path: string): [string, string] {
  const i = path.indexOf("?");
  return i < 0 ? [path, ""] : [path.slice(0, i), path.slice(i + 1)];
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}
