/**
 * Typed client for the blockstudio /v1 API.
 *
 * Every request is checked against the documented endpoint table before it
 * leaves the client and recorded in a network log, so a UI session can prove
 * it only ever touched documented routes.
 */

export interface TrackView {
  track_id: number;
  label: string;
  duration_seconds: number;
  provenance: string[];
}

export interface TurnRecord {
  turn_id: number;
  prompt: string;
  command: string | null;
  status: "ok" | "failed";
  response_text: string;
  error: string | null;
  event_ids: number[];
}

export interface SessionView {
  session_id: string;
  bpm: number;
  key: string;
  tracks: TrackView[];
  upload_count: number;
  turns: TurnRecord[];
}

export interface AttributionChip {
  block_id: string;
  creator_id: string;
  usage_role: string;
}

export interface TranscriptionNote {
  pitch: number;
  onset_beats: number;
  duration_beats: number;
  velocity: number;
}

export interface TurnResponse {
  response_text: string;
  new_track_ids: number[];
  modified_track_ids: number[];
  removed_track_ids: number[];
  attribution: AttributionChip[];
  transcription?: { bpm: number; key: string; notes: TranscriptionNote[] };
  session: SessionView;
}

export interface CreatorReport {
  creator_id: string;
  usage_by_block: Record<string, Record<string, number>>;
  total_events: number;
  total_earned_microunits: number;
  time_from: number | null;
  time_to: number | null;
}

export interface SettlementRule {
  method: string;
  role_weights: Record<string, number>;
  include_failed_turns: boolean;
}

export interface SettlementReport {
  session_id: string;
  rule: SettlementRule;
  pool_microunits: number;
  shares: Record<string, number>;
  event_count: number;
}

export interface StoredSettlement {
  report: SettlementReport;
  settled_at: number;
}

export interface LedgerStatus {
  status: "ok" | "corrupt";
  event_count?: number;
  first_corrupt_event_id?: number;
}

export interface BlockDescriptor {
  block_id: string;
  creator_id: string;
  source_track_id: string | null;
  timbral: string;
  temporal: string;
  bpm: number;
  key: string;
  bar_length: number;
  caption: string;
  created_at: number;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  column?: number;
  expected?: string[];
}

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody,
  ) {
    super(`${body.code}: ${body.message}`);
  }
}

export interface NetworkLogEntry {
  method: string;
  path: string;
  status: number;
}

/** The complete set of /v1 routes the UI is allowed to call. */
export const DOCUMENTED_ENDPOINTS: ReadonlyArray<{ method: string; pattern: RegExp }> = [
  { method: "POST", pattern: /^\/v1\/sessions$/ },
  { method: "GET", pattern: /^\/v1\/sessions\/[^/]+$/ },
  { method: "POST", pattern: /^\/v1\/sessions\/[^/]+\/uploads$/ },
  { method: "POST", pattern: /^\/v1\/sessions\/[^/]+\/turns$/ },
  { method: "GET", pattern: /^\/v1\/sessions\/[^/]+\/render$/ },
  { method: "GET", pattern: /^\/v1\/attribution\/creators\/[^/]+(\?.*)?$/ },
  { method: "GET", pattern: /^\/v1\/attribution\/sessions\/[^/]+\/settlement(\?.*)?$/ },
  { method: "GET", pattern: /^\/v1\/ledger\/verify$/ },
  { method: "GET", pattern: /^\/v1\/blocks\/[^/]+$/ },
  { method: "GET", pattern: /^\/v1\/blocks\?.*$/ },
];

export function isDocumented(method: string, path: string): boolean {
  return DOCUMENTED_ENDPOINTS.some(
    (e) => e.method === method && e.pattern.test(path),
  );
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: BodyInit },
) => Promise<Response>;

export class ApiClient {
  readonly networkLog: NetworkLogEntry[] = [];

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: BodyInit,
    headers?: Record<string, string>,
  ): Promise<T> {
    if (!isDocumented(method, path)) {
      throw new Error(`undocumented endpoint: ${method} ${path}`);
    }
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers,
      body,
    });
    this.networkLog.push({ method, path, status: response.status });
    if (!response.ok) {
      let parsed: ApiErrorBody;
      try {
        parsed = (await response.json()) as ApiErrorBody;
      } catch {
        parsed = { code: "http_error", message: `status ${response.status}` };
      }
      throw new ApiRequestError(response.status, parsed);
    }
    return (await response.json()) as T;
  }

  createSession(opts: { bpm?: number; key?: string } = {}): Promise<SessionView> {
    return this.request("POST", "/v1/sessions", JSON.stringify(opts), {
      "Content-Type": "application/json",
    });
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request("GET", `/v1/sessions/${sessionId}`);
  }

  submitTurn(sessionId: string, prompt: string): Promise<TurnResponse> {
    return this.request(
      "POST",
      `/v1/sessions/${sessionId}/turns`,
      JSON.stringify({ prompt }),
      { "Content-Type": "application/json" },
    );
  }

  uploadWav(sessionId: string, wav: ArrayBuffer | Uint8Array): Promise<{ upload_index: number }> {
    const body = wav instanceof Uint8Array ? new Uint8Array(wav).buffer as ArrayBuffer : wav;
    return this.request("POST", `/v1/sessions/${sessionId}/uploads`, body, {
      "Content-Type": "audio/wav",
    });
  }

  /** URL for the <audio> element; playback uses the render endpoint's WAV. */
  renderUrl(sessionId: string): string {
    return `${this.baseUrl}/v1/sessions/${sessionId}/render`;
  }

  creatorReport(
    creatorId: string,
    range: { time_from?: number; time_to?: number } = {},
  ): Promise<CreatorReport> {
    const params = new URLSearchParams();
    if (range.time_from !== undefined) params.set("time_from", String(range.time_from));
    if (range.time_to !== undefined) params.set("time_to", String(range.time_to));
    const query = params.toString();
    return this.request(
      "GET",
      `/v1/attribution/creators/${creatorId}${query ? "?" + query : ""}`,
    );
  }

  settlement(sessionId: string, rule: string, pool: number): Promise<StoredSettlement> {
    const params = new URLSearchParams({ rule, pool: String(pool) });
    return this.request(
      "GET",
      `/v1/attribution/sessions/${sessionId}/settlement?${params.toString()}`,
    );
  }

  ledgerVerify(): Promise<LedgerStatus> {
    return this.request("GET", "/v1/ledger/verify");
  }

  blocksByCreator(creatorId: string): Promise<{ blocks: BlockDescriptor[] }> {
    const params = new URLSearchParams({ creator_id: creatorId });
    return this.request("GET", `/v1/blocks?${params.toString()}`);
  }

  getBlock(blockId: string): Promise<BlockDescriptor> {
    return this.request("GET", `/v1/blocks/${blockId}`);
  }
}
