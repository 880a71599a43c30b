/**
 * Session console view-model: the turn loop as the user sees it.
 *
 * The server response is authoritative: lanes update only from fetched
 * session state, never optimistically.  Parse errors surface inline at the
 * reported column; a concurrent-turn rejection shows a banner and leaves
 * the input untouched.
 */

import {
  ApiClient,
  ApiRequestError,
  AttributionChip,
  SessionView,
  TurnResponse,
} from "./api.js";
import { composeModifyGain, composeRemoveTrack } from "./dsl.js";

export interface HistoryEntry {
  prompt: string;
  responseText: string;
  chips: AttributionChip[];
  failed: boolean;
}

export interface InlineError {
  message: string;
  column: number | null;
}

export class SessionConsole {
  view: SessionView | null = null;
  history: HistoryEntry[] = [];
  inlineError: InlineError | null = null;
  banner: string | null = null;
  /** Input is disabled while a turn is in flight (single active turn). */
  busy = false;

  constructor(private readonly api: ApiClient) {}

  get sessionId(): string {
    if (!this.view) throw new Error("no open session");
    return this.view.session_id;
  }

  async open(opts: { bpm?: number; key?: string } = {}): Promise<SessionView> {
    this.view = await this.api.createSession(opts);
    return this.view;
  }

  async refresh(): Promise<SessionView> {
    this.view = await this.api.getSession(this.sessionId);
    return this.view;
  }

  async uploadWav(wav: ArrayBuffer | Uint8Array): Promise<number> {
    const { upload_index } = await this.api.uploadWav(this.sessionId, wav);
    await this.refresh();
    return upload_index;
  }

  renderUrl(): string {
    return this.api.renderUrl(this.sessionId);
  }

  /**
   * Submit one prompt.  Returns the turn response on success, null when the
   * server rejected it (the rejection is reflected in inlineError/banner).
   */
  async submitTurn(prompt: string): Promise<TurnResponse | null> {
    if (this.busy) return null;
    this.busy = true;
    this.inlineError = null;
    this.banner = null;
    try {
      const response = await this.api.submitTurn(this.sessionId, prompt);
      this.history.push({
        prompt,
        responseText: response.response_text,
        chips: response.attribution,
        failed: false,
      });
      this.view = response.session; // authoritative lanes
      return response;
    } catch (err) {
      if (err instanceof ApiRequestError) {
        await this.applyTurnError(prompt, err);
        return null;
      }
      throw err;
    } finally {
      this.busy = false;
    }
  }

  private async applyTurnError(prompt: string, err: ApiRequestError): Promise<void> {
    if (err.status === 422 && err.body.code === "parse_error") {
      this.inlineError = {
        message: err.body.message,
        column: err.body.column ?? null,
      };
    } else if (err.status === 409) {
      this.banner = "turn in progress";
      return; // the turn never reached the session; input stays put
    } else {
      this.banner = `${err.body.code}: ${err.body.message}`;
      this.history.push({
        prompt,
        responseText: err.body.message,
        chips: [],
        failed: true,
      });
    }
    // failed turns are recorded server-side; resync so the view (lanes
    // untouched, turn history grown) stays authoritative
    await this.refresh();
  }

  /** Compose the corresponding DSL and submit it as a normal turn. */
  modifyTrackGain(trackId: number, gainDb: number): Promise<TurnResponse | null> {
    return this.submitTurn(composeModifyGain(trackId, gainDb));
  }

  removeTrack(trackId: number): Promise<TurnResponse | null> {
    return this.submitTurn(composeRemoveTrack(trackId));
  }
}
