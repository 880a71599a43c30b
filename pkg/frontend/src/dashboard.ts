/**
 * Artist dashboard view-model: block usage and revenue.
 *
 * Every number shown comes verbatim from a /v1/attribution response field;
 * the client only groups rows for display and never does arithmetic on
 * money.
 */

import { ApiClient, CreatorReport, StoredSettlement } from "./api.js";

export interface UsageRow {
  blockId: string;
  role: string;
  count: number;
}

export class Dashboard {
  report: CreatorReport | null = null;
  settlements: StoredSettlement[] = [];
  error: string | null = null;

  constructor(private readonly api: ApiClient) {}

  async load(
    creatorId: string,
    range: { time_from?: number; time_to?: number } = {},
  ): Promise<CreatorReport> {
    this.report = await this.api.creatorReport(creatorId, range);
    return this.report;
  }

  /** Usage counts flattened for display, straight from the report fields. */
  usageRows(): UsageRow[] {
    if (!this.report) return [];
    const rows: UsageRow[] = [];
    for (const [blockId, roles] of Object.entries(this.report.usage_by_block)) {
      for (const [role, count] of Object.entries(roles)) {
        rows.push({ blockId, role, count });
      }
    }
    rows.sort((a, b) =>
      a.blockId === b.blockId
        ? a.role.localeCompare(b.role)
        : a.blockId.localeCompare(b.blockId),
    );
    return rows;
  }

  totalEvents(): number {
    return this.report?.total_events ?? 0;
  }

  earnedMicrounits(): number {
    return this.report?.total_earned_microunits ?? 0;
  }

  /** Fetch one session's persisted settlement into the browser list. */
  async browseSettlement(
    sessionId: string,
    rule: string,
    pool: number,
  ): Promise<StoredSettlement> {
    const stored = await this.api.settlement(sessionId, rule, pool);
    this.settlements = [
      ...this.settlements.filter(
        (s) =>
          !(
            s.report.session_id === stored.report.session_id &&
            s.report.rule.method === stored.report.rule.method
          ),
      ),
      stored,
    ];
    return stored;
  }

  /** A creator's share in a browsed settlement, verbatim from the report. */
  shareIn(sessionId: string, rule: string, creatorId: string): number | null {
    const stored = this.settlements.find(
      (s) => s.report.session_id === sessionId && s.report.rule.method === rule,
    );
    if (!stored) return null;
    return stored.report.shares[creatorId] ?? 0;
  }
}
