/**
 * Prompt composition for track actions.
 *
 * The UI never mutates tracks through private endpoints: every action is
 * expressed as a DSL command and submitted as a normal turn, so the console
 * and the CLI exercise the identical server path.
 */

export function composeModifyGain(trackId: number, gainDb: number): string {
  if (!Number.isInteger(trackId) || trackId < 1) {
    throw new Error(`bad track id: ${trackId}`);
  }
  if (!Number.isFinite(gainDb)) {
    throw new Error(`bad gain: ${gainDb}`);
  }
  return `MODIFY TRACK ${trackId} GAIN ${gainDb}`;
}

export function composeRemoveTrack(trackId: number): string {
  if (!Number.isInteger(trackId) || trackId < 1) {
    throw new Error(`bad track id: ${trackId}`);
  }
  return `REMOVE TRACK ${trackId}`;
}

export function composeAdd(
  timbral: string,
  matching: string,
  opts: { temporal?: string; bpm?: number; key?: string } = {},
): string {
  let prompt = `ADD ${timbral}`;
  if (opts.temporal) prompt += ` FOR ${opts.temporal}`;
  prompt += ` MATCHING "${matching.replace(/"/g, "")}"`;
  if (opts.bpm !== undefined) prompt += ` BPM ${opts.bpm}`;
  if (opts.key) prompt += ` KEY ${opts.key}`;
  return prompt;
}
