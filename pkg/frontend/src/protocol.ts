/**
 * Wire protocol mirror: frame envelope, message catalog, encode/decode.
 * One UTF-8 JSON object per frame, at most 64 KiB; see docs/protocol.md.
 */

export const PROTOCOL_VERSION = 1;
export const MAX_FRAME_BYTES = 64 * 1024;
export const TICK_SECONDS = 0.05;

export type Role = "hunter" | "radio" | "trainer";
export type Phase = "lobby" | "preparation" | "hunting" | "debrief";

export interface AvatarView {
  client_id: string;
  role: Role;
  team_id: number | null;
  floor_id: string | null;
  x: number | null;
  y: number | null;
  node: string | null;
  pointing: number | null;
  highlight: string | null;
  moving?: boolean;
}

export interface Marking {
  floor_id: string;
  point: [number, number];
  label: string;
}

export interface TeamStatus {
  progress: number;
  finish_seconds: number | null;
}

export interface ScoreEntry {
  team_id: number;
  seconds: number | null;
}

export interface SnapshotBody {
  tick: number;
  phase: Phase;
  you: AvatarView;
  avatars: AvatarView[];
  teams: Record<string, TeamStatus>;
  markings: Marking[];
  scoreboard?: ScoreEntry[] | null;
}

export interface WelcomeBody {
  session_id: string;
  client_id: string;
  building_digest: string;
  scenario_summary: Record<string, unknown>;
  protocol_version: number;
}

export interface GuidanceBody {
  payload: unknown;
  from_radio?: string | null;
  team_id?: number | null;
}

export interface Frame {
  seq: number;
  type: string;
  body: Record<string, unknown>;
  tick?: number;
}

/** Every frame type either side may emit; decoding anything else fails. */
export const CATALOG = new Set<string>([
  // client -> server
  "hello", "create_hunt", "place_obstacle", "start_preparation", "start_hunt",
  "move_to", "move_radio", "point", "guidance", "screenshot",
  "set_visibility", "observe", "debrief_query", "resume",
  // server -> client
  "welcome", "ack", "nack", "snapshot", "scoreboard", "hunt_ended",
  "debrief_data", "refused",
]);

export class DecodeError extends Error {
  constructor(public readonly tag: string, message?: string) {
    super(message ?? `cannot decode frame of type ${tag}`);
  }
}

export class OversizeFrameError extends Error {}

const encoder = new TextEncoder();

export function encodeFrame(frame: Frame): string {
  const doc: Record<string, unknown> = {
    seq: frame.seq,
    type: frame.type,
    body: frame.body,
  };
  if (frame.tick !== undefined && frame.tick !== null) doc.tick = frame.tick;
  const text = JSON.stringify(doc);
  if (encoder.encode(text).length > MAX_FRAME_BYTES) {
    throw new OversizeFrameError(`frame exceeds ${MAX_FRAME_BYTES} bytes`);
  }
  return text;
}

export function decodeFrame(text: string): Frame {
  if (encoder.encode(text).length > MAX_FRAME_BYTES) {
    throw new OversizeFrameError(`frame exceeds ${MAX_FRAME_BYTES} bytes`);
  }
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new DecodeError("?", `invalid JSON: ${err}`);
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new DecodeError("?", "frame must be a JSON object");
  }
  const record = doc as Record<string, unknown>;
  const tag = record.type;
  if (typeof tag !== "string" || !CATALOG.has(tag)) {
    throw new DecodeError(String(tag));
  }
  if (typeof record.seq !== "number" || !Number.isInteger(record.seq)) {
    throw new DecodeError(tag, `${tag}: missing integer seq`);
  }
  const body = record.body ?? {};
  if (typeof body !== "object" || Array.isArray(body)) {
    throw new DecodeError(tag, `${tag}: body must be an object`);
  }
  const frame: Frame = { seq: record.seq, type: tag, body: body as Record<string, unknown> };
  if (record.tick !== undefined && record.tick !== null) {
    if (typeof record.tick !== "number") throw new DecodeError(tag, `${tag}: bad tick`);
    frame.tick = record.tick;
  }
  return frame;
}
