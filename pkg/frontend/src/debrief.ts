/**
 * Debrief bundle consumption: the timeline scrubber, path overlays, and
 * floor-occupancy markers are pure functions of the exported bundle.
 *
 * Hunter paths arrive as motion breakpoints; positions between breakpoints
 * are linear (constant walking speed), so interpolating at tick resolution
 * reproduces the server's replayed cursor_state.
 */

import { TICK_SECONDS } from "./protocol.js";

export interface Breakpoint {
  tick: number;
  t: number;
  floor_id: string;
  x: number;
  y: number;
}

export interface CursorSample {
  t: number;
  tick: number;
  per_hunter: Record<string, { floor_id: string; point: [number, number] }>;
  floors_occupied: string[];
}

export interface TimelineDoc {
  finishes: { team_id: number; seconds: number; tick: number }[];
  screenshots: {
    tick: number;
    seconds: number;
    floor_id: string;
    viewpoint: [number, number];
    team_id: number | null;
  }[];
  duration_seconds: number;
}

export interface DebriefBundle {
  meta: {
    building_id: string;
    duration_seconds: number;
    final_tick: number;
    hunt_start_tick: number;
    [key: string]: unknown;
  };
  scoreboard: { team_id: number; seconds: number | null }[];
  timeline: TimelineDoc;
  paths: Record<string, Record<string, Breakpoint[]>>;
  cursors: CursorSample[];
  markings: { floor_id: string; point: [number, number]; label: string }[];
}

/** Seconds -> the tick the server would sample (nearest at or below t). */
export function secondsToTick(bundle: DebriefBundle, t: number): number {
  const tick = bundle.meta.hunt_start_tick + Math.floor(t / TICK_SECONDS + 1e-9);
  return Math.min(Math.max(tick, 0), bundle.meta.final_tick);
}

function positionAtTick(
  breakpoints: Breakpoint[],
  tick: number,
): { floor_id: string; point: [number, number] } | null {
  if (breakpoints.length === 0) return null;
  if (tick <= breakpoints[0].tick) {
    const first = breakpoints[0];
    return { floor_id: first.floor_id, point: [first.x, first.y] };
  }
  const last = breakpoints[breakpoints.length - 1];
  if (tick >= last.tick) {
    return { floor_id: last.floor_id, point: [last.x, last.y] };
  }
  let lo = 0;
  let hi = breakpoints.length - 1;
  while (hi - lo > 1) {
    const mid = (lo + hi) >> 1;
    if (breakpoints[mid].tick <= tick) lo = mid;
    else hi = mid;
  }
  const a = breakpoints[lo];
  const b = breakpoints[hi];
  if (a.tick === tick) return { floor_id: a.floor_id, point: [a.x, a.y] };
  // ticks strictly inside a span share the span's floor: floor changes
  // always come as breakpoint pairs one tick apart
  const frac = (tick - a.tick) / (b.tick - a.tick);
  return {
    floor_id: a.floor_id,
    point: [a.x + (b.x - a.x) * frac, a.y + (b.y - a.y) * frac],
  };
}

/** The scrubber's core: every hunter's position and the occupied floors. */
export function cursorAt(bundle: DebriefBundle, tSeconds: number): CursorSample {
  const tick = secondsToTick(bundle, tSeconds);
  const perHunter: CursorSample["per_hunter"] = {};
  const floors = new Set<string>();
  for (const teamPaths of Object.values(bundle.paths)) {
    for (const [hunterId, breakpoints] of Object.entries(teamPaths)) {
      const at = positionAtTick(breakpoints, tick);
      if (at === null) continue;
      perHunter[hunterId] = at;
      floors.add(at.floor_id);
    }
  }
  return {
    t: tSeconds,
    tick,
    per_hunter: perHunter,
    floors_occupied: [...floors].sort(),
  };
}

/** Path polyline for one hunter up to the cursor, split per floor. */
export function pathUntil(
  breakpoints: Breakpoint[],
  tick: number,
): { floor_id: string; points: [number, number][] }[] {
  const runs: { floor_id: string; points: [number, number][] }[] = [];
  const push = (floorId: string, point: [number, number]) => {
    const current = runs[runs.length - 1];
    if (current && current.floor_id === floorId) current.points.push(point);
    else runs.push({ floor_id: floorId, points: [point] });
  };
  for (const bp of breakpoints) {
    if (bp.tick > tick) break;
    push(bp.floor_id, [bp.x, bp.y]);
  }
  const head = positionAtTick(breakpoints, tick);
  if (head) push(head.floor_id, head.point);
  return runs;
}

/** Screenshot markers positioned on a 0..1 scrubber axis. */
export function timelineMarkers(bundle: DebriefBundle): {
  kind: "finish" | "screenshot";
  seconds: number;
  fraction: number;
  label: string;
}[] {
  const duration = Math.max(bundle.timeline.duration_seconds, 1e-9);
  const markers = [];
  for (const finish of bundle.timeline.finishes) {
    markers.push({
      kind: "finish" as const,
      seconds: finish.seconds,
      fraction: finish.seconds / duration,
      label: `team ${finish.team_id}: ${finish.seconds.toFixed(2)}s`,
    });
  }
  for (const shot of bundle.timeline.screenshots) {
    markers.push({
      kind: "screenshot" as const,
      seconds: shot.seconds,
      fraction: shot.seconds / duration,
      label: `screenshot @ ${shot.seconds.toFixed(2)}s (${shot.floor_id})`,
    });
  }
  return markers.sort((a, b) => a.seconds - b.seconds);
}
