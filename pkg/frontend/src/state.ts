/**
 * Client-side view model. Holds exactly what the server sent: the welcome,
 * the latest snapshot (last writer wins per tick), relayed guidance, the
 * scoreboard, and the debrief bundle. Nothing is reconstructed client-side;
 * hidden avatars simply never exist here.
 */

import { Frame, GuidanceBody, Phase, ScoreEntry, SnapshotBody, WelcomeBody } from "./protocol.js";
import { DebriefBundle } from "./debrief.js";

export interface GuidanceEntry {
  fromRadio: string | null;
  teamId: number | null;
  payload: unknown;
}

export class ViewModel {
  welcome: WelcomeBody | null = null;
  snapshot: SnapshotBody | null = null;
  scoreboard: ScoreEntry[] | null = null;
  bundle: DebriefBundle | null = null;
  guidanceLog: GuidanceEntry[] = [];
  refusedReason: string | null = null;
  huntEndedAtTick: number | null = null;
  selectedFloor: string | null = null;
  cursorSeconds = 0;

  get phase(): Phase | null {
    return this.snapshot?.phase ?? null;
  }

  /** Apply one server frame; returns the frame type for convenience. */
  applyFrame(frame: Frame): string {
    switch (frame.type) {
      case "welcome":
        this.welcome = frame.body as unknown as WelcomeBody;
        break;
      case "snapshot": {
        const snapshot = frame.body as unknown as SnapshotBody;
        if (!this.snapshot || snapshot.tick >= this.snapshot.tick) {
          this.snapshot = snapshot;
        }
        if (this.selectedFloor === null) {
          this.selectedFloor = snapshot.you.floor_id;
        }
        break;
      }
      case "guidance": {
        const body = frame.body as unknown as GuidanceBody;
        this.guidanceLog.push({
          fromRadio: body.from_radio ?? null,
          teamId: body.team_id ?? null,
          payload: body.payload,
        });
        break;
      }
      case "scoreboard":
        this.scoreboard = (frame.body as { entries: ScoreEntry[] }).entries;
        break;
      case "hunt_ended":
        this.huntEndedAtTick = (frame.body as { final_tick: number }).final_tick;
        break;
      case "debrief_data":
        this.bundle = (frame.body as { bundle: DebriefBundle }).bundle;
        break;
      case "refused":
        this.refusedReason = String(frame.body.reason ?? "refused");
        break;
      default:
        break; // acks and nacks are routed to controllers, not the view model
    }
    return frame.type;
  }
}
