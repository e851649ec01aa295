/**
 * Trainer actions. Every click becomes a protocol command; confirmed state
 * (obstacle list, visibility, screenshot count) moves only on the server's
 * ack, and a nack surfaces as an inline refusal banner.
 */

export type SendFn = (type: string, body: Record<string, unknown>) => number;

interface PendingAction {
  kind: string;
  detail: Record<string, unknown>;
}

export interface Refusal {
  error: string;
  detail: string;
  action: string;
}

export class TrainerController {
  readonly obstacles: string[] = [];
  visibleTo: number[] = [];
  observed: number[] = [];
  screenshotsTaken = 0;
  refusal: Refusal | null = null;
  lastScenarioConfig: Record<string, unknown> | null = null;
  private pending = new Map<number, PendingAction>();

  constructor(private readonly send: SendFn) {}

  private track(kind: string, detail: Record<string, unknown>, seq: number): void {
    this.pending.set(seq, { kind, detail });
  }

  createHunt(config: Record<string, unknown>): void {
    this.track("create_hunt", { config }, this.send("create_hunt", { config }));
  }

  placeObstacle(edgeId: string): void {
    this.track("place_obstacle", { edgeId }, this.send("place_obstacle", { edge_id: edgeId }));
  }

  startPreparation(): void {
    this.track("start_preparation", {}, this.send("start_preparation", {}));
  }

  startHunt(): void {
    this.track("start_hunt", {}, this.send("start_hunt", {}));
  }

  setVisibility(teamIds: number[]): void {
    this.track("set_visibility", { teamIds },
               this.send("set_visibility", { team_ids: teamIds }));
  }

  observeTeams(teamIds: number[]): void {
    this.track("observe", { teamIds }, this.send("observe", { team_ids: teamIds }));
  }

  takeScreenshot(floorId: string, viewpoint: [number, number], teamId: number | null = null): void {
    this.track("screenshot", { floorId },
               this.send("screenshot", { floor_id: floorId, viewpoint, team_id: teamId }));
  }

  queryDebrief(): void {
    this.track("debrief_query", {}, this.send("debrief_query", {}));
  }

  /** Server confirmed: commit the optimistically tracked action. */
  onAck(seq: number): void {
    const action = this.pending.get(seq);
    if (!action) return;
    this.pending.delete(seq);
    switch (action.kind) {
      case "place_obstacle":
        this.obstacles.push(action.detail.edgeId as string);
        break;
      case "set_visibility":
        this.visibleTo = action.detail.teamIds as number[];
        break;
      case "observe":
        this.observed = action.detail.teamIds as number[];
        break;
      case "screenshot":
        this.screenshotsTaken += 1;
        break;
      case "create_hunt":
        this.lastScenarioConfig = action.detail.config as Record<string, unknown>;
        this.obstacles.length = 0;
        break;
      default:
        break;
    }
  }

  /** Server refused: keep state untouched and raise the banner. */
  onNack(seq: number, error: string, detail: string): void {
    const action = this.pending.get(seq);
    this.pending.delete(seq);
    this.refusal = { error, detail, action: action?.kind ?? "unknown" };
  }

  dismissRefusal(): void {
    this.refusal = null;
  }

  get hasPending(): boolean {
    return this.pending.size > 0;
  }
}
