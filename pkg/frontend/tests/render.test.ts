import { readFileSync } from "node:fs";
import { describe, expect, test } from "vitest";
import { Building } from "../src/building.js";
import { decodeFrame, Frame, SnapshotBody } from "../src/protocol.js";
import { buildFloorScene } from "../src/render.js";
import { ViewModel } from "../src/state.js";

const building: Building = JSON.parse(
  readFileSync(new URL("./fixtures/building.json", import.meta.url), "utf-8"),
);

function framesOf(name: string): Frame[] {
  const raw = readFileSync(new URL(`./fixtures/${name}_frames.ndjson`, import.meta.url), "utf-8");
  return raw.split("\n").filter(Boolean).map(decodeFrame);
}

function lastHuntingSnapshot(frames: Frame[]): SnapshotBody {
  const snaps = frames.filter((f) => f.type === "snapshot")
    .map((f) => f.body as unknown as SnapshotBody)
    .filter((s) => s.phase === "hunting");
  return snaps[Math.floor(snaps.length / 2)];
}

describe("floor scene", () => {
  test("renders fixture floor F0 with its nodes and equipment", () => {
    const scene = buildFloorScene(building, "F0", {});
    expect(scene.nodes.map((n) => n.id)).toEqual(["n1", "n2", "n3"]);
    expect(scene.equipment).toHaveLength(1);
    expect(scene.equipment[0].id).toBe("EQ1");
    expect(scene.walls.length).toBeGreaterThanOrEqual(6);
    expect(scene.notice).toBeNull();
  });

  test("missing floor yields an empty scene with a notice", () => {
    const scene = buildFloorScene(building, "F9", {});
    expect(scene.nodes).toHaveLength(0);
    expect(scene.notice).toContain("F9");
  });

  test("obstacle edges are flagged for struck-through rendering", () => {
    const scene = buildFloorScene(building, "F0", { obstacles: ["e1"] });
    const byId = new Map(scene.edges.map((e) => [e.id, e]));
    expect(byId.get("e1")!.blocked).toBe(true);
    expect(byId.get("e2")!.blocked).toBe(false);
  });

  test("draws exactly the snapshot's avatars, never hidden ones", () => {
    const snapshot = lastHuntingSnapshot(framesOf("h1a"));
    const floors = ["F0", "F1"].map((floorId) =>
      buildFloorScene(building, floorId, {
        you: snapshot.you,
        avatars: snapshot.avatars,
        markings: snapshot.markings,
      }),
    );
    const drawn = new Set(floors.flatMap((s) => s.avatars.map((a) => a.clientId)));
    const allowed = new Set([snapshot.you.client_id,
                             ...snapshot.avatars.map((a) => a.client_id)]);
    expect(drawn).toEqual(allowed);
    // a hunter's snapshot contains no radio and no foreign team, so the
    // scene cannot either
    for (const scene of floors) {
      for (const avatar of scene.avatars) {
        expect(avatar.role).not.toBe("radio");
        if (avatar.teamId !== null) expect(avatar.teamId).toBe(snapshot.you.team_id);
      }
    }
  });

  test("markings appear on their floor only", () => {
    const markings = [{ floor_id: "F0", point: [3.5, 0.5] as [number, number], label: "checkpoint" }];
    expect(buildFloorScene(building, "F0", { markings }).markings).toHaveLength(1);
    expect(buildFloorScene(building, "F1", { markings }).markings).toHaveLength(0);
  });
});

describe("view model over recorded wire frames", () => {
  test("trainer frames walk lobby -> debrief and capture the bundle", () => {
    const model = new ViewModel();
    const phases = new Set<string>();
    for (const frame of framesOf("trainer1")) {
      model.applyFrame(frame);
      if (model.phase) phases.add(model.phase);
    }
    expect(phases).toEqual(new Set(["lobby", "preparation", "hunting", "debrief"]));
    expect(model.welcome?.client_id).toBe("trainer1");
    expect(model.scoreboard).not.toBeNull();
    expect(model.huntEndedAtTick).not.toBeNull();
    expect(model.bundle).not.toBeNull();
    expect(model.bundle!.timeline.screenshots).toHaveLength(1);
  });

  test("snapshots apply last-writer-wins by tick", () => {
    const model = new ViewModel();
    const frames = framesOf("h1a").filter((f) => f.type === "snapshot");
    for (const frame of frames) model.applyFrame(frame);
    const last = frames[frames.length - 1].body as unknown as SnapshotBody;
    expect(model.snapshot!.tick).toBe(last.tick);
  });

  test("hunter guidance log only holds own-team relays", () => {
    const model = new ViewModel();
    for (const frame of framesOf("h1a")) model.applyFrame(frame);
    expect(model.guidanceLog.length).toBeGreaterThan(0);
    for (const entry of model.guidanceLog) {
      expect(entry.teamId).toBe(1);
      expect(entry.fromRadio).toBe("radio1");
    }
  });
});
