import { describe, expect, test } from "vitest";
import { CATALOG, decodeFrame, encodeFrame } from "../src/protocol.js";
import { TrainerController } from "../src/trainer.js";

/** Collects outgoing commands the way the socket would. */
function harness() {
  const sent: { seq: number; type: string; body: Record<string, unknown> }[] = [];
  let seq = 0;
  const controller = new TrainerController((type, body) => {
    seq += 1;
    // every emitted command must survive the real codec and be cataloged
    const frame = decodeFrame(encodeFrame({ seq, type, body }));
    expect(CATALOG.has(frame.type)).toBe(true);
    sent.push({ seq, type, body });
    return seq;
  });
  return { controller, sent };
}

describe("trainer controller", () => {
  test("actions emit catalog commands", () => {
    const { controller, sent } = harness();
    controller.createHunt({ hunt_type: { kind: "point_at_equipment", equipment_id: "EQ1" } });
    controller.placeObstacle("e1");
    controller.setVisibility([1]);
    controller.observeTeams([1, 2]);
    controller.takeScreenshot("F0", [1, 2]);
    controller.startPreparation();
    controller.startHunt();
    controller.queryDebrief();
    expect(sent.map((s) => s.type)).toEqual([
      "create_hunt", "place_obstacle", "set_visibility", "observe",
      "screenshot", "start_preparation", "start_hunt", "debrief_query",
    ]);
    expect(sent[1].body).toEqual({ edge_id: "e1" });
    expect(sent[2].body).toEqual({ team_ids: [1] });
  });

  test("state commits only on ack", () => {
    const { controller } = harness();
    controller.placeObstacle("e1");
    expect(controller.obstacles).toEqual([]);     // still pending
    expect(controller.hasPending).toBe(true);
    controller.onAck(1);
    expect(controller.obstacles).toEqual(["e1"]);
    expect(controller.hasPending).toBe(false);
  });

  test("nack renders a refusal and leaves state untouched", () => {
    const { controller } = harness();
    controller.placeObstacle("e3");
    controller.onNack(1, "UnreachableObjective", "blocking e3 cuts off the objective");
    expect(controller.obstacles).toEqual([]);
    expect(controller.refusal).not.toBeNull();
    expect(controller.refusal!.error).toBe("UnreachableObjective");
    expect(controller.refusal!.action).toBe("place_obstacle");
    controller.dismissRefusal();
    expect(controller.refusal).toBeNull();
  });

  test("one accepted and one rejected obstacle", () => {
    const { controller } = harness();
    controller.placeObstacle("e1");   // seq 1
    controller.placeObstacle("e3");   // seq 2
    controller.onAck(1);
    controller.onNack(2, "UnreachableObjective", "no route left");
    expect(controller.obstacles).toEqual(["e1"]);
    expect(controller.refusal!.error).toBe("UnreachableObjective");
  });

  test("visibility and screenshots commit on ack", () => {
    const { controller } = harness();
    controller.setVisibility([1, 2]);
    controller.takeScreenshot("F1", [0, 0], 1);
    controller.onAck(1);
    controller.onAck(2);
    expect(controller.visibleTo).toEqual([1, 2]);
    expect(controller.screenshotsTaken).toBe(1);
  });

  test("create_hunt ack resets the confirmed obstacle list", () => {
    const { controller } = harness();
    controller.placeObstacle("e1");
    controller.onAck(1);
    controller.createHunt({ start_room: "R_B" });
    controller.onAck(2);
    expect(controller.obstacles).toEqual([]);
    expect(controller.lastScenarioConfig).toEqual({ start_room: "R_B" });
  });
});
