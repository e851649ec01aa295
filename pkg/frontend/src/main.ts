/**
 * Console bootstrap. Query parameters pick the role:
 *   ?role=trainer&name=trainer1
 *   ?role=radio&name=radio1&team=1
 * The page renders the selected floor map live from snapshots; after the
 * hunt it switches to the interactive debrief timeline.
 */

import { Building } from "./building.js";
import { cursorAt, DebriefBundle, pathUntil, timelineMarkers } from "./debrief.js";
import { HuntSocket } from "./net.js";
import { Frame, Role } from "./protocol.js";
import { photoPanel, RadioController } from "./radio.js";
import { buildFloorScene, drawScene, Scene } from "./render.js";
import { ViewModel } from "./state.js";
import { TrainerController } from "./trainer.js";

const $ = (id: string) => document.getElementById(id)!;

async function boot(): Promise<void> {
  const params = new URLSearchParams(location.search);
  const role = (params.get("role") ?? "trainer") as Role;
  const name = params.get("name") ?? `${role}1`;
  const team = params.get("team") ? Number(params.get("team")) : null;

  const building: Building = await (await fetch("/building")).json();
  const model = new ViewModel();
  let obstacles: string[] = [];

  const socket = new HuntSocket({
    onFrame: (frame: Frame) => {
      model.applyFrame(frame);
      if (frame.type === "welcome") {
        const summary = (frame.body as { scenario_summary?: { obstacles?: string[] } })
          .scenario_summary;
        obstacles = summary?.obstacles ?? [];
        $("status").textContent = `connected as ${name} (${role})`;
      }
      if (frame.type === "ack") trainer?.onAck((frame.body as { seq: number }).seq);
      if (frame.type === "nack") {
        const body = frame.body as { seq: number; error: string; detail: string };
        trainer?.onNack(body.seq, body.error, body.detail);
        showRefusal(`${body.error}: ${body.detail}`);
      }
      if (frame.type === "refused") {
        $("status").textContent = `refused: ${(frame.body as { reason: string }).reason}`;
      }
      if (frame.type === "debrief_data") enterDebrief();
      render();
    },
    onOpen: () => socket.hello(name, role, team),
    onClose: () => ($("status").textContent = "disconnected"),
  });

  const send = (type: string, body: Record<string, unknown>) => socket.send(type, body);
  const trainer = role === "trainer" ? new TrainerController(send) : null;
  const radio = role === "radio" ? new RadioController(send) : null;

  const canvas = $("map") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d")!;

  function currentFloor(): string {
    return model.selectedFloor ?? building.floors[0].id;
  }

  function showRefusal(text: string): void {
    const banner = $("refusal");
    banner.textContent = text;
    banner.style.display = "block";
    setTimeout(() => (banner.style.display = "none"), 5000);
  }

  function render(): void {
    const floorId = currentFloor();
    let scene: Scene;
    if (model.bundle) {
      scene = debriefScene(model.bundle, floorId);
    } else {
      scene = buildFloorScene(building, floorId, {
        you: model.snapshot?.you,
        avatars: model.snapshot?.avatars ?? [],
        markings: model.snapshot?.markings ?? [],
        obstacles,
      });
    }
    drawScene(ctx, scene, canvas.width, canvas.height);
    renderSidebar(floorId);
  }

  function debriefScene(bundle: DebriefBundle, floorId: string): Scene {
    const cursor = cursorAt(bundle, model.cursorSeconds);
    const avatars = Object.entries(cursor.per_hunter).map(([cid, at]) => ({
      client_id: cid, role: "hunter" as const, team_id: teamOf(bundle, cid),
      floor_id: at.floor_id, x: at.point[0], y: at.point[1],
      node: null, pointing: null, highlight: null,
    }));
    const pathRuns: { points: [number, number][]; teamId: number | null }[] = [];
    for (const [teamId, hunters] of Object.entries(bundle.paths)) {
      for (const breakpoints of Object.values(hunters)) {
        for (const run of pathUntil(breakpoints, cursor.tick)) {
          if (run.floor_id === floorId) {
            pathRuns.push({ points: run.points, teamId: Number(teamId) });
          }
        }
      }
    }
    return buildFloorScene(building, floorId, {
      avatars, markings: bundle.markings, obstacles, pathRuns,
    });
  }

  function teamOf(bundle: DebriefBundle, hunterId: string): number | null {
    for (const [teamId, hunters] of Object.entries(bundle.paths)) {
      if (hunterId in hunters) return Number(teamId);
    }
    return null;
  }

  function renderSidebar(activeFloor: string): void {
    const floors = $("floors");
    floors.innerHTML = "";
    const occupied = model.bundle
      ? new Set(cursorAt(model.bundle, model.cursorSeconds).floors_occupied)
      : new Set(
          (model.snapshot?.avatars ?? [])
            .concat(model.snapshot?.you ? [model.snapshot.you] : [])
            .filter((a) => a.role === "hunter" && a.floor_id)
            .map((a) => a.floor_id as string),
        );
    for (const floor of building.floors) {
      const button = document.createElement("button");
      button.textContent = `${floor.id}${occupied.has(floor.id) ? " ●" : ""}`;
      button.className = floor.id === activeFloor ? "floor active" : "floor";
      button.onclick = () => {
        model.selectedFloor = floor.id;
        render();
      };
      floors.appendChild(button);
    }

    const info = $("info");
    const lines: string[] = [];
    lines.push(`phase: ${model.phase ?? "connecting"}  tick: ${model.snapshot?.tick ?? 0}`);
    for (const [teamId, status] of Object.entries(model.snapshot?.teams ?? {})) {
      const finish = status.finish_seconds !== null
        ? `finished ${status.finish_seconds.toFixed(2)}s`
        : `progress ${status.progress}/40`;
      lines.push(`team ${teamId}: ${finish}`);
    }
    if (model.scoreboard) {
      lines.push("— scoreboard —");
      for (const entry of model.scoreboard) {
        lines.push(`team ${entry.team_id}: ${entry.seconds === null ? "DNF" : entry.seconds.toFixed(2) + "s"}`);
      }
    }
    if (role === "radio") {
      lines.push("— photos —");
      for (const entry of photoPanel(building, activeFloor)) lines.push(`▣ ${entry.label}`);
      for (const g of model.guidanceLog.slice(-5)) lines.push(`✉ ${JSON.stringify(g.payload)}`);
    }
    info.textContent = lines.join("\n");
  }

  function enterDebrief(): void {
    if (!model.bundle) return;
    $("timeline").style.display = "flex";
    const scrubber = $("scrubber") as HTMLInputElement;
    const duration = model.bundle.timeline.duration_seconds;
    scrubber.max = String(duration);
    scrubber.step = "0.05";
    scrubber.oninput = () => {
      model.cursorSeconds = Number(scrubber.value);
      $("cursor-time").textContent = `${model.cursorSeconds.toFixed(2)}s`;
      render();
    };
    const markers = $("markers");
    markers.innerHTML = "";
    for (const marker of timelineMarkers(model.bundle)) {
      const span = document.createElement("span");
      span.className = `marker ${marker.kind}`;
      span.style.left = `${(marker.fraction * 100).toFixed(1)}%`;
      span.title = marker.label;
      span.textContent = marker.kind === "finish" ? "◆" : "📷";
      span.onclick = () => {
        scrubber.value = String(marker.seconds);
        scrubber.dispatchEvent(new Event("input"));
      };
      markers.appendChild(span);
    }
  }

  // trainer toolbar
  if (trainer) {
    $("trainer-tools").style.display = "block";
    ($("btn-prep") as HTMLButtonElement).onclick = () => trainer.startPreparation();
    ($("btn-start") as HTMLButtonElement).onclick = () => trainer.startHunt();
    ($("btn-shot") as HTMLButtonElement).onclick = () =>
      trainer.takeScreenshot(currentFloor(), [0, 0]);
    ($("btn-debrief") as HTMLButtonElement).onclick = () => trainer.queryDebrief();
    ($("btn-obstacle") as HTMLButtonElement).onclick = () => {
      const edge = ($("obstacle-edge") as HTMLInputElement).value.trim();
      if (edge) trainer.placeObstacle(edge);
    };
    ($("btn-visible") as HTMLButtonElement).onclick = () => {
      const raw = ($("visible-teams") as HTMLInputElement).value.trim();
      trainer.setVisibility(raw ? raw.split(",").map(Number) : []);
    };
  }
  if (radio) {
    $("radio-tools").style.display = "block";
    ($("btn-guide") as HTMLButtonElement).onclick = () => {
      const text = ($("guidance-text") as HTMLInputElement).value;
      radio.sendGuidance(text);
    };
  }

  const proto = location.protocol === "https:" ? "wss" : "ws";
  socket.connect(`${proto}://${location.host}/ws`);
}

boot().catch((err) => {
  $("status").textContent = `failed to start: ${err}`;
});
