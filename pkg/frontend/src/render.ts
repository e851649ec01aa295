/**
 * Floor-map rendering. `buildFloorScene` is a pure function from building
 * data plus a role-filtered snapshot to a drawable scene: it never invents
 * avatars the snapshot does not contain. `drawScene` paints it on a canvas.
 */

import { Building, floorById, nodeById } from "./building.js";
import { AvatarView, Marking } from "./protocol.js";

export interface SceneAvatar {
  clientId: string;
  role: string;
  teamId: number | null;
  x: number;
  y: number;
  pointing: number | null;
  highlight: string | null;
  isYou: boolean;
}

export interface SceneEdge {
  id: string;
  kind: "walk" | "stairs";
  a: [number, number];
  b: [number, number];
  blocked: boolean;
}

export interface Scene {
  floorId: string;
  walls: { x1: number; y1: number; x2: number; y2: number }[];
  rooms: { id: string; name: string; polygon: [number, number][] }[];
  nodes: { id: string; x: number; y: number }[];
  edges: SceneEdge[];
  equipment: { id: string; tag: string; x: number; y: number; radius: number }[];
  markings: { point: [number, number]; label: string }[];
  avatars: SceneAvatar[];
  pathRuns: { points: [number, number][]; teamId: number | null }[];
  notice: string | null;
}

export interface SceneInput {
  you?: AvatarView | null;
  avatars?: AvatarView[];
  markings?: Marking[];
  obstacles?: string[];
  pathRuns?: { points: [number, number][]; teamId: number | null }[];
}

export function buildFloorScene(
  building: Building,
  floorId: string,
  input: SceneInput,
): Scene {
  const floor = floorById(building, floorId);
  if (!floor) {
    return {
      floorId, walls: [], rooms: [], nodes: [], edges: [], equipment: [],
      markings: [], avatars: [], pathRuns: [],
      notice: `no such floor: ${floorId}`,
    };
  }
  const blocked = new Set(input.obstacles ?? []);
  const edges: SceneEdge[] = [];
  for (const edge of floor.edges) {
    const a = nodeById(building, edge.a);
    const b = nodeById(building, edge.b);
    if (!a || !b) continue;
    edges.push({
      id: edge.id, kind: edge.kind,
      a: [a.x, a.y], b: [b.x, b.y],
      blocked: blocked.has(edge.id),
    });
  }

  const avatars: SceneAvatar[] = [];
  const toScene = (view: AvatarView, isYou: boolean): void => {
    if (view.floor_id !== floorId || view.x === null || view.y === null) return;
    avatars.push({
      clientId: view.client_id,
      role: view.role,
      teamId: view.team_id,
      x: view.x,
      y: view.y,
      pointing: view.pointing,
      highlight: view.highlight,
      isYou,
    });
  };
  for (const view of input.avatars ?? []) toScene(view, false);
  if (input.you) toScene(input.you, true);

  return {
    floorId,
    walls: floor.walls,
    rooms: floor.rooms,
    nodes: floor.nodes.map((n) => ({ id: n.id, x: n.x, y: n.y })),
    edges,
    equipment: floor.equipment,
    markings: (input.markings ?? [])
      .filter((m) => m.floor_id === floorId)
      .map((m) => ({ point: m.point, label: m.label })),
    avatars,
    pathRuns: input.pathRuns ?? [],
    notice: null,
  };
}

const TEAM_COLORS = ["#e3b341", "#58a6ff", "#3fb950", "#f778ba", "#a371f7"];

function teamColor(teamId: number | null): string {
  if (teamId === null) return "#f85149"; // trainer
  return TEAM_COLORS[teamId % TEAM_COLORS.length];
}

interface Viewport {
  scale: number;
  offsetX: number;
  offsetY: number;
}

export function fitViewport(scene: Scene, width: number, height: number): Viewport {
  let minX = Infinity, minY = Infinity, maxX = -Infinity, maxY = -Infinity;
  const extend = (x: number, y: number) => {
    minX = Math.min(minX, x); maxX = Math.max(maxX, x);
    minY = Math.min(minY, y); maxY = Math.max(maxY, y);
  };
  for (const wall of scene.walls) { extend(wall.x1, wall.y1); extend(wall.x2, wall.y2); }
  for (const room of scene.rooms) for (const [x, y] of room.polygon) extend(x, y);
  for (const node of scene.nodes) extend(node.x, node.y);
  if (!Number.isFinite(minX)) { minX = 0; minY = 0; maxX = 1; maxY = 1; }
  const margin = 1.0;
  minX -= margin; minY -= margin; maxX += margin; maxY += margin;
  const scale = Math.min(width / (maxX - minX), height / (maxY - minY));
  return {
    scale,
    offsetX: (width - (maxX - minX) * scale) / 2 - minX * scale,
    // canvas y grows downward; flip so plans read north-up
    offsetY: (height - (maxY - minY) * scale) / 2 + maxY * scale,
  };
}

export function drawScene(
  ctx: CanvasRenderingContext2D,
  scene: Scene,
  width: number,
  height: number,
): void {
  const vp = fitViewport(scene, width, height);
  const X = (x: number) => x * vp.scale + vp.offsetX;
  const Y = (y: number) => vp.offsetY - y * vp.scale;

  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#0d1117";
  ctx.fillRect(0, 0, width, height);
  if (scene.notice) {
    ctx.fillStyle = "#8b949e";
    ctx.font = "14px sans-serif";
    ctx.fillText(scene.notice, 16, 24);
    return;
  }

  for (const room of scene.rooms) {
    ctx.beginPath();
    room.polygon.forEach(([x, y], i) => (i ? ctx.lineTo(X(x), Y(y)) : ctx.moveTo(X(x), Y(y))));
    ctx.closePath();
    ctx.fillStyle = "rgba(110, 118, 129, 0.08)";
    ctx.fill();
    ctx.strokeStyle = "rgba(110, 118, 129, 0.35)";
    ctx.setLineDash([4, 4]);
    ctx.stroke();
    ctx.setLineDash([]);
    const [lx, ly] = room.polygon[0];
    ctx.fillStyle = "#8b949e";
    ctx.font = "11px sans-serif";
    ctx.fillText(room.name, X(lx) + 6, Y(ly) - 6);
  }

  for (const edge of scene.edges) {
    ctx.beginPath();
    ctx.moveTo(X(edge.a[0]), Y(edge.a[1]));
    ctx.lineTo(X(edge.b[0]), Y(edge.b[1]));
    ctx.strokeStyle = edge.kind === "stairs" ? "#a371f7" : "#30363d";
    ctx.lineWidth = 2;
    ctx.setLineDash(edge.kind === "stairs" ? [6, 3] : []);
    ctx.stroke();
    ctx.setLineDash([]);
    if (edge.blocked) {
      // obstacle: strike the edge through at its midpoint
      const mx = (edge.a[0] + edge.b[0]) / 2;
      const my = (edge.a[1] + edge.b[1]) / 2;
      ctx.strokeStyle = "#f85149";
      ctx.lineWidth = 3;
      ctx.beginPath();
      ctx.moveTo(X(mx) - 8, Y(my) - 8);
      ctx.lineTo(X(mx) + 8, Y(my) + 8);
      ctx.moveTo(X(mx) + 8, Y(my) - 8);
      ctx.lineTo(X(mx) - 8, Y(my) + 8);
      ctx.stroke();
    }
  }

  ctx.lineWidth = 3;
  ctx.strokeStyle = "#c9d1d9";
  for (const wall of scene.walls) {
    ctx.beginPath();
    ctx.moveTo(X(wall.x1), Y(wall.y1));
    ctx.lineTo(X(wall.x2), Y(wall.y2));
    ctx.stroke();
  }

  for (const node of scene.nodes) {
    ctx.beginPath();
    ctx.arc(X(node.x), Y(node.y), 4, 0, Math.PI * 2);
    ctx.fillStyle = "#484f58";
    ctx.fill();
    ctx.fillStyle = "#8b949e";
    ctx.font = "10px sans-serif";
    ctx.fillText(node.id, X(node.x) + 6, Y(node.y) + 10);
  }

  for (const eq of scene.equipment) {
    ctx.beginPath();
    ctx.arc(X(eq.x), Y(eq.y), Math.max(eq.radius * vp.scale, 5), 0, Math.PI * 2);
    ctx.fillStyle = "rgba(210, 153, 34, 0.5)";
    ctx.fill();
    ctx.strokeStyle = "#d29922";
    ctx.stroke();
    ctx.fillStyle = "#d29922";
    ctx.font = "10px sans-serif";
    ctx.fillText(eq.tag, X(eq.x) + 8, Y(eq.y) - 8);
  }

  for (const marking of scene.markings) {
    const [x, y] = marking.point;
    ctx.fillStyle = "#3fb950";
    ctx.font = "12px sans-serif";
    ctx.fillText("⚑ " + marking.label, X(x), Y(y));
  }

  for (const run of scene.pathRuns) {
    if (run.points.length < 2) continue;
    ctx.beginPath();
    run.points.forEach(([x, y], i) => (i ? ctx.lineTo(X(x), Y(y)) : ctx.moveTo(X(x), Y(y))));
    ctx.strokeStyle = teamColor(run.teamId);
    ctx.lineWidth = 2;
    ctx.globalAlpha = 0.7;
    ctx.stroke();
    ctx.globalAlpha = 1;
  }

  for (const avatar of scene.avatars) {
    const px = X(avatar.x);
    const py = Y(avatar.y);
    if (avatar.pointing !== null) {
      ctx.beginPath();
      ctx.moveTo(px, py);
      ctx.lineTo(px + Math.cos(avatar.pointing) * vp.scale * 10,
                 py - Math.sin(avatar.pointing) * vp.scale * 10);
      ctx.strokeStyle = avatar.highlight ? "#d29922" : "rgba(201, 209, 217, 0.5)";
      ctx.lineWidth = 1.5;
      ctx.stroke();
    }
    ctx.beginPath();
    ctx.arc(px, py, avatar.isYou ? 8 : 6, 0, Math.PI * 2);
    ctx.fillStyle = teamColor(avatar.teamId);
    ctx.fill();
    if (avatar.role === "radio") {
      ctx.strokeStyle = "#0d1117";
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.arc(px, py, 3, 0, Math.PI * 2);
      ctx.stroke();
    }
    ctx.fillStyle = "#c9d1d9";
    ctx.font = "11px sans-serif";
    ctx.fillText(avatar.clientId, px + 9, py - 9);
  }
}
