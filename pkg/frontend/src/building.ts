/** Building document types as served by GET /building. */

export interface Wall {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface Room {
  id: string;
  name: string;
  polygon: [number, number][];
}

export interface NavNode {
  id: string;
  x: number;
  y: number;
  room: string;
}

export interface BuildingEdge {
  id: string;
  a: string;
  b: string;
  kind: "walk" | "stairs";
  length?: number;
}

export interface EquipmentItem {
  id: string;
  tag: string;
  x: number;
  y: number;
  radius: number;
}

export interface PhotoAnchor {
  id: string;
  node: string;
  asset: string;
}

export interface Floor {
  id: string;
  elevation: number;
  walls: Wall[];
  rooms: Room[];
  nodes: NavNode[];
  edges: BuildingEdge[];
  equipment: EquipmentItem[];
  photo_anchors: PhotoAnchor[];
}

export interface Building {
  version: number;
  id: string;
  floors: Floor[];
}

export function floorById(building: Building, floorId: string): Floor | undefined {
  return building.floors.find((f) => f.id === floorId);
}

export function nodeById(building: Building, nodeId: string): NavNode | undefined {
  for (const floor of building.floors) {
    const node = floor.nodes.find((n) => n.id === nodeId);
    if (node) return node;
  }
  return undefined;
}

/** Floor the node sits on; stairs edges may span two floors. */
export function floorOfNode(building: Building, nodeId: string): string | undefined {
  for (const floor of building.floors) {
    if (floor.nodes.some((n) => n.id === nodeId)) return floor.id;
  }
  return undefined;
}
