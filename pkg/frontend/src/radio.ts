/**
 * Radio-side helpers: guidance entry, pointing, desktop teleport moves,
 * and the photo-anchor panel (asset references shown as labeled
 * placeholders; photo content is never fetched).
 */

import { Building, floorById, nodeById } from "./building.js";
import { SendFn } from "./trainer.js";

export interface PhotoPanelEntry {
  anchorId: string;
  nodeId: string;
  asset: string;
  label: string;
}

export class RadioController {
  constructor(private readonly send: SendFn) {}

  sendGuidance(payload: unknown): number {
    return this.send("guidance", { payload });
  }

  moveTo(nodeId: string): number {
    return this.send("move_radio", { node_id: nodeId });
  }

  setPointing(angle: number | null): number {
    return this.send("point", { angle });
  }

  /** Aim at a world position from the radio's current avatar position. */
  pointAt(fromX: number, fromY: number, atX: number, atY: number): number {
    return this.setPointing(Math.atan2(atY - fromY, atX - fromX));
  }
}

export function photoPanel(building: Building, floorId: string): PhotoPanelEntry[] {
  const floor = floorById(building, floorId);
  if (!floor) return [];
  return floor.photo_anchors.map((anchor) => {
    const node = nodeById(building, anchor.node);
    return {
      anchorId: anchor.id,
      nodeId: anchor.node,
      asset: anchor.asset,
      label: node ? `${anchor.asset} @ ${anchor.node} (${node.room})` : anchor.asset,
    };
  });
}
