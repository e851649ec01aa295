/**
 * WebSocket client: connects, performs the hello/welcome handshake, assigns
 * outbound sequence numbers, and routes inbound frames to one handler.
 */

import {
  decodeFrame,
  encodeFrame,
  Frame,
  PROTOCOL_VERSION,
  Role,
} from "./protocol.js";

export interface SocketCallbacks {
  onFrame: (frame: Frame) => void;
  onOpen?: () => void;
  onClose?: () => void;
}

export class HuntSocket {
  private socket: WebSocket | null = null;
  private seq = 0;

  constructor(private readonly callbacks: SocketCallbacks) {}

  connect(url: string): void {
    const socket = new WebSocket(url);
    socket.addEventListener("open", () => {
      this.socket = socket;
      this.callbacks.onOpen?.();
    });
    socket.addEventListener("message", (event) => {
      this.callbacks.onFrame(decodeFrame(String(event.data)));
    });
    socket.addEventListener("close", () => {
      this.socket = null;
      this.callbacks.onClose?.();
    });
  }

  get connected(): boolean {
    return this.socket !== null;
  }

  /** Send one catalog message; returns the seq for ack matching. */
  send(type: string, body: Record<string, unknown>): number {
    if (!this.socket) throw new Error("socket not connected");
    this.seq += 1;
    this.socket.send(encodeFrame({ seq: this.seq, type, body }));
    return this.seq;
  }

  hello(clientName: string, role: Role, teamId: number | null = null): number {
    return this.send("hello", {
      protocol_version: PROTOCOL_VERSION,
      client_name: clientName,
      role,
      team_id: teamId,
    });
  }

  close(): void {
    this.socket?.close();
  }
}
