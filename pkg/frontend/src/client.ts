/**
 * Thin protocol client: owns one WebSocket, validates every frame in both
 * directions, and feeds well-typed server messages to a single listener.
 * Disconnection drops outbound messages instead of queueing them, so a
 * stale drag can never replay against a fresh session.
 */
import {
  encodeClientMessage,
  parseServerFrame,
  type ClientMessage,
  type ServerMessage,
} from "./protocol.js";

export interface SocketLike {
  readonly readyState: number;
  send(data: string): void;
  close(): void;
  addEventListener(type: string, listener: (event: any) => void): void;
}

const OPEN = 1;

export interface TeleopClientEvents {
  onMessage: (msg: ServerMessage) => void;
  onOpen?: () => void;
  onClose?: () => void;
  /** Inbound frame that failed schema validation (dropped). */
  onBadFrame?: (raw: string) => void;
}

export class TeleopClient {
  private socket: SocketLike;

  constructor(socket: SocketLike, events: TeleopClientEvents) {
    this.socket = socket;
    socket.addEventListener("open", () => events.onOpen?.());
    socket.addEventListener("close", () => events.onClose?.());
    socket.addEventListener("message", (event: { data: unknown }) => {
      const raw = typeof event.data === "string" ? event.data : String(event.data);
      const msg = parseServerFrame(raw);
      if (msg === null) {
        events.onBadFrame?.(raw);
        return;
      }
      events.onMessage(msg);
    });
  }

  get connected(): boolean {
    return this.socket.readyState === OPEN;
  }

  /** Validate and send; returns false (dropping the message) when closed. */
  send(msg: ClientMessage): boolean {
    if (!this.connected) return false;
    this.socket.send(encodeClientMessage(msg));
    return true;
  }

  close(): void {
    this.socket.close();
  }
}
