// Gateway client: REST for the map and utterance injection, WebSocket for
// the live stream, with automatic reconnect. Network primitives are
// injectable so tests can drive the client without a server.

import type { ConnectionStatus, MapDescription, StreamMessage, UtteranceReply } from "./types.js";

export interface StreamHandlers {
  onMessage: (msg: StreamMessage) => void;
  onStatus: (status: ConnectionStatus) => void;
}

export interface WebSocketLike {
  onopen: ((ev: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: ((ev: unknown) => void) | null;
  onerror: ((ev: unknown) => void) | null;
  close(): void;
}

export interface GatewayOptions {
  fetchFn?: typeof fetch;
  wsFactory?: (url: string) => WebSocketLike;
  reconnectMs?: number;
}

export class GatewayClient {
  readonly baseUrl: string;
  private fetchFn: typeof fetch;
  private wsFactory: (url: string) => WebSocketLike;
  private reconnectMs: number;

  constructor(baseUrl: string, opts: GatewayOptions = {}) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = opts.fetchFn ?? fetch.bind(globalThis);
    this.wsFactory = opts.wsFactory ?? ((url) => new WebSocket(url) as unknown as WebSocketLike);
    this.reconnectMs = opts.reconnectMs ?? 1000;
  }

  wsUrl(): string {
    return this.baseUrl.replace(/^http/, "ws") + "/ws";
  }

  async fetchMap(): Promise<MapDescription> {
    const resp = await this.fetchFn(`${this.baseUrl}/map`);
    if (!resp.ok) throw new Error(`map request failed: ${resp.status}`);
    return (await resp.json()) as MapDescription;
  }

  async sendUtterance(text: string): Promise<UtteranceReply> {
    const resp = await this.fetchFn(`${this.baseUrl}/utterances`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ text }),
    });
    if (!resp.ok) throw new Error(`injection failed: ${resp.status}`);
    return (await resp.json()) as UtteranceReply;
  }

  /** Open the stream and keep it open; returns a stop function. */
  connectStream(handlers: StreamHandlers): () => void {
    let stopped = false;
    let socket: WebSocketLike | null = null;
    let timer: ReturnType<typeof setTimeout> | null = null;

    const open = () => {
      if (stopped) return;
      handlers.onStatus("connecting");
      socket = this.wsFactory(this.wsUrl());
      socket.onopen = () => handlers.onStatus("open");
      socket.onmessage = (ev) => {
        let parsed: { kind?: string } | null = null;
        try {
          parsed = JSON.parse(ev.data) as { kind?: string };
        } catch {
          return;
        }
        // the socket also carries outcome/error replies; only stream kinds
        // belong in the view
        if (parsed?.kind === "state" || parsed?.kind === "speech_out") {
          handlers.onMessage(parsed as StreamMessage);
        }
      };
      socket.onclose = () => {
        if (stopped) return;
        handlers.onStatus("lost");
        timer = setTimeout(open, this.reconnectMs);
      };
      socket.onerror = () => {
        /* onclose follows and drives the reconnect */
      };
    };

    open();
    return () => {
      stopped = true;
      if (timer !== null) clearTimeout(timer);
      socket?.close();
    };
  }
}
