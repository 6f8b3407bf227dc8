/**
 * Transport: request/reply over HTTP or the persistent socket, pushes in.
 *
 * The server answers socket requests in order, so a FIFO of pending
 * promises pairs replies with requests; state_push envelopes bypass the
 * queue and land in the push handler.  The socket constructor is
 * injectable so the same client runs in a browser and under node tests.
 */

import { isAnswer, request, unwrap } from "./protocol.js";
import type { AnswerEnvelope, SeatView } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((event?: unknown) => void) | null;
  onmessage: ((event: { data: unknown }) => void) | null;
  onclose: ((event?: unknown) => void) | null;
  onerror: ((event?: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export async function httpRequest<T>(
  baseUrl: string,
  kind: string,
  payload: Record<string, unknown> = {},
  fetchFn: typeof fetch = globalThis.fetch,
): Promise<T> {
  const response = await fetchFn(`${baseUrl}/api`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(request(kind, payload)),
  });
  const body: unknown = await response.json();
  if (!isAnswer(body)) {
    throw new Error("malformed server answer");
  }
  return unwrap<T>(body);
}

export function socketUrl(baseUrl: string, sessionId: string, token: string): string {
  const ws = baseUrl.replace(/^http/, "ws");
  const query = new URLSearchParams({ session_id: sessionId, token });
  return `${ws}/ws?${query.toString()}`;
}

interface PendingRequest {
  kind: string;
  resolve: (payload: never) => void;
  reject: (error: unknown) => void;
}

export interface ConnectionHandlers {
  onPush: (view: SeatView) => void;
  onStatus: (connected: boolean) => void;
}

export class Connection {
  private socket: SocketLike | null = null;
  private pending: PendingRequest[] = [];
  private closedByUser = false;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly url: string,
    private readonly handlers: ConnectionHandlers,
    private readonly factory: SocketFactory,
    private readonly retryMs: number = 1500,
  ) {}

  open(): void {
    this.closedByUser = false;
    if (this.retryTimer !== null) {
      clearTimeout(this.retryTimer);
      this.retryTimer = null;
    }
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => this.handlers.onStatus(true);
    socket.onmessage = (event) => this.receive(String(event.data));
    socket.onerror = () => {
      // The close event follows and carries the retry.
    };
    socket.onclose = () => {
      this.socket = null;
      this.failPending(new Error("connection closed"));
      this.handlers.onStatus(false);
      if (!this.closedByUser && this.retryMs > 0) {
        this.retryTimer = setTimeout(() => this.open(), this.retryMs);
      }
    };
  }

  close(): void {
    this.closedByUser = true;
    if (this.retryTimer !== null) {
      clearTimeout(this.retryTimer);
      this.retryTimer = null;
    }
    if (this.socket !== null) {
      this.socket.close();
    }
  }

  get connected(): boolean {
    return this.socket !== null;
  }

  request<T>(kind: string, payload: Record<string, unknown> = {}): Promise<T> {
    const socket = this.socket;
    if (socket === null) {
      return Promise.reject(new Error("not connected"));
    }
    return new Promise<T>((resolve, reject) => {
      this.pending.push({ kind, resolve: resolve as (payload: never) => void, reject });
      socket.send(JSON.stringify(request(kind, payload)));
    });
  }

  private receive(text: string): void {
    let answer: unknown;
    try {
      answer = JSON.parse(text);
    } catch {
      return;
    }
    if (!isAnswer(answer)) {
      return;
    }
    const envelope: AnswerEnvelope = answer;
    if (envelope.kind === "state_push") {
      this.handlers.onPush(envelope.payload as unknown as SeatView);
      return;
    }
    const entry = this.pending.shift();
    if (entry === undefined) {
      return;
    }
    try {
      entry.resolve(unwrap(envelope) as never);
    } catch (error) {
      entry.reject(error);
    }
  }

  private failPending(error: Error): void {
    const waiting = this.pending;
    this.pending = [];
    for (const entry of waiting) {
      entry.reject(error);
    }
  }
}
