/**
 * Wire types and envelope helpers for protocol version 1.
 *
 * Every request is {protocol_version, kind, payload}; every answer is a
 * reply, an error, or a state_push envelope.  Money-valued fields travel
 * as decimal strings and must be rendered verbatim: the client does no
 * game arithmetic.
 */

export const PROTOCOL_VERSION = 1;

export type Seat = "alice" | "bob";
export type Phase = "lobby" | "committing" | "measuring" | "revealed";
export type MoveKind = "identity" | "flip" | "mixed";

export interface Move {
  kind: MoveKind;
  prob_identity?: number;
}

export interface BoardConfig {
  alpha: string;
  beta: string;
  gamma: string;
  a_sq: number;
  is_bos: boolean;
  auto_draw: boolean;
}

export interface Interval {
  lo: string;
  hi: string;
}

export interface Measurement {
  digits: number[];
  interval: Interval;
  decided: "A" | "B" | null;
  tie_break: boolean;
}

export interface PayoffPair {
  alice: string;
  bob: string;
}

export interface RoundRecord {
  round_index: number;
  config: BoardConfig;
  moves: Record<Seat, Move>;
  sampled_flips: Record<Seat, boolean>;
  outcome: string;
  digits: number[];
  tie_break: boolean;
  payoffs: PayoffPair;
}

/** Seat-scoped session snapshot; the opponent's live move never appears. */
export interface SeatView {
  session_id: string;
  seat: Seat;
  phase: Phase;
  seed: string;
  round_index: number;
  seats: Record<Seat, boolean>;
  bot: boolean;
  config: BoardConfig | null;
  you_committed: boolean;
  opponent_committed: boolean;
  your_move: Move | null;
  your_labels: [string, string];
  opponent_labels: [string, string] | null;
  measurement: Measurement | null;
  last_round: RoundRecord | null;
  history: RoundRecord[];
  cumulative: PayoffPair;
}

export interface DrawStep {
  digit: number;
  digits: number[];
  interval: Interval;
  decided: "A" | "B" | null;
  tie_break: boolean;
  outcome?: string;
  round?: RoundRecord;
}

export interface WhatIfReply {
  payoffs: PayoffPair;
  best_response: { lo: number; hi: number };
}

export interface RequestEnvelope {
  protocol_version: number;
  kind: string;
  payload: Record<string, unknown>;
}

export interface AnswerEnvelope {
  kind: "reply" | "error" | "state_push";
  to?: string;
  payload: Record<string, unknown>;
}

export class ServerError extends Error {
  readonly code: string;

  constructor(code: string, message: string) {
    super(message);
    this.code = code;
  }
}

export function request(kind: string, payload: Record<string, unknown> = {}): RequestEnvelope {
  return { protocol_version: PROTOCOL_VERSION, kind, payload };
}

export function isAnswer(value: unknown): value is AnswerEnvelope {
  if (typeof value !== "object" || value === null) {
    return false;
  }
  const kind = (value as { kind?: unknown }).kind;
  return kind === "reply" || kind === "error" || kind === "state_push";
}

/** Unwraps a reply payload, throwing ServerError for error envelopes. */
export function unwrap<T>(answer: AnswerEnvelope): T {
  if (answer.kind === "error") {
    const { code, message } = answer.payload as { code: string; message: string };
    throw new ServerError(code, message);
  }
  return answer.payload as T;
}

/** Session coordinates carried in the URL fragment, never sent to a server. */
export interface HashCredentials {
  session: string;
  token?: string;
  seat?: Seat;
}

export function parseHash(hash: string): HashCredentials | null {
  const text = hash.startsWith("#") ? hash.slice(1) : hash;
  if (!text) {
    return null;
  }
  const params = new URLSearchParams(text);
  const session = params.get("session");
  if (!session) {
    return null;
  }
  const seat = params.get("seat");
  return {
    session,
    token: params.get("token") ?? undefined,
    seat: seat === "alice" || seat === "bob" ? seat : undefined,
  };
}

export function formatHash(creds: HashCredentials): string {
  const params = new URLSearchParams();
  params.set("session", creds.session);
  if (creds.token) {
    params.set("token", creds.token);
  }
  if (creds.seat) {
    params.set("seat", creds.seat);
  }
  return `#${params.toString()}`;
}
