/**
 * Browser entry point: hash-based session bootstrap, event wiring, and a
 * render loop that only ever draws acknowledged server state.
 */

import { Connection, httpRequest, socketUrl } from "./client.js";
import type { SocketLike } from "./client.js";
import { ServerError, formatHash, parseHash } from "./protocol.js";
import type { Seat, SeatView, WhatIfReply } from "./protocol.js";
import { initialUi, renderApp, renderLanding } from "./render.js";
import type { UiState } from "./render.js";

const app = document.getElementById("app") as HTMLElement;
const base = location.origin;

let view: SeatView | null = null;
let ui: UiState = { ...initialUi };
let connection: Connection | null = null;
let whatIfTimer: ReturnType<typeof setTimeout> | null = null;

function render(): void {
  app.innerHTML = view === null ? renderLanding(ui.notice) : renderApp(view, ui);
}

function setUi(patch: Partial<UiState>): void {
  ui = { ...ui, ...patch };
  render();
}

function describe(error: unknown): string {
  if (error instanceof ServerError) {
    return `${error.code}: ${error.message}`;
  }
  return error instanceof Error ? error.message : String(error);
}

async function sessionRequest<T>(kind: string, payload: Record<string, unknown> = {}): Promise<T | null> {
  if (connection === null || view === null) {
    return null;
  }
  try {
    return await connection.request<T>(kind, {
      session_id: view.session_id,
      ...payload,
    });
  } catch (error) {
    setUi({ notice: describe(error), busy: false });
    return null;
  }
}

function boot(session: string, token: string, seat: Seat): void {
  location.hash = formatHash({ session, token, seat });
  connection = new Connection(
    socketUrl(base, session, token),
    {
      onPush: (pushed) => {
        view = pushed;
        setUi({ busy: false, notice: null });
      },
      onStatus: (connected) => setUi({ connected }),
    },
    (url) => new WebSocket(url) as unknown as SocketLike,
  );
  connection.open();
}

// ---------------------------------------------------------------------------
// Interactions
// ---------------------------------------------------------------------------

async function handleCreate(form: HTMLFormElement): Promise<void> {
  const data = new FormData(form);
  const payload: Record<string, unknown> = {};
  const seed = String(data.get("seed") ?? "").trim();
  if (seed !== "") {
    payload.seed = Number(seed);
  }
  if (data.get("bot") !== null) {
    payload.bot = true;
  }
  try {
    const created = await httpRequest<{ session_id: string; token: string }>(base, "create", payload);
    boot(created.session_id, created.token, "alice");
  } catch (error) {
    setUi({ notice: describe(error) });
  }
}

async function joinSession(sessionId: string): Promise<void> {
  try {
    const joined = await httpRequest<{ session_id: string; token: string }>(base, "join", {
      session_id: sessionId,
    });
    boot(joined.session_id, joined.token, "bob");
  } catch (error) {
    setUi({ notice: describe(error) });
  }
}

async function handleConfigure(form: HTMLFormElement): Promise<void> {
  const data = new FormData(form);
  setUi({ busy: true });
  await sessionRequest("configure", {
    alpha: Number(data.get("alpha")),
    beta: Number(data.get("beta")),
    gamma: Number(data.get("gamma")),
    a_sq: Number(data.get("a_sq")),
    auto_draw: data.get("auto_draw") !== null,
  });
}

async function commit(move: Record<string, unknown>): Promise<void> {
  if (view === null || connection === null) {
    return;
  }
  setUi({ busy: true });
  const token = parseHash(location.hash)?.token;
  await sessionRequest("commit_move", { token, move });
}

async function draw(): Promise<void> {
  setUi({ busy: true });
  const token = parseHash(location.hash)?.token;
  await sessionRequest("draw_card", { token });
}

function scheduleWhatIf(): void {
  if (whatIfTimer !== null) {
    clearTimeout(whatIfTimer);
  }
  whatIfTimer = setTimeout(async () => {
    whatIfTimer = null;
    const token = parseHash(location.hash)?.token;
    const reply = await sessionRequest<WhatIfReply>("what_if", {
      token,
      own: ui.whatIfOwn / 100,
      assumed: ui.whatIfAssumed / 100,
    });
    if (reply !== null) {
      setUi({ whatIf: reply });
    }
  }, 200);
}

// ---------------------------------------------------------------------------
// Event delegation
// ---------------------------------------------------------------------------

app.addEventListener("click", (event) => {
  const target = (event.target as HTMLElement).closest("[data-action]");
  if (!(target instanceof HTMLElement)) {
    return;
  }
  const action = target.dataset.action;
  if (action === "commit-identity") {
    void commit({ kind: "identity" });
  } else if (action === "commit-flip") {
    void commit({ kind: "flip" });
  } else if (action === "commit-mixed") {
    void commit({ kind: "mixed", prob_identity: ui.mixedPercent / 100 });
  } else if (action === "draw") {
    void draw();
  } else if (action === "reconnect") {
    connection?.open();
  }
});

app.addEventListener("submit", (event) => {
  const form = event.target;
  if (!(form instanceof HTMLFormElement)) {
    return;
  }
  event.preventDefault();
  const name = form.dataset.form;
  if (name === "create") {
    void handleCreate(form);
  } else if (name === "join") {
    const session = String(new FormData(form).get("session") ?? "").trim();
    if (session !== "") {
      void joinSession(session);
    }
  } else if (name === "configure") {
    void handleConfigure(form);
  }
});

app.addEventListener("input", (event) => {
  const slider = event.target;
  if (!(slider instanceof HTMLInputElement) || slider.dataset.slider === undefined) {
    return;
  }
  const value = Number(slider.value);
  if (slider.dataset.slider === "mixed") {
    setUi({ mixedPercent: value });
  } else if (slider.dataset.slider === "whatif-own") {
    setUi({ whatIfOwn: value });
    scheduleWhatIf();
  } else if (slider.dataset.slider === "whatif-assumed") {
    setUi({ whatIfAssumed: value });
    scheduleWhatIf();
  }
});

// ---------------------------------------------------------------------------
// Bootstrap from the URL fragment
// ---------------------------------------------------------------------------

const creds = parseHash(location.hash);
if (creds !== null && creds.token !== undefined && creds.seat !== undefined) {
  boot(creds.session, creds.token, creds.seat);
} else if (creds !== null) {
  // Invite link: a session id without a token joins as the second player.
  void joinSession(creds.session);
} else {
  render();
}
