/**
 * Pure view renderers: (server state, local ui state) -> HTML string.
 *
 * Every game value shown (payoffs, intervals, scores, the board weight)
 * is a string taken verbatim from a server message.  The only numbers
 * the client produces are geometry percentages inside style attributes
 * and the positions of its own sliders.  Keeping these functions pure
 * makes the no-leak property testable: equal inputs, equal markup.
 */

import type { Measurement, RoundRecord, SeatView, WhatIfReply } from "./protocol.js";

export interface UiState {
  connected: boolean;
  notice: string | null;
  mixedPercent: number;
  whatIfOwn: number;
  whatIfAssumed: number;
  whatIf: WhatIfReply | null;
  busy: boolean;
}

export const initialUi: UiState = {
  connected: false,
  notice: null,
  mixedPercent: 50,
  whatIfOwn: 50,
  whatIfAssumed: 50,
  whatIf: null,
  busy: false,
};

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function pct(fraction: number): string {
  return `${(fraction * 100).toFixed(4)}%`;
}

function moveText(move: { kind: string; prob_identity?: number } | null): string {
  if (move === null) {
    return "-";
  }
  if (move.kind === "mixed") {
    return `mixed(${move.prob_identity})`;
  }
  return move.kind;
}

// ---------------------------------------------------------------------------
// Landing page (no session yet)
// ---------------------------------------------------------------------------

export function renderLanding(notice: string | null): string {
  const banner = notice === null ? "" : `<div class="banner error">${escapeHtml(notice)}</div>`;
  return `
${banner}
<section class="panel landing">
  <h1>Ten-card match board</h1>
  <p>Create a match and share the invite link, or paste a session id to join
  as the second player.</p>
  <div class="landing-forms">
    <form class="card-panel" data-form="create">
      <h2>Create</h2>
      <label>seed (optional) <input name="seed" inputmode="numeric" placeholder="random"></label>
      <label class="row"><input type="checkbox" name="bot"> practice against the built-in opponent</label>
      <button type="submit" data-action="create">Create match</button>
    </form>
    <form class="card-panel" data-form="join">
      <h2>Join</h2>
      <label>session id <input name="session" required placeholder="from the invite link"></label>
      <button type="submit" data-action="join">Join as Bob</button>
    </form>
  </div>
</section>`;
}

// ---------------------------------------------------------------------------
// Board
// ---------------------------------------------------------------------------

function renderLabelRow(title: string, labels: [string, string] | null): string {
  const low = labels === null ? "?" : escapeHtml(labels[0]);
  const high = labels === null ? "?" : escapeHtml(labels[1]);
  const hidden = labels === null ? " hidden-labels" : "";
  return `<div class="label-row${hidden}"><span class="who">${escapeHtml(title)}</span>
    <span class="letter low">${low}</span><span class="letter high">${high}</span></div>`;
}

function renderTrack(view: SeatView): string {
  if (view.config === null) {
    return `<div class="track unconfigured">board not configured yet</div>`;
  }
  const aSq = view.config.a_sq;
  const measurement = view.measurement;
  let highlight = "";
  if (measurement !== null && measurement.digits.length > 0) {
    const lo = Number(measurement.interval.lo);
    const hi = Number(measurement.interval.hi);
    highlight = `<div class="interval" style="left:${pct(lo)};width:${pct(hi - lo)}"></div>`;
  }
  return `
<div class="track">
  <div class="segment side-a" style="width:${pct(aSq)}"></div>
  <div class="segment side-b" style="left:${pct(aSq)};width:${pct(1 - aSq)}"></div>
  ${highlight}
  <div class="marker" style="left:${pct(aSq)}">
    <span class="marker-value">${String(aSq)}</span>
  </div>
</div>`;
}

export function renderBoard(view: SeatView): string {
  const opponentNote =
    view.opponent_labels === null
      ? `<p class="note">Opponent labels are hidden until the reveal.</p>`
      : "";
  return `
<section class="panel board">
  <h2>Board</h2>
  ${renderTrack(view)}
  <div class="board-labels">
    ${renderLabelRow(`you (${view.seat})`, view.your_labels)}
    ${renderLabelRow("opponent", view.opponent_labels)}
  </div>
  ${opponentNote}
</section>`;
}

// ---------------------------------------------------------------------------
// Measurement (card draws)
// ---------------------------------------------------------------------------

export function renderMeasurement(view: SeatView): string {
  const m: Measurement | null = view.measurement;
  if (m === null) {
    return "";
  }
  const cards = m.digits
    .map((d) => `<span class="card-face">${String(d)}</span>`)
    .join("");
  const span = `number in [${escapeHtml(m.interval.lo)}, ${escapeHtml(m.interval.hi)})`;
  let verdict = `<span class="pending">threshold straddled, draw again</span>`;
  if (m.decided !== null) {
    verdict = `<span class="decided">branch ${escapeHtml(m.decided)}</span>`;
  }
  const tie = m.tie_break
    ? `<p class="note tie">Digit budget exhausted at the threshold; the high branch was awarded by the tie rule.</p>`
    : "";
  return `
<section class="panel measurement">
  <h2>Cards</h2>
  <div class="card-row">${cards || `<span class="no-cards">no cards drawn yet</span>`}</div>
  <p>${span} &mdash; ${verdict}</p>
  ${tie}
</section>`;
}

// ---------------------------------------------------------------------------
// Phase controls
// ---------------------------------------------------------------------------

function configureForm(view: SeatView, legend: string): string {
  const cfg = view.config;
  const alpha = cfg === null ? "5" : cfg.alpha;
  const beta = cfg === null ? "3" : cfg.beta;
  const gamma = cfg === null ? "1" : cfg.gamma;
  const aSq = cfg === null ? "0.5" : String(cfg.a_sq);
  const auto = cfg !== null && cfg.auto_draw ? " checked" : "";
  return `
<form class="card-panel" data-form="configure">
  <h3>${escapeHtml(legend)}</h3>
  <div class="config-grid">
    <label>alpha <input name="alpha" value="${escapeHtml(alpha)}"></label>
    <label>beta <input name="beta" value="${escapeHtml(beta)}"></label>
    <label>gamma <input name="gamma" value="${escapeHtml(gamma)}"></label>
    <label>a&sup2; <input name="a_sq" value="${escapeHtml(aSq)}"></label>
  </div>
  <label class="row"><input type="checkbox" name="auto_draw"${auto}> resolve all cards in one click</label>
  <button type="submit" data-action="configure">Deal the round</button>
</form>`;
}

function renderLobbyControls(view: SeatView): string {
  if (!view.seats.bob) {
    const invite = `#session=${encodeURIComponent(view.session_id)}`;
    return `
<p>Waiting for the second player. Share this invite fragment:</p>
<p><code class="invite">${escapeHtml(invite)}</code></p>`;
  }
  return configureForm(view, "Configure the board");
}

function renderCommitControls(view: SeatView, ui: UiState): string {
  if (view.you_committed) {
    const note =
      view.your_move !== null && view.your_move.kind === "mixed"
        ? `<p class="note">Mixed move locked in; the actual flip is sampled at measurement time.</p>`
        : "";
    return `
<p>Your move <b>${escapeHtml(moveText(view.your_move))}</b> is committed.</p>
${note}
<p>Opponent committed: <b>${view.opponent_committed ? "yes" : "no"}</b></p>`;
  }
  const disabled = ui.busy ? " disabled" : "";
  return `
<p>Choose secretly; nothing is revealed until both moves are in.</p>
<div class="move-buttons">
  <button data-action="commit-identity"${disabled}>Keep labels (identity)</button>
  <button data-action="commit-flip"${disabled}>Exchange labels (flip)</button>
</div>
<div class="mixed-row">
  <label>identity probability
    <input type="range" min="0" max="100" step="1" value="${ui.mixedPercent}" data-slider="mixed">
  </label>
  <span class="slider-value">${ui.mixedPercent}%</span>
  <button data-action="commit-mixed"${disabled}>Commit mixed move</button>
</div>
<p>Opponent committed: <b>${view.opponent_committed ? "yes" : "no"}</b></p>`;
}

function renderMeasuringControls(view: SeatView, ui: UiState): string {
  const disabled = ui.busy ? " disabled" : "";
  const hint =
    view.config !== null && view.config.auto_draw
      ? "One click resolves every remaining card."
      : "Each click flips one card.";
  return `
<p>${hint}</p>
<button data-action="draw"${disabled}>Draw a card</button>`;
}

function renderRevealedControls(view: SeatView): string {
  const round = view.last_round;
  let summary = "";
  if (round !== null) {
    summary = `
<p>Outcome <b>${escapeHtml(round.outcome)}</b> &mdash; payoffs:
  alice <b>${escapeHtml(round.payoffs.alice)}</b>,
  bob <b>${escapeHtml(round.payoffs.bob)}</b></p>
<p>Moves &mdash; alice ${escapeHtml(moveText(round.moves.alice))},
  bob ${escapeHtml(moveText(round.moves.bob))}</p>`;
  }
  return `${summary}${configureForm(view, "Next round")}`;
}

export function renderControls(view: SeatView, ui: UiState): string {
  let body: string;
  switch (view.phase) {
    case "lobby":
      body = renderLobbyControls(view);
      break;
    case "committing":
      body = renderCommitControls(view, ui);
      break;
    case "measuring":
      body = renderMeasuringControls(view, ui);
      break;
    case "revealed":
      body = renderRevealedControls(view);
      break;
  }
  return `
<section class="panel controls">
  <h2>Phase: ${escapeHtml(view.phase)}</h2>
  ${body}
</section>`;
}

// ---------------------------------------------------------------------------
// What-if explorer
// ---------------------------------------------------------------------------

function bestResponseText(reply: WhatIfReply): string {
  const { lo, hi } = reply.best_response;
  if (lo !== hi) {
    return "indifferent: every mixture is a best response";
  }
  return hi === 1 ? "best response: keep labels (identity)" : "best response: exchange labels (flip)";
}

export function renderWhatIf(view: SeatView, ui: UiState): string {
  if (view.config === null) {
    return "";
  }
  let answer = `<p class="note">Move the sliders to ask the server.</p>`;
  if (ui.whatIf !== null) {
    answer = `
<p>Expected payoffs &mdash; alice <b>${escapeHtml(ui.whatIf.payoffs.alice)}</b>,
  bob <b>${escapeHtml(ui.whatIf.payoffs.bob)}</b></p>
<p>${escapeHtml(bestResponseText(ui.whatIf))}</p>`;
  }
  return `
<section class="panel whatif">
  <h2>What if&hellip;</h2>
  <div class="whatif-sliders">
    <label>your identity probability
      <input type="range" min="0" max="100" step="1" value="${ui.whatIfOwn}" data-slider="whatif-own">
      <span class="slider-value">${ui.whatIfOwn}%</span>
    </label>
    <label>assumed opponent identity probability
      <input type="range" min="0" max="100" step="1" value="${ui.whatIfAssumed}" data-slider="whatif-assumed">
      <span class="slider-value">${ui.whatIfAssumed}%</span>
    </label>
  </div>
  ${answer}
</section>`;
}

// ---------------------------------------------------------------------------
// History and frame
// ---------------------------------------------------------------------------

function renderHistoryRow(round: RoundRecord): string {
  const digits = round.digits.map((d) => String(d)).join(" ");
  return `<tr>
  <td>${String(round.round_index)}</td>
  <td>${escapeHtml(moveText(round.moves.alice))}</td>
  <td>${escapeHtml(moveText(round.moves.bob))}</td>
  <td>${escapeHtml(digits)}</td>
  <td>${escapeHtml(round.outcome)}</td>
  <td>${escapeHtml(round.payoffs.alice)}</td>
  <td>${escapeHtml(round.payoffs.bob)}</td>
</tr>`;
}

export function renderHistory(view: SeatView): string {
  if (view.history.length === 0) {
    return "";
  }
  return `
<section class="panel history">
  <h2>Rounds</h2>
  <div class="table-wrap">
  <table>
    <thead><tr><th>#</th><th>alice</th><th>bob</th><th>cards</th><th>outcome</th>
      <th>pay alice</th><th>pay bob</th></tr></thead>
    <tbody>${view.history.map(renderHistoryRow).join("")}</tbody>
  </table>
  </div>
</section>`;
}

export function renderApp(view: SeatView, ui: UiState): string {
  const banner = !ui.connected
    ? `<div class="banner error">Connection lost &mdash; retrying&hellip;
        <button data-action="reconnect">Retry now</button></div>`
    : ui.notice !== null
      ? `<div class="banner">${escapeHtml(ui.notice)}</div>`
      : "";
  const bot = view.bot ? " &middot; practice opponent" : "";
  return `
${banner}
<header class="session-header">
  <span>session <code>${escapeHtml(view.session_id)}</code></span>
  <span>seed ${escapeHtml(view.seed)}</span>
  <span>seat ${escapeHtml(view.seat)}${bot}</span>
  <span>rounds played ${String(view.round_index)}</span>
  <span class="score">score &mdash; alice <b>${escapeHtml(view.cumulative.alice)}</b>,
    bob <b>${escapeHtml(view.cumulative.bob)}</b></span>
</header>
${renderBoard(view)}
${renderMeasurement(view)}
${renderControls(view, ui)}
${renderWhatIf(view, ui)}
${renderHistory(view)}`;
}
