"""Command-line interface: simulate, sweep, analyze, serve.

Every command prints a human-readable table to standard output; ``--out``
additionally writes ``.json`` or ``.csv``.  CSV rows follow the column
order in :data:`CSV_COLUMNS`; the single ``se`` column is Alice's standard
error (both players' values are in the JSON output).
"""

from __future__ import annotations

import argparse
import csv
import json
import secrets
import sys
from pathlib import Path

from .core import (
    BestResponse,
    EntangledState,
    GameDomainError,
    PayoffMatrix,
    StrategyProfile,
    best_response_alice,
    best_response_bob,
    expected_payoffs,
    nash_equilibria,
)
from .experiments import (
    BACKENDS,
    OUTCOME_ORDER,
    SWEEP_AXES,
    ExperimentConfig,
    ExperimentReport,
    equilibrium_oracle_grid,
    equilibrium_to_dict,
    run_experiment,
    sweep,
)

__all__ = ["CSV_COLUMNS", "main"]

CSV_COLUMNS = (
    "axis_value",
    "oo",
    "ot",
    "to",
    "tt",
    "empirical_alice",
    "empirical_bob",
    "analytic_alice",
    "analytic_bob",
    "abs_err_alice",
    "abs_err_bob",
    "se",
    "mean_draws",
    "tie_breaks",
)


def build_parser() -> argparse.ArgumentParser:
    game = argparse.ArgumentParser(add_help=False)
    game.add_argument("--alpha", type=float, default=5.0, help="payoff for (O,O) to Alice")
    game.add_argument("--beta", type=float, default=3.0, help="payoff for (T,T) to Alice")
    game.add_argument("--gamma", type=float, default=1.0, help="payoff for mismatches")
    game.add_argument(
        "--a-sq", dest="a_sq", type=float, default=0.5,
        help="weight of the double-O branch of the shared state",
    )

    run = argparse.ArgumentParser(add_help=False)
    run.add_argument("--p", type=float, default=0.5, help="Alice's identity probability")
    run.add_argument("--q", type=float, default=0.5, help="Bob's identity probability")
    run.add_argument("--trials", type=int, default=100_000, help="rounds to play")
    run.add_argument(
        "--seed", type=int, default=None,
        help="randomness seed (default: fresh; printed for reproduction)",
    )
    run.add_argument("--backend", choices=BACKENDS, default="machine")
    run.add_argument("--out", type=Path, default=None, help="write .json or .csv report")

    parser = argparse.ArgumentParser(
        prog="tencards",
        description="Two-player restricted quantum games on macroscopic hardware",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser(
        "simulate", parents=[game, run], help="run one Monte Carlo experiment"
    )

    sweep_cmd = sub.add_parser(
        "sweep", parents=[game, run], help="run experiments along one axis"
    )
    sweep_cmd.add_argument("--axis", choices=SWEEP_AXES, required=True)
    sweep_cmd.add_argument(
        "--values", required=True, help="comma-separated axis values, e.g. 0,0.5,1"
    )

    analyze = sub.add_parser(
        "analyze", parents=[game], help="closed-form payoffs, best responses, equilibria"
    )
    analyze.add_argument("--p", type=float, default=None, help="profile to evaluate")
    analyze.add_argument("--q", type=float, default=None, help="profile to evaluate")
    analyze.add_argument(
        "--grid-check", action="store_true", help="run the brute-force grid oracle"
    )
    analyze.add_argument("--grid-step", type=float, default=0.01)
    analyze.add_argument("--out", type=Path, default=None, help="write .json report")

    serve = sub.add_parser("serve", help="start the live match server")
    serve.add_argument("--port", type=int, default=8080, help="listen port (default 8080)")
    serve.add_argument("--host", default="127.0.0.1", help="bind address")
    serve.add_argument(
        "--session-log", type=Path, default=None,
        help="directory for append-only per-session JSONL logs",
    )
    serve.add_argument(
        "--static", type=Path, default=None,
        help="directory with the built web client (default: ./frontend/dist if present)",
    )
    return parser


# ---------------------------------------------------------------------------
# report rendering
# ---------------------------------------------------------------------------


def report_row(axis_value: float, report: ExperimentReport) -> list:
    counts = [report.counts[o] for o in OUTCOME_ORDER]
    return [
        axis_value,
        *counts,
        report.empirical_payoffs[0],
        report.empirical_payoffs[1],
        report.analytic_payoffs[0],
        report.analytic_payoffs[1],
        report.abs_errors[0],
        report.abs_errors[1],
        report.standard_errors[0],
        report.mean_draws,
        report.tie_breaks,
    ]


def print_table(axis_name: str, rows: list[tuple[float, ExperimentReport]]) -> None:
    first = rows[0][1].config
    print(
        f"config: alpha={first.payoffs.alpha:g} beta={first.payoffs.beta:g} "
        f"gamma={first.payoffs.gamma:g} backend={first.backend} "
        f"trials={first.trials} seed={first.seed}"
    )
    header = (
        f"{axis_name:>10} {'OO':>9} {'OT':>9} {'TO':>9} {'TT':>9} "
        f"{'empirical A':>12} {'empirical B':>12} {'analytic A':>11} {'analytic B':>11} "
        f"{'|err| A':>9} {'|err| B':>9} {'SE':>9} {'draws':>7} {'ties':>5}"
    )
    print(header)
    for axis_value, report in rows:
        cells = report_row(axis_value, report)
        print(
            f"{cells[0]:>10.4f} {cells[1]:>9d} {cells[2]:>9d} {cells[3]:>9d} {cells[4]:>9d} "
            f"{cells[5]:>12.5f} {cells[6]:>12.5f} {cells[7]:>11.5f} {cells[8]:>11.5f} "
            f"{cells[9]:>9.2e} {cells[10]:>9.2e} {cells[11]:>9.2e} "
            f"{cells[12]:>7.3f} {cells[13]:>5d}"
        )


def write_out(
    path: Path, axis_name: str, rows: list[tuple[float, ExperimentReport]]
) -> None:
    if path.suffix == ".json":
        payload = {
            "axis": axis_name,
            "reports": [
                {"axis_value": value, **report.to_json_dict()} for value, report in rows
            ],
        }
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    elif path.suffix == ".csv":
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for value, report in rows:
                writer.writerow(report_row(value, report))
    else:
        raise GameDomainError(f"--out must end in .json or .csv, got {path.name}")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _seed_of(args: argparse.Namespace) -> int:
    return secrets.randbits(32) if args.seed is None else args.seed


def cmd_simulate(args: argparse.Namespace) -> int:
    config = ExperimentConfig(
        payoffs=PayoffMatrix(args.alpha, args.beta, args.gamma),
        a_sq=args.a_sq,
        p=args.p,
        q=args.q,
        trials=args.trials,
        seed=_seed_of(args),
        backend=args.backend,
    )
    rows = [(args.a_sq, run_experiment(config))]
    print_table("a_sq", rows)
    if args.out:
        write_out(args.out, "a_sq", rows)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise GameDomainError(f"--values expects comma-separated numbers, got {args.values!r}")
    if not values:
        raise GameDomainError("--values needs at least one number")
    base = ExperimentConfig(
        payoffs=PayoffMatrix(args.alpha, args.beta, args.gamma),
        a_sq=args.a_sq,
        p=args.p,
        q=args.q,
        trials=args.trials,
        seed=_seed_of(args),
        backend=args.backend,
    )
    reports = sweep(base, args.axis, values)
    rows = list(zip(values, reports))
    print_table(args.axis, rows)
    if args.out:
        write_out(args.out, args.axis, rows)
    return 0


def _format_response(response: BestResponse) -> str:
    if response.is_interval:
        return f"any value in [{response.lo:g}, {response.hi:g}]"
    return f"{{{response.lo:g}}}"


def cmd_analyze(args: argparse.Namespace) -> int:
    payoffs = PayoffMatrix(args.alpha, args.beta, args.gamma)
    state = EntangledState(args.a_sq)
    print(
        f"payoffs: alpha={payoffs.alpha:g} beta={payoffs.beta:g} gamma={payoffs.gamma:g} "
        f"(battle of the sexes: {'yes' if payoffs.is_bos else 'no'})"
    )
    print(f"state: a_sq={state.a_sq:g}")

    equilibria = nash_equilibria(state, payoffs)
    print("equilibria:")
    for eq in equilibria:
        line = (
            f"  {eq.kind:<10} p={eq.profile.p:.3f} q={eq.profile.q:.3f}  "
            f"payoffs ({eq.payoffs[0]:.4f}, {eq.payoffs[1]:.4f})"
        )
        if eq.kind == "component":
            line += f"  spanning p in {eq.p_range} q in {eq.q_range}"
        print(line)

    profile_dict = None
    if args.p is not None and args.q is not None:
        profile = StrategyProfile(args.p, args.q)
        pay = expected_payoffs(profile, state, payoffs)
        response_a = best_response_alice(args.q, state, payoffs)
        response_b = best_response_bob(args.p, state, payoffs)
        print(f"at p={args.p:g} q={args.q:g}: payoffs ({pay[0]:.4f}, {pay[1]:.4f})")
        print(f"  alice best response to q={args.q:g}: {_format_response(response_a)}")
        print(f"  bob best response to p={args.p:g}: {_format_response(response_b)}")
        profile_dict = {
            "p": args.p,
            "q": args.q,
            "payoff_alice": pay[0],
            "payoff_bob": pay[1],
            "best_response_alice": {"lo": response_a.lo, "hi": response_a.hi},
            "best_response_bob": {"lo": response_b.lo, "hi": response_b.hi},
        }

    grid_dict = None
    if args.grid_check:
        grid = equilibrium_oracle_grid(state, payoffs, args.grid_step)
        print(
            f"grid check (step {args.grid_step:g}): {len(grid.mutual_cells)} mutual cells, "
            f"{len(grid.crossing_cells)} crossing cells; "
            f"matched: {'yes' if grid.matched else 'NO'}"
        )
        grid_dict = grid.to_json_dict()

    if args.out:
        payload = {
            "payoffs": {
                "alpha": payoffs.alpha,
                "beta": payoffs.beta,
                "gamma": payoffs.gamma,
                "is_bos": payoffs.is_bos,
            },
            "a_sq": state.a_sq,
            "equilibria": [equilibrium_to_dict(eq) for eq in equilibria],
            "profile": profile_dict,
            "grid_check": grid_dict,
        }
        args.out.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server.app import create_app
    from .server.sessions import SessionStore

    static = args.static
    if static is None and Path("frontend/dist").is_dir():
        static = Path("frontend/dist")
    store = SessionStore(log_dir=str(args.session_log) if args.session_log else None)
    app = create_app(store, static_dir=static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    commands = {
        "simulate": cmd_simulate,
        "sweep": cmd_sweep,
        "analyze": cmd_analyze,
        "serve": cmd_serve,
    }
    try:
        return commands[args.command](args)
    except GameDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
