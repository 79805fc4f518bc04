"""Command-line front end.

Exit codes: 0 the property holds, 1 it fails (a witness is written where one
exists), 2 bad input or usage, 3 a resource limit was hit.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional

from . import __version__
from .blindfold import is_feasible, reconstruct_schedule, savitch_feasible
from .errors import (
    IllegalReleaseError,
    InvalidScheduleError,
    InvariantError,
    NotOnlineFeasibleError,
    ParseError,
    ResourceLimitError,
    StrategyIncompleteError,
)
from .flow_rounding import (
    continuous_to_discrete,
    format_discrete,
    jobs_from_sequence,
    max_flow,
    build_network,
    parse_continuous,
    parse_jobs,
    validate_continuous,
)
from .harness import all_systems, find_edf_failures, find_feasible_not_online
from .online_game import Strategy, attractor, position, synthesize_strategy
from .oracle import brute_force_online, brute_force_valid_states, enumerate_legal_sequences
from .schedulability import is_schedulable, policy_edf, policy_fixed_priority, policy_name
from .search import DEFAULT_MAX_STATES
from .task_model import (
    TaskSystem,
    format_config,
    format_job_sequence,
    format_schedule,
    is_legal_sequence,
    parse_job_sequence,
    parse_task_system,
    simulate,
    zero_config,
)

EXIT_HOLDS, EXIT_FAILS, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3


class Report:
    """Ordered ``key=value`` fields; ``wall_time`` is kept out of the digest."""

    def __init__(self, command: str):
        self.fields: Dict[str, str] = {"command": command}
        self.started = time.perf_counter()

    def __setitem__(self, key, value):
        self.fields[key] = str(value)

    def __getitem__(self, key):
        return self.fields[key]

    def render(self) -> str:
        body = "".join(f"{k}={v}\n" for k, v in self.fields.items())
        digest = hashlib.sha256(body.encode()).hexdigest()[:16]
        wall = time.perf_counter() - self.started
        return body + f"report_digest={digest}\nwall_time={wall:.6f}\n"


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _load_tasks(path: str, m: Optional[int]) -> TaskSystem:
    T = parse_task_system(_read(path))
    return TaskSystem(T.tasks, m) if m is not None else T


def _load_sequence(path: str, T: TaskSystem):
    sigma = parse_job_sequence(_read(path), T.n)
    if not is_legal_sequence(sigma, T):
        raise IllegalReleaseError(f"{path}: job sequence violates a release size or separation")
    return sigma


def _policy(spec: str, T: TaskSystem):
    if spec == "edf":
        return policy_edf
    if spec.startswith("fp:"):
        try:
            order = [int(x) - 1 for x in spec[3:].split(",")]
        except ValueError:
            raise ParseError(f"bad priority order {spec[3:]!r}") from None
        pol = policy_fixed_priority(order)
        if len(order) != T.n:
            raise InvariantError(f"priority order covers {len(order)} tasks, system has {T.n}")
        return pol
    if spec.startswith("strategy:"):
        path = spec[len("strategy:"):]
        return Strategy.loads(_read(path), name=f"strategy:{Path(path).name}")
    raise ParseError(f"unknown algorithm {spec!r}; use edf, fp:<order> or strategy:<file>")


def _write_witness(args, T_path: str, text: str) -> str:
    path = args.witness or f"{T_path}.witness"
    Path(path).write_text(text)
    return path


def spot_check(T: TaskSystem, horizon: int) -> Optional[object]:
    """First legal sequence up to ``horizon`` whose job set has no schedule, if any."""
    from .flow_rounding import has_feasible_schedule

    for sigma in enumerate_legal_sequences(T, horizon):
        if not has_feasible_schedule(jobs_from_sequence(sigma, T), T.m):
            return sigma
    return None


# --- subcommands ---------------------------------------------------------------


def cmd_feasible(args, rep: Report) -> int:
    T = _load_tasks(args.tasks, args.m)
    rep["instance_digest"] = T.digest()
    rep["instance"] = T
    if args.savitch:
        feasible = savitch_feasible(T, max_steps=args.max_steps)
        rep["mode"] = "savitch"
        rep["verdict"] = "feasible" if feasible else "infeasible"
        print(f"{T}: {rep['verdict']} (savitch, no witness)")
        return EXIT_HOLDS if feasible else EXIT_FAILS
    v = is_feasible(T, antichain=args.antichain, max_states=args.max_states, workers=args.threads)
    rep["mode"] = v.mode
    rep["verdict"] = "feasible" if v.feasible else "infeasible"
    rep["states_explored"] = v.states_explored
    if v.feasible:
        print(f"{T}: feasible ({v.states_explored} knowledge states)")
        if args.horizon:
            bad = spot_check(T, args.horizon)
            rep["spot_check_horizon"] = args.horizon
            rep["spot_check"] = "pass" if bad is None else "fail"
            if bad is not None:
                print(f"spot check failed on {bad.as_dict()}")
                return EXIT_FAILS
        return EXIT_HOLDS
    path = _write_witness(args, args.tasks, format_job_sequence(v.witness))
    rep["witness_path"] = path
    rep["witness_length"] = v.witness.length
    rep["failure_time"] = v.failure_time
    print(f"{T}: infeasible; witness of length {v.witness.length} written to {path}")
    return EXIT_FAILS


def cmd_online(args, rep: Report) -> int:
    T = _load_tasks(args.tasks, args.m)
    rep["instance_digest"] = T.digest()
    rep["instance"] = T
    region = attractor(T, naive=args.naive, max_states=args.max_states)
    ok = position(zero_config(T)) not in region
    rep["verdict"] = "online-feasible" if ok else "not-online-feasible"
    rep["positions"] = len(region.arena.successors)
    rep["winning_region"] = len(region.W)
    print(f"{T}: {rep['verdict']} ({len(region.arena.successors)} game positions)")
    return EXIT_HOLDS if ok else EXIT_FAILS


def cmd_schedulable(args, rep: Report) -> int:
    T = _load_tasks(args.tasks, args.m)
    pol = _policy(args.alg, T)
    rep["instance_digest"] = T.digest()
    rep["instance"] = T
    rep["policy"] = policy_name(pol)
    v = is_schedulable(T, pol, savitch=args.savitch, max_states=args.max_states, workers=args.threads,
                       max_steps=args.max_steps)
    rep["mode"] = v.mode
    rep["verdict"] = "schedulable" if v.feasible else "not-schedulable"
    if not args.savitch:
        rep["states_explored"] = v.states_explored
    if v.feasible or v.witness is None:
        print(f"{T}: {rep['verdict']} under {policy_name(pol)}")
        return EXIT_HOLDS if v.feasible else EXIT_FAILS
    path = _write_witness(args, args.tasks, format_job_sequence(v.witness))
    rep["witness_path"] = path
    rep["witness_length"] = v.witness.length
    rep["failure_time"] = v.failure_time
    print(f"{T}: not schedulable under {policy_name(pol)}; witness written to {path}")
    return EXIT_FAILS


def cmd_synthesize(args, rep: Report) -> int:
    T = _load_tasks(args.tasks, args.m)
    rep["instance_digest"] = T.digest()
    rep["instance"] = T
    try:
        strat = synthesize_strategy(T, max_states=args.max_states)
    except NotOnlineFeasibleError as exc:
        rep["verdict"] = "not-online-feasible"
        print(exc)
        return EXIT_FAILS
    out = args.output or f"{args.tasks}.strategy"
    Path(out).write_text(strat.dumps())
    rep["verdict"] = "online-feasible"
    rep["strategy_path"] = out
    rep["strategy_entries"] = len(strat)
    print(f"{T}: strategy with {len(strat)} entries written to {out}")
    return EXIT_HOLDS


def cmd_simulate(args, rep: Report) -> int:
    T = _load_tasks(args.tasks, args.m)
    sigma = _load_sequence(args.sequence, T)
    pol = _policy(args.alg, T)
    rep["instance_digest"] = T.digest()
    rep["policy"] = policy_name(pol)
    res = simulate(sigma, pol, T, horizon=args.horizon)
    for t, b in enumerate(res.trace):
        line = f"t={t} {format_config(b)}"
        if t < len(res.schedule):
            line += " run=" + (" ".join(str(i + 1) for i in res.schedule[t]) or "-")
        print(line)
    rep["verdict"] = res.verdict.split()[0]
    if not res.met:
        rep["failure_time"] = res.failure_time
    print(res.verdict)
    return EXIT_HOLDS if res.met else EXIT_FAILS


def cmd_reconstruct(args, rep: Report) -> int:
    T = _load_tasks(args.tasks, args.m)
    sigma = _load_sequence(args.sequence, T)
    rep["instance_digest"] = T.digest()
    r = reconstruct_schedule(T, sigma)
    if not r.feasible:
        rep["verdict"] = "failure"
        rep["failure_time"] = r.failure_time
        print(f"no schedule meets every deadline; knowledge set empties at t={r.failure_time}")
        return EXIT_FAILS
    text = format_schedule(r.schedule)
    rep["verdict"] = "met"
    if args.output:
        Path(args.output).write_text(text)
        rep["schedule_path"] = args.output
    sys.stdout.write(text)
    return EXIT_HOLDS


def cmd_flow_check(args, rep: Report) -> int:
    jobs = parse_jobs(_read(args.jobs))
    res = max_flow(build_network(jobs, args.m))
    rep["jobs"] = len(jobs)
    rep["flow_value"] = res.value
    rep["K"] = res.network.K
    rep["verdict"] = "feasible" if res.saturates else "infeasible"
    print(f"max flow {res.value}, total demand {res.network.K}: {rep['verdict']}")
    return EXIT_HOLDS if res.saturates else EXIT_FAILS


def cmd_round(args, rep: Report) -> int:
    jobs = parse_jobs(_read(args.jobs))
    w = parse_continuous(_read(args.schedule))
    check = validate_continuous(w, jobs, args.m)
    if not check:
        rep["verdict"] = "invalid"
        rep["condition"] = check.condition
        rep["location"] = ",".join(map(str, check.location))
        print(f"condition {check.condition} violated: {check.message}")
        return EXIT_FAILS
    text = format_discrete(continuous_to_discrete(jobs, args.m, w))
    rep["verdict"] = "met"
    if args.output:
        Path(args.output).write_text(text)
        rep["schedule_path"] = args.output
    sys.stdout.write(text)
    return EXIT_HOLDS


def cmd_oracle(args, rep: Report) -> int:
    if args.oracle_cmd == "valid-states":
        T = _load_tasks(args.tasks, args.m)
        sigma = _load_sequence(args.sequence, T)
        states = sorted(brute_force_valid_states(sigma, args.time, T))
        for c in states:
            print(" ".join(map(str, c)))
        rep["states"] = len(states)
        return EXIT_HOLDS if states else EXIT_FAILS
    if args.oracle_cmd == "online":
        T = _load_tasks(args.tasks, args.m)
        ok = brute_force_online(T, args.depth)
        rep["verdict"] = "online-feasible" if ok else "not-online-feasible"
        print(rep["verdict"])
        return EXIT_HOLDS if ok else EXIT_FAILS
    if args.oracle_cmd == "sequences":
        T = _load_tasks(args.tasks, args.m)
        count = 0
        for sigma in enumerate_legal_sequences(T, args.horizon):
            print(sigma.as_dict())
            count += 1
        rep["sequences"] = count
        return EXIT_HOLDS
    systems = all_systems(args.n, args.max_param, args.m or 2)
    search = find_edf_failures if args.oracle_cmd == "search-edf" else find_feasible_not_online
    found = search(systems, limit=args.limit)
    for T in found:
        print(T)
    rep["found"] = len(found)
    return EXIT_HOLDS if found else EXIT_FAILS


# --- argument parsing ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", metavar="FILE", help="write a key=value report to FILE")
    common.add_argument("-m", type=int, default=None, help="processor count (overrides the task file)")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    search.add_argument("--threads", type=int, default=1, help="worker processes for frontier expansion")
    search.add_argument("--savitch", action="store_true", help="low-memory search without a visited set")
    search.add_argument("--max-steps", type=int, default=10**7, help="step budget for --savitch")
    search.add_argument("--witness", metavar="FILE", help="witness path (default <tasks>.witness)")

    p = argparse.ArgumentParser(
        prog="sporadic", description="Exact analysis of sporadic task systems on identical processors."
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("feasible", parents=[common, search], help="clairvoyant feasibility")
    s.add_argument("tasks")
    s.add_argument("--antichain", action="store_true", help="keep only minimal knowledge vectors")
    s.add_argument("--horizon", type=int, default=None, help="also check all sequences up to this length")
    s.set_defaults(func=cmd_feasible)

    s = sub.add_parser("online-feasible", parents=[common], help="existence of an online scheduler")
    s.add_argument("tasks")
    s.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    s.add_argument("--naive", action="store_true", help="plain fixpoint iteration")
    s.set_defaults(func=cmd_online)

    s = sub.add_parser("schedulable", parents=[common, search], help="schedulability under a policy")
    s.add_argument("tasks")
    s.add_argument("--alg", default="edf", help="edf | fp:<1-based order> | strategy:<file>")
    s.set_defaults(func=cmd_schedulable)

    s = sub.add_parser("synthesize", parents=[common], help="write an optimal online scheduler")
    s.add_argument("tasks")
    s.add_argument("-o", "--output", help="strategy path (default <tasks>.strategy)")
    s.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    s.set_defaults(func=cmd_synthesize)

    s = sub.add_parser("simulate", parents=[common], help="run a policy on a job sequence")
    s.add_argument("tasks")
    s.add_argument("sequence")
    s.add_argument("--alg", default="edf", help="edf | fp:<1-based order> | strategy:<file>")
    s.add_argument("--horizon", type=int, default=None)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("reconstruct", parents=[common], help="clairvoyant schedule for a job sequence")
    s.add_argument("tasks")
    s.add_argument("sequence")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("flow-check", parents=[common], help="feasibility of a finite job set")
    s.add_argument("jobs")
    s.set_defaults(func=cmd_flow_check, m=None)

    s = sub.add_parser("round", parents=[common], help="continuous to discrete schedule")
    s.add_argument("jobs")
    s.add_argument("schedule")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_round)

    s = sub.add_parser("oracle", parents=[common])
    osub = s.add_subparsers(dest="oracle_cmd", required=True)
    o = osub.add_parser("valid-states", parents=[common])
    o.add_argument("tasks")
    o.add_argument("sequence")
    o.add_argument("-t", "--time", type=int, required=True)
    o = osub.add_parser("online", parents=[common])
    o.add_argument("tasks")
    o.add_argument("--depth", type=int, default=8)
    o = osub.add_parser("sequences", parents=[common])
    o.add_argument("tasks")
    o.add_argument("--horizon", type=int, default=3)
    for name in ("search-edf", "search-online"):
        o = osub.add_parser(name, parents=[common])
        o.add_argument("-n", type=int, default=2)
        o.add_argument("--max-param", type=int, default=3)
        o.add_argument("--limit", type=int, default=None)
    s.set_defaults(func=cmd_oracle)
    # keep the oracle out of the help listing
    sub._choices_actions = [a for a in sub._choices_actions if a.dest != "oracle"]
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_HOLDS
    if args.command in ("flow-check", "round") and args.m is None:
        print("error: -m is required for job sets", file=sys.stderr)
        return EXIT_INPUT
    rep = Report(args.command if args.command != "oracle" else f"oracle {args.oracle_cmd}")
    try:
        code = args.func(args, rep)
    except ResourceLimitError as exc:
        rep["verdict"] = "resource-limit"
        print(f"resource limit: {exc}", file=sys.stderr)
        code = EXIT_LIMIT
    except (ParseError, InvariantError, IllegalReleaseError, InvalidScheduleError, StrategyIncompleteError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    rep["exit_code"] = code
    if args.report:
        Path(args.report).write_text(rep.render())
    return code


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
