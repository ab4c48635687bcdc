"""Command-line front end: generate / validate / serve / run-episode / score / export."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import service as servicemod
from .agents import AGENTS, make_agent
from .backends import ChatBackend
from .engine import Budgets, run_episode
from .errors import GymError
from .graph import ScenarioKind
from .model import load_bundle, save_bundle, validate_bundle
from .pipeline import PRESET_SPLITS, ScalingConfig, ScenarioSeed, build_environment, preset_seed
from .report import METRICS, compute_score_report, write_report_files
from .rewards import RewardVariant, solve_scores
from .store import TrajectoryStore, epoch_path, scan_file

log = logging.getLogger("toolgym.cli")

SCENARIO_CHOICES = [kind.wire for kind in ScenarioKind] + ["all"]

_MIN_SUBQ = {
    ScenarioKind.SINGLE_HOP: 1,
    ScenarioKind.PARALLEL_SINGLE_HOP: 2,
    ScenarioKind.MULTI_HOP: 3,
    ScenarioKind.PARALLEL_MULTI_HOP: 4,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gym",
        description="Construct tool-use environments, run episodes, score trajectories.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="construct environment bundles")
    p_gen.add_argument("--scenario", required=True, choices=SCENARIO_CHOICES)
    p_gen.add_argument("--count", type=int, default=1)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True, help="output directory for bundle JSON files")
    p_gen.add_argument("--distractors", type=int, default=None, help="override the preset distractor count")
    p_gen.add_argument("--preset", choices=[*PRESET_SPLITS, "none"], default="test")
    p_gen.add_argument("--sub-questions", type=int, default=None, help="sub-question count when --preset none")
    p_gen.add_argument("--backend", choices=["synthetic", "llm"], default="synthetic")
    p_gen.add_argument("--record-transcript", default=None, help="save LLM backend transcript JSON here")

    p_val = sub.add_parser("validate", help="validate bundle files or a directory")
    p_val.add_argument("paths", nargs="+")

    p_srv = sub.add_parser("serve", help="serve bundles over the line-JSON protocol")
    p_srv.add_argument("--bind", default="127.0.0.1:7780")
    p_srv.add_argument("--bundles", required=True)
    p_srv.add_argument("--max-sessions", type=int, default=16)
    p_srv.add_argument("--stdio", action="store_true", help="speak the protocol over stdin/stdout instead of TCP")

    p_run = sub.add_parser("run-episode", help="run a scripted agent against a bundle")
    p_run.add_argument("--env", required=True, help="bundle JSON file")
    p_run.add_argument("--agent", choices=sorted(AGENTS), default="oracle")
    p_run.add_argument("--variant", choices=[v.value for v in RewardVariant], default="balanced")
    p_run.add_argument("--max-turns", type=int, default=None)
    p_run.add_argument("--save", default=None, help="append the trajectory to this JSONL file")
    p_run.add_argument("--epoch", type=int, default=0)

    p_score = sub.add_parser("score", help="score stored trajectories")
    p_score.add_argument("--trajectories", required=True)
    p_score.add_argument("--metric", required=True, choices=METRICS)
    p_score.add_argument("--bundles", default=None, help="bundle directory (needed for tspicf)")
    p_score.add_argument("--report-dir", default=None, help="also write JSON/CSV and a rendered figure here")

    p_exp = sub.add_parser("export", help="export one epoch of rollouts")
    p_exp.add_argument("--epoch", type=int, required=True)
    p_exp.add_argument("--rollouts", default="rollouts")
    p_exp.add_argument("--format", choices=["jsonl"], default="jsonl")
    p_exp.add_argument("--out", default=None, help="output file (default: stdout)")
    return parser


def _cmd_generate(args: argparse.Namespace) -> int:
    scenarios = list(ScenarioKind) if args.scenario == "all" else [ScenarioKind.from_wire(args.scenario)]
    backend = None
    if args.backend == "llm":
        backend = ChatBackend.from_env()
    os.makedirs(args.out, exist_ok=True)
    written = 0
    for scenario in scenarios:
        for index in range(args.count):
            rng_seed = args.seed + index
            if args.preset == "none":
                n = args.sub_questions or _MIN_SUBQ[scenario]
                seed = ScenarioSeed(scenario=scenario, n_subq=n, rng_seed=rng_seed)
                cfg = ScalingConfig(toolset_extension=args.distractors or 0, rng_seed=rng_seed)
            else:
                overrides = {}
                if args.distractors is not None:
                    overrides["toolset_extension"] = args.distractors
                seed, cfg = preset_seed(scenario, rng_seed, split=args.preset, scaling_overrides=overrides)
            env = build_environment(seed, cfg, backend=backend)
            path = os.path.join(args.out, f"{env.id}.json")
            save_bundle(env, path)
            written += 1
    if backend is not None and args.record_transcript:
        backend.save_transcript(args.record_transcript)
    print(f"wrote {written} bundle(s) to {args.out}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    files: list[str] = []
    for path in args.paths:
        if os.path.isdir(path):
            files.extend(
                os.path.join(path, name) for name in sorted(os.listdir(path)) if name.endswith(".json")
            )
        else:
            files.append(path)
    if not files:
        print("no bundle files found", file=sys.stderr)
        return 1
    failures = 0
    for path in files:
        try:
            bundle = load_bundle(path)
        except (json.JSONDecodeError, KeyError, ValueError, OSError) as exc:
            print(f"FAIL {path}: unreadable bundle ({exc})")
            failures += 1
            continue
        report = validate_bundle(bundle)
        if report.ok:
            print(f"OK   {path}")
        else:
            print(f"FAIL {path}: {report.summary()}")
            failures += 1
    return 1 if failures else 0


def _cmd_serve(args: argparse.Namespace) -> int:
    if args.stdio:
        servicemod.serve_stdio(args.bundles)
        return 0
    server = servicemod.serve(args.bind, args.bundles, max_sessions=args.max_sessions)
    host, port = server.bound_address
    print(f"listening on {host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
        server.server_close()
    return 0


def _cmd_run_episode(args: argparse.Namespace) -> int:
    env = load_bundle(args.env)
    report = validate_bundle(env)
    if not report.ok:
        print(f"invalid bundle: {report.summary()}", file=sys.stderr)
        return 1
    budgets = None
    if args.max_turns is not None:
        budgets = Budgets(max_turns=args.max_turns)
    agent = make_agent(args.agent, env)
    traj = run_episode(env, agent, budgets=budgets, variant=RewardVariant(args.variant), epoch=args.epoch)
    scores = solve_scores(traj.p_total, traj.q_total, env.n)
    output = traj.final_output() or ""
    answer_correct = int(bool(output) and _contains_answer(output, traj.final_answer)) if traj.final_answer else 0
    print(f"env: {env.id}")
    print(f"agent: {args.agent}")
    print(f"outcome: {traj.outcome}")
    print(f"turns: {len(traj.per_turn)}")
    print(f"p_total: {traj.p_total}")
    print(f"q_total: {traj.q_total}")
    print(f"solve_p: {scores.solve_p}")
    print(f"solve_r: {scores.solve_r}")
    print(f"solve_f1: {scores.solve_f1}")
    print(f"answer_correct: {answer_correct}")
    print(f"rewards: {json.dumps(traj.rewards())}")
    if args.save:
        store = TrajectoryStore(args.save)
        offset = store.append(traj)
        print(f"saved: {args.save}:{offset}")
    return 0


def _contains_answer(output: str, gold: str) -> bool:
    from .rewards import answer_correctness

    return answer_correctness(output, gold) == 1


def _cmd_score(args: argparse.Namespace) -> int:
    scan = scan_file(args.trajectories)
    for offset, message in scan.errors:
        print(f"warning: {args.trajectories}:{offset}: {message}", file=sys.stderr)
    trajectories = [traj for _, traj in scan.records]
    bundles = None
    if args.bundles:
        bundles = servicemod.load_catalog(args.bundles)
    try:
        report = compute_score_report(trajectories, args.metric, bundles)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    print(json.dumps(report, ensure_ascii=False, indent=2))
    if args.report_dir:
        for path in write_report_files(report, args.report_dir):
            print(f"wrote {path}", file=sys.stderr)
    return 0


def _cmd_export(args: argparse.Namespace) -> int:
    path = epoch_path(args.rollouts, args.epoch)
    scan = scan_file(path)
    for offset, message in scan.errors:
        print(f"warning: {path}:{offset}: {message}", file=sys.stderr)
    lines = [
        json.dumps(traj.to_dict(), ensure_ascii=False)
        for _, traj in scan.records
        if traj.epoch == args.epoch
    ]
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + ("\n" if lines else ""))
        print(f"exported {len(lines)} record(s) to {args.out}", file=sys.stderr)
    else:
        for line in lines:
            print(line)
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("GYM_LOG_LEVEL", "WARNING").upper())
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "generate": _cmd_generate,
        "validate": _cmd_validate,
        "serve": _cmd_serve,
        "run-episode": _cmd_run_episode,
        "score": _cmd_score,
        "export": _cmd_export,
    }
    try:
        return handlers[args.command](args)
    except GymError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
