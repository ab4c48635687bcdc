"""Score reports over stored trajectories, with CSV and figure rendering."""

from __future__ import annotations

import csv
import json
import os
from typing import Any

from .engine import parse_assistant_message
from .model import EnvironmentBundle
from .rewards import TurnKind, answer_correctness, pass_hat_1, solve_scores, ts_pi_cf
from .runtime import ToolCall
from .store import Trajectory

METRICS = ("solve", "ac", "pass1", "tspicf")


def first_predicted_call(traj: Trajectory) -> ToolCall | None:
    for text in traj.assistant_turns():
        parsed = parse_assistant_message(text)
        if parsed.kind is TurnKind.TOOL_CALLS:
            return parsed.calls[0]
    return None


def gold_first_call(env: EnvironmentBundle) -> ToolCall:
    """Canonical call of the first root sub-question, in id order."""
    from .agents import canonical_call_arguments

    roots = sorted(sq.id for sq in env.sub_questions if not sq.depends_on)
    sq = env.sub_question(roots[0])
    return ToolCall(name=sq.tool_name, arguments=canonical_call_arguments(env, sq))


def _mean(values: list[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def compute_score_report(
    trajectories: list[Trajectory],
    metric: str,
    bundles: dict[str, EnvironmentBundle] | None = None,
) -> dict[str, Any]:
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")
    per_instance: list[dict[str, Any]] = []

    if metric == "solve":
        for traj in trajectories:
            scores = solve_scores(traj.p_total, traj.q_total, max(traj.n, 1))
            per_instance.append(
                {
                    "env_id": traj.env_id,
                    "p": traj.p_total,
                    "q": traj.q_total,
                    "n": traj.n,
                    "solve_p": scores.solve_p,
                    "solve_r": scores.solve_r,
                    "solve_f1": scores.solve_f1,
                }
            )
        averages = {
            key: _mean([row[key] for row in per_instance])
            for key in ("solve_p", "solve_r", "solve_f1")
        }
    elif metric in ("ac", "pass1"):
        for traj in trajectories:
            output = traj.final_output() or ""
            correct = answer_correctness(output, traj.final_answer) if traj.final_answer else 0
            per_instance.append({"env_id": traj.env_id, "answer_correct": correct})
        correct_total = sum(row["answer_correct"] for row in per_instance)
        if metric == "ac":
            averages = {"answer_correct": _mean([row["answer_correct"] for row in per_instance])}
        else:
            averages = {
                "pass_hat_1": pass_hat_1(correct_total, max(len(per_instance), 1))
            }
    else:
        if bundles is None:
            raise ValueError("tspicf scoring needs the bundle catalog for gold calls")
        for traj in trajectories:
            env = bundles.get(traj.env_id)
            if env is None:
                raise ValueError(f"no bundle available for {traj.env_id}")
            pred = first_predicted_call(traj)
            if pred is None:
                ts = pi = cf = 0
            else:
                ts, pi, cf = ts_pi_cf(pred, gold_first_call(env))
            per_instance.append({"env_id": traj.env_id, "ts": ts, "pi": pi, "cf": cf})
        averages = {key: _mean([row[key] for row in per_instance]) for key in ("ts", "pi", "cf")}

    return {
        "metric": metric,
        "count": len(per_instance),
        "per_instance": per_instance,
        "averages": averages,
    }


def write_report_files(report: dict[str, Any], out_dir: str) -> list[str]:
    """Render the report to JSON + CSV and a figure; returns written paths."""
    os.makedirs(out_dir, exist_ok=True)
    metric = report["metric"]
    written = []

    json_path = os.path.join(out_dir, f"{metric}_report.json")
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, ensure_ascii=False, indent=2)
        fh.write("\n")
    written.append(json_path)

    rows = report["per_instance"]
    csv_path = os.path.join(out_dir, f"{metric}_report.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        if rows:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
    written.append(csv_path)

    written.append(_render_figure(report, out_dir))
    return written


def _render_figure(report: dict[str, Any], out_dir: str) -> str:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    metric = report["metric"]
    rows = report["per_instance"]
    averages: dict[str, float] = report["averages"]
    numeric_keys = [key for key in (rows[0].keys() if rows else averages.keys()) if key != "env_id" and all(isinstance(r.get(key), (int, float)) for r in rows)]
    series_keys = [key for key in numeric_keys if key in averages] or numeric_keys[:3]

    fig, ax = plt.subplots(figsize=(8, 4.5))
    xs = range(len(rows))
    for key in series_keys:
        ax.plot(xs, [row[key] for row in rows], marker="o", linestyle="-", alpha=0.7, label=key)
    for key, value in averages.items():
        ax.axhline(value, linestyle="--", linewidth=1, alpha=0.6)
    ax.set_xlabel("instance")
    ax.set_ylabel("score")
    title_bits = ", ".join(f"{key}={value:.3f}" for key, value in averages.items())
    ax.set_title(f"{metric}: {title_bits}")
    if series_keys:
        ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig_path = os.path.join(out_dir, f"{metric}_report.png")
    fig.savefig(fig_path, dpi=120)
    plt.close(fig)
    return fig_path
