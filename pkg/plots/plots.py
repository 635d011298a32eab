#!/usr/bin/env python3
"""Render benchmark CSV outputs into the five standard figures.

Reads only the documented CSV schemas produced by the experiment harness:

* ``aggregate_curves.csv``: env_id, method, step, mean_success, stderr, n_seeds
* ``summary.csv``: env_id, method, mismatch_mode, mismatch_skill,
  mean_final_success, stderr, n_seeds
* ``metrics.csv``: the per-run training log (step, env_id, success_rate,
  aux_hks, ... columns)
* ``pot_trace_raw.csv``: t, w_<skill> ... (one row per timestep)

Figure kinds:
  mean_success   one success curve per method, averaged over tasks (+/- 1 SE)
  per_task       per-task grid of method curves (+/- 1 SE)
  mismatch       per-task comparison of one method across several plans
  pot_trace      stacked area chart of policy-over-teachers weights
  hks_loss       auxiliary-loss curves with a success-rate companion row

Identical inputs produce identical image bytes.
"""
from __future__ import annotations

import argparse
import csv
import sys
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

#: fixed legend order and palette
METHOD_ORDER = ["vanilla", "options", "kickstart", "hks"]
METHOD_LABELS = {
    "vanilla": "vanilla",
    "options": "options",
    "kickstart": "kickstarting",
    "hks": "hks",
}
METHOD_COLORS = {
    "vanilla": "#7f7f7f",
    "options": "#2ca02c",
    "kickstart": "#1f77b4",
    "hks": "#d62728",
}

KINDS = ("mean_success", "per_task", "mismatch", "pot_trace", "hks_loss")

#: strip volatile metadata so identical inputs give identical bytes
SAVEFIG_KW = dict(dpi=110, metadata={"Software": "skillgrid-plots"})


class SchemaError(ValueError):
    """An input file does not match the documented CSV schema."""


class EmptyGroupError(ValueError):
    """A seed group is empty; refusing to draw a fake band."""


@dataclass
class PlotSpec:
    kind: str
    inputs: list
    output: str
    smoothing_window: int = 6

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; pick from {KINDS}")
        if not self.inputs:
            raise ValueError("at least one input file is required")


def read_rows(path, required):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [col for col in required if col not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
        rows = list(reader)
    if not rows:
        raise EmptyGroupError(f"{path}: no data rows")
    return rows


CURVE_COLS = ("env_id", "method", "step", "mean_success", "stderr", "n_seeds")


def load_curves(path):
    """{(env_id, method): (steps, mean, stderr)} from aggregate_curves.csv."""
    rows = read_rows(path, CURVE_COLS)
    grouped = defaultdict(list)
    for row in rows:
        if int(row["n_seeds"]) < 1:
            raise EmptyGroupError(
                f"{path}: empty seed group for {row['env_id']}/{row['method']}"
            )
        grouped[(row["env_id"], row["method"])].append(
            (int(row["step"]), float(row["mean_success"]), float(row["stderr"]))
        )
    out = {}
    for key, triples in grouped.items():
        triples.sort()
        arr = np.array(triples, dtype=np.float64)
        out[key] = (arr[:, 0], arr[:, 1], arr[:, 2])
    return out


def ordered_methods(keys):
    present = {m for _, m in keys}
    return [m for m in METHOD_ORDER if m in present]


def _draw_curve(ax, steps, mean, se, method):
    color = METHOD_COLORS.get(method, "#9467bd")
    ax.plot(steps, mean, color=color, label=METHOD_LABELS.get(method, method), linewidth=1.6)
    ax.fill_between(steps, mean - se, mean + se, color=color, alpha=0.22, linewidth=0)


def render_mean_success(spec):
    curves = load_curves(spec.inputs[0])
    keys = [k for k in curves if k[0] == "__mean__"]
    if not keys:
        raise SchemaError(f"{spec.inputs[0]}: no '__mean__' rows; aggregate first")
    fig, ax = plt.subplots(figsize=(6, 4))
    for method in ordered_methods(keys):
        _draw_curve(ax, *curves[("__mean__", method)], method)
    ax.set_xlabel("environment steps")
    ax.set_ylabel("success rate")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title("mean success rate across tasks (band: 1 standard error)")
    ax.legend(loc="upper left", frameon=False)
    fig.tight_layout()
    return fig


def render_per_task(spec):
    curves = load_curves(spec.inputs[0])
    envs = sorted({e for e, _ in curves if e != "__mean__"})
    if not envs:
        raise SchemaError(f"{spec.inputs[0]}: no per-task rows")
    cols = 4 if len(envs) > 4 else max(len(envs), 1)
    rows = -(-len(envs) // cols)
    fig, axes = plt.subplots(rows, cols, figsize=(3.2 * cols, 2.6 * rows),
                             squeeze=False, sharey=True)
    for i, env in enumerate(envs):
        ax = axes[i // cols][i % cols]
        for method in ordered_methods(curves):
            key = (env, method)
            if key in curves:
                _draw_curve(ax, *curves[key], method)
        ax.set_title(env, fontsize=9)
        ax.set_ylim(-0.02, 1.02)
    for j in range(len(envs), rows * cols):
        axes[j // cols][j % cols].axis("off")
    handles, labels = axes[0][0].get_legend_handles_labels()
    fig.legend(handles, labels, loc="lower center", ncol=len(labels), frameon=False)
    fig.suptitle("success rate per task (band: 1 standard error)")
    fig.tight_layout(rect=(0, 0.05, 1, 0.96))
    return fig


def render_mismatch(spec):
    """Compare the same methods across plans (full vs ablated skill sets)."""
    if len(spec.inputs) < 2:
        raise ValueError("mismatch needs >=2 aggregate_curves.csv inputs (full first)")
    variants = [(Path(p).parent.name or f"input{i}", load_curves(p))
                for i, p in enumerate(spec.inputs)]
    envs = sorted({e for _, cv in variants for e, _ in cv if e != "__mean__"})
    styles = ["-", "--", ":", "-."]
    cols = 4 if len(envs) > 4 else max(len(envs), 1)
    rows = -(-len(envs) // cols)
    fig, axes = plt.subplots(rows, cols, figsize=(3.2 * cols, 2.6 * rows),
                             squeeze=False, sharey=True)
    for i, env in enumerate(envs):
        ax = axes[i // cols][i % cols]
        for v, (vname, curves) in enumerate(variants):
            for method in ordered_methods(curves):
                key = (env, method)
                if key not in curves:
                    continue
                steps, mean, se = curves[key]
                color = METHOD_COLORS.get(method, "#9467bd")
                ax.plot(steps, mean, styles[v % len(styles)], color=color,
                        label=f"{METHOD_LABELS.get(method, method)} [{vname}]",
                        linewidth=1.4)
                ax.fill_between(steps, mean - se, mean + se, color=color,
                                alpha=0.15, linewidth=0)
        ax.set_title(env, fontsize=9)
        ax.set_ylim(-0.02, 1.02)
    for j in range(len(envs), rows * cols):
        axes[j // cols][j % cols].axis("off")
    handles, labels = axes[0][0].get_legend_handles_labels()
    fig.legend(handles, labels, loc="lower center", ncol=max(1, len(labels) // 2),
               frameon=False, fontsize=8)
    fig.suptitle("skill-set ablation (band: 1 standard error)")
    fig.tight_layout(rect=(0, 0.08, 1, 0.96))
    return fig


def render_pot_trace(spec):
    rows = read_rows(spec.inputs[0], ("t",))
    weight_cols = [c for c in rows[0].keys() if c.startswith("w_")]
    if not weight_cols:
        raise SchemaError(f"{spec.inputs[0]}: no w_<skill> columns")
    raw = np.array([[float(r[c]) for c in weight_cols] for r in rows])
    sums = raw.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > 1e-6):
        raise ValueError("policy-over-teachers rows do not lie on the simplex")
    window = max(1, spec.smoothing_window)
    smoothed = np.empty_like(raw)
    for t in range(raw.shape[0]):
        lo = max(0, t - window + 1)
        smoothed[t] = raw[lo : t + 1].mean(axis=0)
    fig, ax = plt.subplots(figsize=(7, 3.4))
    t = np.arange(raw.shape[0])
    ax.stackplot(t, smoothed.T, labels=[c[2:] for c in weight_cols], alpha=0.9)
    ax.set_xlim(0, max(len(t) - 1, 1))
    ax.set_ylim(0, 1)
    ax.set_xlabel("episode timestep")
    ax.set_ylabel("teacher weight")
    ax.set_title(f"policy-over-teachers (rolling average of {window} timesteps)")
    ax.legend(loc="center left", bbox_to_anchor=(1.0, 0.5), frameon=False, fontsize=8)
    fig.tight_layout()
    return fig


METRICS_COLS = ("step", "env_id", "success_rate", "aux_hks", "lambda")


def render_hks_loss(spec):
    by_env = defaultdict(list)
    for path in spec.inputs:
        rows = read_rows(path, METRICS_COLS)
        env = rows[0]["env_id"]
        steps = np.array([int(r["step"]) for r in rows])
        hks = np.array([float(r["aux_hks"]) for r in rows])
        succ = np.array([float(r["success_rate"]) for r in rows])
        by_env[env].append((steps, hks, succ))
    envs = sorted(by_env)
    fig, axes = plt.subplots(2, len(envs), figsize=(3.0 * len(envs), 5.2),
                             squeeze=False)
    for i, env in enumerate(envs):
        top, bottom = axes[0][i], axes[1][i]
        group = by_env[env]
        steps = group[0][0]
        hks_mat = np.stack([g[1] for g in group])
        succ_mat = np.stack([g[2] for g in group])
        mean_h = hks_mat.mean(axis=0)
        mean_s = succ_mat.mean(axis=0)
        if len(group) > 1:
            se_h = hks_mat.std(axis=0, ddof=1) / np.sqrt(len(group))
            se_s = succ_mat.std(axis=0, ddof=1) / np.sqrt(len(group))
        else:
            se_h = np.zeros_like(mean_h)
            se_s = np.zeros_like(mean_s)
        top.plot(steps, mean_h, color="#d62728", linewidth=1.4)
        top.fill_between(steps, mean_h - se_h, mean_h + se_h, color="#d62728",
                         alpha=0.2, linewidth=0)
        top.set_title(env, fontsize=9)
        top.set_ylabel("hks loss" if i == 0 else "")
        bottom.plot(steps, mean_s, color="#1f77b4", linewidth=1.4)
        bottom.fill_between(steps, mean_s - se_s, mean_s + se_s, color="#1f77b4",
                            alpha=0.2, linewidth=0)
        bottom.set_ylim(-0.02, 1.02)
        bottom.set_ylabel("success rate" if i == 0 else "")
        bottom.set_xlabel("environment steps")
    fig.suptitle("hks auxiliary loss with success-rate companion row")
    fig.tight_layout(rect=(0, 0, 1, 0.95))
    return fig


RENDERERS = {
    "mean_success": render_mean_success,
    "per_task": render_per_task,
    "mismatch": render_mismatch,
    "pot_trace": render_pot_trace,
    "hks_loss": render_hks_loss,
}


def render(spec: PlotSpec) -> str:
    fig = RENDERERS[spec.kind](spec)
    fig.savefig(spec.output, **SAVEFIG_KW)
    plt.close(fig)
    return spec.output


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="input CSV file(s)")
    parser.add_argument("--out", required=True, help="output PNG path")
    parser.add_argument("--smooth", type=int, default=6,
                        help="rolling-average window for pot_trace")
    args = parser.parse_args(argv)
    spec = PlotSpec(kind=args.kind, inputs=list(args.inputs), output=args.out,
                    smoothing_window=args.smooth)
    render(spec)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
