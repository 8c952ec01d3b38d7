"""Figure rendering for sweep results.

Renders the standard report figures (rate, effective rank, element
shares, each against the swept budget) as PNG files next to the CSV.
Uses the Agg backend and fixed metadata so repeated runs produce
byte-identical images.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .errors import ConfigError

_PNG_METADATA = {"Software": "irsmimo"}

_STRATEGY_STYLE = {
    "single_irs": dict(color="tab:gray", marker="s"),
    "multi_equal": dict(color="tab:orange", marker="^"),
    "multi_sca": dict(color="tab:blue", marker="o"),
}


def _series(rows, field):
    """Group (x, field) pairs by (strategy, K), skipping error rows."""
    grouped = {}
    for row in rows:
        if row.get("error") or row.get(field) is None:
            continue
        key = (row["strategy"], row["K"])
        grouped.setdefault(key, []).append((row["sweep_value"], row[field]))
    return grouped


def _axis_label(sweep_variable: str) -> str:
    if sweep_variable == "element_budget":
        return "total reflecting elements M"
    return "transmit power P [W]"


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=_PNG_METADATA)
    plt.close(fig)


def render_sweep_figures(rows, sweep_variable: str, out_dir, stem: str = "sweep") -> list[str]:
    """Write the report figures for one sweep; returns the paths written.

    Always renders rate and effective-rank charts; adds the per-surface
    element-share chart when optimized multi-surface rows are present.
    """
    if not rows:
        raise ConfigError("no rows to plot")
    os.makedirs(out_dir, exist_ok=True)
    xlabel = _axis_label(sweep_variable)
    written = []

    for field, ylabel, suffix in (
        ("se_bits", "spectral efficiency [bits/s/Hz]", "rate"),
        ("erank", "effective rank", "erank"),
    ):
        grouped = _series(rows, field)
        if not grouped:
            continue
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for (strategy, k), pts in sorted(grouped.items()):
            xs = [p[0] for p in pts]
            ys = [p[1] for p in pts]
            style = _STRATEGY_STYLE.get(strategy, {})
            ax.plot(xs, ys, label=f"{strategy} (K={k})", markersize=4, **style)
        if len({p[0] for pts in grouped.values() for p in pts}) > 1:
            ax.set_xscale("log", base=2)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.grid(True, alpha=0.4)
        ax.legend(fontsize=8)
        path = os.path.join(out_dir, f"{stem}_{suffix}.png")
        _save(fig, path)
        written.append(path)

    share_rows = [
        r for r in rows
        if r["strategy"] == "multi_sca" and not r.get("error") and r.get("elements_list")
    ]
    by_k = {}
    for row in share_rows:
        by_k.setdefault(row["K"], []).append(row)
    for k, krows in sorted(by_k.items()):
        if k < 2 or len(krows) < 2:
            continue
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        ordered = [sorted(r["elements_list"], reverse=True) for r in krows]
        xs = [r["sweep_value"] for r in krows]
        for idx in range(k):
            ax.plot(xs, [o[idx] for o in ordered], marker="o", markersize=4,
                    label=f"surface {idx + 1} (sorted)")
        ax.set_xscale("log", base=2)
        ax.set_xlabel(xlabel)
        ax.set_ylabel("elements per surface")
        ax.grid(True, alpha=0.4)
        ax.legend(fontsize=8)
        path = os.path.join(out_dir, f"{stem}_elements_k{k}.png")
        _save(fig, path)
        written.append(path)

    return written
