"""Figures written next to the CSV results (PNG, non-interactive backend)."""

from __future__ import annotations

from pathlib import Path
from typing import List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# deterministic PNG bytes: no timestamp or version chunk
_PNG_META = {"Software": None}


def _cost_value(label: str) -> float:
    try:
        return float(label)
    except ValueError:
        return float("nan")


def _errorbar(ax, x, rows, key, label):
    y = [r.get(key) for r in rows]
    e = [r.get(f"{key}_std") or 0.0 for r in rows]
    pts = [(a, b, c) for a, b, c in zip(x, y, e) if b is not None]
    if pts:
        xs, ys, es = zip(*pts)
        ax.errorbar(xs, ys, yerr=es, marker="o", capsize=3, label=label)


def plot_cost_curves(rows: List[dict], out_dir) -> List[Path]:
    """RcR loss, accepted loss and rejection rate against the rejection cost, one line per loss kind."""
    out = Path(out_dir)
    kinds = sorted({r["loss_kind"] for r in rows})
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.6))
    for kind in kinds:
        sub = sorted((r for r in rows if r["loss_kind"] == kind), key=lambda r: _cost_value(r["cost"]))
        x = [_cost_value(r["cost"]) for r in sub]
        _errorbar(axes[0], x, sub, "rcr_loss", kind)
        _errorbar(axes[1], x, sub, "al", kind)
        _errorbar(axes[2], x, sub, "rej", kind)
    sup = [r["sup"] for r in rows if r.get("sup") is not None]
    if sup:
        for ax in axes[:2]:
            ax.axhline(sum(sup) / len(sup), color="grey", linestyle="--", linewidth=1, label="Sup")
    for ax, title in zip(axes, ("RcR loss", "accepted loss", "rejection rate")):
        ax.set_xlabel("rejection cost")
        ax.set_title(title)
        ax.grid(alpha=0.3)
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    path = out / "cost_curves.png"
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)
    return [path]


def plot_increasing_n(rows: List[dict], out_dir) -> List[Path]:
    """Median RcR loss and accepted loss against the fraction of training data used."""
    out = Path(out_dir)
    fig, axes = plt.subplots(1, 2, figsize=(8, 3.4))
    groups = sorted({(r["loss_kind"], r["cost"]) for r in rows})
    for kind, cost in groups:
        sub = sorted((r for r in rows if (r["loss_kind"], r["cost"]) == (kind, cost)), key=lambda r: r["fraction"])
        x = [r["fraction"] for r in sub]
        for ax, key in zip(axes, ("rcr_loss_median", "al_median")):
            pts = [(a, r[key]) for a, r in zip(x, sub) if r.get(key) is not None]
            if pts:
                ax.plot(*zip(*pts), marker="o", label=f"{kind}, c={cost}")
    for ax, title in zip(axes, ("RcR loss (median)", "accepted loss (median)")):
        ax.set_xlabel("fraction of training data")
        ax.set_title(title)
        ax.grid(alpha=0.3)
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    path = out / "increasing_n.png"
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)
    return [path]


def plot_regret(results, out_dir) -> List[Path]:
    """Target regret against the transfer bound, one panel per loss kind."""
    out = Path(out_dir)
    kinds = sorted({r.kind for r in results})
    if not kinds:
        return []
    fig, axes = plt.subplots(1, len(kinds), figsize=(3.2 * len(kinds), 3.2), squeeze=False)
    for ax, kind in zip(axes[0], kinds):
        sub = [r for r in results if r.kind == kind]
        ok = [r for r in sub if r.holds]
        bad = [r for r in sub if not r.holds]
        ax.scatter([r.bound for r in ok], [r.target_regret for r in ok], s=2, alpha=0.4, label="holds")
        if bad:
            ax.scatter([r.bound for r in bad], [r.target_regret for r in bad], s=2, color="red", label="violated")
        hi = max(max(r.bound for r in sub), max(r.target_regret for r in sub))
        ax.plot([0, hi], [0, hi], color="black", linewidth=0.8)
        ax.set_title(kind)
        ax.set_xlabel("bound")
    axes[0][0].set_ylabel("target regret")
    axes[0][0].legend(fontsize=7, markerscale=4)
    fig.tight_layout()
    path = out / "regret_sweep.png"
    fig.savefig(path, dpi=100, metadata=_PNG_META)
    plt.close(fig)
    return [path]
