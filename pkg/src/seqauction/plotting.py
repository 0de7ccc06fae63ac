"""Figures written next to CLI reports. Uses the non-interactive Agg backend."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .analysis import PathRealization  # noqa: E402
from .welfare import POA_LO, PoaRow  # noqa: E402

_WINNER_COLOURS = {1: "tab:blue", 2: "tab:orange"}


def plot_price_trajectory(paths: list[PathRealization], out: str | Path, title: str = "") -> Path:
    """Step plot of price per round, one line per realised path, markers coloured by winner."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for n, path in enumerate(paths):
        rounds = list(range(1, len(path) + 1))
        prices = [float(p) for p in path.prices]
        ax.step(rounds, prices, where="mid", color="0.6", lw=1, zorder=1,
                label="price" if n == 0 else None)
        for w in (1, 2):
            pts = [(r, p) for r, p, win in zip(rounds, prices, path.winners) if win == w]
            if pts:
                ax.scatter(*zip(*pts), color=_WINNER_COLOURS[w], zorder=2, s=25,
                           label=f"buyer {w} wins" if n == 0 else None)
    ax.set_xlabel("round")
    ax.set_ylabel("price")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def plot_efficiency(rows: list[PoaRow], out: str | Path, title: str = "") -> Path:
    """Efficiency against T with the 1 - 1/e limit drawn as a reference line."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ts = [r.T for r in rows]
    ax.plot(ts, [float(r.efficiency) for r in rows], "o-", label="equilibrium efficiency")
    ax.axhline(float(POA_LO), color="k", ls="--", lw=1, label="1 - 1/e")
    if len(ts) > 1 and max(ts) / max(min(ts), 1) >= 20:
        ax.set_xscale("log")
    ax.set_xlabel("T")
    ax.set_ylabel("efficiency")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out
