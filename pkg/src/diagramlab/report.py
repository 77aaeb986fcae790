"""Report assembly: canonical JSON (byte-stable across runs), human-readable
text, delimited tables, and matplotlib figures rendered alongside them.

Timings are segregated into the text rendering only, so the canonical JSON
and its digest are deterministic for identical config and seed.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True) + "\n"


def digest_of(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("ascii")).hexdigest()


class Report:
    """One command's results: config echo plus named sections."""

    def __init__(self, command: str, echo: dict):
        self.command = command
        self.echo = echo
        self.sections: dict = {}
        self.timings: dict = {}

    def add(self, name: str, payload) -> None:
        self.sections[name] = payload

    def time(self, name: str, seconds: float) -> None:
        self.timings[name] = seconds

    def as_dict(self) -> dict:
        return {"command": self.command, "config": self.echo,
                "sections": self.sections}

    def digest(self) -> str:
        return digest_of(self.as_dict())

    def text(self) -> str:
        lines = [f"== diagramlab {self.command} ==",
                 f"report digest: {self.digest()}"]
        for name in self.sections:
            lines.append(f"\n-- {name} --")
            lines.append(json.dumps(self.sections[name], indent=2, sort_keys=True,
                                    default=str))
        if self.timings:
            lines.append("\n-- timings (not hashed) --")
            for k, v in self.timings.items():
                lines.append(f"{k}: {v:.3f}s")
        lines.append("")
        return "\n".join(lines)

    def write(self, out_dir, stem: str) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{stem}_report.json").write_text(canonical_json(self.as_dict()),
                                                 encoding="ascii")
        (out / f"{stem}_report.txt").write_text(self.text(), encoding="utf-8")
        return out / f"{stem}_report.json"


def write_csv(path, header: list[str], rows) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


# ---------------------------------------------------------------------------
# Figures
# ---------------------------------------------------------------------------

def fig_growth(rows, slope: int, path) -> None:
    """Growth of the fixed-vector lower bound against the window size."""
    ns = [r["N"] for r in rows]
    bounds = [r["bound"] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ns, bounds, marker="o")
    ax.set_xlabel("window size N")
    ax.set_ylabel("fixed-vector dimension lower bound")
    ax.set_title(f"unbounded growth, slope {slope} per window step")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def fig_orbits(orbits, path) -> None:
    """The shift-flip orbits drawn as cycles."""
    import math
    fig, ax = plt.subplots(figsize=(7, 3.5))
    x0 = 0.0
    for orbit in orbits:
        n = len(orbit)
        r = 0.7 + 0.12 * n
        cx = x0 + r
        for k, J in enumerate(orbit):
            a0 = 2 * math.pi * k / n
            a1 = 2 * math.pi * (k + 1) / n
            ax.annotate("", xy=(cx + r * math.cos(a1), r * math.sin(a1)),
                        xytext=(cx + r * math.cos(a0), r * math.sin(a0)),
                        arrowprops=dict(arrowstyle="->", color="tab:blue", lw=1.0))
            ax.text(cx + 1.18 * r * math.cos(a0), 1.18 * r * math.sin(a0),
                    repr(J) or "{}", ha="center", va="center", fontsize=9)
        x0 = cx + r + 1.2
    ax.set_aspect("equal")
    ax.axis("off")
    ax.margins(0.15)
    ax.set_title("shift-flip orbits on subsets")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)


def fig_s_values(entries, q1: int, path) -> None:
    """Heatmap of the sweep exponents over the character grid."""
    import numpy as np
    grid = np.full((q1, q1), np.nan)
    for e in entries:
        ea, ed = e["chi"]
        if e.get("unique"):
            grid[ea, ed] = e["s"]
    fig, ax = plt.subplots(figsize=(5.5, 5))
    im = ax.imshow(grid, origin="lower", cmap="viridis")
    ax.set_xlabel("second exponent")
    ax.set_ylabel("first exponent")
    ax.set_title("sweep exponent per character (diagonal excluded)")
    fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def fig_seed_stats(runs, path) -> None:
    """Facts and descent steps per certification seed."""
    idx = [r["seed_index"] for r in runs]
    facts = [r["stats"]["facts"] for r in runs]
    descents = [r["stats"]["descent_steps"] for r in runs]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    ax1.bar(idx, facts, color="tab:blue")
    ax1.set_ylabel("facts derived")
    ax2.bar(idx, descents, color="tab:orange")
    ax2.set_ylabel("descent steps")
    ax2.set_xlabel("seed index")
    covered = all(r["covered"] for r in runs)
    ax1.set_title("saturation per seed"
                  + (" (all covered)" if covered else " (coverage failures!)"))
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
