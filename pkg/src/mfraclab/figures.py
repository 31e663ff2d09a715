"""Figure rendering for suite reports: refinement trends and verdict tallies.

Figures are written next to the delimited report files.  The Agg backend is
forced so runs are headless-safe, and metadata that would vary between runs
is stripped to keep outputs reproducible.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_SAVE_KW = dict(dpi=130, metadata={"Software": None})


def render_refinement(outcomes, path: str):
    """Empirical constant per check across grid sizes (log-log trend lines)."""
    fig, ax = plt.subplots(figsize=(8.0, 5.0))
    plotted = False
    for oc in outcomes:
        for part, by_grid in sorted(oc.c_by_grid.items()):
            ns = sorted(by_grid)
            cs = [by_grid[n] for n in ns]
            if len(ns) < 1 or all(c == 0 for c in cs):
                continue
            label = oc.check_id.replace("check_", "")
            if part != "main":
                label += f":{part}"
            ax.plot(ns, cs, marker="o", lw=1.2, ms=4, label=label)
            plotted = True
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_xlabel("grid cells per side")
    ax.set_ylabel("empirical constant")
    ax.set_title("Empirical constants under grid refinement")
    ax.grid(True, which="both", alpha=0.3)
    if plotted:
        ax.legend(fontsize=6, ncol=2, loc="best")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def render_verdicts(outcomes, path: str):
    """Bar tally of verdict classes over the executed checks."""
    tally: dict = {}
    for oc in outcomes:
        key = oc.verdict.split("(")[0]
        tally[key] = tally.get(key, 0) + 1
    order = ["EXACT-PASS", "STABLE-PASS", "SKIPPED", "FAIL"]
    labels = [k for k in order if k in tally] + [k for k in sorted(tally) if k not in order]
    counts = [tally[k] for k in labels]
    colors = {"EXACT-PASS": "#2a7e43", "STABLE-PASS": "#4d8fd1",
              "SKIPPED": "#c9a227", "FAIL": "#b23a3a"}
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.bar(labels, counts, color=[colors.get(k, "#888") for k in labels])
    for i, c in enumerate(counts):
        ax.text(i, c + 0.05, str(c), ha="center", va="bottom", fontsize=9)
    ax.set_ylabel("checks")
    ax.set_title("Verdicts")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
