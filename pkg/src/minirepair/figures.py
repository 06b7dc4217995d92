"""Figure rendering for repair runs.

Every report path can render its figures next to the delimited output:
suspiciousness profiles for a run, patch distributions per location and
kind, and per-bug bars for merged statistics.  matplotlib is imported
lazily with the Agg backend so headless runs work and library users who
never plot never pay for it.
"""

from __future__ import annotations

from collections import Counter

from minirepair.faultloc import SuspiciousStatement


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_suspiciousness_figure(ranked: list[SuspiciousStatement], path: str,
                               top: int = 25) -> str:
    """Horizontal bars of the most suspicious statements."""
    plt = _pyplot()
    shown = ranked[:top]
    labels = [f"{s.location.file_id}:{s.location.line}" for s in shown]
    scores = [s.suspiciousness for s in shown]
    height = max(2.0, 0.35 * len(shown) + 1.2)
    fig, ax = plt.subplots(figsize=(8, height))
    positions = range(len(shown))
    ax.barh(positions, scores, color="#1f77b4")
    ax.set_yticks(positions)
    ax.set_yticklabels(labels, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("suspiciousness")
    ax.set_xlim(0, 1.05)
    ax.set_title(f"suspicious statements (top {len(shown)})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_patch_figure(records: list[dict], path: str) -> str:
    """Two panels: adequate patches per location and per kind."""
    plt = _pyplot()
    by_location = Counter(f"{r['file']}:{r['line']}" for r in records)
    by_kind = Counter(r["kind"] for r in records)
    fig, (ax_loc, ax_kind) = plt.subplots(1, 2, figsize=(11, 4.5))
    for ax, counter, title in ((ax_loc, by_location, "patches per location"),
                               (ax_kind, by_kind, "patches per kind")):
        entries = counter.most_common()
        labels = [k for k, _ in entries]
        values = [v for _, v in entries]
        positions = range(len(entries))
        ax.bar(positions, values, color="#2ca02c")
        ax.set_xticks(positions)
        ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
        ax.set_ylabel("patches")
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_stats_figure(rows: list[tuple[str, int, int, int]], path: str) -> str:
    """Grouped bars per bug: patch count, distinct locations, distinct kinds."""
    plt = _pyplot()
    bugs = [row[0] for row in rows]
    series = {
        "patches": [row[1] for row in rows],
        "locations": [row[2] for row in rows],
        "kinds": [row[3] for row in rows],
    }
    width = 0.27
    fig, ax = plt.subplots(figsize=(max(6.0, 1.2 * len(bugs)), 4.5))
    for offset, (label, values) in enumerate(series.items()):
        positions = [i + (offset - 1) * width for i in range(len(bugs))]
        ax.bar(positions, values, width=width, label=label)
    ax.set_xticks(range(len(bugs)))
    ax.set_xticklabels(bugs, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("count")
    ax.set_title("per-bug repair statistics")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
