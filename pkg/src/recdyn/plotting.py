"""Diagnostic plots from report files: return-time rasters and gap stats."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .report import load_report  # noqa: E402


def _window_rows(lines: list[dict]) -> list[tuple[str, dict]]:
    rows = []
    for line in lines:
        if line.get("type") != "analysis":
            continue
        result = line.get("result", {})
        if "window" in result:
            rows.append((line["label"], result))
        elif "times" in result:
            rows.append((line["label"], {
                "window": {"horizon": max(result["times"], default=1),
                           "runs": [[t, 1] for t in result["times"]]}}))
    return rows


def _members(window: dict) -> list[int]:
    out = []
    for start, length in window.get("runs", []):
        out.extend(range(start, start + length))
    return out


def plot_report(report_path: str, out_path: str) -> None:
    """Render every windowed analysis as one raster row of membership ticks,
    with any found arithmetic progression overlaid."""
    lines = load_report(report_path)
    rows = _window_rows(lines)
    fig, ax = plt.subplots(figsize=(9, 1 + 0.6 * max(1, len(rows))))
    if not rows:
        ax.text(0.5, 0.5, "no windowed analyses in report",
                ha="center", va="center")
        ax.set_axis_off()
    else:
        labels = []
        for i, (label, result) in enumerate(rows):
            window = result["window"]
            members = _members(window)
            labels.append(label)
            if members:
                ax.eventplot([members], lineoffsets=i, linelengths=0.8,
                             colors="tab:blue")
            else:
                ax.plot([], [])
            ap = result.get("ap_overlay")
            if ap:
                start, diff, count = ap
                pts = [start + j * diff for j in range(count)]
                ax.plot(pts, [i] * len(pts), "r.", markersize=8)
            ax.set_xlim(-1, window.get("horizon", 1) + 1)
        ax.set_yticks(range(len(rows)))
        ax.set_yticklabels(labels)
        ax.set_xlabel("n")
        ax.set_title("return-time raster")
        if not any(_members(r["window"]) for _, r in rows):
            ax.legend(["empty windows"], loc="upper right")
    fig.tight_layout()
    fig.savefig(out_path, metadata={"Date": None}
                if out_path.endswith(".svg") else None)
    plt.close(fig)
