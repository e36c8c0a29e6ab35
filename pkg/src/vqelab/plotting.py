"""Static SVG rendering of result CSVs.

Output is deterministic: the Agg backend, a fixed hash salt for SVG
element ids, glyphs rendered as paths, and no embedded creation date.
Re-rendering the same CSV yields byte-identical SVG.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "vqelab"
matplotlib.rcParams["svg.fonttype"] = "path"

import matplotlib.pyplot as plt  # noqa: E402 - backend must be pinned first

from .output import read_csv  # noqa: E402


def emit_plot(
    csv_path,
    x: str,
    y: str,
    out_path=None,
    log_x: bool = False,
    log_y: bool = False,
    series: str | None = None,
) -> tuple[Path, int]:
    """Render column y against column x as line plots into an SVG.

    If series names a column, one line is drawn per distinct value of
    it.  Rows with empty cells in x or y, and rows violating a log
    scale (value <= 0), are dropped; the count of dropped points is
    returned so callers can surface it in the run manifest.
    """
    csv_path = Path(csv_path)
    if out_path is None:
        out_path = csv_path.with_suffix(".svg")
    header, rows = read_csv(csv_path)
    for col in (x, y) + ((series,) if series else ()):
        if col not in header:
            raise ValueError(f"column {col!r} not in {list(header)}")
    xi, yi = header.index(x), header.index(y)
    si = header.index(series) if series else None

    dropped = 0
    groups: dict[object, tuple[list, list]] = {}
    for row in rows:
        xv, yv = row[xi], row[yi]
        if not isinstance(xv, (int, float)) or not isinstance(yv, (int, float)):
            dropped += 1
            continue
        if (log_x and xv <= 0) or (log_y and yv <= 0):
            dropped += 1
            continue
        key = row[si] if si is not None else None
        gx, gy = groups.setdefault(key, ([], []))
        gx.append(xv)
        gy.append(yv)

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    try:
        for key in sorted(groups, key=lambda k: (str(type(k)), k)):
            gx, gy = groups[key]
            label = f"{series}={key}" if si is not None else None
            ax.plot(gx, gy, marker=".", label=label)
        if log_x:
            ax.set_xscale("log")
        if log_y:
            ax.set_yscale("log")
        ax.set_xlabel(x)
        ax.set_ylabel(y)
        if si is not None and groups:
            ax.legend()
        ax.grid(True, which="both", alpha=0.3)
        fig.savefig(out_path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return Path(out_path), dropped
