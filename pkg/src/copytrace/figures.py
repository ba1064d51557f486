"""Report figures: a dependency-free SVG polyline chart of the reuse-ratio
trend, plus matplotlib renderings of the quarterly series saved as PNG."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_WIDTH, _HEIGHT = 800, 400
_MARGIN = 50


def write_trend_svg(series: list[tuple[str, int, int, float]], path: str | Path) -> None:
    """Write the reuse-ratio trend as a single-polyline SVG.

    series rows are (quarter, created, reused, ratio) in quarter order.
    """
    inner_w = _WIDTH - 2 * _MARGIN
    inner_h = _HEIGHT - 2 * _MARGIN
    ratios = [row[3] for row in series]
    top = max(ratios + [0.0]) or 1.0
    points = []
    for i, ratio in enumerate(ratios):
        x = _MARGIN + (inner_w * i / max(1, len(ratios) - 1))
        y = _HEIGHT - _MARGIN - inner_h * (ratio / top)
        points.append(f"{x:.2f},{y:.2f}")
    labels = []
    if series:
        step = max(1, len(series) // 8)
        for i in range(0, len(series), step):
            x = _MARGIN + (inner_w * i / max(1, len(series) - 1))
            labels.append(
                f'  <text x="{x:.2f}" y="{_HEIGHT - _MARGIN + 18}" font-size="10" '
                f'text-anchor="middle">{series[i][0]}</text>'
            )
    body = "\n".join(
        [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
            f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
            f'  <rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
            f'  <line x1="{_MARGIN}" y1="{_HEIGHT - _MARGIN}" x2="{_WIDTH - _MARGIN}" '
            f'y2="{_HEIGHT - _MARGIN}" stroke="black"/>',
            f'  <line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" '
            f'y2="{_HEIGHT - _MARGIN}" stroke="black"/>',
            f'  <text x="{_MARGIN - 8}" y="{_MARGIN + 4}" font-size="10" '
            f'text-anchor="end">{top:.3f}</text>',
            f'  <text x="{_MARGIN - 8}" y="{_HEIGHT - _MARGIN + 4}" font-size="10" '
            'text-anchor="end">0</text>',
            f'  <text x="{_WIDTH / 2:.0f}" y="20" font-size="14" text-anchor="middle">'
            "Reused to created blobs ratio by quarter</text>",
            *labels,
            '  <polyline fill="none" stroke="#1f77b4" stroke-width="2" points="'
            + " ".join(points)
            + '"/>',
            "</svg>",
            "",
        ]
    )
    Path(path).write_text(body)


def render_trend_figures(series: list[tuple[str, int, int, float]], out_dir: str | Path) -> list[Path]:
    """Save matplotlib PNGs of the quarterly counts and the reuse ratio."""
    out = Path(out_dir)
    quarters = [row[0] for row in series]
    created = [row[1] for row in series]
    reused = [row[2] for row in series]
    ratios = [row[3] for row in series]
    ticks = list(range(0, len(quarters), max(1, len(quarters) // 8)))

    paths = []
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(range(len(quarters)), created, label="created", color="#1f77b4")
    ax.plot(range(len(quarters)), reused, label="reused", color="#d62728")
    ax.set_xticks(ticks, [quarters[i] for i in ticks], rotation=45, fontsize=8)
    ax.set_ylabel("blobs per quarter")
    ax.legend()
    fig.tight_layout()
    target = out / "trends.png"
    fig.savefig(target, dpi=110)
    plt.close(fig)
    paths.append(target)

    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(range(len(quarters)), ratios, color="#2ca02c")
    ax.set_xticks(ticks, [quarters[i] for i in ticks], rotation=45, fontsize=8)
    ax.set_ylabel("reused / created")
    ax.set_ylim(bottom=0)
    fig.tight_layout()
    target = out / "ratio.png"
    fig.savefig(target, dpi=110)
    plt.close(fig)
    paths.append(target)
    return paths
