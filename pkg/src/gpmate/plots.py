"""Minimal dependency-free SVG line charts for the experiment outputs.

Three chart families per cell: unique-solution percentage over the
recorded generations (one line per approach), role counts per breeding
generation, and best fitness per role. Output is plain hand-assembled
SVG so plotting stays deterministic.
"""

import os

import numpy as np

from .harness import load_plan, rate_tag, read_run_log, run_log_path

__all__ = ["write_line_chart", "emit_plots"]

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
_WIDTH, _HEIGHT = 640, 400
_MARGIN_LEFT, _MARGIN_RIGHT, _MARGIN_TOP, _MARGIN_BOTTOM = 64, 16, 34, 44


def _fmt(value):
    return format(float(value), ".6g")


def _ticks(low, high, count=5):
    if high == low:
        high = low + 1.0
    return [low + (high - low) * i / (count - 1) for i in range(count)]


def write_line_chart(path, series, title, x_label, y_label):
    """Write one SVG chart. `series` is a list of (name, xs, ys) with
    equal-length numeric vectors; points with None y are skipped."""
    cleaned = []
    for name, xs, ys in series:
        points = [
            (float(x), float(y)) for x, y in zip(xs, ys) if y is not None
        ]
        if points:
            cleaned.append((name, points))
    if not cleaned:
        raise ValueError(f"no drawable data for chart {title!r}")
    all_x = [x for _, pts in cleaned for x, _ in pts]
    all_y = [y for _, pts in cleaned for _, y in pts]
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo, y_hi = min(all_y), max(all_y)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    plot_w = _WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = _HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM

    def sx(x):
        return _MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return _MARGIN_TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>',
    ]
    axis = (
        f'<line x1="{_MARGIN_LEFT}" y1="{_MARGIN_TOP}" x2="{_MARGIN_LEFT}" '
        f'y2="{_MARGIN_TOP + plot_h}" stroke="black"/>'
        f'<line x1="{_MARGIN_LEFT}" y1="{_MARGIN_TOP + plot_h}" '
        f'x2="{_MARGIN_LEFT + plot_w}" y2="{_MARGIN_TOP + plot_h}" stroke="black"/>'
    )
    parts.append(axis)
    for tick in _ticks(x_lo, x_hi):
        parts.append(
            f'<text x="{_fmt(sx(tick))}" y="{_MARGIN_TOP + plot_h + 18}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="10">'
            f"{_fmt(tick)}</text>"
        )
    for tick in _ticks(y_lo, y_hi):
        parts.append(
            f'<text x="{_MARGIN_LEFT - 6}" y="{_fmt(sy(tick) + 3)}" '
            f'text-anchor="end" font-family="sans-serif" font-size="10">'
            f"{_fmt(tick)}</text>"
        )
    parts.append(
        f'<text x="{_MARGIN_LEFT + plot_w / 2}" y="{_HEIGHT - 8}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="11">{x_label}</text>'
    )
    parts.append(
        f'<text x="14" y="{_MARGIN_TOP + plot_h / 2}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="11" '
        f'transform="rotate(-90 14 {_MARGIN_TOP + plot_h / 2})">{y_label}</text>'
    )
    for idx, (name, points) in enumerate(cleaned):
        color = _COLORS[idx % len(_COLORS)]
        coords = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in points)
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{coords}"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_LEFT + plot_w - 4}" '
            f'y="{_MARGIN_TOP + 14 + 14 * idx}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11" fill="{color}">{name}</text>'
        )
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
    return path


def _average_series(per_run_series):
    """Mean over runs at each index, ignoring runs with None there."""
    length = max(len(s) for s in per_run_series)
    out = []
    for i in range(length):
        values = [s[i] for s in per_run_series if i < len(s) and s[i] is not None]
        out.append(float(np.mean(values)) if values else None)
    return out


def emit_plots(out_dir, plots_dir, plan=None):
    """Charts for every complete cell of an experiment directory.

    Returns the list of written SVG paths; cells with missing runs are
    reported in the second return value and skipped.
    """
    if plan is None:
        plan = load_plan(os.path.join(out_dir, "plan.txt"))
    os.makedirs(plots_dir, exist_ok=True)
    written = []
    missing = []
    for problem, rate in plan.cells():
        logs = {}
        cell_missing = False
        for approach in plan.approaches:
            runs = []
            for r in range(plan.runs_per_cell):
                path = run_log_path(out_dir, problem, rate, approach, r)
                if not os.path.exists(path):
                    missing.append(path)
                    cell_missing = True
                    continue
                runs.append(read_run_log(path))
            logs[approach] = runs
        if cell_missing:
            continue
        tag = f"{problem}_m{rate_tag(rate)}"
        pop_size = logs[plan.approaches[0]][0]["meta"]["population_size"]

        unique_series = []
        for approach in plan.approaches:
            xs = [g["gen"] for g in logs[approach][0]["gens"] if g["unique"] is not None]
            per_run = [
                [
                    100.0 * g["unique"] / pop_size
                    for g in record["gens"]
                    if g["unique"] is not None
                ]
                for record in logs[approach]
            ]
            unique_series.append((approach, xs, _average_series(per_run)))
        written.append(
            write_line_chart(
                os.path.join(plots_dir, f"unique_{tag}.svg"),
                unique_series,
                f"Unique solutions, {problem}, mutation {rate_tag(rate)}",
                "generation",
                "unique solutions (%)",
            )
        )

        for approach in plan.approaches:
            gens = [g["gen"] for g in logs[approach][0]["gens"] if g["gen"] > 0]
            role_series = []
            mbf_series = []
            for role in ("choosers_only", "courters_only", "both"):
                per_run = [
                    [g["roles"][role] for g in record["gens"] if g["gen"] > 0]
                    for record in logs[approach]
                ]
                role_series.append((role, gens, _average_series(per_run)))
            for role in ("best_choosers", "best_courters", "best_both"):
                per_run = [
                    [g["roles"][role] for g in record["gens"] if g["gen"] > 0]
                    for record in logs[approach]
                ]
                mbf_series.append((role, gens, _average_series(per_run)))
            written.append(
                write_line_chart(
                    os.path.join(plots_dir, f"roles_{tag}_{approach}.svg"),
                    role_series,
                    f"Role counts, {problem}, mutation {rate_tag(rate)}, {approach}",
                    "generation",
                    "individuals",
                )
            )
            written.append(
                write_line_chart(
                    os.path.join(plots_dir, f"role_mbf_{tag}_{approach}.svg"),
                    mbf_series,
                    f"Best fitness by role, {problem}, "
                    f"mutation {rate_tag(rate)}, {approach}",
                    "generation",
                    "best MSE in role",
                )
            )
    return written, missing
