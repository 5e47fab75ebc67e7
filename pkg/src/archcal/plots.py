"""Deterministic SVG line plots of the simulation CSVs (no plotting backend needed)."""

from pathlib import Path

from .sim import read_csv

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 150, 40, 50
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"]

SUMMARY_METRICS = ("mean_alpha_loc", "sd_alpha_loc", "mean_power", "fwer", "mean_abs_dist")


def _num(v):
    return f"{v:.6g}"


def _ticks(lo, hi, n=5):
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def _span(values):
    lo, hi = min(values), max(values)
    if hi == lo:
        pad = abs(lo) * 0.5 or 1.0
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def line_plot(series, title, xlabel, ylabel):
    """SVG text for ``series = [(label, [(x, y), ...]), ...]``.

    Series with a single point are drawn as a marker only.
    """
    xs = [x for _, pts in series for x, _ in pts] or [0.0, 1.0]
    ys = [y for _, pts in series for _, y in pts] or [0.0, 1.0]
    x0, x1 = _span(xs)
    y0, y1 = _span(ys)
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return TOP + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{LEFT + pw / 2:.2f}" y="22" text-anchor="middle" font-size="14">{title}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        px = sx(t)
        out.append(f'<line x1="{px:.2f}" y1="{TOP + ph}" x2="{px:.2f}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{TOP + ph + 18}" text-anchor="middle">{_num(t)}</text>')
    for t in _ticks(y0, y1):
        py = sy(t)
        out.append(f'<line x1="{LEFT - 5}" y1="{py:.2f}" x2="{LEFT}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{py + 4:.2f}" text-anchor="end">{_num(t)}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.2f}" y="{HEIGHT - 10}" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="16" y="{TOP + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {TOP + ph / 2:.2f})">{ylabel}</text>')
    for i, (label, pts) in enumerate(series):
        color = COLORS[i % len(COLORS)]
        pts = sorted(pts)
        if len(pts) == 1:
            x, y = pts[0]
            out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="4" fill="{color}"/>')
        elif pts:
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
            out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = TOP + 16 * (i + 1)
        out.append(f'<line x1="{WIDTH - RIGHT + 12}" y1="{ly - 4}" x2="{WIDTH - RIGHT + 32}" '
                   f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{WIDTH - RIGHT + 38}" y="{ly}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _float(row, key, path):
    try:
        return float(row[key]) if row[key] != "" else 0.0
    except (KeyError, TypeError, ValueError):
        raise ValueError(f"{path}: malformed value in column {key!r}") from None


def _group(rows, key):
    groups = {}
    for row in rows:
        groups.setdefault(row[key], []).append(row)
    return groups


def emit_plots(csv_path, out_dir=None):
    """Write SVG plots for a summary or sim-1 pointwise CSV; returns the paths.

    Summary CSVs give one plot per metric (x = swept parameter, one polyline
    per method); pointwise CSVs give one diagonal plot per swept value.
    """
    csv_path = Path(csv_path)
    out_dir = Path(out_dir) if out_dir is not None else csv_path.parent
    try:
        rows = read_csv(csv_path)
        with open(csv_path, encoding="utf-8") as fh:
            header = next((ln for ln in fh if not ln.startswith("#")), "")
    except (OSError, UnicodeDecodeError) as exc:
        raise ValueError(f"{csv_path}: cannot read ({exc})") from None
    columns = set(header.strip().split(","))
    if not {"param", "value", "method"} <= columns:
        raise ValueError(f"{csv_path}: missing param/value/method columns")
    if any(None in row or None in row.values() for row in rows):
        raise ValueError(f"{csv_path}: ragged rows")
    stem = csv_path.stem
    written = []
    if "u" in columns:
        for value, group in _group(rows, "value").items():
            series = []
            by_method = _group(group, "method")
            first = next(iter(by_method.values()))
            series.append(("true", [(_float(r, "u", csv_path), _float(r, "true", csv_path)) for r in first]))
            for method, rs in by_method.items():
                series.append((method, [(_float(r, "u", csv_path), _float(r, "mean_copula", csv_path)) for r in rs]))
            param = group[0]["param"]
            suffix = "" if param == "none" else f"_{param}-{value}"
            title = "mean diagonal" + ("" if param == "none" else f" ({param} = {value})")
            path = out_dir / f"{stem}{suffix}.svg"
            path.write_text(line_plot(series, title, "u", "C(u, ..., u)"), encoding="utf-8")
            written.append(path)
        return written
    metrics = [k for k in SUMMARY_METRICS if k in columns]
    if not metrics:
        raise ValueError(f"{csv_path}: no plottable metric columns")
    param = rows[0]["param"] if rows else "none"
    for metric in metrics:
        series = []
        for method, rs in _group(rows, "method").items():
            series.append((method, [(_float(r, "value", csv_path), _float(r, metric, csv_path)) for r in rs]))
        path = out_dir / f"{stem}_{metric}.svg"
        xlabel = param if param != "none" else "(no sweep)"
        path.write_text(line_plot(series, metric, xlabel, metric), encoding="utf-8")
        written.append(path)
    return written
