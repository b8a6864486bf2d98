"""CSV tables and SVG heatmaps for sweep records."""

import csv
import io
import math
import os
import tempfile
from html import escape

from .steering import Classification
from .sweep import SweepRecord

CSV_HEADER = (
    "axis1", "axis2", "g_m1_to_m2", "g_m2_to_m1",
    "energy_imbalance", "classification", "spectral_abscissa",
)

# record attribute behind each heatmap-able CSV column
FIELDS = {
    "g_12": "g_m1_to_m2",
    "g_21": "g_m2_to_m1",
    "energy_imbalance": "energy_imbalance",
}


def fmt(x):
    if x is None:
        return ""
    return f"{x:.9g}"


def records_to_csv(records):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([
            fmt(r.x1), fmt(r.x2), fmt(r.g_12), fmt(r.g_21),
            fmt(r.energy_imbalance), r.classification.value, fmt(r.spectral_abscissa),
        ])
    return buf.getvalue()


def _num(s):
    return None if s == "" else float(s)


def csv_to_records(text):
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError("unexpected CSV header")
    out = []
    for row in rows[1:]:
        x1, x2, g12, g21, imb, cls, sa = row
        out.append(SweepRecord(
            float(x1), float(x2), _num(g12), _num(g21), _num(imb),
            Classification(cls), _num(sa),
        ))
    return out


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".steersim-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


# heatmap colours: linear ramp low -> high, unstable cells hatched grey
LOW = (255, 255, 255)
HIGH = (33, 49, 140)
UNSTABLE_FILL = "url(#unstable)"

AXIS_LABELS = {
    "delta_over_wm": "Δ/ωm",
    "g1_over_wm": "G1/ωm",
    "g2_over_wm": "G2/ωm",
    "nth_common": "n_th",
    "zeta_over_wm": "ζ/ωm",
}
FIELD_LABELS = {
    "g_12": "G m1→m2",
    "g_21": "G m2→m1",
    "energy_imbalance": "I (ħωm)",
}


def _color(t):
    t = min(max(t, 0.0), 1.0)
    r, g, b = (round(lo + t * (hi - lo)) for lo, hi in zip(LOW, HIGH))
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap_svg(records, ax1, ax2, field, title=""):
    """Render one record field over the grid: ``ax1`` horizontal, ``ax2`` vertical."""
    if field not in FIELDS:
        raise ValueError(f"field must be one of {sorted(FIELDS)}, got {field!r}")
    n1, n2 = ax1.points, ax2.points
    if len(records) != n1 * n2:
        raise ValueError(f"expected {n1 * n2} records, got {len(records)}")

    values = [getattr(r, field) for r in records]
    finite = [v for v in values if v is not None and math.isfinite(v)]
    vmin = min(finite) if finite else 0.0
    vmax = max(finite) if finite else 1.0
    span = vmax - vmin if vmax > vmin else 1.0

    left, top, plot_w, plot_h = 70, 40, 400, 300
    cw, ch = plot_w / n1, plot_h / n2
    width, height = left + plot_w + 110, top + plot_h + 60

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        "<defs>",
        '<pattern id="unstable" width="6" height="6" patternUnits="userSpaceOnUse" '
        'patternTransform="rotate(45)">'
        '<rect width="6" height="6" fill="#bdbdbd"/>'
        '<line x1="0" y1="0" x2="0" y2="6" stroke="#7a7a7a" stroke-width="2"/></pattern>',
        '<linearGradient id="ramp" x1="0" y1="1" x2="0" y2="0">'
        f'<stop offset="0" stop-color="{_color(0)}"/><stop offset="1" stop-color="{_color(1)}"/>'
        "</linearGradient>",
        "</defs>",
    ]
    if title:
        out.append(f'<text x="{left + plot_w / 2:g}" y="20" text-anchor="middle">{escape(title)}</text>')

    for idx, v in enumerate(values):
        i, j = divmod(idx, n2)
        x = left + i * cw
        y = top + plot_h - (j + 1) * ch
        if v is None or not math.isfinite(v):
            fill = UNSTABLE_FILL
        else:
            fill = _color((v - vmin) / span)
        out.append(
            f'<rect x="{x:.3f}" y="{y:.3f}" width="{cw:.3f}" height="{ch:.3f}" fill="{fill}"/>'
        )

    out.append(
        f'<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>'
    )
    # axis ticks at the ends and the middle
    for frac in (0.0, 0.5, 1.0):
        xv = ax1.start + frac * (ax1.stop - ax1.start)
        yv = ax2.start + frac * (ax2.stop - ax2.start)
        px = left + frac * plot_w
        py = top + plot_h - frac * plot_h
        out.append(f'<text x="{px:g}" y="{top + plot_h + 16}" text-anchor="middle">{xv:.4g}</text>')
        out.append(f'<text x="{left - 6}" y="{py + 4:g}" text-anchor="end">{yv:.4g}</text>')
    out.append(
        f'<text x="{left + plot_w / 2:g}" y="{top + plot_h + 40}" text-anchor="middle">'
        f"{escape(AXIS_LABELS.get(ax1.name, ax1.name))}</text>"
    )
    out.append(
        f'<text x="18" y="{top + plot_h / 2:g}" text-anchor="middle" '
        f'transform="rotate(-90 18 {top + plot_h / 2:g})">'
        f"{escape(AXIS_LABELS.get(ax2.name, ax2.name))}</text>"
    )

    # colour bar
    bx = left + plot_w + 20
    out.append(f'<rect x="{bx}" y="{top}" width="16" height="{plot_h}" fill="url(#ramp)" stroke="black"/>')
    out.append(f'<text x="{bx + 22}" y="{top + 10}">{vmax:.4g}</text>')
    out.append(f'<text x="{bx + 22}" y="{top + plot_h}">{vmin:.4g}</text>')
    out.append(
        f'<text x="{bx}" y="{top - 8}">{escape(FIELD_LABELS[field])}</text>'
    )
    out.append(
        f'<rect x="{bx}" y="{top + plot_h + 20}" width="16" height="12" fill="{UNSTABLE_FILL}" stroke="black"/>'
        f'<text x="{bx + 22}" y="{top + plot_h + 30}">unstable</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
