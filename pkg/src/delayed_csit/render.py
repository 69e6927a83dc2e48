"""Self-contained SVG drawing of a region bundle."""

from __future__ import annotations

from xml.sax.saxutils import escape

from .regions import RegionBundle

WIDTH, HEIGHT, MARGIN = 520, 520, 60

LAYERS = (
    # (attribute, legend text, fill, stroke)
    ("perfect_csit", "perfect CSIT", "#f2f2f2", "#999999"),
    ("outer", "outer bound", "#fde0c5", "#e07b00"),
    ("achievable", "achievable (delayed local CSIT)", "#c6dbef", "#2171b5"),
    ("no_csit", "no CSIT", "#c7e9c0", "#238b45"),
)


def region_svg(bundle: RegionBundle) -> str:
    """Nested polygons with axes, corner labels and a legend."""
    m1, m2, n1, n2 = bundle.cfg.counts
    scale_max = max(n1 + n2, m1, m2)
    span = WIDTH - 2 * MARGIN

    def xy(p):
        x = MARGIN + float(p[0]) / scale_max * span
        y = HEIGHT - MARGIN - float(p[1]) / scale_max * span
        return f"{x:.2f},{y:.2f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" style="fill:#ffffff"/>',
    ]
    for attr, _, fill, stroke in LAYERS:
        poly = getattr(bundle, attr)
        pts = " ".join(xy(v) for v in poly.vertices)
        out.append(
            f'<polygon points="{pts}" style="fill:{fill};fill-opacity:0.8;stroke:{stroke};stroke-width:2"/>'
        )
    x0, y0 = MARGIN, HEIGHT - MARGIN
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{WIDTH - MARGIN + 10}" y2="{y0}" style="stroke:#000"/>')
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{MARGIN - 10}" style="stroke:#000"/>')
    for k in range(scale_max + 1):
        px = MARGIN + k / scale_max * span
        py = HEIGHT - MARGIN - k / scale_max * span
        out.append(f'<text x="{px:.2f}" y="{y0 + 16}" style="font:11px sans-serif;text-anchor:middle">{k}</text>')
        out.append(f'<text x="{x0 - 8}" y="{py + 4:.2f}" style="font:11px sans-serif;text-anchor:end">{k}</text>')
    out.append(f'<text x="{WIDTH - MARGIN}" y="{y0 + 34}" style="font:13px sans-serif">d1</text>')
    out.append(f'<text x="{x0 - 40}" y="{MARGIN - 16}" style="font:13px sans-serif">d2</text>')
    for label, p in bundle.corner_points:
        x, y = (float(v) for v in xy(p).split(","))
        text = escape(f"{label} ({p.d1}, {p.d2})")
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" style="fill:#08306b"/>')
        out.append(f'<text x="{x + 5:.2f}" y="{y - 5:.2f}" style="font:10px sans-serif">{text}</text>')
    title = escape(
        f"M1={m1} M2={m2} N1={n1} N2={n2}  class {bundle.cls}  " + ("tight" if bundle.tight else "not tight")
    )
    out.append(f'<text x="{MARGIN}" y="24" style="font:14px sans-serif">{title}</text>')
    ly = 44
    for _, text, fill, stroke in LAYERS:
        lx = WIDTH - MARGIN - 200
        out.append(f'<rect x="{lx}" y="{ly - 9}" width="12" height="12" style="fill:{fill};stroke:{stroke}"/>')
        out.append(f'<text x="{lx + 18}" y="{ly + 1}" style="font:11px sans-serif">{escape(text)}</text>')
        ly += 16
    out.append("</svg>")
    return "\n".join(out) + "\n"
