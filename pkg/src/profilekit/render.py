"""Diagram rendering: deterministic SVG and matplotlib figures.

Both backends draw each strand's projection as a closed polyline with
the under-strand broken around every crossing (gap of twice the stroke
width) and each cusp as a filled triangle pointing into the zero-angle
side of the curve.
"""
from __future__ import annotations

import numpy as np

PALETTE = ("#1f4e79", "#b63d31", "#3a7d44", "#7d3a6f", "#8a6d1a", "#20707a")


def _segment_param(a, b, point):
    d = b - a
    denom = float(np.dot(d, d))
    if denom == 0:
        return 0.0
    return float(np.dot(np.asarray(point) - a, d)) / denom


def strand_pieces(diagram, gap):
    """Per strand, polyline pieces (world xy) left after cutting a
    centered gap of length `gap` from the under segment of each
    crossing.  Pieces are merged across uncut sample joints."""
    out = []
    for si, strand in enumerate(diagram.strands):
        pts = np.asarray(strand)[:, :2]
        n = len(pts)
        cuts = [[] for _ in range(n)]
        for c in diagram.crossings:
            us, useg = c.under
            if us != si:
                continue
            a, b = pts[useg], pts[(useg + 1) % n]
            seg_len = float(np.linalg.norm(b - a))
            if seg_len == 0:
                continue
            t = _segment_param(a, b, c.point)
            half = 0.5 * gap / seg_len
            cuts[useg].append((max(0.0, t - half), min(1.0, t + half)))

        kept = []
        for i in range(n):
            ivs = sorted(cuts[i])
            pos, keep = 0.0, []
            for lo, hi in ivs:
                if lo > pos:
                    keep.append((pos, lo))
                pos = max(pos, hi)
            if pos < 1.0:
                keep.append((pos, 1.0))
            kept.append(keep)

        pieces, current = [], []
        for i in range(n):
            a, b = pts[i], pts[(i + 1) % n]
            for lo, hi in kept[i]:
                p0 = a + lo * (b - a)
                p1 = a + hi * (b - a)
                if current and lo <= 1e-9:
                    current.append(p1)
                else:
                    if current:
                        pieces.append(current)
                    current = [p0, p1]
            if not kept[i] or kept[i][-1][1] < 1.0 - 1e-9:
                if current:
                    pieces.append(current)
                    current = []
        if current:
            # closed loop with no cut at the seam: join last piece to first
            if pieces and np.allclose(current[-1], pieces[0][0]):
                pieces[0] = current[:-1] + pieces[0]
            else:
                pieces.append(current)
        out.append([np.array(p) for p in pieces])
    return out


def cusp_glyphs(diagram, size):
    """Filled-triangle outlines (world xy) for each cusp, apex pointing
    into the zero-angle side (the direction the beak opens toward)."""
    glyphs = []
    for c in diagram.cusps:
        pts = np.asarray(diagram.strands[c.strand])[:, :2]
        n = len(pts)
        p_prev, p, p_next = pts[(c.vertex - 1) % n], pts[c.vertex], pts[(c.vertex + 1) % n]
        u = p - p_prev
        w = p_next - p
        nu, nw = np.linalg.norm(u), np.linalg.norm(w)
        if nu == 0 or nw == 0:
            continue
        beak = u / nu - w / nw
        nb = np.linalg.norm(beak)
        beak = u / nu if nb < 1e-12 else beak / nb
        perp = np.array([-beak[1], beak[0]])
        glyphs.append(np.array([p + size * beak,
                                p + 0.45 * size * perp,
                                p - 0.45 * size * perp]))
    return glyphs


def _bounds(diagram):
    pts = np.vstack([np.asarray(s)[:, :2] for s in diagram.strands])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = float(max(hi - lo))
    return lo, hi, (span if span > 0 else 1.0)


def render_svg(diagram, path, size=480, stroke=2.0):
    """Write the diagram as a deterministic standalone SVG file."""
    lo, hi, span = _bounds(diagram)
    margin = 0.06 * size
    scale = (size - 2 * margin) / span

    def tx(p):
        return (margin + (p[0] - lo[0]) * scale,
                size - margin - (p[1] - lo[1]) * scale)

    gap = 2.0 * stroke / scale
    glyph = 0.028 * span
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0f}" '
        f'height="{size:.0f}" viewBox="0 0 {size:.0f} {size:.0f}">',
        f'<rect width="{size:.0f}" height="{size:.0f}" fill="white"/>',
    ]
    for si, pieces in enumerate(strand_pieces(diagram, gap)):
        color = PALETTE[si % len(PALETTE)]
        for piece in pieces:
            coords = " L ".join(f"{x:.3f} {y:.3f}" for x, y in (tx(p) for p in piece))
            lines.append(f'<path d="M {coords}" fill="none" stroke="{color}" '
                         f'stroke-width="{stroke:.2f}" stroke-linecap="round" '
                         f'stroke-linejoin="round"/>')
    for tri in cusp_glyphs(diagram, glyph):
        coords = " L ".join(f"{x:.3f} {y:.3f}" for x, y in (tx(p) for p in tri))
        lines.append(f'<path d="M {coords} Z" fill="#222222"/>')
    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def render_figure(diagram, path, dpi=150):
    """Write the diagram as a matplotlib figure (format from the file
    extension); headless-safe."""
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    lo, hi, span = _bounds(diagram)
    gap = 0.012 * span
    fig, ax = plt.subplots(figsize=(6, 6))
    for si, pieces in enumerate(strand_pieces(diagram, gap)):
        color = PALETTE[si % len(PALETTE)]
        for piece in pieces:
            ax.plot(piece[:, 0], piece[:, 1], color=color, linewidth=1.8,
                    solid_capstyle="round")
    for tri in cusp_glyphs(diagram, 0.028 * span):
        ax.fill(tri[:, 0], tri[:, 1], color="#222222")
    ax.set_aspect("equal")
    ax.set_xlim(lo[0] - 0.05 * span, hi[0] + 0.05 * span)
    ax.set_ylim(lo[1] - 0.05 * span, hi[1] + 0.05 * span)
    ax.axis("off")
    fig.savefig(path, dpi=dpi, bbox_inches="tight")
    plt.close(fig)
