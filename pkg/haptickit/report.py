# haptickit/report.py
from __future__ import annotations

import math
from io import BytesIO
from typing import List, Sequence

from reportlab.lib.pagesizes import letter
from reportlab.pdfgen import canvas

from .optimize import SizingReport, SweepRow
from .utils import fmt, fmt_row, to_degrees

HEADER = """\
# Haptic Device Sizing Report

Leg length and stroke sizing for the orthogonal translational stage. A design
passes when a cube of the target edge fits the workspace with every velocity
amplification factor inside [1/psi, psi].
"""

SWEEP_HEADER = """\
# Leg Length Sweep

Each row sizes the largest reachable cube and checks the target cube against
the amplification bound at one leg length.
"""

# Follow-ups are raised when a margin falls under this fraction of its limit.
TIGHT_MARGIN = 0.05


# --- Findings -----------------------------------------------------------------
def one_liners(report: SizingReport) -> List[str]:
    d = report.dexterity
    lines = [
        f"Leg length L = {fmt(report.leg_length)} m for a cube of edge {fmt(report.target_edge)} m.",
        f"Cube centre at ({fmt_row(report.center, ', ')}) m.",
        f"Amplification factors over the cube: sigma in [{fmt(d.sigma_min)}, {fmt(d.sigma_max)}], "
        f"worst kappa {fmt(d.kappa)} (bound psi = {fmt(report.psi)}).",
    ]
    for i, (lo, hi) in enumerate(report.stroke_required, start=1):
        lines.append(f"Leg {i} stroke needed: [{fmt(lo)}, {fmt(hi)}] m.")
    g = report.geometry
    lines.append(
        f"Sized geometry: stroke [{fmt(g.stroke_min)}, {fmt(g.stroke_max)}] m, "
        f"parallelogram half-cone {fmt(to_degrees(g.parallelogram_half_cone))} deg."
    )
    return lines


def follow_ups(report: SizingReport) -> List[str]:
    items: List[str] = []
    if not report.passes_at_L:
        items.append("The returned L does not pass its own check; rerun with a finer lattice.")
    if not report.fails_below:
        items.append(
            f"L x (1 - 10 tol) still passes; the minimum is not certified at tol = {fmt(report.tolerance)}."
        )
    d = report.dexterity
    if d.sigma_min - 1.0 / report.psi < TIGHT_MARGIN / report.psi:
        items.append("Smallest amplification factor sits on the 1/psi bound; add margin to L for stiffness.")
    if report.psi - d.sigma_max < TIGHT_MARGIN * report.psi:
        items.append("Largest amplification factor sits on the psi bound; check motor speed headroom.")
    t = report.template
    need_lo = float(report.stroke_required[:, 0].min())
    need_hi = float(report.stroke_required[:, 1].max())
    if need_lo < t.stroke_min or need_hi > t.stroke_max:
        items.append(
            f"Required stroke [{fmt(need_lo)}, {fmt(need_hi)}] m exceeds the template actuators "
            f"[{fmt(t.stroke_min)}, {fmt(t.stroke_max)}] m; pick longer slides."
        )
    else:
        span = t.stroke_max - t.stroke_min
        if math.isfinite(span) and min(need_lo - t.stroke_min, t.stroke_max - need_hi) < TIGHT_MARGIN * span:
            items.append("Required stroke touches an actuator limit; leave travel for homing and end stops.")
    return items


# --- Render -------------------------------------------------------------------
def render_sizing(report: SizingReport) -> str:
    body = [HEADER, f"\n**Certificate:** {'passed' if report.certified else 'NOT passed'} "
                    f"(pass at L: {report.passes_at_L}, fail below: {report.fails_below})\n"]
    body.append("\n## Findings\n")
    for line in one_liners(report):
        body.append(f"- {line}")
    body.append("\n## Follow-up Checklist\n")
    items = follow_ups(report) or ["No follow-up needed."]
    for item in items:
        body.append(f"- [ ] {item}")
    return "\n".join(body) + "\n"


def render_sweep(rows: Sequence[SweepRow]) -> str:
    body = [SWEEP_HEADER, "", "| L | achieved edge | worst kappa | passed | status |", "|---|---|---|---|---|"]
    for r in rows:
        body.append(
            f"| {fmt(r.leg_length)} | {fmt(r.achieved_edge)} | {fmt(r.worst_kappa)} | "
            f"{'yes' if r.passed else 'no'} | {r.status} |"
        )
    passing = [r.leg_length for r in rows if r.passed]
    body.append("")
    if passing:
        body.append(f"Smallest passing L in the sweep: {fmt(min(passing))}")
    else:
        body.append("No leg length in the sweep passes.")
    return "\n".join(body) + "\n"


def write_pdf(text: str, title: str = "Haptic Device Sizing Report") -> bytes:
    """Plain-text PDF of a rendered report, one line per Markdown line."""
    buffer = BytesIO()
    c = canvas.Canvas(buffer, pagesize=letter)
    c.setTitle(title)
    top = 750
    t = c.beginText(40, top)
    t.setFont("Helvetica", 11)
    for line in text.splitlines():
        if t.getY() < 50:
            c.drawText(t)
            c.showPage()
            t = c.beginText(40, top)
            t.setFont("Helvetica", 11)
        t.textLine(line)
    c.drawText(t)
    c.showPage()
    c.save()
    return buffer.getvalue()
