import pytest

from haptickit.model import DeviceGeometry
from haptickit.optimize import SweepRow, size_leg_length
from haptickit.report import follow_ups, one_liners, render_sizing, render_sweep, write_pdf

GEOM = DeviceGeometry.default()


@pytest.fixture(scope="module")
def sized():
    return size_leg_length(0.5, 1.5, GEOM)


def test_render_sizing_sections(sized):
    text = render_sizing(sized)
    assert text.startswith("# Haptic Device Sizing Report")
    assert "**Certificate:** passed" in text
    assert "## Findings" in text
    assert "## Follow-up Checklist" in text
    assert text.count("- [ ] ") >= 1
    for i in (1, 2, 3):
        assert f"Leg {i} stroke needed:" in text


def test_one_liners_quote_leg_length(sized):
    lines = one_liners(sized)
    assert lines[0].startswith("Leg length L = ")
    assert f"{sized.leg_length:.9g}" in lines[0]


def test_stroke_follow_up_tracks_template(sized):
    need_lo = sized.stroke_required[:, 0].min()
    need_hi = sized.stroke_required[:, 1].max()
    outside = need_lo < GEOM.stroke_min or need_hi > GEOM.stroke_max
    assert any("exceeds the template actuators" in item for item in follow_ups(sized)) == outside


def test_render_sweep_table():
    rows = [
        SweepRow(1.0, 1.2, 2.5, False),
        SweepRow(2.0, 2.4, 1.4, True),
        SweepRow(-1.0, float("nan"), float("nan"), False, "NonPositiveLength"),
    ]
    text = render_sweep(rows)
    assert "| 2 | 2.4 | 1.4 | yes | ok |" in text
    assert "| -1 | nan | nan | no | NonPositiveLength |" in text
    assert "Smallest passing L in the sweep: 2" in text


def test_render_sweep_without_passing_rows():
    text = render_sweep([SweepRow(1.0, 1.2, 2.5, False)])
    assert "No leg length in the sweep passes." in text


def test_write_pdf(sized):
    pdf = write_pdf(render_sizing(sized))
    assert pdf.startswith(b"%PDF")
    assert len(pdf) > 500


def test_write_pdf_pages_long_text():
    short = write_pdf("line")
    long = write_pdf("\n".join(f"line {i}" for i in range(400)))
    assert len(long) > len(short)
