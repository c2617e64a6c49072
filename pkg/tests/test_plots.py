import pytest

from gpmate.plots import write_line_chart


def test_write_line_chart_basic(tmp_path):
    path = tmp_path / "chart.svg"
    out = write_line_chart(
        str(path),
        [("a", [0, 1, 2], [1.0, 4.0, 2.0]), ("b", [0, 1, 2], [2.0, 2.5, 3.0])],
        "demo",
        "x",
        "y",
    )
    text = path.read_text()
    assert out == str(path)
    assert text.startswith("<svg")
    assert text.count("<polyline") == 2
    assert "demo" in text


def test_write_line_chart_skips_none_points(tmp_path):
    path = tmp_path / "gaps.svg"
    write_line_chart(
        str(path),
        [("only", [0, 1, 2, 3], [None, 1.0, None, 2.0])],
        "gaps",
        "x",
        "y",
    )
    assert path.read_text().count("<polyline") == 1


def test_write_line_chart_flat_series_does_not_divide_by_zero(tmp_path):
    path = tmp_path / "flat.svg"
    write_line_chart(str(path), [("flat", [0, 1], [5.0, 5.0])], "flat", "x", "y")
    assert "<polyline" in path.read_text()


def test_write_line_chart_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        write_line_chart(
            str(tmp_path / "x.svg"), [("none", [0, 1], [None, None])], "t", "x", "y"
        )
