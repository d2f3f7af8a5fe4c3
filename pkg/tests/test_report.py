import pytest

from catkappa.errors import MissingSeries
from catkappa.iterate import IterationTrace
from catkappa.model_space import ModelSpace
from catkappa.report import (
    emit_plot_data,
    render_figures,
    trace_series,
    write_summary,
    write_trace_csv,
)

E2 = ModelSpace(0.0, 2)


def make_trace():
    pts = [E2.point([1.0 / (i + 1), 0.0]) for i in range(5)]
    trace = IterationTrace(
        "picard", pts, [0.5, 0.25, 0.125, 0.0625, 0.03125],
        metadata={"space": E2},
    )
    trace.extra_series["dist_to_p"] = [1.0 / (i + 1) for i in range(5)]
    return trace


class TestTraceCsv:
    def test_schema(self, tmp_path):
        path = tmp_path / "trace.csv"
        write_trace_csv(make_trace(), str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "n,x0,x1,residual,d_to_p"
        assert len(lines) == 6
        assert lines[1].startswith("0,1.0,0.0,0.5,1.0")

    def test_byte_deterministic(self, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_trace_csv(make_trace(), str(p1))
        write_trace_csv(make_trace(), str(p2))
        assert p1.read_bytes() == p2.read_bytes()

    def test_d_to_p_blank_without_series(self, tmp_path):
        trace = make_trace()
        trace.extra_series.clear()
        path = tmp_path / "trace.csv"
        write_trace_csv(trace, str(path))
        assert path.read_text().splitlines()[1].endswith(",")


class TestSeries:
    def test_missing_series_raises(self):
        trace = make_trace()
        trace.extra_series.clear()
        with pytest.raises(MissingSeries):
            trace_series(trace, "center_agreement")

    def test_unknown_plot_kind(self, tmp_path):
        with pytest.raises(MissingSeries):
            emit_plot_data(make_trace(), "zigzag", str(tmp_path / "z.csv"))

    def test_plot_data_schema(self, tmp_path):
        path = tmp_path / "residual.csv"
        emit_plot_data(make_trace(), "residual", str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "n,value"
        assert lines[1] == "0,0.5"


class TestSummaryAndFigures:
    def test_summary_flattens_nested_keys(self, tmp_path):
        path = tmp_path / "summary.txt"
        write_summary(str(path), {"a": 1, "b": {"c": 2.5, "d": {"e": "x"}}})
        text = path.read_text()
        assert "a = 1" in text
        assert "b.c = 2.5" in text
        assert "b.d.e = x" in text

    def test_render_skips_missing_series(self, tmp_path):
        trace = make_trace()
        trace.extra_series.clear()
        paths = render_figures(
            trace, str(tmp_path), ["residual", "center_agreement"]
        )
        assert len(paths) == 1
        assert paths[0].endswith("residual.png")
