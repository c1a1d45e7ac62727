"""Tests for summary-chart rendering."""

from __future__ import annotations

import pytest

from plotsuite import PlotSpec, SchemaError, SUMMARY_COLUMNS, build_figure, render
from plotsuite.cli import main

HEADER = ",".join(SUMMARY_COLUMNS)


def summary_csv(tmp_path, scenario: str, name: str = "summary.csv") -> str:
    rows = [HEADER]
    for detector in ("cusum-w", "cusum-lambda", "s-cusum", "j-cusum"):
        for i, b in enumerate((1.5, 2.0, 2.5, 3.0, 3.5, 4.0)):
            rl = (10 + 40 * i) if detector.startswith("cusum") else (20 + 120 * i)
            rows.append(
                f"{scenario},{detector},{b},{5 + 9 * i},{1.5},{rl},{2},{rl * 1.2:.4g},{2},{rl},{0},{1},{60}"
            )
    path = tmp_path / name
    path.write_text("\n".join(rows) + "\n")
    return str(path)


def bounds_csv(tmp_path) -> str:
    lines = ["gamma,universal_lower,s_upper,j_upper"]
    lines += [f"{g},{g / 4},{g / 2},{g / 2}" for g in (10, 30, 100, 300)]
    path = tmp_path / "bounds.csv"
    path.write_text("\n".join(lines) + "\n")
    return str(path)


class TestBuildFigure:
    def test_one_subplot_per_scenario_with_log_x(self, tmp_path) -> None:
        paths = tuple(summary_csv(tmp_path, s, f"s{s}.csv") for s in ("1", "2", "3"))
        fig = build_figure(PlotSpec(summaries=paths, out=str(tmp_path / "o.svg")))
        assert len(fig.axes) == 3
        for ax in fig.axes:
            assert ax.get_xscale() == "log"
            assert ax.get_yscale() == "linear"
            labels = [text.get_text() for text in ax.get_legend().get_texts()]
            assert set(labels) >= {"cusum-w", "cusum-lambda", "s-cusum", "j-cusum"}

    def test_four_lines_of_six_points(self, tmp_path) -> None:
        path = summary_csv(tmp_path, "3")
        fig = build_figure(PlotSpec(summaries=(path,), out=str(tmp_path / "o.svg")))
        (ax,) = fig.axes
        assert len(ax.containers) == 4  # one errorbar container per detector
        assert all(len(container[0].get_xdata()) == 6 for container in ax.containers)

    def test_overlay_draws_bound_curves(self, tmp_path) -> None:
        spec = PlotSpec(
            summaries=(summary_csv(tmp_path, "3"),),
            out=str(tmp_path / "o.svg"),
            overlay_bounds=bounds_csv(tmp_path),
        )
        fig = build_figure(spec)
        labels = [text.get_text() for text in fig.axes[0].get_legend().get_texts()]
        assert any("lower bound" in label for label in labels)
        assert any("upper bound" in label for label in labels)


class TestRender:
    def test_writes_svg(self, tmp_path) -> None:
        out = tmp_path / "chart.svg"
        spec = PlotSpec(summaries=(summary_csv(tmp_path, "1"),), out=str(out))
        assert render(spec) == str(out)
        assert out.read_bytes().lstrip().startswith(b"<?xml")

    def test_deterministic_output(self, tmp_path) -> None:
        path = summary_csv(tmp_path, "2")
        outs = []
        for name in ("a.svg", "b.svg"):
            out = tmp_path / name
            render(PlotSpec(summaries=(path,), out=str(out)))
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_png_format(self, tmp_path) -> None:
        out = tmp_path / "chart.png"
        render(PlotSpec(summaries=(summary_csv(tmp_path, "1"),), out=str(out), image_format="png"))
        assert out.read_bytes().startswith(b"\x89PNG")


class TestSchemaValidation:
    def test_missing_and_extra_columns_reported(self, tmp_path) -> None:
        path = tmp_path / "bad.csv"
        header = HEADER.replace("min_rl", "minimum_rl")
        path.write_text(header + "\n")
        with pytest.raises(SchemaError) as err:
            build_figure(PlotSpec(summaries=(str(path),), out="o.svg"))
        assert "missing: min_rl" in str(err.value)
        assert "unexpected: minimum_rl" in str(err.value)

    def test_reordered_columns_rejected(self, tmp_path) -> None:
        cols = list(SUMMARY_COLUMNS)
        cols[0], cols[1] = cols[1], cols[0]
        path = tmp_path / "reordered.csv"
        path.write_text(",".join(cols) + "\n")
        with pytest.raises(SchemaError, match="order differs"):
            build_figure(PlotSpec(summaries=(str(path),), out="o.svg"))

    def test_empty_file_rejected_without_output(self, tmp_path) -> None:
        path = tmp_path / "empty.csv"
        path.write_text(HEADER + "\n")
        out = tmp_path / "never.svg"
        with pytest.raises(ValueError, match="no data rows"):
            render(PlotSpec(summaries=(str(path),), out=str(out)))
        assert not out.exists()


class TestCli:
    def test_render_via_cli(self, tmp_path, capsys) -> None:
        path = summary_csv(tmp_path, "1")
        out = tmp_path / "cli.svg"
        assert main(["--summary", path, "--out", str(out)]) == 0
        assert out.exists()
        assert capsys.readouterr().out.strip() == str(out)

    def test_default_out_derives_from_summary_path(self, tmp_path) -> None:
        path = summary_csv(tmp_path, "1")
        assert main(["--summary", path]) == 0
        assert (tmp_path / "summary.svg").exists()

    def test_schema_mismatch_exit_2_with_diff(self, tmp_path, capsys) -> None:
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        assert main(["--summary", str(path), "--out", str(tmp_path / "o.svg")]) == 2
        err = capsys.readouterr().err
        assert "missing:" in err and "unexpected:" in err

    def test_unwritable_out_exit_3(self, tmp_path) -> None:
        path = summary_csv(tmp_path, "1")
        assert main(["--summary", path, "--out", "/nonexistent/dir/o.svg"]) == 3
