"""Golden-fixture rendering, data-extraction self-test, schema rejection."""

import matplotlib.colors as mcolors
import pytest

from qeplots import FigureSpec, extract_line_series, render, render_figure
from qeplots.cli import main as cli_main
from qeplots.csvio import SchemaError, read_table


class TestRenderAllKinds:
    def test_prob_steps(self, tmp_path, results_csv):
        out = tmp_path / "prob.png"
        spec = FigureSpec("prob-steps", (str(results_csv),), str(out))
        assert render(spec) == out
        assert out.stat().st_size > 0

    def test_effort_steps(self, tmp_path, results_csv, fits_csv):
        out = tmp_path / "effort.png"
        spec = FigureSpec("effort-steps", (str(results_csv), str(fits_csv)), str(out))
        render(spec)
        assert out.exists()

    def test_effort_scaling(self, tmp_path, scaling_csv):
        out = tmp_path / "scaling.png"
        render(FigureSpec("effort-scaling", (str(scaling_csv),), str(out)))
        assert out.exists()

    def test_steps_scaling(self, tmp_path, scaling_csv):
        out = tmp_path / "steps.png"
        render(FigureSpec("steps-scaling", (str(scaling_csv),), str(out)))
        assert out.exists()

    def test_gap_temperature(self, tmp_path, gaps_csv):
        out = tmp_path / "gaps.png"
        render(FigureSpec("gap-temperature", (str(gaps_csv),), str(out)))
        assert out.exists()


class TestDataExtraction:
    """The renderer draws CSV values verbatim - no statistics of its own."""

    def test_prob_series_match_fixture_columns(self, results_csv, tmp_path):
        fig = render_figure(
            FigureSpec("prob-steps", (str(results_csv),), str(tmp_path / "x.png"))
        )
        series = extract_line_series(fig)
        _, _, rows = read_table(results_csv)
        for method in ("sa", "qesa"):
            expected = [
                (float(r["length"]), float(r["p_s"]))
                for r in rows
                if r["method"] == method
            ]
            xs, ys = series[f"{method} n=10"]
            assert list(zip(xs, ys)) == sorted(expected)

    def test_effort_series_and_marker_match_fixtures(
        self, results_csv, fits_csv, tmp_path
    ):
        fig = render_figure(
            FigureSpec(
                "effort-steps",
                (str(results_csv), str(fits_csv)),
                str(tmp_path / "x.png"),
            )
        )
        series = extract_line_series(fig)
        _, _, rows = read_table(results_csv)
        for method in ("sa", "qesa"):
            expected = [
                (float(r["length"]), float(r["effort"]))
                for r in rows
                if r["method"] == method
            ]
            xs, ys = series[f"{method} n=10"]
            assert list(zip(xs, ys)) == sorted(expected)
        # the optimal-length markers sit exactly at the persisted vertices
        _, _, fits = read_table(fits_csv)
        for fit in fits:
            xs, _ = series[f"lstar:{fit['method']} n={fit['n']}"]
            assert set(xs) == {float(fit["l_star"])}

    def test_fit_curve_uses_persisted_coefficients(
        self, results_csv, fits_csv, tmp_path
    ):
        import math

        fig = render_figure(
            FigureSpec(
                "effort-steps",
                (str(results_csv), str(fits_csv)),
                str(tmp_path / "x.png"),
            )
        )
        series = extract_line_series(fig)
        _, _, fits = read_table(fits_csv)
        fit = next(f for f in fits if f["method"] == "sa")
        a, b, c = (float(fit[k]) for k in ("fit_a", "fit_b", "fit_c"))
        xs, ys = series["fit:sa n=10"]
        for x, y in zip(xs[:20], ys[:20]):
            assert y == pytest.approx(a * math.log(x) ** 2 + b * math.log(x) + c)

    def test_scaling_series_match_columns(self, scaling_csv, tmp_path):
        fig = render_figure(
            FigureSpec("effort-scaling", (str(scaling_csv),), str(tmp_path / "x.png"))
        )
        series = extract_line_series(fig)
        _, _, rows = read_table(scaling_csv)
        for m_q in range(5):
            method = "pt" if m_q == 0 else "qept"
            expected = [
                (float(r["n"]), float(r["effort"]))
                for r in rows
                if int(r["m_q"]) == m_q
            ]
            xs, ys = series[f"{method} m_q={m_q}"]
            assert list(zip(xs, ys)) == sorted(expected)

    def test_gap_series_match_columns(self, gaps_csv, tmp_path):
        fig = render_figure(
            FigureSpec("gap-temperature", (str(gaps_csv),), str(tmp_path / "x.png"))
        )
        series = extract_line_series(fig)
        _, _, rows = read_table(gaps_csv)
        for kernel in ("local", "quantum"):
            expected = sorted(
                (float(r["temperature"]), float(r["delta_mean"]))
                for r in rows
                if r["kernel"] == kernel
            )
            xs, ys = series[f"{kernel} n=6"]
            assert list(zip(xs, ys)) == expected


class TestStyling:
    def test_mq_gradient_is_monotone_green_to_blue(self, scaling_csv, tmp_path):
        fig = render_figure(
            FigureSpec("effort-scaling", (str(scaling_csv),), str(tmp_path / "x.png"))
        )
        by_label = {}
        for ax in fig.axes:
            for line in ax.get_lines():
                if not line.get_label().startswith("_"):
                    by_label[line.get_label()] = mcolors.to_rgb(line.get_color())
        assert len(by_label) == 5
        blues = []
        for m_q in range(5):
            method = "pt" if m_q == 0 else "qept"
            blues.append(by_label[f"{method} m_q={m_q}"][2])
        assert all(a < b for a, b in zip(blues, blues[1:]))


class TestFiltersAndErrors:
    def test_method_filter(self, results_csv, tmp_path):
        fig = render_figure(
            FigureSpec(
                "prob-steps", (str(results_csv),), str(tmp_path / "x.png"),
                methods=("sa",),
            )
        )
        series = extract_line_series(fig)
        assert "sa n=10" in series
        assert "qesa n=10" not in series

    def test_schema_mismatch_rejected(self, tmp_path, results_csv):
        bad = tmp_path / "bad.csv"
        text = results_csv.read_text().replace("qeopt-results/1", "qeopt-results/2")
        bad.write_text(text)
        with pytest.raises(SchemaError):
            render_figure(
                FigureSpec("prob-steps", (str(bad),), str(tmp_path / "x.png"))
            )

    def test_schema_mismatch_cli_exit_code(self, tmp_path, results_csv):
        bad = tmp_path / "bad.csv"
        bad.write_text(
            results_csv.read_text().replace("qeopt-results/1", "qeopt-results/2")
        )
        rc = cli_main(
            ["render", "--kind", "prob-steps", "--in", str(bad), "--out",
             str(tmp_path / "x.png")]
        )
        assert rc == 2

    def test_wrong_schema_for_kind_rejected(self, tmp_path, gaps_csv):
        with pytest.raises(SchemaError):
            render_figure(
                FigureSpec("prob-steps", (str(gaps_csv),), str(tmp_path / "x.png"))
            )

    def test_missing_columns_rejected(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text(
            "# schema=qeopt-results/1 units=x\nmethod,n,length\nsa,10,10\n"
        )
        with pytest.raises(SchemaError):
            render_figure(
                FigureSpec("prob-steps", (str(bad),), str(tmp_path / "x.png"))
            )

    def test_empty_series_rejected(self, results_csv, tmp_path):
        rc = cli_main(
            ["render", "--kind", "prob-steps", "--in", str(results_csv), "--out",
             str(tmp_path / "x.png"), "--method", "nonexistent"]
        )
        assert rc == 2

    def test_missing_file_rejected(self, tmp_path):
        rc = cli_main(
            ["render", "--kind", "prob-steps", "--in", str(tmp_path / "nope.csv"),
             "--out", str(tmp_path / "x.png")]
        )
        assert rc == 2

    def test_unknown_kind_rejected_by_spec(self, results_csv, tmp_path):
        with pytest.raises(ValueError):
            FigureSpec("pie-chart", (str(results_csv),), str(tmp_path / "x.png"))


class TestDeterminism:
    def test_identical_inputs_identical_bytes(self, results_csv, tmp_path):
        a = tmp_path / "a.png"
        b = tmp_path / "b.png"
        render(FigureSpec("prob-steps", (str(results_csv),), str(a)))
        render(FigureSpec("prob-steps", (str(results_csv),), str(b)))
        assert a.read_bytes() == b.read_bytes()


class TestCLI:
    def test_render_happy_path(self, results_csv, fits_csv, tmp_path, capsys):
        out = tmp_path / "fig.png"
        rc = cli_main(
            ["render", "--kind", "effort-steps", "--in", str(results_csv),
             str(fits_csv), "--out", str(out)]
        )
        assert rc == 0
        assert out.exists()
        assert str(out) in capsys.readouterr().out
