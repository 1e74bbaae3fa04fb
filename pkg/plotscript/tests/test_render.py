from pathlib import Path

import pytest

from qeclie_plot import MissingColumnError, PlotSpec, read_sweep_csv, render
from qeclie_plot.cli import main

FIXTURE = Path(__file__).parent / "data" / "fig1_sweep.csv"

HEADER = "family,n,J,gamma,T,gamma_T,fidelity,infidelity"


def write_csv(path, rows):
    path.write_text("\n".join([HEADER] + rows) + "\n")


class TestReadCsv:
    def test_fixture_parses(self):
        data = read_sweep_csv([FIXTURE])
        assert set(data.panels) == {"w_state", "multi_spin_cat"}
        assert set(data.panels["multi_spin_cat"]) == {1.0, 2.0, 3.0}
        assert len(data.panels["multi_spin_cat"][1.0]) == 20

    def test_missing_column_named(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("family,n,J\nw_state,2,1\n")
        with pytest.raises(MissingColumnError, match="missing column 'gamma'"):
            read_sweep_csv([bad])

    def test_missing_gamma_t_named(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("family,n,J,gamma,T,fidelity,infidelity\n")
        with pytest.raises(MissingColumnError, match="gamma_T"):
            read_sweep_csv([bad])

    def test_empty_rows_rejected(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text(HEADER + "\n")
        with pytest.raises(ValueError, match="no data"):
            read_sweep_csv([empty])


class TestRender:
    def test_two_panel_figure_from_fixture(self, tmp_path):
        spec = PlotSpec(inputs=(str(FIXTURE),), output=str(tmp_path / "fig1.png"))
        png, svg = render(spec)
        assert png.exists() and png.stat().st_size > 0
        assert svg.exists() and svg.stat().st_size > 0

    def test_single_row_scatter(self, tmp_path):
        csv = tmp_path / "one.csv"
        write_csv(csv, ["w_state,2,1.0,1.0,0.01,0.01,0.99,0.01"])
        png, _ = render(PlotSpec(inputs=(str(csv),), output=str(tmp_path / "one.png")))
        assert png.stat().st_size > 0

    def test_deterministic_output(self, tmp_path):
        first = render(PlotSpec(inputs=(str(FIXTURE),),
                                output=str(tmp_path / "a.png")))
        second = render(PlotSpec(inputs=(str(FIXTURE),),
                                 output=str(tmp_path / "b.png")))
        assert first[0].read_bytes() == second[0].read_bytes()
        assert first[1].read_bytes() == second[1].read_bytes()

    def test_linear_axes_option(self, tmp_path):
        spec = PlotSpec(inputs=(str(FIXTURE),), output=str(tmp_path / "lin.png"),
                        log_log=False)
        png, _ = render(spec)
        assert png.stat().st_size > 0


class TestCli:
    def test_end_to_end(self, tmp_path):
        out = tmp_path / "fig.png"
        assert main(["--in", str(FIXTURE), "--out", str(out)]) == 0
        assert out.exists() and out.with_suffix(".svg").exists()

    def test_missing_column_exit_code(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("family,n\nw_state,2\n")
        assert main(["--in", str(bad), "--out", str(tmp_path / "fig.png")]) == 2

    def test_missing_file_exit_code(self, tmp_path):
        assert main(["--in", str(tmp_path / "nope.csv"),
                     "--out", str(tmp_path / "fig.png")]) == 2
