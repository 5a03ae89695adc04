import pytest

from fedcsa.experiments import SummaryRow
from fedcsa.plots import plot_case2_means, plot_case2_ratio


def _rows():
    rows = []
    for shift, bump in ((1.0, 0.0), (2.0, 0.3)):
        scenario = f"case2_c={shift:g}"
        rows += [
            SummaryRow(scenario, "FedDA", 1.0 + bump, 0.1, 2.0),
            SummaryRow(scenario, "FedIW", 1.5 + bump, 0.1, 2.5),
            SummaryRow(scenario, "Naive", 1.6 + bump, 0.1, 2.6),
            SummaryRow(scenario, "Reference", 0.9, 0.05, 1.2),
        ]
    return rows


def test_plots_write_svg(tmp_path):
    means = tmp_path / "means.svg"
    ratio = tmp_path / "ratio.svg"
    plot_case2_means(_rows(), means)
    plot_case2_ratio(_rows(), ratio)
    for path in (means, ratio):
        text = path.read_text()
        assert text.lstrip().startswith("<?xml")
        assert "</svg>" in text


def test_plots_are_deterministic(tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    plot_case2_means(_rows(), a)
    plot_case2_means(_rows(), b)
    assert a.read_bytes() == b.read_bytes()


def test_ratio_plot_requires_both_methods(tmp_path):
    rows = [r for r in _rows() if r.method != "FedDA"]
    with pytest.raises(ValueError):
        plot_case2_ratio(rows, tmp_path / "x.svg")


def test_means_plot_ignores_non_case2_rows(tmp_path):
    rows = _rows() + [SummaryRow("case1_nT=20_n1=30_n2=20", "FedDA", 1.0, 0.1, 2.0)]
    out = tmp_path / "m.svg"
    plot_case2_means(rows, out)
    assert out.exists()
