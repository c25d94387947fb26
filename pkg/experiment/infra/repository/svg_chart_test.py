from xml.etree import ElementTree

from experiment.domain.cell_result import CellResult
from experiment.infra.repository.summary_repo_test import _summary
from experiment.infra.repository.svg_chart import SvgChartRepository, jct_bar_chart, utilization_cdf_chart

SVG = "{http://www.w3.org/2000/svg}"


def _results():
    return [
        CellResult("RFold-4^3", "RFold", "4^3", summary=_summary(1.0)),
        CellResult("Reconfig-4^3", "Reconfig", "4^3", summary=_summary(0.5)),
        CellResult("Folding-16x16x16", "Folding", "16x16x16", error="boom"),
    ]


def test_one_bar_per_cell_and_percentile():
    root = ElementTree.fromstring(jct_bar_chart(_results()))

    bars = [rect for rect in root.iter(f"{SVG}rect") if rect.get("height") not in (None, "10", "400")]
    assert len(bars) == 2 * 3
    labels = [text.text for text in root.iter(f"{SVG}text")]
    assert {"p50", "p90", "p99", "RFold-4^3", "Reconfig-4^3"} <= set(labels)
    assert "Folding-16x16x16" not in labels


def test_one_curve_per_successful_cell():
    root = ElementTree.fromstring(utilization_cdf_chart(_results()))

    curves = list(root.iter(f"{SVG}polyline"))
    assert len(curves) == 2
    assert len(curves[0].get("points").split()) == 21


def test_charts_are_written(tmp_path):
    paths = SvgChartRepository().save_charts(_results(), tmp_path)

    assert [path.name for path in paths] == ["jct.svg", "utilization_cdf.svg"]
    for path in paths:
        ElementTree.parse(path)


def test_no_results_still_renders():
    ElementTree.fromstring(jct_bar_chart([]))
    ElementTree.fromstring(utilization_cdf_chart([]))
