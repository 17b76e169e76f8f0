import json

import numpy as np
import pandas as pd

from coefficients import CoefficientSet
from spectrum import MultiplierSet, multipliers, scan_real, scan_region, spectral_curves
from spectrum_plots import SpectrumVisualizer

ZERO_11 = CoefficientSet.zeros(1, 1)


def _has_empty_annotation(fig):
    return any(a.text == "No data available" for a in fig.layout.annotations)


def test_empty_inputs_show_annotation():
    visualizer = SpectrumVisualizer()
    assert _has_empty_annotation(visualizer.create_curve_chart(pd.DataFrame()))
    region = scan_region(ZERO_11, (-1.0, 1.0), (-1.0, 1.0), 2, 2)
    assert _has_empty_annotation(visualizer.create_band_chart(region))
    empty_set = MultiplierSet(lam=0.0, multipliers=np.array([], dtype=complex))
    assert _has_empty_annotation(visualizer.create_multiplier_chart(empty_set))


def test_band_chart():
    scan = scan_real(ZERO_11, -1.0, 1.0, 5)
    fig = SpectrumVisualizer().create_band_chart(scan)
    assert len(fig.data) == 1
    assert len(fig.data[0].x) == 5
    assert fig.layout.yaxis.type == "log"


def test_region_heatmap_shape():
    scan = scan_region(ZERO_11, (-1.0, 1.0), (-0.5, 0.5), 4, 3)
    fig = SpectrumVisualizer().create_region_heatmap(scan)
    assert fig.data[0].type == "heatmap"
    assert np.asarray(fig.data[0].z).shape == (3, 4)
    np.testing.assert_allclose(fig.data[0].y, [-0.5, 0.0, 0.5])


def test_multiplier_chart_has_unit_circle_and_points():
    fig = SpectrumVisualizer().create_multiplier_chart(multipliers(CoefficientSet.zeros(3, 1), 1.0))
    assert len(fig.data) == 2
    assert len(fig.data[1].x) == 3


def test_curve_chart_and_saved_spec(tmp_path):
    curves = spectral_curves(ZERO_11, [0.5], (-3.1, 9.7), (-1.3, 1.3))
    visualizer = SpectrumVisualizer()
    fig = visualizer.create_curve_chart(curves)
    assert len(fig.data[0].x) == 2

    path = tmp_path / "curves.json"
    visualizer.save_figure(fig, str(path))
    spec = json.loads(path.read_text())
    assert spec["data"][0]["type"] == "scatter"
    assert spec["layout"]["title"]["text"] == "Spectral curves"
