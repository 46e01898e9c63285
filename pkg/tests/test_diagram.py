import io
import re

import numpy as np
import pytest
from numpy.testing import assert_allclose

from deficit_atlas import diagram
from deficit_atlas.correlations import PhaseLabel
from deficit_atlas.errors import DomainError, IoError


@pytest.fixture(scope="module")
def slice_01():
    return diagram.classify_grid(0.1, 128)


@pytest.fixture(scope="module")
def slice_05():
    return diagram.classify_grid(0.5, 32)


class TestClassifyGrid:

    def test_upper_band_single_phase(self, slice_05):
        assert np.all(slice_05.labels == PhaseLabel.ZERO)
        assert slice_05.areas["0"]["fraction"] == 1.0
        assert slice_05.curves == []

    def test_mirror_symmetry(self, slice_01):
        labels = slice_01.labels
        assert np.array_equal(labels, labels[:, ::-1])
        assert np.array_equal(labels, labels[::-1, :])

    def test_odd_resolution_symmetry(self):
        d = diagram.classify_grid(0.1, 17, curves=False)
        assert np.array_equal(d.labels, d.labels[::-1, ::-1])
        assert_allclose(d.s1_centers, -d.s1_centers[::-1], atol=1e-15)

    def test_area_sums(self, slice_01):
        fr = sum(a["fraction"] for a in slice_01.areas.values())
        ab = sum(a["absolute"] for a in slice_01.areas.values())
        assert_allclose(fr, 1.0, atol=1e-9)
        assert_allclose(ab, 1.1 * 0.9, atol=1e-9)

    def test_all_phases_present(self, slice_01):
        assert set(np.unique(slice_01.labels)) == {0, 1, 2}
        assert_allclose(slice_01.theta_fraction, 0.035, atol=0.01)

    def test_monotone_refinement(self, slice_01):
        coarse = diagram.classify_grid(0.1, 64, curves=False)
        assert abs(coarse.theta_fraction - slice_01.theta_fraction) < 2 / 64

    def test_curve_grid_consistency(self, slice_01):
        d = slice_01
        ds = d.s1_centers[1] - d.s1_centers[0]
        dc = d.c1_centers[1] - d.c1_centers[0]
        diag = np.hypot(ds, dc)
        ss, cc = np.meshgrid(d.s1_centers, d.c1_centers)
        for curve in d.curves:
            for s1, c1 in zip(curve.s1, curve.c1):
                near = np.hypot(ss - s1, cc - c1) <= diag * 1.0001
                assert len(np.unique(d.labels[near])) > 1

    @pytest.mark.parametrize("c3, res", [(1.0, 32), (0.0, 8), (0.0, 5000)])
    def test_rejects(self, c3, res):
        with pytest.raises((DomainError, ValueError)):
            diagram.classify_grid(c3, res)

    def test_worker_count(self, monkeypatch):
        monkeypatch.setenv(diagram.THREADS_ENV, "3")
        assert diagram.worker_count() == 3
        monkeypatch.setenv(diagram.THREADS_ENV, "0")
        assert diagram.worker_count() >= 1

    def test_thread_count_does_not_change_labels(self, monkeypatch):
        monkeypatch.setenv(diagram.THREADS_ENV, "1")
        a = diagram.classify_grid(-0.2, 32, curves=False)
        monkeypatch.setenv(diagram.THREADS_ENV, "4")
        b = diagram.classify_grid(-0.2, 32, curves=False)
        assert np.array_equal(a.labels, b.labels)
        assert np.array_equal(a.values, b.values)


class TestThetaArea:

    def test_band_is_empty(self):
        assert diagram.theta_region_area(0.5) == (0.0, 0.0)

    def test_c3_01(self):
        segment, fraction = diagram.theta_region_area(0.1)
        assert_allclose(segment, 0.008639, rtol=0.03)
        assert_allclose(fraction, 0.035, atol=0.002)
        assert_allclose(fraction, 4 * segment / 0.99, rtol=1e-14)


class TestEmit:

    def test_csv_shape(self, slice_01):
        text = diagram.render_csv(slice_01)
        lines = text.splitlines()
        assert lines[0] == "s1,c1,phase,deficit_nats,theta_opt_rad"
        assert len(lines) == 1 + 128**2
        first = lines[1].split(",")
        assert_allclose(float(first[0]), slice_01.s1_centers[0], rtol=1e-11)
        assert_allclose(float(first[1]), slice_01.c1_centers[0], rtol=1e-11)
        # s1 varies fastest
        assert float(lines[2].split(",")[1]) == float(first[1])
        assert {l.split(",")[2] for l in lines[1:]} == {"0", "pi2", "theta"}

    def test_deterministic(self, slice_01, tmp_path):
        for fmt in ("csv", "svg"):
            a, b = tmp_path / f"a.{fmt}", tmp_path / f"b.{fmt}"
            diagram.emit(slice_01, fmt, a)
            diagram.emit(slice_01, fmt, b)
            assert a.read_bytes() == b.read_bytes()

    def test_stream_sink(self, slice_05):
        buf = io.StringIO()
        diagram.emit(slice_05, "csv", buf)
        assert buf.getvalue() == diagram.render_csv(slice_05)

    def test_single_color_svg(self, slice_05):
        svg = diagram.render_svg(slice_05)
        fills = set(re.findall(r'<rect [^>]*fill="(#[0-9a-f]{6})"', svg))
        assert fills == {diagram.COLORS[PhaseLabel.ZERO]}
        assert svg.count("<rect ") == 32 * 32
        assert 'viewBox="0 0 1000 1000"' in svg

    def test_svg_overlays(self, slice_01):
        svg = diagram.render_svg(slice_01)
        assert svg.count("<polyline") == 4 * len(slice_01.curves)
        fills = set(re.findall(r'<rect [^>]*fill="(#[0-9a-f]{6})"', svg))
        assert fills == set(diagram.COLORS.values())

    def test_io_error(self, slice_05, tmp_path):
        with pytest.raises(IoError):
            diagram.emit(slice_05, "csv", tmp_path / "missing" / "x.csv")

    def test_unknown_format(self, slice_05):
        with pytest.raises(ValueError):
            diagram.emit(slice_05, "png", io.StringIO())
