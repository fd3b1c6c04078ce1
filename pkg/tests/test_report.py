import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from indexsim import (
    FrequencyReport,
    FrequencyRow,
    ModelParams,
    SeedSpec,
    draw_universe,
    emit_csv,
    emit_svg_chart,
    parse_csv,
    summary_stats,
)
from indexsim.report import CSV_HEADER


def make_row(size=1, over_t=0.5, under_t=0.5, over=3469, under=6531, trials=10_000, seed=42):
    return FrequencyRow(
        size=size,
        over_threshold=over_t,
        under_threshold=under_t,
        over_count=over,
        under_count=under,
        between_count=trials - over - under,
        trials=trials,
        over_freq=over / trials,
        under_freq=under / trials,
        over_ci=0.0093,
        under_ci=0.0093,
    )


def make_report(rows, seed=42):
    return FrequencyReport(rows=tuple(rows), master_seed=seed)


class TestSummaryStats:
    def test_symmetric_sample(self):
        s = summary_stats([-1.0, 0.0, 1.0])
        assert s.count == 3
        assert s.mean == 0.0
        assert s.median == 0.0
        assert s.variance == 1.0
        assert s.skewness == 0.0

    def test_constant_sample_flags_skewness_undefined(self):
        s = summary_stats([2.5, 2.5, 2.5])
        assert s.mean == 2.5
        assert s.variance == 0.0
        assert s.skewness is None

    def test_single_value(self):
        s = summary_stats([4.0])
        assert s.count == 1
        assert s.variance == 0.0
        assert s.skewness is None

    def test_even_count_median(self):
        assert summary_stats([1.0, 2.0, 3.0, 4.0]).median == 2.5

    def test_terminal_draws_match_lognormal_moments(self, reference_params):
        n = 100_000
        params = ModelParams(
            n_stocks=n, horizon=5.0, sigma=0.2,
            mu_hat=reference_params.mu_hat, sigma_hat=reference_params.sigma_hat,
        )
        values = draw_universe(params, SeedSpec(6, 0)).terminal_values
        s = summary_stats(values)
        m, v = math.log(1.1), 0.2 + reference_params.sigma_hat ** 2 * 25.0
        true_var = (math.exp(v) - 1.0) * math.exp(2 * m + v)
        assert abs(s.mean - 1.5) < 5.0 * math.sqrt(true_var / n)
        assert abs(s.median - 1.1) < 0.02
        assert s.skewness is not None and s.skewness > 0

    def test_skewness_positive_for_any_variance_source(self):
        # either the shared volatility or the drift dispersion alone is
        # enough to skew terminal values to the right
        for sigma, sigma_hat in ((0.2, 0.0), (0.0, 0.13), (0.2, 0.13)):
            params = ModelParams(
                n_stocks=100_000, horizon=5.0, sigma=sigma, mu_hat=0.04, sigma_hat=sigma_hat
            )
            s = summary_stats(draw_universe(params, SeedSpec(2, 0)).terminal_values)
            assert s.skewness is not None and s.skewness > 0

    def test_matches_compensated_two_pass_reference(self):
        rng = np.random.default_rng(14)
        values = rng.lognormal(0.2, 1.1, size=1_000_000) * 1e3
        s = summary_stats(values)
        ref_mean = math.fsum(values) / values.size
        ref_var = math.fsum((x - ref_mean) ** 2 for x in values) / (values.size - 1)
        assert s.mean == pytest.approx(ref_mean, rel=1e-10)
        assert s.variance == pytest.approx(ref_var, rel=1e-10)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            summary_stats([])


class TestEmitCsv:
    GOLDEN = (
        "k,over_threshold,under_threshold,over_freq,under_freq,over_ci,under_ci,trials,master_seed\n"
        "1,0.500000,0.500000,0.346900,0.653100,0.009300,0.009300,10000,42\n"
    )

    def test_golden_single_row(self):
        data = emit_csv(make_report([make_row()]))
        assert data == self.GOLDEN.encode("utf-8")

    def test_empty_report_is_header_only(self):
        assert emit_csv(make_report([])) == (CSV_HEADER + "\n").encode("utf-8")

    def test_rows_sorted_by_size_then_threshold(self):
        rows = [
            make_row(size=5, over_t=0.7, under_t=0.3),
            make_row(size=1, over_t=0.7, under_t=0.3),
            make_row(size=5, over_t=0.5, under_t=0.5),
            make_row(size=1, over_t=0.5, under_t=0.5),
        ]
        lines = emit_csv(make_report(rows)).decode().splitlines()
        keys = [(int(l.split(",")[0]), float(l.split(",")[1])) for l in lines[1:]]
        assert keys == sorted(keys)

    def test_deterministic_bytes(self):
        report = make_report([make_row(), make_row(size=2)])
        assert emit_csv(report) == emit_csv(report)

    def test_writes_to_path(self, tmp_path):
        out = tmp_path / "report.csv"
        data = emit_csv(make_report([make_row()]), destination=out)
        assert out.read_bytes() == data

    def test_write_failure_names_path(self, tmp_path):
        missing = tmp_path / "no-such-dir" / "report.csv"
        with pytest.raises(OSError, match="no-such-dir"):
            emit_csv(make_report([make_row()]), destination=missing)

    def test_full_precision_round_trip(self):
        rows = [
            make_row(size=1, over=3469, under=6531),
            make_row(size=7, over_t=0.7, under_t=0.3, over=123, under=9871),
        ]
        report = make_report(rows, seed=99)
        parsed = parse_csv(emit_csv(report, precision=None))
        assert parsed.rows == report.rows
        assert parsed.master_seed == report.master_seed

    def test_fixed_precision_reserialization_is_idempotent(self):
        report = make_report([make_row(), make_row(size=3, over=10, under=20, trials=100)])
        data = emit_csv(report, precision=6)
        assert emit_csv(parse_csv(data), precision=6) == data

    def test_parse_rejects_bad_header(self):
        with pytest.raises(ValueError):
            parse_csv(b"k,nope\n1,2\n")


class TestEmitSvgChart:
    def make_dominance_report(self):
        rows = []
        for i, k in enumerate((1, 5, 20)):
            over = 2900 - 300 * i
            under = 5800 - 900 * i
            rows.append(make_row(size=k, over_t=0.7, under_t=0.3, over=over, under=under))
            rows.append(make_row(size=k, over_t=0.5, under_t=0.5, over=3500 - i, under=6500 + i))
        return make_report(rows)

    def test_well_formed_xml_single_row(self):
        svg = emit_svg_chart(make_report([make_row()]))
        root = ET.fromstring(svg)
        assert root.tag.endswith("svg")
        polylines = [e for e in root.iter() if e.tag.endswith("polyline")]
        assert len(polylines) == 2  # over + under for the single benchmark pair

    def test_series_count_two_pairs(self):
        svg = emit_svg_chart(self.make_dominance_report())
        root = ET.fromstring(svg)
        polylines = [e for e in root.iter() if e.tag.endswith("polyline")]
        assert len(polylines) == 4

    def test_under_series_above_over_series(self):
        # larger frequency means smaller pixel y; check the (0.7, 0.3) pair
        svg = emit_svg_chart(self.make_dominance_report())
        root = ET.fromstring(svg)
        points = [
            [tuple(map(float, p.split(","))) for p in e.get("points").split()]
            for e in root.iter()
            if e.tag.endswith("polyline")
        ]
        over_pts, under_pts = points[2], points[3]  # pairs sorted: (0.5, 0.5) first
        assert len(over_pts) == len(under_pts) == 3
        for (xo, yo), (xu, yu) in zip(over_pts, under_pts):
            assert xo == xu
            assert yu < yo

    def test_deterministic(self):
        report = self.make_dominance_report()
        assert emit_svg_chart(report) == emit_svg_chart(report)

    def test_legend_and_axis_labels_present(self):
        svg = emit_svg_chart(self.make_dominance_report())
        assert "portfolio size" in svg
        assert "frequency" in svg
        assert "over &gt; 70%" in svg
        assert "under &lt; 30%" in svg

    def test_rejects_empty_report(self):
        with pytest.raises(ValueError):
            emit_svg_chart(make_report([]))
