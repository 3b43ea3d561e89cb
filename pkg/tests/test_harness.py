"""Tests for the Monte Carlo harness: cells, tables, presets, aggregation."""

import numpy as np
import numpy.testing as npt
import pytest

from indred.harness import (
    TABLE1_CONFIGS,
    CellSpec,
    SimReport,
    preset_table1_model4,
    preset_table1_model5,
    run_cell,
    run_intro_scenario,
    run_table,
    true_span,
)
from indred.linalg import Subspace, frobenius_span_distance
from indred.simgen import ModelSpec, response_quantile


def gamma_cell(**overrides):
    base = dict(
        model=ModelSpec.gamma_default(),
        n=60,
        t_percent=50.0,
        method_pair="sir-sir",
        d=1,
        d_g=1,
        reps=4,
        seed=99,
    )
    base.update(overrides)
    return CellSpec(**base)


class TestTrueSpan:
    def test_gamma_is_the_index_direction(self):
        spec = ModelSpec.gamma_default()
        span = true_span(spec, 1.7)
        expected = Subspace.from_columns(np.asarray(spec.alpha)[:, None])
        assert span.dim == 1
        assert frobenius_span_distance(span, expected) < 1e-12

    def test_gamma_span_does_not_depend_on_t(self):
        spec = ModelSpec.gamma_default()
        a = true_span(spec, 0.3)
        b = true_span(spec, 9.0)
        assert frobenius_span_distance(a, b) < 1e-12

    def test_lognormal_direction_combines_both_indices(self):
        spec = ModelSpec.lognormal_default(p=10)
        t = 2.5
        vec = np.asarray(spec.alpha1) + np.log(t) * np.asarray(spec.alpha2)
        expected = Subspace.from_columns(vec[:, None])
        assert frobenius_span_distance(true_span(spec, t), expected) < 1e-12

    def test_lognormal_at_unit_threshold_is_first_index(self):
        spec = ModelSpec.lognormal_default(p=10)
        expected = Subspace.from_columns(np.asarray(spec.alpha1)[:, None])
        assert frobenius_span_distance(true_span(spec, 1.0), expected) < 1e-12

    def test_piecewise_dimension_grows_across_knots(self):
        spec = ModelSpec.piecewise_default(p=10)
        assert true_span(spec, 0.5 * spec.tau1).dim == 1
        assert true_span(spec, 0.5 * (spec.tau1 + spec.tau2)).dim == 2
        assert true_span(spec, 2.0 * spec.tau2).dim == 3

    def test_piecewise_knot_value_includes_new_direction(self):
        # threshold sitting exactly on a knot already spans the new piece
        spec = ModelSpec.piecewise_default(p=10)
        assert true_span(spec, spec.tau1).dim == 2
        assert true_span(spec, spec.tau2).dim == 3


class TestCellSpec:
    def test_rejects_unknown_method_pair(self):
        with pytest.raises(ValueError, match="method pair"):
            gamma_cell(method_pair="save-save")

    def test_rejects_nonpositive_reps(self):
        with pytest.raises(ValueError, match="reps"):
            gamma_cell(reps=0)

    @pytest.mark.parametrize("percent", [0.0, 100.0, -3.0, 250.0])
    def test_rejects_percent_outside_open_interval(self, percent):
        with pytest.raises(ValueError, match="t_percent"):
            gamma_cell(t_percent=percent)

    def test_rejects_tiny_n(self):
        with pytest.raises(ValueError, match="n must be"):
            gamma_cell(n=1)

    def test_cr_percent_tracks_model_censoring(self):
        assert gamma_cell().cr_percent == 0
        censored = CellSpec(
            model=ModelSpec.piecewise_default(p=10, censored=True),
            n=100,
            t_percent=45.0,
            method_pair="sir-save",
            d=3,
            d_g=1,
            reps=2,
            seed=1,
        )
        assert censored.cr_percent == 25


class TestRunCell:
    def test_smoke_fields(self):
        cell = gamma_cell()
        res = run_cell(cell)
        assert res.completed == 4 and res.failed == 0
        assert not res.flagged and res.warnings == ()
        assert res.n == 60 and res.p == 3 and res.cr_percent == 0
        assert res.method_pair == "sir-sir"
        assert res.t_value == response_quantile(cell.model, 50.0)
        # rank-1 target: distances live in [0, sqrt(2)]
        for value in (res.mean_two_stage, res.mean_direct):
            assert 0.0 <= value <= np.sqrt(2.0) + 1e-12
        assert res.se_two_stage >= 0.0 and res.se_direct >= 0.0
        assert res.elapsed_seconds > 0.0

    def test_default_label_mentions_design(self):
        res = run_cell(gamma_cell(reps=1))
        assert res.label == "t50 (n=60, p=3, CR=0%)"

    def test_explicit_label_wins(self):
        res = run_cell(gamma_cell(reps=1, label="pilot"))
        assert res.label == "pilot"

    def test_rerun_is_bitwise_identical(self):
        a = run_cell(gamma_cell())
        b = run_cell(gamma_cell())
        assert a.mean_two_stage == b.mean_two_stage
        assert a.se_two_stage == b.se_two_stage
        assert a.mean_direct == b.mean_direct
        assert a.se_direct == b.se_direct
        assert a.t_value == b.t_value

    def test_stream_changes_the_draws(self):
        a = run_cell(gamma_cell())
        b = run_cell(gamma_cell(stream=1))
        assert a.mean_two_stage != b.mean_two_stage

    def test_threshold_beyond_sample_flags_cell(self):
        # at the 99.9 percent threshold a sample of 8 almost never reaches
        # past t, so replications fail and the cell must be flagged
        cell = gamma_cell(n=8, t_percent=99.9, reps=10, seed=5)
        res = run_cell(cell)
        assert res.failed >= 1
        assert res.failed + res.completed == 10
        assert res.flagged
        assert res.warnings and "replications failed" in res.warnings[0]

    def test_all_failures_leave_nan_means(self):
        res = run_cell(gamma_cell(n=8, t_percent=99.9, reps=3, seed=5))
        if res.completed == 0:
            assert np.isnan(res.mean_two_stage) and np.isnan(res.mean_direct)

    def test_censored_cell_runs(self):
        cell = CellSpec(
            model=ModelSpec.piecewise_default(p=10, censored=True),
            n=100,
            t_percent=45.0,
            method_pair="sir-save",
            d=3,
            d_g=1,
            reps=2,
            seed=11,
        )
        res = run_cell(cell)
        assert res.completed == 2 and res.cr_percent == 25
        assert 0.0 <= res.mean_two_stage <= np.sqrt(2.0) + 1e-12

    def test_lognormal_cell_counts_rejections(self):
        cell = CellSpec(
            model=ModelSpec.lognormal_default(p=10),
            n=100,
            t_percent=50.0,
            method_pair="sir-sir",
            d=2,
            d_g=1,
            reps=2,
            seed=7,
        )
        res = run_cell(cell)
        assert res.rejected_draws >= 0
        assert res.completed == 2


class TestRunTable:
    def test_empty_input(self):
        report = run_table([])
        assert isinstance(report, SimReport)
        assert report.cells == ()
        assert report.provenance["cells"] == 0
        assert report.provenance["failed_total"] == 0
        assert report.provenance["seeds"] == []

    def test_two_cells_serial(self):
        cells = [
            gamma_cell(reps=2, label="one"),
            gamma_cell(reps=2, stream=1, label="two"),
        ]
        report = run_table(cells)
        assert [c.label for c in report.cells] == ["one", "two"]
        prov = report.provenance
        assert prov["cells"] == 2 and prov["failed_total"] == 0
        assert prov["flagged_cells"] == []
        assert set(prov["thresholds"]) == {"one", "two"}
        assert prov["seeds"] == [99]
        assert prov["rng_algorithm"]

    def test_parallel_matches_serial(self):
        cells = [
            gamma_cell(reps=3, label="one"),
            gamma_cell(reps=3, stream=1, label="two"),
        ]
        serial = run_table(cells)
        parallel = run_table(cells, parallelism=2)
        for a, b in zip(serial.cells, parallel.cells):
            assert a.label == b.label
            assert a.mean_two_stage == b.mean_two_stage
            assert a.se_two_stage == b.se_two_stage
            assert a.mean_direct == b.mean_direct
            assert a.se_direct == b.se_direct


class TestIntroScenario:
    def test_small_run_shapes_and_normalization(self):
        summary = run_intro_scenario(seed=4, reps=5)
        for arr in (
            summary.means_full,
            summary.sds_full,
            summary.means_induced,
            summary.sds_induced,
        ):
            assert arr.shape == (3,)
        # directions are scaled so the first coordinate is exactly one
        assert summary.means_full[0] == 1.0 and summary.sds_full[0] == 0.0
        assert summary.means_induced[0] == 1.0 and summary.sds_induced[0] == 0.0
        assert summary.t_value == response_quantile(ModelSpec.gamma_default(), 50.0)
        assert summary.reps == 5 and summary.seed == 4

    def test_rerun_reproduces(self):
        a = run_intro_scenario(seed=4, reps=3)
        b = run_intro_scenario(seed=4, reps=3)
        npt.assert_array_equal(a.means_full, b.means_full)
        npt.assert_array_equal(a.means_induced, b.means_induced)


class TestPresets:
    def test_model4_grid(self):
        cells = preset_table1_model4(reps=7, seed=3)
        assert len(cells) == 12
        assert sorted(c.stream for c in cells) == list(range(12))
        assert {c.method_pair for c in cells} == {"sir-sir"}
        assert all(c.d == 2 and c.d_g == 1 for c in cells)
        assert all(c.reps == 7 and c.seed == 3 for c in cells)
        percents = [c.t_percent for c in cells]
        assert percents == [30] * 4 + [50] * 4 + [70] * 4
        for chunk_start in (0, 4, 8):
            block = cells[chunk_start : chunk_start + 4]
            got = [(c.n, c.model.p, c.model.is_censored) for c in block]
            assert got == list(TABLE1_CONFIGS)
        assert all(c.model.family == "lognormal-ratio" for c in cells)

    def test_model5_induced_dimension_by_threshold(self):
        cells = preset_table1_model5(reps=2, seed=3)
        assert len(cells) == 12
        assert {c.method_pair for c in cells} == {"sir-save"}
        assert all(c.d == 3 for c in cells)
        by_percent = {c.t_percent: c.d_g for c in cells}
        assert by_percent == {45: 1, 65: 2, 75: 3}
        assert all(c.model.family == "piecewise-hazard" for c in cells)

    def test_default_rep_count_matches_benchmark_protocol(self):
        cells = preset_table1_model4()
        assert all(c.reps == 500 for c in cells)
