import math
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from endlab.dependence import JointTable, MarginalSpec, TriangularArrayModel
from endlab.norming import MonotoneFunction, NormingScheme
from endlab.simulate import (ExperimentPlan, SweepParams, WeightRule,
                             bound_validity_sweep,
                             complete_convergence_diagnostic, estimate_tail,
                             normalized_row_sum, row_stat_matrix,
                             strong_law_path_diagnostic, tail_table,
                             truncate_split)


def pow_fn(exp, scale=1.0):
    return MonotoneFunction("pow", exp=exp, scale=scale)


def unit_scheme(b=None):
    one = MonotoneFunction("affine", intercept=1.0, slope=0.0)
    return NormingScheme(a=pow_fn(1.0), b=b or one, s=pow_fn(1.0))


def simple_plan(**overrides):
    defaults = dict(
        model=TriangularArrayModel("independent",
                                   MarginalSpec.two_point((-1.0, 1.0))),
        scheme=unit_scheme(),
        epsilons=(0.5,),
        n_schedule=(2, 4, 8, 16, 32, 64),
        replications=400,
        seed=7,
        center="subtract_mean",
    )
    defaults.update(overrides)
    return ExperimentPlan(**defaults)


class TestTruncateSplit:
    def test_pass_through_below_level(self):
        split = truncate_split(0.5, 1.0)
        assert split.x_prime == 0.5 and split.x_double_prime == 0.0

    def test_clamps_above_level(self):
        split = truncate_split(3.0, 1.0)
        assert split.x_prime == 1.0 and split.x_double_prime == 2.0

    def test_symmetric_clamp(self):
        split = truncate_split(-3.0, 1.0)
        assert split.x_prime == -1.0 and split.x_double_prime == -2.0

    def test_reconstruction_exact_on_fuzzed_pairs(self):
        rng = np.random.default_rng(0)
        x = rng.uniform(-1e6, 1e6, size=1_000_000) * 10 ** rng.integers(
            -8, 9, size=1_000_000).astype(float)
        a = 10.0 ** rng.uniform(-8, 8, size=1_000_000)
        split = truncate_split(x, a)
        assert np.all(split.x_prime + split.x_double_prime == x)
        assert np.all(np.abs(split.x_prime) <= a)

    @settings(max_examples=300, deadline=None)
    @given(st.floats(allow_nan=False, allow_infinity=False,
                     min_value=-1e300, max_value=1e300),
           st.floats(min_value=1e-300, max_value=1e300))
    def test_reconstruction_property(self, x, a):
        split = truncate_split(x, a)
        assert split.x_prime + split.x_double_prime == x
        assert abs(split.x_prime) <= a

    def test_rejects_nonpositive_level(self):
        with pytest.raises(ValueError):
            truncate_split(1.0, 0.0)


class TestPlanValidation:
    def test_rejects_small_replication_counts(self):
        with pytest.raises(ValueError):
            simple_plan(replications=50)

    def test_rejects_unsorted_schedule(self):
        with pytest.raises(ValueError):
            simple_plan(n_schedule=(4, 2, 8, 16, 32, 64))

    def test_rejects_nonpositive_epsilon(self):
        with pytest.raises(ValueError):
            simple_plan(epsilons=(0.0,))


class TestNormalizedRowSum:
    def test_degenerate_centred_row_is_zero(self):
        model = TriangularArrayModel("independent",
                                     MarginalSpec.discrete((3.0,), (1.0,)))
        plan = simple_plan(model=model)
        assert normalized_row_sum(plan, 8, 0) == 0.0

    def test_single_two_point_variable_balances(self):
        model = TriangularArrayModel("independent",
                                     MarginalSpec.two_point((0.0, 2.0)))
        plan = simple_plan(model=model, n_schedule=(1, 2, 4, 8, 16, 32),
                           replications=2000)
        values = row_stat_matrix(plan, [1])[:, 0]
        assert set(np.unique(values)) == {-1.0, 1.0}
        # chi-square balance check at 4 sigma
        count = int(np.sum(values > 0))
        assert abs(count - 1000) < 4.0 * math.sqrt(2000 * 0.25)

    def test_zero_weights_zero_sum(self):
        plan = simple_plan(weights=WeightRule("const", 0.0))
        assert normalized_row_sum(plan, 16, 3) == 0.0

    def test_deterministic_in_seed_row_replication(self):
        plan = simple_plan()
        assert normalized_row_sum(plan, 16, 5) == normalized_row_sum(plan, 16, 5)
        assert normalized_row_sum(plan, 16, 5) != pytest.approx(
            normalized_row_sum(plan, 16, 6))


class TestEstimateTail:
    def test_degenerate_model_saturates(self):
        model = TriangularArrayModel("independent",
                                     MarginalSpec.discrete((1.0,), (1.0,)))
        plan = simple_plan(model=model, center="none")
        est = estimate_tail(plan, 8, 0.5)  # sum = 8 > 0.5 always
        assert est.value == 1.0

    def test_epsilon_beyond_support_gives_zero(self):
        plan = simple_plan()
        est = estimate_tail(plan, 8, 9.0)  # |sum| <= 8
        assert est.value == 0.0

    def test_binomial_oracle_within_three_half_widths(self):
        plan = simple_plan(replications=4000)
        est = estimate_tail(plan, 10, 9.5)
        exact = 2.0 / 1024.0  # both extreme sign patterns
        assert abs(est.value - exact) <= 3.0 * max(est.half_width, 1e-4)

    def test_exact_oracle_agreement_rate(self):
        """>= 99% of (n, eps) cells within three half-widths of enumeration."""
        plan = simple_plan(replications=900,
                           epsilons=(0.5, 1.5, 2.5, 4.5),
                           n_schedule=(2, 4, 6, 8, 10, 12))
        table = tail_table(plan)
        hits = total = 0
        for n in plan.n_schedule:
            sums = np.zeros(1)
            probs = np.ones(1)
            for _ in range(n):
                sums = (sums[:, None] + np.array([-1.0, 1.0])[None, :]).ravel()
                probs = (probs[:, None] * np.array([0.5, 0.5])[None, :]).ravel()
            for eps in plan.epsilons:
                exact = float(probs[np.abs(sums) > eps].sum())
                est = table[(n, eps)]
                total += 1
                if abs(est.value - exact) <= 3.0 * max(est.half_width, 5e-4):
                    hits += 1
        assert hits / total >= 0.99

    def test_centering_identity_for_symmetric_marginals(self):
        plan = simple_plan(model=TriangularArrayModel(
            "independent", MarginalSpec.uniform(-1.0, 1.0)),
            replications=2000)
        values = row_stat_matrix(plan, [32])[:, 0]
        sd = float(np.std(values))
        assert abs(float(np.mean(values))) <= 3.0 * sd / math.sqrt(len(values))


class TestReproducibility:
    def test_worker_count_does_not_change_results(self, monkeypatch):
        plan = simple_plan(replications=500)
        monkeypatch.setenv("ENDLAB_THREADS", "1")
        serial = row_stat_matrix(plan)
        monkeypatch.setenv("ENDLAB_THREADS", "4")
        threaded = row_stat_matrix(plan)
        np.testing.assert_array_equal(serial, threaded)

    def test_sequence_mode_prefixes_are_consistent(self):
        model = TriangularArrayModel("fgm_negative",
                                     MarginalSpec.uniform(0.0, 1.0), theta=-1.0)
        plan = simple_plan(model=model, semantics="sequence",
                           n_schedule=(2, 4, 8, 16, 32, 64))
        full = row_stat_matrix(plan)
        single = row_stat_matrix(plan, [8])
        np.testing.assert_allclose(full[:, 2], single[:, 0], rtol=0, atol=0)


class TestBoundValiditySweep:
    def test_bennett_exact_mode_all_cells_hold(self):
        plan = simple_plan(epsilons=(0.25, 1.0, 3.0, 7.0),
                           n_schedule=(2, 4, 6, 8, 10))
        rows = bound_validity_sweep(plan, "bennett",
                                    SweepParams(a=1.0, m=1.0))
        assert rows
        for row in rows:
            assert row.mode == "exact"
            assert row.satisfied is True

    def test_fuk_nagaev_exact_mode_all_cells_hold(self):
        plan = simple_plan(epsilons=(0.25, 1.0, 3.0, 7.0),
                           n_schedule=(2, 4, 6, 8, 10))
        for lam in (1.0, 2.0, 5.0):
            for p in (0.5, 1.0):
                rows = bound_validity_sweep(
                    plan, "fuk_nagaev", SweepParams(m=1.0, lam=lam, p=p))
                assert all(row.satisfied is True for row in rows)

    def test_degenerate_zero_rows(self):
        model = TriangularArrayModel("independent",
                                     MarginalSpec.discrete((0.0,), (1.0,)))
        plan = simple_plan(model=model, epsilons=(0.1, 1.0),
                           n_schedule=(2, 4, 8))
        rows = bound_validity_sweep(plan, "bennett", SweepParams(m=1.0))
        assert all(row.tail == 0.0 and row.satisfied is True for row in rows)

    def test_support_precondition_reported_not_skipped(self):
        plan = simple_plan(epsilons=(0.5,), n_schedule=(2, 4))
        rows = bound_validity_sweep(plan, "bennett",
                                    SweepParams(a=0.5, m=1.0))
        assert all(row.satisfied is None for row in rows)
        assert all("support" in row.note for row in rows)

    def test_certified_constant_used_for_joint_tables(self):
        atoms = np.array([[0.0, 0.0], [1.0, 1.0]])
        table = JointTable(atoms, np.array([0.5, 0.5]))
        model = TriangularArrayModel("discrete_joint", joints={2: table})
        plan = simple_plan(model=model, center="none",
                           epsilons=(0.5, 1.5), n_schedule=(2,))
        rows = bound_validity_sweep(plan, "bennett",
                                    SweepParams(a=2.0, m="certified"))
        # comonotone pair needs m = 2; bound still dominates the exact tail
        assert all(row.satisfied is True for row in rows)
        assert all(row.note == "certified" for row in rows)

    def test_mc_mode_flags_claimed_constant(self):
        model = TriangularArrayModel("fgm_negative",
                                     MarginalSpec.uniform(-0.5, 0.5), theta=-1.0)
        plan = simple_plan(model=model, epsilons=(2.0,), n_schedule=(8, 16),
                           replications=400)
        rows = bound_validity_sweep(plan, "bennett", SweepParams())
        assert all(row.mode == "mc" for row in rows)
        assert all(row.note == "claimed" for row in rows)
        assert all(row.satisfied is True for row in rows)


def corollary_plan(**overrides):
    marginal = MarginalSpec.uniform(-0.05 * math.sqrt(3.0), 0.05 * math.sqrt(3.0))
    scheme = NormingScheme(a=pow_fn(2.0 / 3.0, 1.0 / 6.0),
                           b=pow_fn(2.0 / 3.0),
                           s=pow_fn(1.0, marginal.second_moment()))
    defaults = dict(
        model=TriangularArrayModel("independent", marginal),
        scheme=scheme,
        epsilons=(0.1, 0.5, 1.0),
        n_schedule=tuple(2 ** k for k in range(4, 13)),
        replications=600,
        seed=42,
    )
    defaults.update(overrides)
    return ExperimentPlan(**defaults)


class TestDiagnostics:
    def test_degenerate_model_all_zero(self):
        model = TriangularArrayModel("independent",
                                     MarginalSpec.discrete((2.0,), (1.0,)))
        plan = simple_plan(model=model)
        conv = complete_convergence_diagnostic(plan)
        assert all(row.partial_sum == 0.0 and row.last_term == 0.0
                   for row in conv)
        path = strong_law_path_diagnostic(plan)
        assert all(row.trailing_sup_p95 == 0.0 for row in path)

    def test_normalized_tails_decay_and_control_does_not(self):
        conv = complete_convergence_diagnostic(corollary_plan())
        assert all(row.slope < -1.0 for row in conv)

        control = corollary_plan(scheme=NormingScheme(
            a=pow_fn(2.0 / 3.0, 1.0 / 6.0),
            b=MonotoneFunction("affine", intercept=1.0, slope=0.0),
            s=pow_fn(1.0, 0.0025)))
        conv_control = complete_convergence_diagnostic(control)
        flat = [row for row in conv_control if row.epsilon == 0.1]
        assert flat and flat[0].slope > -0.2
        assert flat[0].last_term > 0.5

    def test_needs_six_schedule_points(self):
        plan = simple_plan(n_schedule=(2, 4, 8, 16))
        with pytest.raises(ValueError):
            complete_convergence_diagnostic(plan)

    def test_trailing_sup_decays(self):
        path = strong_law_path_diagnostic(corollary_plan(replications=300))
        assert path[-1].trailing_sup_p95 < path[0].trailing_sup_p95

    def test_alternating_weights_also_decay(self):
        plan = corollary_plan(weights=WeightRule("alternating", 1.0),
                              replications=300)
        path = strong_law_path_diagnostic(plan)
        assert path[-1].trailing_sup_p95 <= 0.6 * path[0].trailing_sup_p95

    def test_sequence_semantics_trailing_sup(self):
        model = TriangularArrayModel("fgm_negative",
                                     MarginalSpec.uniform(0.0, 1.0), theta=-1.0)
        scheme = NormingScheme(
            a=MonotoneFunction("powlog", exp=2 / 3, log_exp=-2 / 3),
            b=MonotoneFunction("powlog", exp=2 / 3, log_exp=1 / 3),
            s=pow_fn(1.0, 4.0 / 3.0))
        plan = ExperimentPlan(model=model, scheme=scheme,
                              epsilons=(0.1,), semantics="sequence",
                              n_schedule=tuple(2 ** k for k in range(6, 13)),
                              replications=200, seed=42)
        path = strong_law_path_diagnostic(plan)
        assert path[-1].trailing_sup_p95 < 0.7 * path[0].trailing_sup_p95
