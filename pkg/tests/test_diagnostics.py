"""Filtration traces and membership classification."""

import numpy as np
import pytest

from rkhskit import (
    BinomialKernel,
    BrownianKernel,
    Converging,
    Diverging,
    Filtration,
    FiltrationTrace,
    Inconclusive,
    Kernel,
    MonotonicityViolation,
    PointSet,
    SingularGram,
    Stabilized,
    TableKernel,
    TooFewStages,
    classify,
    det_ratio_trace,
    trace,
)


class TestFiltration:
    def test_prefix_constructor(self):
        f = Filtration.prefixes([1, 2, 3], target=1)
        assert [len(s) for s in f.stages] == [1, 2, 3]
        assert f.stages[1].labels == (1, 2)

    def test_doubling_constructor(self):
        f = Filtration.doubling(list(range(20)), target=0)
        assert [len(s) for s in f.stages] == [1, 2, 4, 8, 16, 20]

    def test_rejects_non_prefix_stages(self):
        with pytest.raises(ValueError, match="prefixes"):
            Filtration((PointSet((1,)), PointSet((2, 1))), target=1)

    def test_rejects_absent_target(self):
        with pytest.raises(ValueError, match="never enters"):
            Filtration.prefixes([1, 2, 3], target=7)


class TestTrace:
    def test_brownian_first_point(self):
        tr = trace(BrownianKernel(), Filtration.prefixes([1, 2, 3]))
        np.testing.assert_allclose(tr.values, [1.0, 2.0, 2.0], rtol=1e-9)
        assert tr.stage_sizes == (1, 2, 3)

    def test_single_stage(self):
        tr = trace(BrownianKernel(), Filtration.prefixes([4.0]))
        np.testing.assert_allclose(tr.values, [0.25], rtol=1e-12)

    def test_stages_without_target_are_skipped(self):
        tr = trace(BrownianKernel(), Filtration.prefixes([2, 1, 3], target=1))
        assert tr.stage_indices == (2, 3)
        # with both points present the first-point norm is already attained
        np.testing.assert_allclose(tr.values, [2.0, 2.0], rtol=1e-9)

    def test_binomial_exact_values(self):
        tr = trace(BinomialKernel(), Filtration.prefixes(list(range(5)), target=1))
        assert tr.exact_values is not None
        assert [int(v) for v in tr.exact_values] == [1, 5, 14, 30]
        np.testing.assert_allclose(tr.values, [1.0, 5.0, 14.0, 30.0])

    def test_monotonicity_violation_detected(self):
        class ShrinkingKernel(Kernel):
            # inconsistent on purpose: entries depend on the stage size, so
            # the nesting theorem fails and the guard must fire
            name = "broken"

            def gram(self, labels):
                return np.eye(len(labels)) * len(labels)

        kernel = ShrinkingKernel()
        with pytest.raises(MonotonicityViolation):
            trace(kernel, Filtration.prefixes([0, 1, 2]))


class TestClassify:
    def test_stabilized_brownian(self):
        tr = trace(BrownianKernel(), Filtration.prefixes(list(range(1, 11))))
        verdict = classify(tr)
        assert isinstance(verdict, Stabilized)
        assert verdict.stage == 2
        assert verdict.limit == pytest.approx(2.0, rel=1e-9)
        assert tr.verdict is verdict

    def test_stabilized_interior_target_neighbor_gap_limit(self):
        pts = [0.5, 1.25, 2.0, 3.5, 5.0, 6.0, 7.25, 9.0, 10.0, 11.5]
        target_idx = 3
        tr = trace(BrownianKernel(), Filtration.prefixes(pts, target=pts[target_idx]))
        verdict = classify(tr)
        assert isinstance(verdict, Stabilized)
        left, mid, right = pts[target_idx - 1], pts[target_idx], pts[target_idx + 1]
        want = (right - left) / ((mid - left) * (right - mid))
        assert verdict.limit == pytest.approx(want, rel=1e-9)
        # flat from the stage that brings in the right neighbor
        assert verdict.stage == target_idx + 2

    def test_diverging_binomial(self):
        for target in range(4):
            tr = trace(BinomialKernel(), Filtration.prefixes(list(range(31)), target=target))
            assert isinstance(classify(tr), Diverging)

    def test_diverging_accumulation_by_slope(self):
        pts = [1.0] + [1 - 1 / n for n in range(2, 60)]
        tr = trace(BrownianKernel(), Filtration.prefixes(pts, target=1.0))
        verdict = classify(tr)
        assert isinstance(verdict, Diverging)
        assert verdict.growth_exponent > 0.5

    def test_too_few_stages(self):
        tr = trace(BrownianKernel(), Filtration.prefixes(list(range(1, 6))))
        with pytest.raises(TooFewStages):
            classify(tr)  # default k = 5 needs six reported stages

    def test_converging_geometric(self):
        values = 2.0 - 0.5 ** np.arange(1, 13)
        tr = FiltrationTrace(
            target=0,
            stage_indices=tuple(range(1, 13)),
            stage_sizes=tuple(range(1, 13)),
            values=values,
        )
        verdict = classify(tr)
        assert isinstance(verdict, Converging)
        assert verdict.estimate == pytest.approx(2.0, rel=1e-6)

    def test_inconclusive_flat_drift(self):
        values = 3.0 + 5e-4 * np.arange(10)
        tr = FiltrationTrace(
            target=0,
            stage_indices=tuple(range(1, 11)),
            stage_sizes=tuple(range(1, 11)),
            values=values,
        )
        assert isinstance(classify(tr), Inconclusive)

    def test_policy_recorded(self):
        tr = trace(BrownianKernel(), Filtration.prefixes(list(range(1, 11))))
        verdict = classify(tr, tau_stab=1e-8, tau_div=1e-2, k=6)
        assert verdict.policy.tau_stab == 1e-8
        assert verdict.policy.tau_div == 1e-2
        assert verdict.policy.k == 6


class TestDetRatioTrace:
    def test_brownian_examples(self):
        ratios = det_ratio_trace(BrownianKernel(), Filtration.prefixes([1, 2]))
        np.testing.assert_allclose(ratios, [1.0, 2.0], rtol=1e-9)

    def test_single_point_stage(self):
        ratios = det_ratio_trace(BrownianKernel(), Filtration.prefixes([4.0]))
        np.testing.assert_allclose(ratios, [0.25], rtol=1e-12)

    def test_two_point_minor(self):
        ratios = det_ratio_trace(BrownianKernel(), Filtration.prefixes([2, 5], target=2))
        np.testing.assert_allclose(ratios[-1], 5 / 6, rtol=1e-9)

    def test_matches_trace_on_random_pd_tables(self):
        rng = np.random.default_rng(31)
        for _ in range(25):
            n = int(rng.integers(2, 9))
            a = rng.normal(size=(n, n))
            k = a.T @ a + 0.05 * np.eye(n)
            k = np.triu(k) + np.triu(k, 1).T
            kernel = TableKernel(tuple(range(n)), k)
            filtration = Filtration.prefixes(tuple(range(n)), target=0)
            tr = trace(kernel, filtration)
            ratios = det_ratio_trace(kernel, filtration)
            np.testing.assert_allclose(ratios, tr.values, rtol=1e-8)

    def test_exact_for_binomial(self):
        ratios = det_ratio_trace(BinomialKernel(), Filtration.prefixes(list(range(5)), target=1))
        np.testing.assert_allclose(ratios, [1.0, 5.0, 14.0, 30.0])

    def test_singular_stage_raises(self):
        kernel = TableKernel((0, 1), [[1.0, 1.0], [1.0, 1.0]])
        with pytest.raises(SingularGram):
            det_ratio_trace(kernel, Filtration.prefixes((0, 1)))
