import numpy as np
import pytest

from driftscan.datagen import (
    SyntheticPlan,
    UniBenchPlan,
    classified_to_series,
    gen_average_series,
    gen_mixture_series,
    gen_synthetic,
    gen_unibench,
    gen_variance_series,
)
from driftscan.errors import ArgumentError


def test_plan_validation():
    with pytest.raises(ArgumentError):
        SyntheticPlan(kind="nope")
    with pytest.raises(ArgumentError):
        SyntheticPlan(kind="average", blocks=2)
    with pytest.raises(ArgumentError):
        SyntheticPlan(kind="average", d=0)


def test_first_two_blocks_share_parameters():
    for kind in ("average", "variance", "mixture"):
        _, ann = gen_synthetic(SyntheticPlan(kind=kind, blocks=5, block_len=50, seed=1))
        assert ann[0].params == ann[1].params
        assert [a.start for a in ann] == [0, 50, 100, 150, 200]


def test_average_schedule_endpoints():
    _, ann = gen_synthetic(SyntheticPlan(kind="average", seed=0))
    means = [a.params["mean"] for a in ann]
    assert means[0] == means[1] == 0.0
    assert means[2] == pytest.approx(0.05)
    assert means[-1] == pytest.approx(50.0)


def test_variance_schedule_endpoints():
    _, ann = gen_synthetic(SyntheticPlan(kind="variance", seed=0))
    sigmas = [a.params["sigma"] for a in ann]
    assert sigmas[0] == sigmas[1] == 1.0
    assert sigmas[2] == pytest.approx(10.0**0.01)
    assert sigmas[-1] == pytest.approx(10.0)


def test_mixture_schedule_reaches_pure_uniform():
    _, ann = gen_synthetic(SyntheticPlan(kind="mixture", seed=0))
    fractions = [a.params["uniform_fraction"] for a in ann]
    assert fractions[0] == fractions[1] == 0.0
    assert fractions[-1] == 1.0
    assert all(b >= a for a, b in zip(fractions[2:], fractions[3:]))


def test_generated_series_shape_and_determinism():
    plan = SyntheticPlan(kind="average", blocks=4, block_len=30, d=3, seed=9)
    s1, _ = gen_synthetic(plan)
    s2, _ = gen_synthetic(plan)
    assert s1.data.shape == (120, 3)
    assert np.array_equal(s1.data, s2.data)


def test_kind_specific_wrappers_check_kind():
    plan = SyntheticPlan(kind="average", blocks=3, block_len=10)
    gen_average_series(plan)
    with pytest.raises(ArgumentError):
        gen_variance_series(plan)
    with pytest.raises(ArgumentError):
        gen_mixture_series(SyntheticPlan(kind="average", blocks=3, block_len=10))


def test_classified_to_series_largest_first():
    rows = np.arange(10.0).reshape(10, 1)
    labels = np.array(["a"] * 3 + ["b"] * 7)
    series, boundaries = classified_to_series(rows, labels, seed=0)
    assert boundaries == [7]
    assert set(series.data[:7].ravel()) == set(range(3, 10))
    assert set(series.data[7:].ravel()) == {0.0, 1.0, 2.0}


def test_classified_to_series_needs_two_classes():
    with pytest.raises(ArgumentError):
        classified_to_series(np.zeros((4, 1)), ["a"] * 4)


def test_unibench_plan_validation_and_random_ranges():
    with pytest.raises(ArgumentError):
        UniBenchPlan(m_windows=1, t=100, embed_position=2)
    with pytest.raises(ArgumentError):
        UniBenchPlan(m_windows=5, t=50, embed_position=2)
    with pytest.raises(ArgumentError):
        UniBenchPlan(m_windows=5, t=100, embed_position=6)
    for seed in range(50):
        plan = UniBenchPlan.random(seed)
        assert 2 <= plan.m_windows <= 20
        assert plan.t % 100 == 0 and 100 <= plan.t <= 1000
        assert 2 <= plan.embed_position <= plan.m_windows


def test_unibench_embed_window_repeats_reference_parameters():
    for change in ("average", "variance", "both"):
        plan = UniBenchPlan.random(3, change=change)
        series, ann = gen_unibench(plan)
        assert len(series) == plan.m_windows * plan.t
        assert ann.window_params[0] == ann.window_params[plan.embed_position - 1]
        assert ann.embed_start == (plan.embed_position - 1) * plan.t
        # every other window deviates from the reference parameters
        for i, params in enumerate(ann.window_params):
            if i not in (0, plan.embed_position - 1):
                assert params != ann.window_params[0]


def test_unibench_average_change_touches_only_means():
    plan = UniBenchPlan.random(5, change="average")
    _, ann = gen_unibench(plan)
    m0, v0 = ann.window_params[0]
    for i, (mean, sigma) in enumerate(ann.window_params, start=1):
        assert sigma == v0
        if i not in (1, plan.embed_position):
            assert mean == pytest.approx(m0 + m0 / i) or mean == pytest.approx(m0 - m0 / i)


def test_unibench_uniform_base_distribution():
    plan = UniBenchPlan.random(7, base_distribution="uniform")
    series, ann = gen_unibench(plan)
    m0, v0 = ann.window_params[0]
    ref = series.data[: plan.t, 0]
    assert ref.min() >= m0 - v0
    assert ref.max() <= m0 + v0
