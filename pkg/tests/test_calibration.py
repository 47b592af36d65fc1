import numpy as np
import pytest

from driftscan.calibration import (
    CalibrationSet,
    CalibrationTable,
    band_coverage,
    build_tables,
    representative_band,
    simulate_null_cloud,
    simulate_null_clouds,
)
from driftscan.errors import ArgumentError, ValidationError
from driftscan.measures import get_spec


def _small_cloud(mid="ks", sizes=(20, 40), m=100, seed=3, generator="normal"):
    return simulate_null_cloud(get_spec(mid), sizes, m, generator=generator, seed=seed)


def test_cloud_shape_and_determinism():
    a = _small_cloud()
    b = _small_cloud()
    assert a.window_sizes() == (20, 40)
    for key in a.runs:
        assert np.array_equal(a.runs[key].support, b.runs[key].support)


def test_clouds_share_one_sample_stream():
    # simulating one measure alone or alongside others reads the same draws
    alone = _small_cloud("ks")
    together = simulate_null_clouds(("ks", "hellinger"), (20, 40), 100, seed=3)
    for key in alone.runs:
        assert np.array_equal(alone.runs[key].support, together["ks"].runs[key].support)


def test_cloud_preconditions():
    with pytest.raises(ArgumentError):
        simulate_null_cloud(get_spec("ks"), (20,), 50, seed=0)  # m too small
    with pytest.raises(ArgumentError):
        simulate_null_cloud(get_spec("ks"), (5,), 100, seed=0)  # window too small
    with pytest.raises(ArgumentError):
        simulate_null_cloud(get_spec("bhattacharyya"), (20,), 100, seed=0)


def test_band_is_monotone_with_nonnegative_spread():
    table = representative_band(_small_cloud())
    assert np.all(np.diff(table.grid_x) > 0)
    assert np.all(np.diff(table.grid_cum) >= 0)
    assert np.all(table.grid_sigma >= 0)
    assert table.measure == "ks"


def test_p_value_interpolation_and_tails():
    table = CalibrationTable(
        measure="ks",
        grid_x=np.array([1.0, 2.0, 3.0]),
        grid_cum=np.array([0.2, 0.5, 1.0]),
        grid_sigma=np.zeros(3),
    )
    assert table.p_value(0.0) == 0.0
    assert table.p_value(10.0) == 1.0
    assert table.p_value(2.0) == pytest.approx(0.5)
    assert table.p_value(2.5) == pytest.approx(0.75)
    assert table.reject(10.0, alpha=0.05)
    assert not table.reject(2.0, alpha=0.05)


def test_table_validation():
    with pytest.raises(ValidationError):
        CalibrationTable(
            measure="ks",
            grid_x=np.array([1.0, 1.0]),
            grid_cum=np.array([0.2, 0.5]),
            grid_sigma=np.zeros(2),
        )
    with pytest.raises(ValidationError):
        CalibrationTable(
            measure="ks",
            grid_x=np.array([1.0, 2.0]),
            grid_cum=np.array([0.5, 0.2]),
            grid_sigma=np.zeros(2),
        )


def test_set_round_trip(tmp_path):
    tables = build_tables(measure_ids=("ks", "hellinger"), window_sizes=(20, 40), m=100, seed=5)
    path = tmp_path / "tables.json"
    tables.save(path)
    again = CalibrationSet.load(path)
    assert again.ids() == ("hellinger", "ks")
    for mid in tables.ids():
        assert np.allclose(again[mid].grid_x, tables[mid].grid_x)
        assert np.allclose(again[mid].grid_cum, tables[mid].grid_cum)
        assert again[mid].provenance == tables[mid].provenance


def test_set_lookup_errors(tmp_path):
    tables = build_tables(measure_ids=("ks",), window_sizes=(20, 40), m=100, seed=5)
    with pytest.raises(ArgumentError):
        tables["hellinger"]
    path = tmp_path / "empty.json"
    path.write_text('{"version": 1, "tables": []}')
    with pytest.raises(ValidationError):
        CalibrationSet.load(path)


def test_band_coverage_bounds():
    cloud = _small_cloud(m=200)
    table = representative_band(cloud)
    cov = band_coverage(cloud, table)
    assert 0.0 <= cov <= 1.0
    # with a huge tolerance every member fits
    assert band_coverage(cloud, table, tol=1.0) == 1.0


def test_calibrated_rejection_rate_near_alpha(tables):
    # null data should reject at about the nominal level
    spec = get_spec("ks")
    table = tables["ks"]
    rejections = 0
    runs = 400
    for run in range(runs):
        rng = np.random.default_rng([999, run])
        from driftscan.measures import measure_eval, ecdf_from_samples

        out = measure_eval(spec, ecdf_from_samples(rng.standard_normal(150)),
                           ecdf_from_samples(rng.standard_normal(150)))
        rejections += table.reject(out.normalized, alpha=0.05)
    assert rejections / runs < 0.12
