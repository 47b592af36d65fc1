import numpy as np
import pytest

from driftscan.errors import ArgumentError, ParseError, ValidationError
from driftscan.series import (
    FormatOptions,
    Series,
    Window,
    parse_series,
    serialize_series,
    split_blocks,
    window_view,
)


def test_parse_basic_rows():
    s = parse_series("0,1.5,2.5\n1,3.0,4.0\n")
    assert len(s) == 2
    assert s.d == 2
    assert s.epochs.tolist() == [0, 1]
    assert s.data[1].tolist() == [3.0, 4.0]


def test_parse_header_autodetect():
    s = parse_series("epoch,v1\n0,1.0\n1,2.0\n")
    assert len(s) == 2


def test_parse_explicit_header_flag():
    s = parse_series("epoch,v1\n0,1.0\n", FormatOptions(has_header=True))
    assert len(s) == 1


def test_parse_skips_comment_lines():
    s = parse_series("# manifest_digest=abc\n0,1.0\n1,2.0\n")
    assert len(s) == 2


def test_parse_with_timestamp_column():
    s = parse_series("0,100,1.0\n1,200,2.0\n", FormatOptions(has_timestamp=True))
    assert s.timestamps.tolist() == [100, 200]
    assert s.data.ravel().tolist() == [1.0, 2.0]


def test_parse_reorder_by_epoch():
    s = parse_series("2,5.0\n0,1.0\n1,3.0\n", FormatOptions(reorder_by_epoch=True))
    assert s.epochs.tolist() == [0, 1, 2]
    assert s.data.ravel().tolist() == [1.0, 3.0, 5.0]


def test_parse_error_reports_line_number():
    with pytest.raises(ParseError) as exc:
        parse_series("0,1.0\nbad,2.0\n")
    assert exc.value.line == 2


def test_parse_rejects_non_finite_values():
    with pytest.raises(ValidationError):
        parse_series("0,nan\n")


def test_parse_rejects_duplicate_epochs():
    with pytest.raises(ValidationError):
        parse_series("0,1.0\n0,2.0\n")


def test_parse_rejects_ragged_rows():
    with pytest.raises(ParseError):
        parse_series("0,1.0,2.0\n1,3.0\n")


def test_parse_rejects_empty_input():
    with pytest.raises(ParseError):
        parse_series("")


def test_serialize_round_trip():
    s = Series.from_values(np.array([[1.25, -3.5], [0.0, 2.0]]))
    again = parse_series(serialize_series(s))
    assert np.array_equal(again.data, s.data)
    assert np.array_equal(again.epochs, s.epochs)


def test_window_bounds_and_view():
    s = Series.from_values(np.arange(10.0).reshape(10, 1))
    w = Window(2, 3)
    assert w.stop == 5
    assert window_view(s, w).ravel().tolist() == [2.0, 3.0, 4.0]
    with pytest.raises(ArgumentError):
        window_view(s, Window(8, 5))


def test_window_rejects_bad_shape():
    with pytest.raises(ArgumentError):
        Window(-1, 5)
    with pytest.raises(ArgumentError):
        Window(0, -1)


def test_split_blocks_drops_remainder():
    s = Series.from_values(np.zeros((10, 1)))
    blocks = split_blocks(s, 3)
    assert [(b.start, b.stop) for b in blocks] == [(0, 3), (3, 6), (6, 9)]


def test_from_values_rejects_non_finite():
    with pytest.raises(ValidationError):
        Series.from_values(np.array([[np.inf]]))
