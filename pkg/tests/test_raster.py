import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from unshred import PgmParseError, binarize, read_pgm, to_gray, write_pgm


def grid(rows):
    return np.array(rows, dtype=np.uint8)


class TestBinarize:
    def test_basic_threshold(self):
        g = grid([[0, 255]])
        assert binarize(g, 128).tolist() == [[1, 0]]

    def test_threshold_is_strict_less_than(self):
        assert binarize(grid([[127]]), 128).tolist() == [[1]]
        assert binarize(grid([[128]]), 128).tolist() == [[0]]

    def test_all_dark_page(self):
        g = np.zeros((3, 3), dtype=np.uint8)
        assert binarize(g, 128).tolist() == np.ones((3, 3)).tolist()

    def test_threshold_range_checked(self):
        with pytest.raises(ValueError):
            binarize(grid([[0]]), 300)


class TestToGray:
    def test_polarity(self):
        assert to_gray(grid([[1, 0]])).tolist() == [[0, 255]]

    def test_blank_goes_white(self):
        assert (to_gray(np.zeros((2, 2), dtype=np.uint8)) == 255).all()


binary_rasters = st.integers(1, 12).flatmap(
    lambda h: st.integers(1, 12).flatmap(
        lambda w: st.lists(
            st.integers(0, 1), min_size=h * w, max_size=h * w
        ).map(lambda cells: np.array(cells, dtype=np.uint8).reshape(h, w))
    )
)

gray_rasters = st.integers(1, 10).flatmap(
    lambda h: st.integers(1, 10).flatmap(
        lambda w: st.lists(
            st.integers(0, 255), min_size=h * w, max_size=h * w
        ).map(lambda cells: np.array(cells, dtype=np.uint8).reshape(h, w))
    )
)


@given(binary_rasters, st.integers(1, 255))
def test_binarize_to_gray_round_trip(b, t):
    assert np.array_equal(binarize(to_gray(b), t), b)


@given(gray_rasters, st.integers(0, 255), st.integers(0, 255))
def test_binarize_monotone_in_threshold(g, t1, t2):
    lo, hi = sorted((t1, t2))
    a, b = binarize(g, lo), binarize(g, hi)
    assert ((b - a) >= 0).all()  # raising t only turns paper cells into ink


class TestPgm:
    def test_read_p5(self):
        data = b"P5\n2 1\n255\n" + bytes([0, 255])
        g = read_pgm(data)
        assert g.shape == (1, 2)
        assert g.tolist() == [[0, 255]]

    def test_read_p2(self):
        g = read_pgm(b"P2\n3 2\n255\n0 10 20\n30 40 50\n")
        assert g.tolist() == [[0, 10, 20], [30, 40, 50]]

    def test_comments_skipped(self):
        g = read_pgm(b"P5\n# scanner model 9000\n2 1\n# gain 3\n255\n" + bytes([7, 9]))
        assert g.tolist() == [[7, 9]]

    @given(gray_rasters)
    def test_write_read_round_trip(self, g):
        assert np.array_equal(read_pgm(write_pgm(g)), g)

    def test_read_write_identity_on_canonical(self):
        data = write_pgm(np.arange(12, dtype=np.uint8).reshape(3, 4))
        assert write_pgm(read_pgm(data)) == data

    def test_unsupported_magic(self):
        with pytest.raises(PgmParseError, match="magic"):
            read_pgm(b"P3\n1 1\n255\n0 0 0")

    def test_truncated_pixels(self):
        with pytest.raises(PgmParseError, match="truncated pixel data"):
            read_pgm(b"P5\n4 4\n255\n" + bytes([1, 2, 3]))

    def test_maxval_too_large(self):
        with pytest.raises(PgmParseError, match="maxval"):
            read_pgm(b"P5\n1 1\n65535\n\x00\x00")

    def test_missing_header(self):
        with pytest.raises(PgmParseError, match="header"):
            read_pgm(b"P5\n2\n")

    def test_non_numeric_header(self):
        with pytest.raises(PgmParseError, match="malformed"):
            read_pgm(b"P5\nx 1\n255\n\x00")

    def test_p2_sample_above_maxval(self):
        with pytest.raises(PgmParseError, match="exceeds maxval"):
            read_pgm(b"P2\n1 1\n100\n101\n")

    def test_p2_truncated_samples(self):
        with pytest.raises(PgmParseError, match="truncated"):
            read_pgm(b"P2\n2 2\n255\n1 2 3\n")

    def test_arbitrary_bytes_fail_cleanly(self):
        # garbage input must surface as a parse error, never anything else
        rng = np.random.default_rng(99)
        for _ in range(300):
            data = bytes(rng.integers(0, 256, int(rng.integers(0, 48)), dtype=np.uint8))
            if rng.integers(0, 2):
                data = b"P5" + data
            try:
                read_pgm(data)
            except PgmParseError:
                pass
