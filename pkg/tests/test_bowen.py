import pytest

from fathorse.bowen import verify_surgery
from fathorse.errors import DomainError, SingularityError
from fathorse.rng import SplitMix64


class TestGapDiffeo:
    def test_endpoint_slopes_exactly_two(self, bowen18):
        for word in ("", "0", "11", "010"):
            d = bowen18.gap_diffeo(word)
            assert d.derivative(d.source[0]) == 2.0
            assert d.derivative(d.source[1]) == 2.0

    def test_maps_source_onto_target(self, bowen18):
        for word in ("", "1", "00", "0110"):
            d = bowen18.gap_diffeo(word)
            assert d.value(d.source[0]) == d.target[0]
            assert d.value(d.source[1]) == pytest.approx(d.target[1], abs=1e-15)

    def test_mean_slope_formula(self, bowen18):
        p = bowen18.cc.gaps.exponent
        for word, n in (("", 0), ("0", 1), ("101", 3)):
            d = bowen18.gap_diffeo(word)
            assert d.mean_slope == pytest.approx(2.0 * ((n + 2.0) / (n + 1.0)) ** p, rel=1e-12)

    def test_sup_deviation_at_midpoint(self, bowen18):
        d = bowen18.gap_diffeo("")
        mid = 0.5 * (d.source[0] + d.source[1])
        assert d.derivative(mid) == pytest.approx(2.0 + 2.0 * (d.mean_slope - 2.0), rel=1e-12)

    def test_invert_round_trip(self, bowen18):
        d = bowen18.gap_diffeo("01")
        for i in range(21):
            x = d.source[0] + (d.source[1] - d.source[0]) * i / 20
            assert d.invert(d.value(x)) == pytest.approx(x, abs=1e-13)


class TestBaseMap:
    def test_fixed_endpoints(self, bowen18, lorenz18):
        assert bowen18.base_value(lorenz18.a) == lorenz18.a
        assert bowen18.base_value(lorenz18.b) == -lorenz18.a

    def test_gap_center_to_center(self, bowen18, lorenz18):
        center = 0.5 * (lorenz18.a + lorenz18.b)
        assert bowen18.base_value(center) == pytest.approx(0.0, abs=1e-15)

    def test_address_shift_at_interval_endpoint(self, bowen18, lorenz18):
        # right endpoint of I_{01} is the left edge of the top gap; its
        # image is the matching edge one level up, the point -b
        hi = bowen18.cc.interval("01")[1]
        assert bowen18.base_value(hi) == pytest.approx(-lorenz18.b, abs=1e-15)

    def test_nested_gap_midpoints(self, bowen18):
        src = bowen18.cc.gap("00")
        tgt = bowen18.cc.gap("0")
        got = bowen18.base_value(0.5 * (src[0] + src[1]))
        assert got == pytest.approx(0.5 * (tgt[0] + tgt[1]), abs=1e-14)

    def test_address_shift_on_sample_points(self, bowen18):
        cc = bowen18.cc
        rng = SplitMix64(7)
        lo, hi = cc.interval("0")
        for _ in range(200):
            x = lo + rng.random() * (hi - lo)
            kind, word = cc.locate(x, 9)
            assert word[0] == "0"
            image = bowen18.base_value(x)
            kind2, word2 = cc.locate(image, len(word) - 1 if kind == "interval" else 9)
            if kind == "gap":
                assert (kind2, word2) == ("gap", word[1:])
            else:
                assert word2 == word[1:]

    def test_domain(self, bowen18):
        with pytest.raises(DomainError):
            bowen18.base_value(0.01)
        with pytest.raises(DomainError):
            bowen18.base_value(0.15, tol=1e-14)


class TestBaseDerivative:
    def test_endpoints_exactly_two(self, bowen18, lorenz18):
        assert bowen18.base_derivative(lorenz18.a) == 2.0
        assert bowen18.base_derivative(lorenz18.b) == 2.0
        for word in ("", "0", "10"):
            glo, ghi = bowen18.cc.gap("0" + word)
            assert bowen18.base_derivative(glo) == 2.0
            assert bowen18.base_derivative(ghi) == 2.0

    def test_gap_midpoint_profile(self, bowen18):
        # level-3 gap: mean slope 2(5/4)^2 = 3.125, peak 2 + 2(s-2) = 4.25
        word = "101"
        glo, ghi = bowen18.cc.gap("0" + word)
        got = bowen18.base_derivative(0.5 * (glo + ghi))
        assert got == pytest.approx(4.25, rel=1e-11)

    @pytest.mark.parametrize("n", [9, 12])
    def test_deep_gap_midpoints_approach_two(self, bowen18, n):
        p = bowen18.cc.gaps.exponent
        word = "0" * n
        glo, ghi = bowen18.cc.gap("0" + word)
        dev = bowen18.base_derivative(0.5 * (glo + ghi)) - 2.0
        assert dev == pytest.approx(4.0 * p / (n + 1.0), abs=8.0 / (n + 1.0) ** 2)

    def test_cantor_point_ratio_near_two(self, bowen18):
        # a point so deep that the walk bottoms out on the interval side:
        # the reported slope is the interval-length ratio, already near 2
        lo, hi = bowen18.cc.interval("0" + "01" * 18)
        d = bowen18.base_derivative(0.5 * (lo + hi))
        assert abs(d - 2.0) < 0.01


class TestBaseInverse:
    def test_splice_values(self, bowen18, lorenz18):
        assert bowen18.base_invert(-lorenz18.a) == lorenz18.b
        assert bowen18.base_invert(lorenz18.a) == lorenz18.a

    def test_gap_center(self, bowen18, lorenz18):
        assert bowen18.base_invert(0.0) == pytest.approx(
            0.5 * (lorenz18.a + lorenz18.b), abs=1e-14
        )

    def test_round_trip(self, bowen18, lorenz18):
        a = lorenz18.a
        worst = 0.0
        for i in range(2_001):
            v = -a + 2.0 * a * i / 2_000
            worst = max(worst, abs(bowen18.base_value(bowen18.base_invert(v)) - v))
        assert worst < 1e-9


class TestSplicedMap:
    def test_splice_values(self, bowen18, lorenz18):
        a = lorenz18.a
        fb = bowen18.fb
        assert bowen18.modified_value(a) == pytest.approx(-a, abs=1e-15)
        assert bowen18.modified_value(-fb) == pytest.approx(a, abs=1e-14)
        assert bowen18.modified_value(1.0) == pytest.approx(0.8, abs=1e-15)

    def test_singularity(self, bowen18):
        with pytest.raises(SingularityError):
            bowen18.modified_value(0.0)

    def test_odd_symmetry(self, bowen18):
        for i in range(1, 400):
            x = i / 400
            assert bowen18.modified_value(-x) == pytest.approx(
                -bowen18.modified_value(x), abs=1e-13
            )

    def test_second_iterate_factors_through_base(self, bowen18, lorenz18):
        rng = SplitMix64(11)
        b, a = lorenz18.b, lorenz18.a
        worst = 0.0
        for _ in range(10_000):
            x = b + rng.random() * (a - b)
            worst = max(worst, abs(bowen18.second_iterate(x) - bowen18.base_value(x)))
        assert worst < 1e-9

    def test_inverse_splice_values(self, bowen18, lorenz18):
        a = lorenz18.a
        assert bowen18.invert_right(-a) == pytest.approx(a, abs=1e-14)
        assert bowen18.invert_right(a) == pytest.approx(-bowen18.fb, abs=1e-14)

    def test_inverse_center_composite(self, bowen18, lorenz18):
        # x = -f(B^{-1}(0)) with B^{-1}(0) the center of the core gap
        center = 0.5 * (lorenz18.a + lorenz18.b)
        expected = -lorenz18.value(center)
        assert bowen18.invert_right(0.0) == pytest.approx(expected, abs=1e-13)

    def test_inverse_round_trip(self, bowen18, lorenz18):
        worst = 0.0
        for i in range(5_000):
            y = -0.999 + i * (0.8 + 0.999) / 4_999
            x = bowen18.invert_right(y)
            worst = max(worst, abs(bowen18.modified_value(x) - y))
        assert worst < 1e-9

    def test_inverse_domain(self, bowen18):
        with pytest.raises(DomainError):
            bowen18.invert_right(0.81)


@pytest.fixture(scope="module")
def report(bowen18):
    return verify_surgery(bowen18, max_level=10, monotone_grid=20_000)


class TestVerifySurgery:
    def test_level_zero_sup(self, report):
        assert report.levels[0].sup_dev == pytest.approx(12.0, abs=1e-9)

    def test_level_nine_sup(self, report):
        assert report.levels[9].sup_dev == pytest.approx(0.84, abs=1e-9)

    def test_formula_agreement(self, report):
        assert all(lv.formula_err <= 1e-9 for lv in report.levels)

    def test_endpoint_derivatives(self, report):
        assert report.endpoint_max_dev <= 1e-9
        assert report.endpoint_count == 2 + 2 * (2 ** 10 - 1)

    def test_splice_continuity(self, report):
        assert max(report.splice_margins.values()) <= 1e-10

    def test_monotone_and_decreasing(self, report):
        assert report.monotone_ok
        assert report.sup_strictly_decreasing
        assert report.all_pass

    def test_measure_preserved_under_shift(self, bowen18):
        # the base map doubles lengths: the cover inside I_{0w} is half
        # the matching cover inside I_w
        cc = bowen18.cc
        for word in ("", "0", "11"):
            for level in (len(word) + 2, len(word) + 5):
                half = cc.subtree_cover_length("0" + word, level)
                full = cc.subtree_cover_length(word, level)
                assert abs(2.0 * half - full) <= 1e-12
