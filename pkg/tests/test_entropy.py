import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exspacings import (
    EntropySpec,
    ValidationError,
    build_engine,
    empirical_cn,
    empirical_entropy,
    entropy_direct,
    exact_ce_exponential,
    frac_gce,
    mu_w,
    read_sample,
    w1,
)
from oracles import PI2_OVER_6_MINUS_1, series_pi2_over_6_minus_1


class TestEntropySpec:
    def test_validation(self):
        with pytest.raises(ValidationError):
            EntropySpec("nope")
        with pytest.raises(ValidationError):
            EntropySpec("fgce", alpha=-1.0)
        with pytest.raises(ValidationError):
            EntropySpec("fcre", q=-0.5)

    def test_labels(self):
        assert EntropySpec("ce").label() == "ce"
        assert EntropySpec("fgce", alpha=1.5).label() == "fgce:1.5"
        assert EntropySpec("fcre", q=2.0).label() == "fcre:2"


class TestEmpiricalEntropy:
    def test_two_point_ce(self):
        assert empirical_entropy(EntropySpec("ce"), [1, 2]) == pytest.approx(
            math.log(2) / 2, abs=1e-14
        )

    def test_single_point_is_zero(self):
        assert empirical_entropy(EntropySpec("ce"), [3.3]) == 0.0

    def test_fgce1_equals_ce(self):
        sample = [0.5, 1.7, 2.2, 9.0]
        assert empirical_entropy(
            EntropySpec("fgce", alpha=1.0), sample
        ) == empirical_entropy(EntropySpec("ce"), sample)

    def test_fcre0_equals_simplex_weight(self):
        sample = [0.5, 1.7, 2.2, 9.0]
        assert empirical_entropy(EntropySpec("fcre", q=0.0), sample) == pytest.approx(
            empirical_cn(w1(), sample), abs=1e-14
        )

    def test_fcre1_hand_value(self):
        got = entropy_direct(EntropySpec("fcre", q=1.0), [1, 2])
        assert got == pytest.approx(0.5 * math.log(2), abs=1e-14)


class TestRouteEquality:
    @pytest.mark.parametrize(
        "spec",
        [
            EntropySpec("ce"),
            EntropySpec("fgce", alpha=0.5),
            EntropySpec("fgce", alpha=2.0),
            EntropySpec("fcre", q=1.0),
        ],
    )
    def test_hundred_random_samples(self, spec):
        rng = np.random.default_rng(hash(spec.label()) % 2**32)
        for _ in range(100):
            n = int(rng.integers(1, 60))
            sample = rng.exponential(1.0, n)
            a = empirical_entropy(spec, sample)
            b = entropy_direct(spec, sample)
            assert a == pytest.approx(b, abs=1e-12, rel=1e-12)

    def test_with_ties(self):
        sample = [1.0, 1.0, 2.0, 2.0, 5.0]
        spec = EntropySpec("ce")
        assert empirical_entropy(spec, sample) == pytest.approx(
            entropy_direct(spec, sample), abs=1e-14
        )


class TestExactCe:
    def test_series_value(self):
        assert exact_ce_exponential(1.0) == pytest.approx(
            PI2_OVER_6_MINUS_1, abs=1e-12
        )

    def test_rate_scaling(self):
        assert exact_ce_exponential(2.0) == pytest.approx(
            exact_ce_exponential(1.0) / 2.0, abs=1e-14
        )

    def test_independent_series_route(self):
        assert exact_ce_exponential(1.0) == pytest.approx(
            series_pi2_over_6_minus_1(), abs=1e-11
        )

    def test_agrees_with_weight_quadrature(self):
        e = build_engine(frac_gce(1.0), 3.0)
        assert exact_ce_exponential(3.0) == pytest.approx(mu_w(e), abs=1e-8)


class TestConvergence:
    def test_ce_converges_on_exponential_samples(self):
        gaps = []
        for seed in range(20):
            rng = np.random.default_rng(1000 + seed)
            sample = rng.exponential(1.0, 100_000)
            est = empirical_entropy(EntropySpec("ce"), sample)
            gaps.append(abs(est - PI2_OVER_6_MINUS_1))
        assert float(np.median(gaps)) < 0.02


class TestInvariances:
    def test_shift_invariance_of_ce(self):
        rng = np.random.default_rng(7)
        sample = rng.exponential(1.0, 200)
        spec = EntropySpec("ce")
        assert empirical_entropy(spec, sample + 1.0) == pytest.approx(
            empirical_entropy(spec, sample), abs=1e-12
        )

    @settings(max_examples=25, deadline=None)
    @given(
        s=st.floats(min_value=0.01, max_value=100.0),
        seed=st.integers(min_value=0, max_value=2**32),
    )
    def test_scale_equivariance(self, s, seed):
        rng = np.random.default_rng(seed)
        sample = rng.exponential(1.0, 40)
        spec = EntropySpec("fcre", q=1.0)
        assert empirical_entropy(spec, sample * s) == pytest.approx(
            empirical_entropy(spec, sample) * s, rel=1e-12
        )


class TestReadSample:
    def test_plain_text(self, tmp_path):
        p = tmp_path / "s.txt"
        p.write_text("1.5\n\n2.5\n3.0\n")
        assert read_sample(p).tolist() == [1.5, 2.5, 3.0]

    def test_csv_column(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("id,value\n1,0.5\n2,1.25\n")
        assert read_sample(p, column="value").tolist() == [0.5, 1.25]

    def test_missing_column(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("id,value\n1,0.5\n")
        with pytest.raises(ValidationError):
            read_sample(p, column="nope")

    def test_bad_line(self, tmp_path):
        p = tmp_path / "s.txt"
        p.write_text("1.5\nxyz\n")
        with pytest.raises(ValidationError):
            read_sample(p)
