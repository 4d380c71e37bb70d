import math

import numpy as np
import pytest

from blowlab.params import (
    ModelParams,
    RootKind,
    Spacetime,
    ball_volume,
    damping_roots,
    default_frame_constant,
    effective_rate,
    sphere_area,
)


class TestDampingRoots:
    def test_distinct_real(self):
        r = damping_roots(3.0, 2.0)
        assert r.kind is RootKind.DISTINCT_REAL
        assert r.alpha1 == pytest.approx(1.0, rel=1e-14)
        assert r.alpha2 == pytest.approx(2.0, rel=1e-14)

    def test_double_root(self):
        r = damping_roots(2.0, 1.0)
        assert r.kind is RootKind.DOUBLE_ROOT
        assert r.alpha1 == r.alpha2 == 1.0

    def test_complex_conjugate(self):
        r = damping_roots(0.0, 1.0)
        assert r.kind is RootKind.COMPLEX_CONJUGATE
        assert r.discriminant == -4.0
        assert r.omega == pytest.approx(1.0)

    def test_massless_root_is_exactly_zero(self):
        for b in [0.0, 0.5, 1.0, 3.7, 10.0]:
            r = damping_roots(b, 0.0)
            assert r.alpha1 == 0.0
            assert r.alpha2 == b

    def test_reconstruction_property(self):
        # 1000 random (b, m2) with b^2 >= 4 m2: sum and product recover b, m2.
        rng = np.random.default_rng(42)
        for _ in range(1000):
            b = rng.uniform(0.0, 10.0)
            m2 = rng.uniform(0.0, 1.0) * b * b / 4.0
            r = damping_roots(b, m2)
            assert r.alpha1 + r.alpha2 == pytest.approx(b, rel=1e-12, abs=1e-12)
            assert r.alpha1 * r.alpha2 == pytest.approx(m2, rel=1e-12, abs=1e-12)
            assert r.alpha1 <= r.alpha2

    def test_forced_balanced_mode(self):
        r = damping_roots(2.0, 1.0 - 1e-9, force_balanced=True)
        assert r.kind is RootKind.DOUBLE_ROOT


class TestModelParams:
    def test_q_combined_power(self):
        p = ModelParams(n=1, beta=1.0, p=2.0)
        assert p.q == 4.0

    @pytest.mark.parametrize("field,value", [
        ("p", 1.0), ("p", 0.5), ("beta", -0.1), ("c", 0.0), ("H", -1.0),
        ("mu", 0.0), ("R", 0.0), ("epsilon", 0.0), ("b", -0.5), ("n", 0),
    ])
    def test_rejects_bad_fields(self, field, value):
        with pytest.raises(ValueError):
            ModelParams(**{"n": 1, field: value} if field != "n" else {"n": value})

    def test_speed_and_cone(self):
        ds = ModelParams(n=1, c=2.0, H=0.5)
        assert ds.speed(0.0) == 2.0
        assert ds.speed(1.0) == pytest.approx(2.0 * math.exp(-0.5))
        # saturating cone radius c/H
        assert ds.cone_amplitude(50.0) == pytest.approx(4.0, rel=1e-10)
        ads = ModelParams(n=1, c=2.0, H=0.5, spacetime=Spacetime.ANTI_DE_SITTER)
        assert ads.speed(1.0) == pytest.approx(2.0 * math.exp(0.5))
        assert ads.cone_amplitude(1.0) == pytest.approx(4.0 * (math.exp(0.5) - 1.0))

    def test_gamma_log_domain(self):
        p = ModelParams(n=1, mu=2.0, r_exp=3.0, kappa_poly=-1.0)
        assert p.log_gamma(500.0) == pytest.approx(
            math.log(2.0) + 1500.0 - math.log(501.0))
        assert p.gamma(0.0) == pytest.approx(2.0)

    def test_effective_rate_shift(self):
        ds = ModelParams(n=3, H=2.0, beta=1.0, p=2.0, r_exp=5.0)
        assert effective_rate(ds) == 5.0
        ads = ModelParams(n=3, H=2.0, beta=1.0, p=2.0, r_exp=5.0,
                          spacetime=Spacetime.ANTI_DE_SITTER)
        assert effective_rate(ads) == pytest.approx(5.0 - 3 * 2.0 * 2.0 * 1.0)


class TestGeometry:
    def test_sphere_area(self):
        assert sphere_area(1) == pytest.approx(2.0)
        assert sphere_area(2) == pytest.approx(2.0 * math.pi)
        assert sphere_area(3) == pytest.approx(4.0 * math.pi)

    def test_ball_volume(self):
        assert ball_volume(3, 2.0) == pytest.approx(4.0 / 3.0 * math.pi * 8.0)

    def test_default_frame_constant(self):
        p = ModelParams(n=1, c=1.0, H=1.0, beta=0.0, p=2.0, R=1.0)
        # interval of radius 2 has measure 4; exponent (p-1)(beta+1) = 1
        assert default_frame_constant(p) == pytest.approx(0.25)
