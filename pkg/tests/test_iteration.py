import math
from fractions import Fraction

import numpy as np
import pytest

from blowlab.iteration import (
    AdmissibilityError,
    OutOfAsymptoticRangeError,
    Variant,
    divergence_onset,
    iterate,
    lower_bound_at,
    slicing_sequence,
    variant_for,
    weighted_geometric_sum,
)
from blowlab.params import ModelParams, Spacetime, damping_roots
from blowlab.regimes import classify


def mk(**kw):
    kw.setdefault("n", 1)
    return ModelParams(**kw)


def ads(**kw):
    kw.setdefault("spacetime", Spacetime.ANTI_DE_SITTER)
    return mk(**kw)


def seq_close(a, b, rel=1e-12):
    denom = np.maximum(np.abs(b), 1.0)
    return np.max(np.abs(a - b) / denom) <= rel


# Random admissible parameter draws, one generator per variant.

def draw_exponential(rng, anti=False):
    b = rng.uniform(0.0, 3.0)
    m2 = rng.uniform(0.0, 1.0) * b * b / 4.0
    p = rng.uniform(1.5, 2.5)
    beta = rng.uniform(0.0, 1.0)
    kappa = rng.uniform(-2.0, 2.0)
    kw = dict(b=b, m2=m2, p=p, beta=beta, kappa_poly=kappa,
              epsilon=rng.uniform(1e-6, 1e-2))
    if anti:
        params = ads(n=1, H=rng.uniform(0.5, 2.0), **kw, r_exp=0.0)
        rep = classify(params)
        assert rep.branch.value == "linPartDominant"
        return ads(n=1, H=params.H, **kw,
                   r_exp=rep.rho_crit_lin + rng.uniform(0.3, 2.0))
    q = (beta + 1.0) * p
    r_crit = damping_roots(b, m2).alpha1 * (q - 1.0)
    return mk(**kw, r_exp=r_crit + rng.uniform(0.3, 2.0))


def draw_polynomial(rng):
    b = rng.uniform(0.5, 3.0)
    m2 = rng.uniform(0.0, 0.9) * b * b / 4.0   # strictly dominant damping
    p = rng.uniform(1.5, 2.5)
    beta = rng.uniform(0.0, 1.0)
    q = (beta + 1.0) * p
    r_crit = damping_roots(b, m2).alpha1 * (q - 1.0)
    return mk(b=b, m2=m2, p=p, beta=beta, r_exp=r_crit,
              kappa_poly=rng.uniform(-0.9, 2.0), epsilon=rng.uniform(1e-6, 1e-2))


def draw_log_dominant(rng):
    b = rng.uniform(0.5, 3.0)
    m2 = rng.uniform(0.0, 0.9) * b * b / 4.0
    p = rng.uniform(1.5, 2.5)
    beta = rng.uniform(0.0, 1.0)
    q = (beta + 1.0) * p
    r_crit = damping_roots(b, m2).alpha1 * (q - 1.0)
    return mk(b=b, m2=m2, p=p, beta=beta, r_exp=r_crit, kappa_poly=-1.0,
              epsilon=rng.uniform(1e-6, 1e-2))


def draw_log_balanced(rng):
    b = rng.uniform(0.0, 3.0)
    m2 = b * b / 4.0
    p = rng.uniform(1.5, 2.5)
    beta = rng.uniform(0.0, 1.0)
    q = (beta + 1.0) * p
    r_crit = b / 2.0 * (q - 1.0)
    return mk(b=b, m2=m2, p=p, beta=beta, r_exp=r_crit, kappa_poly=-1.0 - q,
              epsilon=rng.uniform(1e-6, 1e-2))


def draw_anti_v0(rng):
    b = rng.uniform(0.0, 1.0)
    m2 = rng.uniform(0.0, 1.0) * b * b / 4.0
    H = rng.uniform(0.5, 1.5)
    n = int(rng.integers(3, 6))
    p = rng.uniform(1.8, 2.5)
    beta = rng.uniform(0.0, 1.0)
    base = ads(n=n, H=H, b=b, m2=m2, p=p, beta=beta,
               epsilon=rng.uniform(1e-6, 1e-2))
    rep = classify(base)
    assert rep.branch.value == "v0Dominant"
    return ads(n=n, H=H, b=b, m2=m2, p=p, beta=beta,
               kappa_poly=rng.uniform(-1.0, 1.0),
               r_exp=rep.rho_crit_v0 + rng.uniform(0.3, 2.0),
               epsilon=base.epsilon)


DRAWS = {
    Variant.EXPONENTIAL_2STEP: draw_exponential,
    Variant.POLYNOMIAL_DOMINANT: draw_polynomial,
    Variant.LOG_DOMINANT: draw_log_dominant,
    Variant.LOG_BALANCED: draw_log_balanced,
    Variant.ANTI_DS_EXPONENTIAL: draw_anti_v0,
}


class TestSlicing:
    def test_exponential_product(self):
        spec = slicing_sequence(Variant.EXPONENTIAL_2STEP,
                                mk(b=0.0, m2=0.0, beta=0.0, p=2.0, r_exp=1.0), 2)
        assert spec.ell0 == pytest.approx(1.0)
        assert spec.L[2] == pytest.approx((1 + 2 ** -0.5) * 1.5, rel=1e-12)

    def test_log_balanced_closed_form(self):
        spec = slicing_sequence(Variant.LOG_BALANCED,
                                mk(b=2.0, m2=1.0, beta=0.0, p=2.0, r_exp=1.0,
                                   kappa_poly=-3.0), 3)
        assert spec.L[3] == pytest.approx(15.0 / 8.0)
        assert spec.limit_L == 2.0

    def test_polynomial_ell0(self):
        spec = slicing_sequence(Variant.POLYNOMIAL_DOMINANT, mk(b=3.0, m2=2.0), 1)
        assert spec.ell0 == pytest.approx(1.0)

    def test_monotone_and_convergent(self):
        for variant in Variant:
            rng = np.random.default_rng(11)
            params = DRAWS[variant](rng)
            spec = slicing_sequence(variant, params, 30)
            assert np.all(np.diff(spec.L) > 0)
            assert np.all(spec.ells[1:] > 1.0)
            assert spec.limit_L >= spec.L[-1]
            assert math.isfinite(spec.limit_L)

    def test_admissibility_reported(self):
        # negative m2 pushes alpha1 below -r so ell0 is undefined
        with pytest.raises(AdmissibilityError, match="alpha"):
            slicing_sequence(Variant.EXPONENTIAL_2STEP,
                             mk(b=0.0, m2=-4.0, r_exp=1.0), 3)


class TestRecursions:
    def test_exponential_a_sequence(self):
        # a_{j+1} = r + q a_j from a_0 = 0 gives 2^j - 1
        tr = iterate(Variant.EXPONENTIAL_2STEP,
                     mk(b=0.0, m2=0.0, beta=0.0, p=2.0, r_exp=1.0, epsilon=1e-4), 10)
        assert np.allclose(tr.a[:5], [0.0, 1.0, 3.0, 7.0, 15.0])

    def test_log_dominant_d_sequence(self):
        tr = iterate(Variant.LOG_DOMINANT,
                     mk(b=3.0, m2=2.0, beta=0.0, p=2.0, r_exp=1.0,
                        kappa_poly=-1.0, epsilon=1e-4), 10)
        assert np.allclose(tr.d_seq[:5], [0.0, 1.0, 3.0, 7.0, 15.0])

    def test_polynomial_beta_closed_form(self):
        # beta_j = (kappa_-/(q-1)) (q^j - 1): the arithmetic gives 8 for
        # kappa_- = 2, q = 3, j = 2; an admissible run (kappa_- < 1) must
        # reproduce the same closed form through the recursion
        assert (2.0 / (3.0 - 1.0)) * (3.0 ** 2 - 1.0) == 8.0
        tr = iterate(Variant.POLYNOMIAL_DOMINANT,
                     mk(b=3.0, m2=2.0, beta=0.5, p=2.0, r_exp=2.0,
                        kappa_poly=-0.5, epsilon=1e-4), 5)
        assert tr.q == pytest.approx(3.0)
        assert tr.beta_seq[2] == pytest.approx((0.5 / 2.0) * 8.0, rel=1e-12)

    @pytest.mark.parametrize("variant", list(Variant))
    def test_recursion_matches_closed_forms(self, variant):
        rng = np.random.default_rng(hash(variant.value) % 2 ** 31)
        for _ in range(10):
            params = DRAWS[variant](rng)
            tr = iterate(variant, params, 30)
            for seq, closed in [(tr.a, tr.a_closed), (tr.b_seq, tr.b_closed),
                                (tr.beta_seq, tr.beta_closed),
                                (tr.gamma_seq, tr.gamma_closed),
                                (tr.d_seq, tr.d_closed)]:
                if seq is not None:
                    assert seq_close(seq, closed)

    @pytest.mark.parametrize("variant", list(Variant))
    def test_minorant_limit_and_inequality(self, variant):
        rng = np.random.default_rng(hash(variant.value) % 1000 + 5)
        for _ in range(5):
            params = DRAWS[variant](rng)
            q = params.q
            # index where the minorant tail drops below the tolerance
            j_big = 30
            while (j_big + 1) * q ** (-j_big) * 10.0 > 1e-10 and j_big < 400:
                j_big += 10
            tr = iterate(variant, params, j_big)
            limit = tr.ln_C_minorant[-1] / q ** tr.j_max
            assert limit == pytest.approx(tr.ln_limit, abs=1e-9)
            # exact recursion dominates the minorant from the start index on
            j = tr.start_index
            assert np.all(tr.ln_C[j:31] >= tr.ln_C_minorant[j:31] - 1e-9)
            qs = q ** np.arange(j, 31, dtype=float)
            assert np.all(tr.ln_C[j:31] >= qs * tr.ln_limit - 1e-9)

    def test_summation_identity_rational(self):
        for q in (2, 3, 4):
            for j in range(0, 21):
                direct = sum((j - k) * Fraction(q) ** k for k in range(j))
                closed = (Fraction(q ** (j + 1) - q, q - 1) - j) / (q - 1)
                assert direct == closed
                assert weighted_geometric_sum(float(q), j) == pytest.approx(
                    float(closed), rel=1e-12)

    def test_anti_ds_coefficient_identity(self):
        # a0 - gamma0 + (A0 - A1)/(q-1) = q/(q-1) (rho - rho_crit)
        rng = np.random.default_rng(99)
        for _ in range(10):
            params = draw_anti_v0(rng)
            rep = classify(params)
            from blowlab.iteration import _anti_ds_shifts
            A0, A1, gap = _anti_ds_shifts(params, rep)
            q = params.q
            a0 = gap + 0.5 * params.n * params.H
            g0 = 0.5 * params.b + params.H / params.p
            lhs = a0 - g0 + (A0 - A1) / (q - 1.0)
            assert lhs == pytest.approx(q / (q - 1.0) * gap, rel=1e-12)


class TestLowerBound:
    def test_first_bound_dominant(self):
        # j = 0 reduces to K0 eps e^{-alpha1 t}
        params = mk(b=3.0, m2=2.0, beta=0.0, p=2.0, r_exp=2.0, epsilon=1e-3)
        tr = iterate(Variant.EXPONENTIAL_2STEP, params, 5)
        t = 2.0
        expected = math.log(1e-3) - 1.0 * t
        assert lower_bound_at(tr, 0, t) == pytest.approx(expected, rel=1e-12)

    def test_first_bound_balanced_carries_linear_factor(self):
        # j = 0 balanced: K0 eps (1+t) e^{-b t/2}
        params = mk(b=2.0, m2=1.0, beta=0.0, p=2.0, r_exp=2.0, epsilon=1e-3)
        tr = iterate(Variant.EXPONENTIAL_2STEP, params, 5)
        t = 3.0
        expected = math.log(1e-3) + math.log1p(t) - t
        assert lower_bound_at(tr, 0, t) == pytest.approx(expected, rel=1e-12)

    def test_zero_at_left_endpoint(self):
        # positive kappa makes b_1 > 0, so the (t - L)^{b_1} factor vanishes
        params = mk(b=3.0, m2=2.0, beta=0.0, p=2.0, r_exp=2.0,
                    kappa_poly=0.5, epsilon=1e-3)
        tr = iterate(Variant.EXPONENTIAL_2STEP, params, 5)
        val = lower_bound_at(tr, 1, float(tr.L[2]))
        assert val == -math.inf

    def test_domain_error_below_shift(self):
        params = mk(b=3.0, m2=2.0, beta=0.0, p=2.0, r_exp=2.0, epsilon=1e-3)
        tr = iterate(Variant.EXPONENTIAL_2STEP, params, 5)
        with pytest.raises(ValueError):
            lower_bound_at(tr, 2, float(tr.L[4]) - 0.1)

    def test_monotone_and_divergent_above_onset(self):
        params = mk(b=0.0, m2=0.0, beta=0.0, p=2.0, r_exp=1.0,
                    kappa_poly=0.0, epsilon=1e-8)
        tr = iterate(Variant.EXPONENTIAL_2STEP, params, 30)
        onset = divergence_onset(tr)
        t_hi = 2.0 * onset
        vals = [lower_bound_at(tr, j, t_hi) for j in range(tr.start_index, 31)]
        assert all(v2 >= v1 for v1, v2 in zip(vals, vals[1:]))
        assert vals[-1] > 1e6
        t_lo = 1.05 * max(2.0 * tr.slicing.limit_L, 1.0)
        lows = [lower_bound_at(tr, j, t_lo) for j in range(tr.start_index, 31)]
        assert lows[-1] < -1e6


class TestDivergenceOnset:
    def test_polynomial_scaling(self):
        params = mk(b=3.0, m2=2.0, beta=0.0, p=2.0, r_exp=1.0, kappa_poly=0.0)
        consts = []
        for eps in (1e-2, 1e-3, 1e-4):
            tr = iterate(Variant.POLYNOMIAL_DOMINANT, params.with_epsilon(eps), 5)
            consts.append(divergence_onset(tr) * eps)  # (q-1)/(1+kappa) = 1
        assert consts[0] == pytest.approx(consts[1], rel=1e-10)
        assert consts[1] == pytest.approx(consts[2], rel=1e-10)

    def test_log_dominant_scaling(self):
        params = mk(b=3.0, m2=2.0, beta=0.0, p=2.0, r_exp=1.0, kappa_poly=-1.0)
        consts = []
        for eps in (0.5, 0.4, 0.3):
            tr = iterate(Variant.LOG_DOMINANT, params.with_epsilon(eps), 5)
            onset = divergence_onset(tr)
            consts.append(math.log(onset / tr.slicing.limit_L) * eps)
        assert consts[0] == pytest.approx(consts[1], rel=1e-10)
        assert consts[1] == pytest.approx(consts[2], rel=1e-10)

    def test_exponential_round_trip_and_monotone(self):
        params = mk(b=0.0, m2=0.0, beta=0.0, p=2.0, r_exp=1.0, kappa_poly=0.0)
        onsets = []
        for eps in (1e-6, 1e-7, 1e-8):
            tr = iterate(Variant.EXPONENTIAL_2STEP, params.with_epsilon(eps), 5)
            onsets.append(divergence_onset(tr))
        assert onsets[0] < onsets[1] < onsets[2]
        # forward evaluation at the onset recovers the threshold value
        tr = iterate(Variant.EXPONENTIAL_2STEP, params.with_epsilon(1e-7), 5)
        onset = divergence_onset(tr)
        power = (tr.rate_effective - tr.rate_critical) / (tr.q - 1.0)
        from blowlab.regimes import theta_log
        lhs = math.log(tr.hat_constant * 1e-7) + power * theta_log(onset, tr.aux_exponent)
        assert lhs == pytest.approx(0.0, abs=1e-8)

    def test_anti_ds_onset_monotone(self):
        params = ads(n=3, H=1.0, b=0.0, m2=0.0, beta=0.0, p=2.0,
                     r_exp=3.0, kappa_poly=0.2)
        prev = 0.0
        for eps in (1e-4, 1e-5, 1e-6):
            tr = iterate(Variant.ANTI_DS_EXPONENTIAL, params.with_epsilon(eps), 5)
            onset = divergence_onset(tr)
            assert onset > prev
            prev = onset

    def test_out_of_asymptotic_range(self):
        params = mk(b=0.0, m2=0.0, beta=0.0, p=2.0, r_exp=1.0,
                    kappa_poly=0.0, epsilon=0.5)
        tr = iterate(Variant.EXPONENTIAL_2STEP, params, 5)
        with pytest.raises(OutOfAsymptoticRangeError):
            divergence_onset(tr)


class TestAdmissibility:
    def test_wrong_rate_for_polynomial(self):
        with pytest.raises(AdmissibilityError):
            iterate(Variant.POLYNOMIAL_DOMINANT,
                    mk(b=3.0, m2=2.0, beta=0.0, p=2.0, r_exp=1.3), 5)

    def test_balanced_variant_needs_balance(self):
        with pytest.raises(AdmissibilityError):
            iterate(Variant.LOG_BALANCED,
                    mk(b=3.0, m2=2.0, beta=0.0, p=2.0, r_exp=1.0, kappa_poly=-3.0), 5)

    def test_anti_ds_needs_v0_branch(self):
        with pytest.raises(AdmissibilityError):
            iterate(Variant.ANTI_DS_EXPONENTIAL,
                    ads(n=1, H=1.0, b=0.0, m2=0.0, p=2.0, r_exp=2.0), 5)

    def test_v0_branch_rejects_lin_variants(self):
        params = ads(n=3, H=1.0, b=0.0, m2=0.0, p=2.0, r_exp=3.0)
        with pytest.raises(AdmissibilityError):
            iterate(Variant.EXPONENTIAL_2STEP, params, 5)


class TestVariantSelection:
    def test_mapping(self):
        assert variant_for(mk(b=3.0, m2=2.0, beta=0.0, p=2.0, r_exp=2.0)) \
            is Variant.EXPONENTIAL_2STEP
        assert variant_for(mk(b=1.0, m2=0.0, beta=0.0, p=2.0, r_exp=0.0,
                              kappa_poly=0.0)) is Variant.POLYNOMIAL_DOMINANT
        assert variant_for(mk(b=3.0, m2=2.0, beta=0.0, p=2.0, r_exp=1.0,
                              kappa_poly=-1.0)) is Variant.LOG_DOMINANT
        assert variant_for(mk(b=2.0, m2=1.0, beta=0.0, p=2.0, r_exp=1.0,
                              kappa_poly=-3.0)) is Variant.LOG_BALANCED
        assert variant_for(ads(n=3, H=1.0, b=0.0, m2=0.0, p=2.0, r_exp=3.0)) \
            is Variant.ANTI_DS_EXPONENTIAL

    def test_balanced_polynomial_has_no_variant(self):
        # that case rests on a cited comparison lemma, not a slicing recursion
        assert variant_for(mk(b=0.0, m2=0.0, beta=0.0, p=2.0, r_exp=0.0,
                              kappa_poly=0.0)) is None

    def test_below_threshold_has_no_variant(self):
        assert variant_for(mk(b=3.0, m2=2.0, r_exp=0.0)) is None
