"""Scalar evaluation of the product h, the map f, probe points, and the
contour machinery for g = exp(-integral of e^{-h})."""

import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from bakerlab.hfun import (
    NonConvergence,
    eval_f,
    eval_g,
    eval_h,
    integrate_exp_neg_h,
    newton_residual,
    probe_point,
    stored_zeros,
    theta,
)
from bakerlab.logc import LogComplex, Zero
from bakerlab.params import ParamSeq, make_toy

from _oracles import h_ref, integral_exp_neg_h_ref, theta_ref

DOUBLING = make_toy("doubling")
E = math.e


class TestEvalH:
    def test_value_at_one_frozen_and_live(self):
        res = eval_h(1.0, DOUBLING)
        assert res.value == pytest.approx(1.2548828872968443, abs=1e-15)
        live = complex(h_ref(1.0, DOUBLING.r, DOUBLING.n))
        assert res.value == pytest.approx(live, abs=1e-15)
        assert res.regime == "exact-ish"

    def test_random_points_match_high_precision(self):
        rng = np.random.default_rng(3)
        for x, y in rng.uniform(-12, 12, (20, 2)):
            z = complex(x, y)
            got = eval_h(z, DOUBLING).value
            ref = complex(h_ref(z, DOUBLING.r, DOUBLING.n))
            assert cmath.isclose(got, ref, rel_tol=5e-13)

    def test_truncation_bound_structure(self):
        # inside half the last ring radius the tail is controlled
        res = eval_h(1.0, DOUBLING)
        assert res.trunc_bound == pytest.approx(math.exp(2.0 ** -3) - 1.0,
                                                abs=1e-15)
        assert res.unbounded_tail is False
        # beyond it nothing is claimed
        far = eval_h(9.0, DOUBLING)
        assert far.unbounded_tail is True
        assert far.trunc_bound == math.inf

    def test_truncation_bound_tightens_with_more_rings(self):
        p2 = ParamSeq(r=DOUBLING.r[:2], n=DOUBLING.n[:2])
        b2 = eval_h(0.5, p2).trunc_bound
        b4 = eval_h(0.5, DOUBLING).trunc_bound
        assert b4 < b2

    def test_exact_zero_tag(self):
        assert isinstance(eval_h(2j, DOUBLING).value, Zero)


class TestEvalF:
    def test_unit_translation_at_zero_is_bitwise(self):
        a = 2j
        res = eval_f(a, DOUBLING)
        assert res.value == a + 1.0
        assert isinstance(res.value, complex)

    def test_all_stored_zeros_translate_by_one(self):
        zs = stored_zeros(DOUBLING)
        assert len(zs) == 30  # 2 + 4 + 8 + 16
        for k, nu, a in zs:
            assert isinstance(eval_h(a, DOUBLING).value, Zero)
            assert eval_f(a, DOUBLING).value == a + 1.0

    def test_cartesian_value_matches_high_precision(self):
        z = 1.5 + 0.25j
        got = eval_f(z, DOUBLING).value
        ctx = mp.mp.clone()
        ctx.prec = 200
        ref = complex(ctx.mpc(z.real, z.imag)
                      + ctx.exp(h_ref(z, DOUBLING.r, DOUBLING.n)))
        assert cmath.isclose(got, ref, rel_tol=1e-13)

    def test_escaped_regime_goes_log_polar(self):
        res = eval_f(20.0, DOUBLING)
        assert isinstance(res.value, LogComplex)
        assert res.regime == "escaped"
        # Re h(20) at 200 bits
        ref = h_ref(20.0, DOUBLING.r, DOUBLING.n)
        assert res.value.logmod == pytest.approx(float(ref.real), rel=1e-13)
        assert res.perturbation == 20.0


class TestTheta:
    def test_quarter_turn_frozen_value(self):
        assert theta(0.25) == pytest.approx(0.6900419548937861, abs=1e-14)

    def test_matches_high_precision_solver(self):
        for phi in (0.1, 0.25, 0.37, 0.5, 0.93, 1.75, -0.3):
            assert theta(phi) == pytest.approx(theta_ref(phi), abs=1e-13)

    def test_wrap_ties_give_zero(self):
        assert theta(0.0) == 0.0
        assert theta(1.0) == 0.0
        assert theta(-2.0) == 0.0

    def test_defining_property(self):
        rng = np.random.default_rng(17)
        for phi in rng.uniform(-3, 3, 200):
            t = theta(float(phi))
            assert 0.0 <= t < 1.0
            val = cmath.exp(2j * math.pi * phi) * (
                1.0 + E * cmath.exp(2j * math.pi * t))
            assert abs(val.imag) <= 1e-12
            assert val.real > 0.0

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            theta(math.inf)


class TestProbePoint:
    def test_first_sector_of_second_ring(self):
        pp = probe_point(2, 0, DOUBLING)
        # a sits mid-sector on the ring: 4 e^{i pi/4}
        assert pp.a == pytest.approx(4 * cmath.exp(1j * math.pi / 4),
                                     abs=1e-14)
        assert pp.b == pytest.approx(5.0, abs=1e-12)  # theta(0) = 0, s_2 = 5
        assert pp.p == pytest.approx(1.0 + E, abs=1e-12)

    def test_antipodal_sector(self):
        pp = probe_point(2, 1, DOUBLING)
        # phi = m_2 nu / n_2 = 2/4: theta lands on the far crossing
        assert pp.theta == pytest.approx(0.5, abs=1e-14)
        assert pp.p == pytest.approx(E - 1.0, abs=1e-12)
        assert pp.b == pytest.approx(5 * cmath.exp(3j * math.pi / 4),
                                     abs=1e-12)

    def test_probe_in_every_sector_is_real_positive_product(self):
        # Im(e^{i m t}(1+e e^{i n t})) vanishes at b by construction
        for k in (2, 3, 4):
            for nu in range(DOUBLING.n[k - 1]):
                pp = probe_point(k, nu, DOUBLING)
                assert pp.p >= E - 1.0 - 1e-12

    def test_index_bounds(self):
        with pytest.raises(IndexError):
            probe_point(1, 0, DOUBLING)
        with pytest.raises(IndexError):
            probe_point(5, 0, DOUBLING)
        with pytest.raises(IndexError):
            probe_point(2, 4, DOUBLING)


class TestIntegration:
    def test_unit_segment_frozen_and_live(self):
        got = integrate_exp_neg_h(0.0, 1.0, DOUBLING, 1e-10)
        assert got.real == pytest.approx(0.339108917913089, abs=2e-12)
        assert abs(got.imag) <= 1e-14
        live = integral_exp_neg_h_ref(0.0, 1.0, DOUBLING.r, DOUBLING.n)
        assert abs(got - live) <= 2e-12

    def test_additivity_along_a_path(self):
        z = 0.3 + 0.8j
        whole = integrate_exp_neg_h(0.0, z, DOUBLING, 1e-12)
        parts = (integrate_exp_neg_h(0.0, 0.5 * z, DOUBLING, 1e-12)
                 + integrate_exp_neg_h(0.5 * z, z, DOUBLING, 1e-12))
        assert abs(whole - parts) <= 1e-11

    def test_degenerate_segment_is_zero(self):
        assert integrate_exp_neg_h(0.7j, 0.7j, DOUBLING) == 0j

    def test_overflowing_integrand_raises(self):
        # h = 1 + (z/2)^4 has Re h ~ -e^800 along arg z = pi/4 out at 2e200
        p = ParamSeq(r=(2.0,), n=(4,))
        far = 2e200 * cmath.exp(1j * math.pi / 4)
        with pytest.raises(NonConvergence):
            integrate_exp_neg_h(0.0, far, p, 1e-8)

    def test_tol_must_be_positive(self):
        with pytest.raises(ValueError):
            integrate_exp_neg_h(0.0, 1.0, DOUBLING, 0.0)


class TestG:
    def test_value_at_one(self):
        assert eval_g(1.0, DOUBLING) == pytest.approx(
            0.7124048512137005, abs=5e-12)

    def test_newton_identity_residual(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            z = complex(*rng.uniform(-0.7, 0.7, 2))
            assert newton_residual(z, DOUBLING) <= 1e-6

    def test_residual_rejects_bad_step(self):
        with pytest.raises(ValueError):
            newton_residual(0.1, DOUBLING, step=0.0)
