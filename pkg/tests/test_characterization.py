import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import divkit as dk


def matched_triple(alpha):
    return dk.ldpd_triple(alpha)


class TestUFunction:
    def test_boundary_zeros(self):
        p = dk.UFunctionParams(1.3, 0.7)
        assert dk.u(0.0, p) == 0.0
        assert dk.u(1.0, p) == 0.0

    def test_symmetric_case(self):
        """a0 = a2 = 1: max 1/4 at x = 1/2."""
        p = dk.UFunctionParams(1.0, 1.0)
        assert p.gamma == 0.5
        assert p.c0 == pytest.approx(0.25, rel=1e-15)
        assert dk.u(0.5, p) == pytest.approx(0.25, rel=1e-15)

    def test_asymmetric_case(self):
        """a0 = 1, a2 = 2: gamma = 2/3, cap 4/27."""
        p = dk.UFunctionParams(1.0, 2.0)
        assert p.gamma == pytest.approx(2.0 / 3.0, rel=1e-15)
        assert p.c0 == pytest.approx(4.0 / 27.0, rel=1e-15)

    @given(a0=st.floats(0.2, 3.0), a2=st.floats(0.2, 3.0))
    def test_cap_attained_at_gamma(self, a0, a2):
        p = dk.UFunctionParams(a0, a2)
        assert dk.u(p.gamma, p) == pytest.approx(p.c0, rel=1e-15)

    def test_cap_is_strict_away_from_gamma(self):
        p = dk.UFunctionParams(1.7, 0.4)
        x = np.linspace(0.0, 1.0, 1001)
        vals = dk.u(x[np.abs(x - p.gamma) > 1e-8], p)
        assert np.all(vals < p.c0)
        for off in (-0.1, 0.1):
            xx = p.gamma + off
            if 0.0 < xx < 1.0:
                assert dk.u(xx, p) < p.c0

    def test_rejects_out_of_range(self):
        p = dk.UFunctionParams(1.0, 1.0)
        with pytest.raises(ValueError):
            dk.u(-0.1, p)
        with pytest.raises(ValueError):
            dk.u(1.1, p)

    def test_rejects_bad_exponents(self):
        with pytest.raises(ValueError):
            dk.UFunctionParams(0.0, 1.0)


class TestUniformIdentityDefect:
    def test_quadratic_matched_is_zero(self):
        """y^2 with (1,2,1) at theta=1: (2-1)*1 - 0.25*4 = 0."""
        B = dk.PowerGenerator(1.0, 1.0)
        d = dk.uniform_identity_defect(B, 1.0, dk.IndexTriple(1, 2, 1))
        assert abs(d) <= 1e-15

    @pytest.mark.parametrize("alpha", [0.25, 1.0, 2.0])
    @pytest.mark.parametrize("theta", [0.1, 1.0, 10.0])
    def test_power_matched_vanishes_everywhere(self, alpha, theta):
        # alphas whose matched triples are exactly representable in binary
        B = dk.dpd_generator(alpha)
        d = dk.uniform_identity_defect(B, theta, matched_triple(alpha))
        assert abs(d) <= 1e-12

    @pytest.mark.parametrize("theta", [0.1, 1.0, 10.0])
    def test_power_matched_nonrepresentable_triple(self, theta):
        """alpha = 3: the triple (1, 4/3, 1/3) rounds in float64, so the
        stored triple misses the identity by ~1e-16 relative; the raw
        defect therefore carries that times the B'(t)**a1 scale."""
        alpha = 3.0
        idx = matched_triple(alpha)
        B = dk.dpd_generator(alpha)
        Bs = dk.standardize(B)
        scale = idx.C * float(Bs.deriv1(theta)) ** idx.a1
        d = dk.uniform_identity_defect(B, theta, idx)
        assert abs(d) <= 1e-12 + 2e-14 * scale

    def test_exp_fixture_value(self):
        """exp with (1,2,1) at theta=1: (e-2) - 0.25 (e-1)^2."""
        oracle = (math.e - 2.0) - 0.25 * (math.e - 1.0) ** 2
        d = dk.uniform_identity_defect(dk.exp_generator(), 1.0,
                                       dk.IndexTriple(1, 2, 1))
        assert d == pytest.approx(oracle, rel=1e-12)
        assert abs(d) > 1e-3  # decisively nonzero

    def test_finite_at_tiny_theta(self):
        for gen in (dk.exp_generator(), dk.shifted_log_generator()):
            d = dk.uniform_identity_defect(gen, 1e-8, dk.IndexTriple(1, 2, 1))
            assert math.isfinite(d)

    def test_vectorized_over_theta(self):
        thetas = np.array([0.5, 1.0, 2.0])
        d = dk.uniform_identity_defect(dk.exp_generator(), thetas,
                                       dk.IndexTriple(1, 2, 1))
        assert d.shape == thetas.shape


class TestThetaScan:
    def test_power_matched_consistent(self):
        rep = dk.theta_scan(dk.PowerGenerator(1.0, 1.0), matched_triple(1.0))
        assert rep.verdict == "consistent-with-LBF"
        assert not rep.refuted
        assert np.max(np.abs(rep.defects)) < 1e-12

    @pytest.mark.filterwarnings("ignore:dropping")
    def test_exp_refuted_with_worst_theta(self):
        rep = dk.theta_scan(dk.exp_generator(), dk.IndexTriple(1, 2, 1))
        assert rep.refuted
        assert abs(rep.worst_defect) > 1e-3
        assert rep.worst_theta in rep.thetas

    def test_power_with_mismatched_gamma_refuted(self):
        """beta = 0 but gamma != 1/(1+alpha): ratio sits off the maximizer,
        so u(ratio) < c0 uniformly."""
        idx = dk.IndexTriple(1.0, 3.0, 2.0)  # gamma = 2/3, needs alpha = 0.5
        rep = dk.theta_scan(dk.PowerGenerator(1.0, 1.0), idx)
        assert rep.refuted
        assert np.all(rep.defects < 0)

    def test_ratio_constant_for_power(self):
        for alpha in (0.25, 1.0, 3.0):
            rep = dk.theta_scan(dk.PowerGenerator(2.0, alpha),
                                matched_triple(alpha))
            target = 1.0 / (1.0 + alpha)
            np.testing.assert_allclose(rep.ratios, target, rtol=1e-14)

    @pytest.mark.filterwarnings("ignore:dropping")
    def test_ratio_in_unit_interval_and_nonconstant_for_nonpower(self):
        for gen in (dk.exp_generator(), dk.cosh_generator(),
                    dk.shifted_log_generator()):
            rep = dk.theta_scan(gen, dk.IndexTriple(1, 2, 1))
            assert np.all(rep.ratios >= 0.0) and np.all(rep.ratios <= 1.0)
            assert rep.ratios.max() - rep.ratios.min() > 1e-3

    @pytest.mark.filterwarnings("ignore:dropping")
    def test_affine_shift_does_not_change_verdicts(self):
        cases = [
            (dk.PowerGenerator(1.0, 1.0), dk.PowerGenerator(1.0, 1.0, K2=2.0, K3=-1.0),
             matched_triple(1.0)),
        ]
        base_exp = dk.exp_generator()
        shifted_exp = dk.ConvexGenerator(
            lambda y: np.expm1(y) - y + 2.0 * y + 3.0,
            d1=lambda y: np.expm1(y) + 2.0,
            d2=np.exp, label="exp+affine")
        cases.append((base_exp, shifted_exp, dk.IndexTriple(1, 2, 1)))
        for base, shifted, idx in cases:
            r1 = dk.theta_scan(base, idx)
            r2 = dk.theta_scan(shifted, idx)
            assert r1.verdict == r2.verdict

    def test_overflowing_probes_warn_and_shrink(self):
        with pytest.warns(UserWarning, match="probe range shrunk"):
            rep = dk.theta_scan(dk.exp_generator(), dk.IndexTriple(1, 2, 1))
        assert rep.thetas.max() < 720.0

    def test_report_serialization(self, tmp_path):
        rep = dk.theta_scan(dk.PowerGenerator(1.0, 1.0), matched_triple(1.0))
        payload = json.loads(rep.to_json())
        assert payload["schema"] == "divkit/1"
        assert payload["verdict"] == "consistent-with-LBF"
        assert len(payload["thetas"]) == len(rep.thetas)
        csv_path = tmp_path / "rep.csv"
        rep.write_csv(csv_path)
        header = csv_path.read_text().splitlines()[0]
        assert header == "theta,ratio,defect,identity_defect"

    def test_custom_theta_grid(self):
        thetas = dk.default_theta_grid(0.5, 2.0, 7)
        rep = dk.theta_scan(dk.PowerGenerator(1.0, 1.0), matched_triple(1.0),
                            thetas)
        assert rep.thetas.size == 7


class TestBetaNecessityProbe:
    def test_positive_beta_witness_near_zero(self):
        """(1,1,1) has beta = 1; B'(t)**-1 explodes as t -> 0."""
        w = dk.beta_necessity_probe(dk.PowerGenerator(1.0, 1.0),
                                    dk.IndexTriple(1, 1, 1))
        assert w is not None and w.kind == "theta-defect"
        assert w.theta < 2.0 + 1e-9  # 1/(2t) > 1/4 exactly when t < 2
        assert w.value > dk.UFunctionParams(1.0, 1.0).c0

    def test_negative_beta_witness_toward_infinity(self):
        """(1,3,1) has beta = -1; C B'(t) exceeds the cap for t > 27/8."""
        w = dk.beta_necessity_probe(dk.PowerGenerator(1.0, 1.0),
                                    dk.IndexTriple(1, 3, 1))
        assert w is not None and w.kind == "theta-defect"
        assert w.theta > 27.0 / 8.0 - 1e-9

    def test_rejects_beta_zero(self):
        with pytest.raises(ValueError, match="beta"):
            dk.beta_necessity_probe(dk.PowerGenerator(1.0, 1.0),
                                    matched_triple(1.0))


class TestCounterexampleSearch:
    def test_power_matched_exhausts(self):
        w = dk.counterexample_search(dk.PowerGenerator(1.0, 1.0),
                                     matched_triple(1.0), seed=42)
        assert w is None

    def test_exp_yields_zero_without_equality(self):
        w = dk.counterexample_search(dk.exp_generator(),
                                     dk.IndexTriple(1, 2, 1), seed=42)
        assert w is not None
        assert w.kind == "zero-without-equality"
        assert w.theta is not None and abs(w.value) > dk.CHAR_EPS_SEARCH
        assert w.f_spec == w.g_spec
        # the attached densities reproduce the violating value
        again = dk.log_bregman(dk.exp_generator(), w.g_density, w.f_density,
                               dk.IndexTriple(1, 2, 1)).value
        assert again == pytest.approx(w.value, abs=1e-12)

    def test_shifted_log_refuted_for_balanced_triples(self):
        for a0, a2 in ((0.5, 1.0), (1.0, 1.0), (2.0, 0.5)):
            idx = dk.IndexTriple(a0, a0 + a2, a2)
            w = dk.counterexample_search(dk.shifted_log_generator(), idx, seed=7)
            assert w is not None and w.kind == "zero-without-equality"

    def test_deterministic_for_fixed_seed(self):
        a = dk.counterexample_search(dk.cosh_generator(), dk.IndexTriple(1, 2, 1),
                                     seed=11)
        b = dk.counterexample_search(dk.cosh_generator(), dk.IndexTriple(1, 2, 1),
                                     seed=11)
        assert a.theta == b.theta and a.value == b.value

    def test_negativity_witness_invariant(self):
        with pytest.raises(ValueError, match="negativity"):
            dk.Witness(kind="negativity", value=-1e-12)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="kind"):
            dk.Witness(kind="whatever", value=1.0)


class TestSolveLbfFamily:
    def test_half_gamma_gives_square(self):
        B = dk.solve_lbf_family(0.5)
        assert B.alpha == pytest.approx(1.0, rel=1e-15)
        assert float(B(3.0)) == pytest.approx(9.0, rel=1e-15)

    def test_two_thirds_gamma(self):
        B = dk.solve_lbf_family(2.0 / 3.0, K=2.0)
        assert B.alpha == pytest.approx(0.5, rel=1e-12)
        assert float(B(4.0)) == pytest.approx(2.0 * 4.0**1.5, rel=1e-12)

    @pytest.mark.parametrize("gamma", [0.2, 0.5, 0.8])
    def test_round_trip_through_scan(self, gamma):
        B = dk.solve_lbf_family(gamma)
        idx = matched_triple(B.alpha)
        rep = dk.theta_scan(B, idx)
        assert not rep.refuted

    @pytest.mark.parametrize("gamma", [0.0, 1.0, -0.3, 2.0])
    def test_rejects_gamma_outside_open_interval(self, gamma):
        with pytest.raises(ValueError):
            dk.solve_lbf_family(gamma)


class TestAffineEquivalenceOfSearch:
    def test_search_verdict_stable_under_affine_shift(self):
        idx = matched_triple(1.0)
        w_plain = dk.counterexample_search(dk.PowerGenerator(1.0, 1.0), idx,
                                           seed=3)
        w_shift = dk.counterexample_search(
            dk.PowerGenerator(1.0, 1.0, K2=5.0, K3=-2.0), idx, seed=3)
        assert w_plain is None and w_shift is None
