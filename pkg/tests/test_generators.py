import numpy as np
import pytest

import divkit as dk
from divkit.errors import NotStandardizableError

from helpers import builtin_generators

PROBE = np.array(dk.PROBE_GRID)


def central_fd(fn, y, h):
    return (fn(y + h) - fn(y - h)) / (2.0 * h)


class TestDpdGenerator:
    def test_alpha_one_closed_form(self):
        """alpha=1 gives y^2 - y with derivatives 2y - 1 and 2."""
        B = dk.dpd_generator(1.0)
        y = PROBE
        np.testing.assert_allclose(B(y), y**2 - y, rtol=1e-15)
        np.testing.assert_allclose(B.deriv1(y), 2 * y - 1, rtol=1e-15)
        np.testing.assert_allclose(B.deriv2(y), 2.0, rtol=1e-15)

    def test_half_alpha_value(self):
        assert float(dk.dpd_generator(0.5)(4.0)) == pytest.approx(8.0, rel=1e-15)

    @pytest.mark.parametrize("alpha", [0.0, -1.0])
    def test_rejects_nonpositive_alpha(self, alpha):
        with pytest.raises(ValueError):
            dk.dpd_generator(alpha)

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0, 2.0, 3.0])
    def test_standardized_form(self, alpha):
        """Standardization strips the -y/alpha part: y^(1+alpha)/alpha."""
        Bs = dk.standardize(dk.dpd_generator(alpha))
        np.testing.assert_allclose(Bs(PROBE), PROBE ** (1 + alpha) / alpha,
                                   rtol=1e-14)

    @pytest.mark.parametrize("alpha", [0.3, 1.0, 2.5])
    def test_second_derivative_matches_fd(self, alpha):
        """B'' = (1+alpha) y^(alpha-1), cross-checked by differencing B'."""
        B = dk.dpd_generator(alpha)
        y = np.linspace(0.1, 10.0, 25)
        np.testing.assert_allclose(B.deriv2(y), (1 + alpha) * y ** (alpha - 1),
                                   rtol=1e-14)
        fd = central_fd(B.deriv1, y, 1e-5 * np.maximum(1.0, y))
        np.testing.assert_allclose(B.deriv2(y), fd, rtol=1e-6)


class TestStandardize:
    def test_exp_affine_removed(self):
        """B(y) = e^y - 1 standardizes to e^y - y - 1."""
        raw = dk.ConvexGenerator(lambda y: np.exp(y) - 1.0, d1=np.exp,
                                 d2=np.exp, label="exp-raw")
        Bs = dk.standardize(raw)
        np.testing.assert_allclose(Bs(PROBE), np.expm1(PROBE) - PROBE, rtol=1e-12)
        assert float(Bs(0.0)) == 0.0
        assert float(Bs.deriv1(0.0)) == 0.0

    def test_power_affine_removed_exactly(self):
        B = dk.PowerGenerator(2.0, 1.5, K2=-3.0, K3=7.0)
        Bs = dk.standardize(B)
        np.testing.assert_allclose(Bs(PROBE), 2.0 * PROBE**2.5, rtol=1e-12)
        assert (Bs.b0, Bs.bp0) == (7.0, -3.0)

    def test_zero_conditions_exact_for_builtins(self):
        for gen in builtin_generators():
            Bs = dk.standardize(gen)
            assert float(Bs(0.0)) == 0.0
            assert float(Bs.deriv1(0.0)) == 0.0

    def test_idempotent(self):
        for gen in builtin_generators():
            Bs = dk.standardize(gen)
            Bss = dk.standardize(Bs)
            np.testing.assert_allclose(Bss(PROBE), Bs(PROBE), rtol=1e-15)
            np.testing.assert_allclose(Bss.deriv1(PROBE), Bs.deriv1(PROBE),
                                       rtol=1e-15)

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_rejects_diverging_right_derivative(self):
        """y log y has B'(0+) = -inf and cannot be standardized."""
        ylogy = dk.ConvexGenerator(
            lambda y: np.where(y > 0, y * np.log(np.where(y > 0, y, 1.0)), 0.0),
            d1=lambda y: np.log(y) + 1.0,
            d2=lambda y: 1.0 / y,
            label="ylogy")
        with pytest.raises(NotStandardizableError, match="not standardizable"):
            dk.standardize(ylogy)


class TestConvexityProperties:
    def test_strictly_convex_on_probe_grid(self):
        for gen in builtin_generators():
            assert np.all(np.asarray(gen.deriv2(PROBE)) > 0), gen.label

    def test_deriv1_matches_central_fd(self):
        for gen in builtin_generators():
            fd = central_fd(gen, PROBE, 1e-6 * np.maximum(1.0, PROBE))
            np.testing.assert_allclose(np.asarray(gen.deriv1(PROBE)), fd,
                                       rtol=1e-6, err_msg=gen.label)

    def test_slope_dominates_chord(self):
        """y B*'(y) - B*(y) >= 0, equality only at y = 0."""
        for gen in builtin_generators():
            Bs = dk.standardize(gen)
            excess = PROBE * np.asarray(Bs.deriv1(PROBE)) - np.asarray(Bs(PROBE))
            assert np.all(excess > 0), gen.label
            assert float(0.0 * Bs.deriv1(0.0) - Bs(0.0)) == 0.0


class TestUserGeneratorFallbacks:
    def test_missing_deriv2_uses_fd_of_deriv1(self):
        gen = dk.ConvexGenerator(lambda y: np.cosh(y) - 1.0, d1=np.sinh)
        np.testing.assert_allclose(np.asarray(gen.deriv2(PROBE)),
                                   np.cosh(PROBE), rtol=1e-6)

    def test_missing_deriv1_uses_fd(self):
        gen = dk.ConvexGenerator(lambda y: np.cosh(y) - 1.0)
        np.testing.assert_allclose(np.asarray(gen.deriv1(PROBE)),
                                   np.sinh(PROBE), rtol=1e-5)
        # one-sided right derivative at the boundary
        assert float(gen.deriv1(0.0)) == pytest.approx(0.0, abs=1e-7)


class TestTailSlope:
    def test_quadratic_diverges(self):
        ts = dk.tail_slope(dk.PowerGenerator(1.0, 1.0).standardized())
        assert ts.divergent

    def test_exp_diverges(self):
        ts = dk.tail_slope(dk.standardize(dk.exp_generator()))
        assert ts.divergent

    def test_saturating_generator_has_finite_slope(self):
        """B(y) = y + e^-y - 1 is convex with B' -> 1."""
        B = dk.ConvexGenerator(lambda y: y + np.exp(-y) - 1.0,
                               d1=lambda y: 1.0 - np.exp(-y),
                               d2=lambda y: np.exp(-y), label="saturating")
        ts = dk.tail_slope(dk.standardize(B), probe_max=1e6)
        assert not ts.divergent
        assert ts.estimate == pytest.approx(1.0, rel=1e-5)

    def test_rejects_bad_probe(self):
        with pytest.raises(ValueError):
            dk.tail_slope(dk.standardize(dk.exp_generator()), probe_max=0.0)


class TestGeneratorSpecs:
    @pytest.mark.parametrize("spec, label_part", [
        ({"kind": "dpd", "params": {"alpha": 0.5}}, "dpd"),
        ({"kind": "power", "params": {"K": 2.0, "alpha": 1.5, "K2": 1.0}}, "power"),
        ({"kind": "exp", "params": {}}, "exp"),
        ({"kind": "cosh", "params": {}}, "cosh"),
        ({"kind": "shiftedlog", "params": {}}, "shiftedlog"),
    ])
    def test_builtin_kinds(self, spec, label_part):
        gen = dk.generator_from_spec(spec)
        assert label_part in gen.label
        assert np.all(np.asarray(gen.deriv2(PROBE)) > 0)

    @pytest.mark.parametrize("spec", [
        {"kind": "nope", "params": {}},
        {"kind": "dpd", "params": {}},
        {"kind": "power", "params": {"alpha": 1.0}},
        {"kind": "exp", "params": {"alpha": 1.0}},
        {"kind": "dpd", "params": {"alpha": 1.0}, "oops": 1},
        "not a dict",
    ])
    def test_rejects_malformed_specs(self, spec):
        with pytest.raises(ValueError):
            dk.generator_from_spec(spec)

    def test_load_generator_rejects_bad_json(self, tmp_path):
        path = tmp_path / "gen.json"
        path.write_text("{not json")
        with pytest.raises(ValueError, match="malformed"):
            dk.load_generator(path)
