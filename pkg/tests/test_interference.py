import numpy as np
import pytest
from scipy import integrate

import uavcov.interference as interference
from uavcov.config import FadingConfig, NetworkConfig
from uavcov.errors import DomainError, NumericalError, UnsupportedGeometryError
from uavcov.interference import (
    _closed_phase_factor_expanded,
    laplace_derivative_jet,
    laplace_transform,
    laplace_transform_phase_sum,
    phase_laplace_factor,
    power_segment_integral,
    segment_scheme,
    shell_segment_integral,
    set_fault_bias,
)


def net_with(M=2, h0=10.0, alpha=2.0):
    return NetworkConfig(40.0, 30.0, h0, M, alpha)


NET = net_with()
R2 = NET.radius**2
H = NET.height


def quad_power_segment(l, a, b, ell, kappa, s, m):
    """Direct numerical quadrature of the power-segment integrand."""
    val, _ = integrate.quad(
        lambda y: ell / (2 * R2) * y ** (kappa / 2.0 - 1.0) / (1 + m * y / s) ** l,
        a, b, limit=200, epsabs=1e-14, epsrel=1e-12,
    )
    return val


def quad_shell_segment(l, ell, kappa, s, m):
    a3, a4 = R2, R2 + H * H
    val, _ = integrate.quad(
        lambda y: ell / (2 * R2) * (y - R2) ** (kappa / 2.0) / (1 + m * y / s) ** l,
        a3, a4, limit=200, epsabs=1e-14, epsrel=1e-12,
    )
    return val


class TestSegmentScheme:
    def test_breakpoints_ordered(self):
        scheme = segment_scheme(NET)
        assert scheme.a1 < scheme.a2 < scheme.a3 < scheme.a4
        assert scheme.a2 == pytest.approx(H**2)
        assert scheme.a4 == pytest.approx(R2 + H * H)
        assert scheme.ell1 == scheme.ell2 == pytest.approx(2 / H)
        assert scheme.ell5 == pytest.approx(6 * R2 / H**2)

    def test_tall_cylinder_rejected(self):
        tall = NetworkConfig(30.0, 40.0, 10.0, 2, 2.0)
        with pytest.raises(UnsupportedGeometryError):
            segment_scheme(tall)
        with pytest.raises(UnsupportedGeometryError):
            phase_laplace_factor("static", 1.0, 1, tall)


class TestPowerSegmentIntegral:
    def test_order_zero_is_plain_power_integral(self):
        val = power_segment_integral(0, 0.0, H**2, 2 / H, 3, 123.0, 1, NET)
        exact = (2 / H) / R2 * (H**2) ** 1.5 / 3.0
        assert val == pytest.approx(exact, rel=1e-14)

    def test_zero_lower_endpoint_single_term(self):
        # identical whether the a-term is skipped or evaluated at a -> 0+
        v0 = power_segment_integral(2, 0.0, 900.0, 1.0, 3, 50.0, 2, NET)
        v_eps = power_segment_integral(2, 1e-12, 900.0, 1.0, 3, 50.0, 2, NET)
        assert v0 == pytest.approx(v_eps, rel=1e-9)

    @pytest.mark.parametrize("l,a,b,ell,kappa,s,m", [
        (1, 1.0, 2.0, 1.0, 2, 1.0, 1),          # log-form segment
        (1, 0.0, 900.0, 2 / 30, 3, 100.0, 1),
        (2, 900.0, 1600.0, 2.0, 2, 10.0, 2),
        (3, 1600.0, 2500.0, 2.0, 2, 1e5, 3),
        (2, 0.0, 900.0, 4 / 27000.0, 5, 0.3, 2),
        (3, 1600.0, 2500.0, 6 / 900.0, 4, 7.0, 3),
    ])
    def test_matches_quadrature(self, l, a, b, ell, kappa, s, m):
        closed = power_segment_integral(l, a, b, ell, kappa, s, m, NET)
        reference = quad_power_segment(l, a, b, ell, kappa, s, m)
        assert closed == pytest.approx(reference, rel=1e-10)

    def test_s_zero_limits(self):
        assert power_segment_integral(1, 0.0, 900.0, 1.0, 3, 0.0, 1, NET) == 0.0
        assert power_segment_integral(0, 0.0, 900.0, 1.0, 3, 0.0, 1, NET) > 0.0

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            power_segment_integral(1, 0.0, 900.0, 1.0, 0, 1.0, 1, NET)
        with pytest.raises(DomainError):
            power_segment_integral(1, 5.0, 2.0, 1.0, 3, 1.0, 1, NET)
        with pytest.raises(DomainError):
            power_segment_integral(1, 0.0, 900.0, 1.0, 3, 1.0, 1, net_with(alpha=3.0))


class TestShellSegmentIntegral:
    def test_order_zero_closed_value(self):
        ell = 2 / H
        val = shell_segment_integral(0, ell, 1, 55.0, 1, NET)
        assert val == pytest.approx(ell * H**3 / (3 * R2), rel=1e-14)

    @pytest.mark.parametrize("l,ell,kappa,s,m", [
        (1, 2 / 30, 1, 10.0, 1),
        (2, 2 / 30, 1, 1e3, 2),
        (1, 4 / 27000.0, 3, 0.5, 1),
        (3, 4 / 27000.0, 3, 1e6, 3),
    ])
    def test_matches_quadrature(self, l, ell, kappa, s, m):
        closed = shell_segment_integral(l, ell, kappa, s, m, NET)
        reference = quad_shell_segment(l, ell, kappa, s, m)
        assert closed == pytest.approx(reference, rel=1e-10)

    def test_continuity_at_s_zero(self):
        for l in (1, 2):
            tiny = shell_segment_integral(l, 2 / H, 1, 1e-8, 1, NET)
            limit = shell_segment_integral(l, 2 / H, 1, 0.0, 1, NET)
            assert abs(tiny - limit) <= 1e-8

    def test_domain_error_even_kappa(self):
        with pytest.raises(DomainError):
            shell_segment_integral(1, 1.0, 2, 1.0, 1, NET)


class TestPhaseFactor:
    def test_unit_at_zero(self):
        for phase in ("static", "moving"):
            assert phase_laplace_factor(phase, 0.0, 3, NET) == 1.0

    @pytest.mark.parametrize("phase", ["static", "moving"])
    def test_monotone_non_increasing(self, phase):
        values = [phase_laplace_factor(phase, s, 1, NET)
                  for s in np.logspace(-2, 7, 30)]
        assert all(x >= y for x, y in zip(values, values[1:]))
        assert all(0 < v <= 1 for v in values)

    @pytest.mark.parametrize("phase", ["static", "moving"])
    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_closed_matches_quadrature(self, phase, m):
        for s in np.logspace(-2, 6, 9):
            closed = phase_laplace_factor(phase, float(s), m, NET, "closed")
            quad = phase_laplace_factor(phase, float(s), m, NET, "quadrature")
            assert abs(closed - quad) / quad <= 1e-8

    @pytest.mark.parametrize("phase", ["static", "moving"])
    def test_collapsed_matches_expanded_binomial_sum(self, phase):
        """The production path pre-collapses the alternating binomial sum;
        the literal expanded sum must agree where it is well conditioned."""
        for m in (1, 2, 3):
            for s in np.logspace(-1, 3.5, 8):
                collapsed = phase_laplace_factor(phase, float(s), m, NET, "closed")
                expanded = _closed_phase_factor_expanded(phase, float(s), m, NET)
                assert collapsed == pytest.approx(expanded, rel=1e-11)

    def test_general_exponent_uses_quadrature(self):
        net3 = net_with(alpha=3.0)
        val = phase_laplace_factor("static", 100.0, 2, net3)
        ref = phase_laplace_factor("static", 100.0, 2, net3, "quadrature")
        assert val == ref
        with pytest.raises(DomainError):
            phase_laplace_factor("static", 100.0, 2, net3, "closed")

    def test_input_validation(self):
        with pytest.raises(DomainError):
            phase_laplace_factor("static", -1.0, 1, NET)
        with pytest.raises(DomainError):
            phase_laplace_factor("static", 1.0, 0, NET)
        with pytest.raises(DomainError):
            phase_laplace_factor("parked", 1.0, 1, NET)

    def test_fault_hook_shifts_closed_form(self):
        clean = phase_laplace_factor("static", 100.0, 1, NET)
        set_fault_bias(1e-3)
        try:
            biased = phase_laplace_factor("static", 100.0, 1, NET)
        finally:
            set_fault_bias(0.0)
        assert biased - clean == pytest.approx(1e-3, rel=1e-9)


class TestLaplaceTransform:
    def test_no_interferers(self):
        assert laplace_transform(5.0, net_with(M=0), FadingConfig(1, 1), 0.4) == 1.0

    def test_unit_at_zero(self):
        assert laplace_transform(0.0, NET, FadingConfig(1, 1), 0.4) == 1.0

    def test_phase_sum_equals_power_form(self, rng):
        for M in range(1, 11):
            net = net_with(M=M)
            for _ in range(3):
                s = float(10 ** rng.uniform(-1, 4))
                p = float(rng.uniform(0, 1))
                fading = FadingConfig(1, int(rng.integers(1, 4)))
                power = laplace_transform(s, net, fading, p)
                summed = laplace_transform_phase_sum(s, net, fading, p)
                assert abs(power - summed) / power <= 1e-13

    def test_monotone_and_bounded(self):
        fading = FadingConfig(1, 2)
        vals = [laplace_transform(s, NET, fading, 0.5)
                for s in np.logspace(-2, 6, 50)]
        assert all(0 < v <= 1 for v in vals)
        assert all(x >= y for x, y in zip(vals, vals[1:]))

    def test_stay_probability_validated(self):
        with pytest.raises(DomainError):
            laplace_transform(1.0, NET, FadingConfig(1, 1), 1.2)


class TestDerivativeJet:
    def test_order_zero_equals_transform(self):
        fading = FadingConfig(1, 1)
        jet = laplace_derivative_jet(100.0, 0, NET, fading, 0.5)
        assert jet.value == laplace_transform(100.0, NET, fading, 0.5)

    def test_no_interferers_is_constant_one(self):
        jet = laplace_derivative_jet(3.0, 4, net_with(M=0), FadingConfig(1, 1), 0.5)
        assert jet.coeffs.tolist() == [1.0, 0.0, 0.0, 0.0, 0.0]

    @pytest.mark.parametrize("m_i,p_stay", [(1, 0.5), (2, 0.3), (3, 0.9)])
    def test_first_derivative_matches_finite_difference(self, m_i, p_stay):
        fading = FadingConfig(1, m_i)
        s0 = 100.0
        jet = laplace_derivative_jet(s0, 1, NET, fading, p_stay)
        delta = 1e-5 * s0
        fd = (laplace_transform(s0 + delta, NET, fading, p_stay)
              - laplace_transform(s0 - delta, NET, fading, p_stay)) / (2 * delta)
        assert jet.derivative(1) == pytest.approx(fd, rel=1e-5)

    def test_second_derivative_matches_finite_difference(self):
        fading = FadingConfig(1, 1)
        s0 = 200.0
        jet = laplace_derivative_jet(s0, 2, NET, fading, 0.5)
        delta = 3e-4 * s0
        L = lambda s: laplace_transform(s, NET, fading, 0.5)
        fd = (L(s0 + delta) - 2 * L(s0) + L(s0 - delta)) / delta**2
        assert jet.derivative(2) == pytest.approx(fd, rel=1e-5)

    def test_single_interferer_rayleigh_signs_alternate(self):
        """One interferer with unit shape: the transform is completely
        monotone, so Taylor coefficients alternate in sign through order 3."""
        jet = laplace_derivative_jet(50.0, 3, net_with(M=1), FadingConfig(1, 1), 0.5)
        signs = np.sign(jet.coeffs)
        assert signs.tolist() == [1.0, -1.0, 1.0, -1.0]

    def test_quadrature_failure_names_offending_order(self, monkeypatch):
        monkeypatch.setattr(interference, "_QUAD_EPSREL", 1e-60)
        monkeypatch.setattr(interference, "_QUAD_LIMIT", 3)
        with pytest.raises(NumericalError) as info:
            laplace_derivative_jet(100.0, 2, NET, FadingConfig(1, 1), 0.5)
        assert "k=" in str(info.value)
