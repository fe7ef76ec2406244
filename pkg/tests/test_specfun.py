"""Tests for the spherical Bessel family and the Legendre helpers."""

import math

import numpy as np
import pytest
from scipy import special

from cavity_decay.constants import MAX_ORDER
from cavity_decay.specfun import (
    assoc_legendre,
    bessel_j_table,
    hankel1_table,
    legendre_dtheta,
    legendre_m_over_sin,
    riccati_derivative,
    riccati_derivative_table,
    sph_bessel_j,
    sph_hankel1,
)


class TestSphericalBessel:
    """Test j_n against scipy."""

    @pytest.mark.parametrize("z", [0.05, 0.5, 1.0, 4.2, 17.0, 45.0])
    def test_real_argument_matches_scipy(self, z):
        """Test the full table for real arguments, small and large."""
        table = bessel_j_table(25, z)
        expected = special.spherical_jn(np.arange(26), z)
        scale = np.max(np.abs(expected))
        np.testing.assert_allclose(table.real, expected, rtol=1e-9, atol=1e-14 * scale)
        np.testing.assert_array_equal(table.imag, 0.0)

    @pytest.mark.parametrize("z", [0.3 + 0.1j, 1.3 + 0.4j, 3.0 + 2.0j, 8.0 + 0.5j])
    def test_complex_argument_matches_scipy(self, z):
        """Test complex arguments in the upper half-plane."""
        orders = np.arange(16)
        expected = special.spherical_jn(orders, z)
        scale = np.max(np.abs(expected))
        np.testing.assert_allclose(bessel_j_table(15, z), expected, rtol=1e-9, atol=1e-14 * scale)

    def test_single_order_matches_table(self):
        """Test that the scalar function agrees with the table entry."""
        z = 2.5 + 0.3j
        table = bessel_j_table(10, z)
        for order in range(11):
            assert sph_bessel_j(order, z) == pytest.approx(table[order], rel=1e-13)

    def test_origin(self):
        """Test j_0(0) = 1 and j_n(0) = 0 for n >= 1."""
        assert sph_bessel_j(0, 0) == 1.0
        np.testing.assert_array_equal(bessel_j_table(5, 0), [1, 0, 0, 0, 0, 0])

    def test_small_argument_leading_term(self):
        """Test j_n(z) ~ z^n / (2n+1)!! for tiny z."""
        z = 1e-3
        for order in range(6):
            double_factorial = math.prod(range(1, 2 * order + 2, 2))
            assert sph_bessel_j(order, z).real == pytest.approx(
                z**order / double_factorial, rel=1e-5
            )


class TestSphericalHankel:
    """Test h_n = j_n + i y_n."""

    @pytest.mark.parametrize("z", [0.2, 2.0, 10.0])
    def test_real_argument_matches_scipy(self, z):
        """Test the table for real arguments against scipy's j_n and y_n."""
        orders = np.arange(21)
        expected = special.spherical_jn(orders, z) + 1j * special.spherical_yn(orders, z)
        np.testing.assert_allclose(hankel1_table(20, z), expected, rtol=1e-10)

    @pytest.mark.parametrize("z", [2.0 + 1.0j, 6.0 + 3.0j, 0.4 + 0.2j])
    def test_complex_argument_matches_scipy(self, z):
        """Test complex arguments where the recurrence is partly replaced by the polynomial."""
        orders = np.arange(13)
        expected = special.spherical_jn(orders, z) + 1j * special.spherical_yn(orders, z)
        np.testing.assert_allclose(hankel1_table(12, z), expected, rtol=1e-9)

    def test_closed_forms(self):
        """Test h_0 and h_1 against their closed forms."""
        z = 1.7 + 0.2j
        assert sph_hankel1(0, z) == pytest.approx(-1j * np.exp(1j * z) / z, rel=1e-14)
        assert sph_hankel1(1, z) == pytest.approx(
            -np.exp(1j * z) * (z + 1j) / z**2, rel=1e-14
        )

    @pytest.mark.parametrize("z", [0.7 + 0.1j, 1.3 + 0.4j, 5.0 + 2.0j])
    def test_cross_product_identity(self, z):
        """Test j_n h_{n-1} - j_{n-1} h_n = i / z^2 for every order."""
        j = bessel_j_table(15, z)
        h = hankel1_table(15, z)
        for order in range(1, 16):
            value = j[order] * h[order - 1] - j[order - 1] * h[order]
            assert value == pytest.approx(1j / z**2, rel=1e-8)


class TestRiccatiDerivative:
    """Test (1/z) d[z f_n(z)]/dz."""

    @pytest.mark.parametrize("z", [0.3, 2.0, 9.5])
    def test_bessel_kind_matches_scipy(self, z):
        """Test the J kind against j_n/z + j_n' from scipy."""
        orders = np.arange(11)
        expected = special.spherical_jn(orders, z) / z + special.spherical_jn(
            orders, z, derivative=True
        )
        np.testing.assert_allclose(
            riccati_derivative_table("J", 10, z).real, expected, rtol=1e-9, atol=1e-15
        )

    def test_hankel_kind_matches_scipy(self):
        """Test the H kind against scipy's j_n and y_n with derivatives."""
        z = 1.5
        orders = np.arange(9)
        h = special.spherical_jn(orders, z) + 1j * special.spherical_yn(orders, z)
        dh = special.spherical_jn(orders, z, derivative=True) + 1j * special.spherical_yn(
            orders, z, derivative=True
        )
        np.testing.assert_allclose(riccati_derivative_table("H", 8, z), h / z + dh, rtol=1e-10)

    def test_scalar_matches_table(self):
        """Test the scalar wrapper."""
        z = 0.8 + 0.3j
        table = riccati_derivative_table("H", 4, z)
        assert riccati_derivative("H", 4, z) == pytest.approx(table[4], rel=1e-14)

    def test_order_zero_uses_order_one(self):
        """Test the n = 0 derivative, which needs f_1 even for nmax = 0."""
        z = 1.1
        expected = special.spherical_jn(0, z) / z + special.spherical_jn(0, z, derivative=True)
        assert riccati_derivative("J", 0, z).real == pytest.approx(expected, rel=1e-12)

    def test_unknown_kind(self):
        """Test that an unknown kind raises ValueError."""
        with pytest.raises(ValueError, match="Unknown Bessel kind"):
            riccati_derivative_table("Y", 3, 1.0)


def _random_arguments(rng, size, low, high):
    """Complex arguments with log-uniform modulus and uniform phase over both half-planes."""
    modulus = np.exp(rng.uniform(np.log(low), np.log(high), size=size))
    phase = rng.uniform(-np.pi, np.pi, size=size)
    return modulus * np.exp(1j * phase)


class TestIdentitiesAtRandomArguments:
    """Test identities of the Bessel family at random complex arguments."""

    MAX_TESTED_ORDER = 10

    def test_wronskian(self, rng):
        """Test j_n h_n' - j_n' h_n = i / z^2."""
        for z in _random_arguments(rng, 100, 0.1, 20.0):
            j = bessel_j_table(self.MAX_TESTED_ORDER, z)
            h = hankel1_table(self.MAX_TESTED_ORDER, z)
            dj = riccati_derivative_table("J", self.MAX_TESTED_ORDER, z)
            dh = riccati_derivative_table("H", self.MAX_TESTED_ORDER, z)
            for order in range(self.MAX_TESTED_ORDER + 1):
                first = j[order] * dh[order]
                second = dj[order] * h[order]
                # For Im z << 0 both products grow like exp(2 |Im z|) while their
                # difference stays 1 / |z|^2, so the error scales with the products
                scale = max(abs(first), abs(second), abs(1 / z**2))
                assert abs(first - second - 1j / z**2) <= 1e-10 * scale

    def test_wronskian_without_cancellation(self, rng):
        """Test the same identity to a tight tolerance where |Im z| stays small."""
        for z in _random_arguments(rng, 100, 0.1, 20.0):
            z = complex(z.real, np.clip(z.imag, -3.0, 3.0))
            j = bessel_j_table(self.MAX_TESTED_ORDER, z)
            h = hankel1_table(self.MAX_TESTED_ORDER, z)
            dj = riccati_derivative_table("J", self.MAX_TESTED_ORDER, z)
            dh = riccati_derivative_table("H", self.MAX_TESTED_ORDER, z)
            wronskian = j * dh - dj * h
            np.testing.assert_allclose(wronskian * z**2, 1j, rtol=1e-8)

    @pytest.mark.parametrize("table", [bessel_j_table, hankel1_table])
    def test_recurrence(self, rng, table):
        """Test f_{n-1} + f_{n+1} = (2n+1) f_n / z for both tables."""
        for z in _random_arguments(rng, 100, 0.1, 20.0):
            values = table(self.MAX_TESTED_ORDER + 1, z)
            for order in range(1, self.MAX_TESTED_ORDER + 1):
                left = values[order - 1] + values[order + 1]
                right = (2 * order + 1) * values[order] / z
                scale = max(abs(values[order - 1]), abs(values[order + 1]), abs(right))
                assert abs(left - right) <= 1e-12 * scale

    def test_small_argument_law(self, rng):
        """Test |j_n(z) (2n+1)!! / z^n - 1| < |z|^2 below |z| = 0.1 in both half-planes."""
        arguments = _random_arguments(rng, 100, 1e-4, 0.1)
        assert np.any(arguments.imag > 0) and np.any(arguments.imag < 0)
        for z in arguments:
            values = bessel_j_table(self.MAX_TESTED_ORDER, z)
            for order in range(self.MAX_TESTED_ORDER + 1):
                double_factorial = math.prod(range(1, 2 * order + 2, 2))
                deviation = abs(values[order] * double_factorial / z**order - 1)
                assert deviation < abs(z) ** 2


class TestArgumentChecks:
    """Test the domain and overflow guards."""

    def test_order_above_cap(self):
        """Test that orders above MAX_ORDER are rejected."""
        with pytest.raises(ValueError, match="exceeds the configured maximum"):
            sph_bessel_j(MAX_ORDER + 1, 1.0)

    def test_negative_order(self):
        """Test that negative orders are rejected."""
        with pytest.raises(ValueError, match="non-negative"):
            sph_hankel1(-1, 1.0)

    def test_non_integer_order(self):
        """Test that float orders are rejected."""
        with pytest.raises(ValueError, match="integer"):
            bessel_j_table(2.5, 1.0)

    def test_hankel_at_origin(self):
        """Test that h_n(0) raises instead of returning inf."""
        with pytest.raises(ValueError, match="non-zero"):
            sph_hankel1(1, 0)

    def test_non_finite_argument(self):
        """Test that nan arguments are rejected."""
        with pytest.raises(ValueError, match="finite"):
            sph_bessel_j(1, complex(float("nan"), 0.0))

    def test_huge_imaginary_part(self):
        """Test that exp overflow is reported as OverflowError."""
        with pytest.raises(OverflowError, match="outside the supported range"):
            sph_bessel_j(1, 1.0 + 800.0j)

    def test_huge_argument(self):
        """Test the |z| limit."""
        with pytest.raises(OverflowError):
            hankel1_table(2, 2.0e4)

    def test_hankel_overflow_near_origin(self):
        """Test that a non-representable high order near the origin raises."""
        with pytest.raises(OverflowError, match="not representable"):
            hankel1_table(60, 1e-8)


class TestLegendre:
    """Test the associated Legendre helpers."""

    @pytest.mark.parametrize("x", [-0.9, -0.2, 0.0, 0.35, 1.0])
    def test_low_orders(self, x):
        """Test closed forms without the Condon-Shortley phase."""
        s = math.sqrt(1 - x * x)
        assert assoc_legendre(1, 0, x) == pytest.approx(x)
        assert assoc_legendre(1, 1, x) == pytest.approx(s)
        assert assoc_legendre(2, 0, x) == pytest.approx((3 * x * x - 1) / 2)
        assert assoc_legendre(2, 1, x) == pytest.approx(3 * x * s)
        assert assoc_legendre(2, 2, x) == pytest.approx(3 * (1 - x * x))

    def test_argument_out_of_range(self):
        """Test |x| > 1 raises ValueError."""
        with pytest.raises(ValueError, match="must lie in"):
            assoc_legendre(2, 1, 1.5)

    def test_invalid_indices(self):
        """Test m > n raises ValueError."""
        with pytest.raises(ValueError, match="0 <= m <= n"):
            assoc_legendre(1, 2, 0.5)

    @pytest.mark.parametrize(("n", "m"), [(1, 0), (1, 1), (3, 0), (3, 2), (5, 3), (6, 6)])
    def test_dtheta_matches_finite_difference(self, n, m):
        """Test dP/dtheta against a central difference."""
        theta = 0.7
        h = 1e-6
        numeric = (
            assoc_legendre(n, m, math.cos(theta + h)) - assoc_legendre(n, m, math.cos(theta - h))
        ) / (2 * h)
        assert legendre_dtheta(n, m, theta) == pytest.approx(numeric, rel=1e-6, abs=1e-8)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_m_over_sin_polar_limit(self, n):
        """Test the analytic limit of m P_n^m / sin(theta) on both poles."""
        assert legendre_m_over_sin(n, 1, 0.0) == pytest.approx(n * (n + 1) / 2)
        south = (-1) ** (n + 1) * n * (n + 1) / 2
        assert legendre_m_over_sin(n, 1, math.pi) == pytest.approx(south)
        near_pole = legendre_m_over_sin(n, 1, 1e-3)
        assert near_pole == pytest.approx(n * (n + 1) / 2, rel=1e-4)

    def test_m_over_sin_vanishes(self):
        """Test m = 0 everywhere and m > 1 on the axis."""
        assert legendre_m_over_sin(3, 0, 0.4) == 0.0
        assert legendre_m_over_sin(3, 2, 0.0) == 0.0

    def test_m_over_sin_regular_point(self):
        """Test the plain quotient away from the axis."""
        theta = 1.1
        expected = 2 * assoc_legendre(4, 2, math.cos(theta)) / math.sin(theta)
        assert legendre_m_over_sin(4, 2, theta) == pytest.approx(expected)

    def test_three_term_recurrence(self, rng):
        """Test (n-m+1) P_{n+1}^m = (2n+1) x P_n^m - (n+m) P_{n-1}^m at random x."""
        for x in rng.uniform(-1.0, 1.0, size=100):
            for n in range(1, 10):
                for m in range(n):
                    terms = [
                        (n - m + 1) * assoc_legendre(n + 1, m, x),
                        (2 * n + 1) * x * assoc_legendre(n, m, x),
                        (n + m) * assoc_legendre(n - 1, m, x),
                    ]
                    residual = abs(terms[0] - terms[1] + terms[2])
                    assert residual <= 1e-12 * max(max(abs(t) for t in terms), 1.0)
