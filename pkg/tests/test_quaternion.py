import math

import numpy as np
import pytest

from qwave.quaternion import (
    E1,
    E2,
    E12,
    ONE,
    PolarForm,
    Quaternion,
    conj,
    exp_pure,
    modulus,
    mul,
    normalize,
    polar_parts,
)


def q(a=0.0, b=0.0, c=0.0, d=0.0):
    return Quaternion(a, b, c, d)


class TestUnitRelations:
    def test_squares_are_minus_one(self):
        for u in (E1, E2, E12):
            assert u * u == q(-1)

    def test_triple_product_is_minus_one(self):
        assert E1 * E2 * E12 == q(-1)

    def test_e1_e2_is_e12(self):
        assert E1 * E2 == E12

    def test_anticommutativity(self):
        assert E2 * E1 == -E12
        assert E1 * E12 == -E12 * E1
        assert E2 * E12 == -E12 * E2

    def test_conjugate_pair_product(self):
        assert (ONE + E1) * (ONE - E1) == q(2)


class TestConj:
    def test_definition(self):
        assert q(1, 2).conj() == q(1, -2)
        assert E12.conj() == -E12

    def test_involution(self):
        v = q(0.3, 0.0, 0.1, 0.0)
        assert v.conj().conj() == v

    def test_array_conj(self):
        arr = np.array([[1.0, 2.0, -3.0, 4.0]])
        np.testing.assert_array_equal(conj(arr), [[1.0, -2.0, 3.0, -4.0]])


class TestModulus:
    def test_all_ones(self):
        assert q(1, 1, 1, 1).modulus() == 2.0

    def test_zero(self):
        assert q().modulus() == 0.0

    def test_single_component(self):
        assert q(0, 0, 3, 0).modulus() == 3.0
        assert abs(q(0, 0, 3)) == 3.0


def exp_series(axis, angle, terms=30):
    """Independent oracle: exponential by power series of the pure
    quaternion axis*angle, using only Quaternion multiplication."""
    u = Quaternion(0.0, *(np.asarray(axis) * angle))
    total = Quaternion(1.0)
    power = Quaternion(1.0)
    fact = 1.0
    for k in range(1, terms):
        power = power * u
        fact *= k
        total = total + power * (1.0 / fact)
    return total


class TestPolar:
    def test_pure_imaginary(self):
        p = q(0, 2).polar()
        assert p.modulus == 2.0
        np.testing.assert_allclose(p.axis, [1.0, 0.0, 0.0])
        assert p.angle == pytest.approx(math.pi / 2)
        # closed form agrees with the series oracle
        series = exp_series(p.axis, p.angle) * p.modulus
        assert series.isclose(q(0, 2), tol=1e-12)

    def test_positive_real(self):
        p = q(5).polar()
        assert p.modulus == 5.0
        assert p.angle == 0.0
        assert p.degenerate

    def test_zero(self):
        p = q().polar()
        assert p.modulus == 0.0
        assert p.angle == 0.0
        np.testing.assert_array_equal(p.axis, [0.0, 0.0, 0.0])

    def test_negative_real(self):
        p = q(-3).polar()
        assert p.angle == pytest.approx(math.pi)
        np.testing.assert_array_equal(p.axis, [0.0, 0.0, 0.0])
        assert p.degenerate
        assert p.to_quaternion().isclose(q(-3), tol=1e-12)

    def test_rgb_components(self):
        comps = q(0, 2).polar().rgb_components()
        np.testing.assert_allclose(comps, [math.pi / 2, 0.0, 0.0], atol=1e-15)

    def test_round_trip_random(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            v = Quaternion(*rng.normal(size=4))
            back = v.polar().to_quaternion()
            assert back.isclose(v, tol=1e-10)

    def test_exp_pure_matches_series(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            angle = rng.uniform(0, math.pi)
            closed = Quaternion.from_array(exp_pure(axis, angle))
            assert closed.isclose(exp_series(axis, angle), tol=1e-12)


class TestAlgebraProperties:
    def test_modulus_multiplicative(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            p = rng.normal(size=4)
            v = rng.normal(size=4)
            lhs = modulus(mul(p, v))
            rhs = modulus(p) * modulus(v)
            assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_inverse(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            v = Quaternion(*rng.normal(size=4))
            assert (v * v.inverse()).isclose(ONE, tol=1e-12)
            assert (v.inverse() * v).isclose(ONE, tol=1e-12)

    def test_associativity(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            p, v, r = (rng.normal(size=4) for _ in range(3))
            lhs = mul(mul(p, v), r)
            rhs = mul(p, mul(v, r))
            np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)

    def test_distributes_over_addition(self):
        rng = np.random.default_rng(6)
        p, v, r = (rng.normal(size=4) for _ in range(3))
        np.testing.assert_allclose(mul(p, v + r), mul(p, v) + mul(p, r), atol=1e-12)

    def test_noncommutative(self):
        assert mul(E1.as_array(), E2.as_array())[3] == 1.0
        assert mul(E2.as_array(), E1.as_array())[3] == -1.0

    def test_scalar_ops(self):
        assert 2 * E1 == q(0, 2)
        assert E1 * 2 == q(0, 2)
        assert (q(4, 2) / 2) == q(2, 1)
        assert q(1) + 1 == q(2)
        assert q(3) - 1 == q(2)


class TestArrayApi:
    def test_mul_broadcasts(self):
        rng = np.random.default_rng(8)
        tap = rng.normal(size=4)
        grid = rng.normal(size=(5, 6, 4))
        out = mul(tap, grid)
        assert out.shape == (5, 6, 4)
        np.testing.assert_allclose(
            out[2, 3], (Quaternion(*tap) * Quaternion(*grid[2, 3])).as_array(),
            atol=1e-14,
        )

    def test_modulus_shape(self):
        grid = np.ones((3, 3, 4))
        np.testing.assert_allclose(modulus(grid), 2.0 * np.ones((3, 3)))

    def test_normalize(self):
        v = normalize([3.0, 0.0, 4.0, 0.0])
        np.testing.assert_allclose(v, [0.6, 0.0, 0.8, 0.0])
        with pytest.raises(ValueError):
            normalize([0.0, 0.0, 0.0, 0.0])

    def test_polar_parts_grid(self):
        grid = np.zeros((2, 2, 4))
        grid[0, 0] = [0.0, 2.0, 0.0, 0.0]
        grid[1, 1] = [-3.0, 0.0, 0.0, 0.0]
        m, axis, angle = polar_parts(grid)
        assert m[0, 0] == 2.0 and angle[0, 0] == pytest.approx(math.pi / 2)
        assert angle[1, 1] == pytest.approx(math.pi)
        np.testing.assert_array_equal(axis[1, 1], [0.0, 0.0, 0.0])
        assert m[0, 1] == 0.0 and angle[0, 1] == 0.0


def test_from_array_validates_shape():
    with pytest.raises(ValueError):
        Quaternion.from_array(np.zeros(3))


def test_zero_inverse_raises():
    with pytest.raises(ZeroDivisionError):
        q().inverse()


def test_polar_form_is_frozen():
    p = q(0, 1).polar()
    assert isinstance(p, PolarForm)
    with pytest.raises(AttributeError):
        p.modulus = 3.0
