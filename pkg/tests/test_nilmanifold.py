# pylint: disable=missing-module-docstring, missing-function-docstring, missing-class-docstring

import random
import unittest
from fractions import Fraction
from itertools import product
from hypothesis import given, settings
from hypothesis import strategies as st
from nilbohr.errors import DomainError, ParameterError
from nilbohr.nilmanifold import (
    UnitriangularElement,
    commutator,
    dist_to_identity,
    elementary,
    filtration_level,
    heisenberg,
    identity,
    in_filtration,
    orbit_value,
    power,
    project_abelian,
    reduce_mod_lattice,
)
from nilbohr.toruspoly import TorusPoint

HALF_VALUE = Fraction(1, 2)
rationals = st.fractions(min_value=-3, max_value=3, max_denominator=12)


def random_element(rng, n, denominator=12, spread=3):
    rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] = Fraction(rng.randint(-spread * denominator, spread * denominator), denominator)
    return UnitriangularElement.from_rows(rows)


def random_lattice_point(rng, n, spread=3):
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] = rng.randint(-spread, spread)
    return UnitriangularElement.from_rows(rows)


def filtered_element(rng, n, level):
    """Random element of G_level: superdiagonals below level are zero."""
    rows = random_element(rng, n).to_rows()
    for i in range(n):
        for j in range(i + 1, min(i + level, n)):
            rows[i][j] = Fraction(0)
    return UnitriangularElement.from_rows(rows)


class TestElements(unittest.TestCase):
    def test_rejects_non_unit_diagonal(self):
        with self.assertRaises(DomainError):
            UnitriangularElement.from_rows([[2, 0], [0, 1]])

    def test_rejects_lower_entries(self):
        with self.assertRaises(DomainError):
            UnitriangularElement.from_rows([[1, 0], [1, 1]])

    def test_inverse(self):
        g = heisenberg(Fraction(1, 3), Fraction(1, 2), 7)
        self.assertEqual(g * g.inverse(), identity(3))

    def test_commutator_is_central(self):
        g = heisenberg(1, 0, 0)
        h = heisenberg(0, 1, 0)
        self.assertEqual(commutator(g, h), heisenberg(0, 0, 1))

    def test_elementary_bounds(self):
        with self.assertRaises(DomainError):
            elementary(3, 2, 1, 1)


class TestFiltration(unittest.TestCase):
    def test_levels(self):
        self.assertEqual(filtration_level(identity(3)), 3)
        self.assertEqual(filtration_level(heisenberg(1, 0, 0)), 1)
        self.assertEqual(filtration_level(heisenberg(0, 0, HALF_VALUE)), 2)

    def test_membership(self):
        central = heisenberg(0, 0, HALF_VALUE)
        self.assertTrue(in_filtration(central, 0))
        self.assertTrue(in_filtration(central, 2))
        self.assertFalse(in_filtration(central, 3))
        self.assertTrue(in_filtration(identity(3), 5))

    def test_commutators_respect_the_filtration(self):
        rng = random.Random(11)
        for n in range(2, 6):
            for i, j in product(range(1, n + 1), repeat=2):
                for _ in range(5):
                    g = filtered_element(rng, n, i)
                    h = filtered_element(rng, n, j)
                    self.assertTrue(in_filtration(g, i))
                    self.assertTrue(in_filtration(h, j))
                    bracket = commutator(g, h)
                    self.assertGreaterEqual(filtration_level(bracket), min(i + j, n), (n, i, j))
                    self.assertTrue(in_filtration(bracket, i + j))


class TestPower(unittest.TestCase):
    def test_square(self):
        self.assertEqual(power(heisenberg(1, 1, 0), 2).to_rows(), [[1, 2, 1], [0, 1, 2], [0, 0, 1]])

    def test_closed_form_top_right(self):
        a, b, c = Fraction(2, 7), Fraction(3, 5), Fraction(1, 11)
        g = heisenberg(a, b, c)
        running = identity(3)
        for n in range(1, 51):
            running = running * g
            self.assertEqual(power(g, n), running)
            self.assertEqual(power(g, n).entry(0, 2), n * c + n * (n - 1) // 2 * a * b)

    def test_first_power_and_negative(self):
        g = heisenberg(Fraction(1, 3), 2, 5)
        self.assertEqual(power(g, 1), g)
        self.assertEqual(power(g, -2) * power(g, 2), identity(3))

    def test_exponents_add(self):
        rng = random.Random(5)
        for n in range(2, 6):
            for _ in range(10):
                g = random_element(rng, n)
                a, b = rng.randint(-40, 40), rng.randint(-40, 40)
                self.assertEqual(power(g, a + b), power(g, a) * power(g, b), (n, a, b))
                self.assertEqual(power(power(g, a), 3), power(g, 3 * a))


class TestReduction(unittest.TestCase):
    def test_integer_matrix(self):
        self.assertEqual(reduce_mod_lattice(heisenberg(2, 0, 0)), identity(3))

    def test_top_right_only(self):
        reduced = reduce_mod_lattice(heisenberg(HALF_VALUE, 0, Fraction(5, 4)))
        self.assertEqual(reduced, heisenberg(HALF_VALUE, 0, Fraction(1, 4)))

    def test_entries_in_unit_interval(self):
        rng = random.Random(1)
        for _ in range(200):
            reduced = reduce_mod_lattice(random_element(rng, 4))
            for offset in range(1, 4):
                self.assertTrue(all(0 <= value < 1 for value in reduced.superdiagonal(offset)))

    def test_idempotent_and_right_invariant(self):
        rng = random.Random(9)
        for n in (3, 4):
            for _ in range(1000):
                g = random_element(rng, n)
                gamma = random_lattice_point(rng, n)
                reduced = reduce_mod_lattice(g)
                self.assertEqual(reduce_mod_lattice(reduced), reduced)
                self.assertEqual(reduce_mod_lattice(g * gamma), reduced)
                self.assertTrue((g.inverse() * reduced).is_integral())


class TestDistance(unittest.TestCase):
    def test_identity(self):
        self.assertEqual(dist_to_identity(identity(3)), 0)

    def test_wraparound(self):
        self.assertEqual(dist_to_identity(heisenberg(Fraction(9, 10), 0, 0)), Fraction(1, 10))

    def test_radius_must_be_positive(self):
        with self.assertRaises(ParameterError):
            dist_to_identity(identity(2), radius=0)

    def test_heisenberg_matches_exhaustive_larger_radius(self):
        rng = random.Random(4)
        positions = [(0, 1), (1, 2), (0, 2)]
        for _ in range(100):
            reduced = reduce_mod_lattice(random_element(rng, 3))
            best = None
            for choice in product(range(-4, 5), repeat=3):
                rows = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
                for (i, j), value in zip(positions, choice):
                    rows[i][j] = value
                moved = reduced * UnitriangularElement.from_rows(rows)
                value = max(abs(moved.entry(i, j)) for i, j in positions)
                best = value if best is None else min(best, value)
            self.assertEqual(dist_to_identity(reduced, 2), best)

    def test_radius_two_agrees_with_radius_four(self):
        rng = random.Random(12)
        for _ in range(1000):
            g = random_element(rng, 4)
            self.assertEqual(dist_to_identity(g, 2), dist_to_identity(g, 4))

    def test_at_most_one_half(self):
        rng = random.Random(6)
        for _ in range(200):
            self.assertLessEqual(dist_to_identity(random_element(rng, 4)), HALF_VALUE)


class TestOrbit(unittest.TestCase):
    def test_orbit_returns_to_identity(self):
        self.assertEqual(orbit_value(heisenberg(Fraction(3, 5), 0, 0), 5), identity(3))

    def test_zero_exponent(self):
        self.assertEqual(orbit_value(heisenberg(Fraction(1, 3), 2, 5), 0), identity(3))

    def test_half_in_the_centre(self):
        value = orbit_value(heisenberg(Fraction(1, 3), HALF_VALUE, 0), 6)
        self.assertEqual(value, heisenberg(0, 0, HALF_VALUE))
        self.assertEqual(dist_to_identity(value), HALF_VALUE)


class TestProjection(unittest.TestCase):
    def test_identity(self):
        self.assertTrue(project_abelian(identity(4)).is_zero())

    def test_heisenberg(self):
        self.assertEqual(
            project_abelian(heisenberg(Fraction(1, 3), HALF_VALUE, 7)),
            TorusPoint.of(Fraction(1, 3), HALF_VALUE),
        )

    @settings(deadline=None, max_examples=100)
    @given(rationals, rationals, rationals, rationals, rationals, rationals)
    def test_projection_is_a_homomorphism(self, a, b, c, x, y, z):
        g, h = heisenberg(a, b, c), heisenberg(x, y, z)
        self.assertEqual(project_abelian(g * h), project_abelian(g) + project_abelian(h))


if __name__ == "__main__":
    unittest.main()
