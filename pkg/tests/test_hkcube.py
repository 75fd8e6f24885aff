# pylint: disable=missing-module-docstring, missing-function-docstring, missing-class-docstring

import random
import unittest
from fractions import Fraction
from itertools import combinations
from nilbohr.errors import DomainError, IncompleteInputError, InconsistencyError, ParameterError
from nilbohr.hkcube import (
    TorusCube,
    all_vertices,
    alternating_sum,
    build_unitriangular_cube,
    complete_corner_abelian,
    evaluate_cube,
    face_order,
    generate_hk_group,
    hk_factorize_unitriangular,
    is_hk_cube_abelian,
    make_parallelepiped,
    orbit_cube,
    point_cube,
    residues,
)
from nilbohr.nilmanifold import commutator, heisenberg, identity
from nilbohr.setalg import EMPTY, FiniteIndexSet, index_set
from nilbohr.toruspoly import TorusPoint, TorusPolynomial

THIRD, HALF, FIVE_SIXTHS = Fraction(1, 3), Fraction(1, 2), Fraction(5, 6)


def random_polynomial(rng, d, window):
    items = {}
    for size in range(1, d + 1):
        for gamma in combinations(range(1, window + 1), size):
            items[gamma] = Fraction(rng.randrange(60), 60)
    return TorusPolynomial(1, d, items)


def random_sides(rng, r, ground=8):
    elements = list(range(1, ground + 1))
    rng.shuffle(elements)
    sides, cursor = [], 0
    for _ in range(r):
        size = rng.randint(1, max(1, (ground - cursor) // (r + 1)))
        sides.append(FiniteIndexSet.of(elements[cursor : cursor + size]))
        cursor += size
    base = FiniteIndexSet.of(elements[cursor : cursor + rng.randint(0, ground - cursor)])
    return base, sides


class TestParallelepiped(unittest.TestCase):
    def test_square(self):
        cube = make_parallelepiped(EMPTY, [index_set(1), index_set(2)])
        self.assertEqual(
            cube.vertices,
            {(0, 0): EMPTY, (0, 1): index_set(2), (1, 0): index_set(1), (1, 1): index_set(1, 2)},
        )

    def test_base(self):
        cube = make_parallelepiped(index_set(3), [index_set(1)])
        self.assertEqual(list(cube.vertices.values()), [index_set(3), index_set(1, 3)])

    def test_vertices_distinct(self):
        cube = make_parallelepiped(index_set(9), [index_set(1, 2), index_set(4), index_set(6, 7)])
        self.assertEqual(len(set(cube.vertices.values())), 8)

    def test_overlapping_sides(self):
        with self.assertRaises(DomainError):
            make_parallelepiped(EMPTY, [index_set(1, 2), index_set(2)])

    def test_empty_side(self):
        with self.assertRaises(DomainError):
            make_parallelepiped(EMPTY, [EMPTY])

    def test_bad_vertex(self):
        with self.assertRaises(DomainError):
            make_parallelepiped(EMPTY, [index_set(1)]).vertex((2,))


class TestFaces(unittest.TestCase):
    def test_face_order_refines_inclusion(self):
        order = face_order(3)
        self.assertEqual(order[0], (0, 0, 0))
        self.assertEqual(order[1:4], [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
        for later_index, sigma in enumerate(order):
            for omega in order[later_index + 1 :]:
                self.assertFalse(all(o <= s for s, o in zip(sigma, omega)) and omega != sigma)

    def test_full_alternating_sum(self):
        cube = TorusCube.from_list([0, THIRD, HALF, FIVE_SIXTHS], 1)
        self.assertTrue(alternating_sum(cube).is_zero())

    def test_constant_cube(self):
        cube = TorusCube.from_list([Fraction(2, 7)] * 8, 1)
        self.assertTrue(alternating_sum(cube).is_zero())
        self.assertTrue(alternating_sum(cube, {0: 1}).is_zero())
        self.assertTrue(alternating_sum(cube, {0: 0, 2: 1}).is_zero())

    def test_bad_selector(self):
        cube = TorusCube.from_list([0, 0], 1)
        with self.assertRaises(DomainError):
            alternating_sum(cube, {3: 0})

    def test_missing_vertex(self):
        cube = TorusCube(2, {(0, 0): TorusPoint.of(0)}, 1)
        with self.assertRaises(IncompleteInputError):
            alternating_sum(cube)

    def test_polynomial_cubes_vanish(self):
        rng = random.Random(21)
        for d in (1, 2, 3):
            for _ in range(100):
                f = random_polynomial(rng, d, 8)
                base, sides = random_sides(rng, d + 1)
                cube = evaluate_cube(f, make_parallelepiped(base, sides))
                self.assertTrue(alternating_sum(cube).is_zero())


class TestAbelianMembership(unittest.TestCase):
    def test_examples(self):
        self.assertTrue(is_hk_cube_abelian(TorusCube.from_list([0, THIRD, HALF, FIVE_SIXTHS], 1)))
        self.assertFalse(is_hk_cube_abelian(TorusCube.from_list([0, THIRD, HALF, 0], 1)))

    def test_low_dimension_always_member(self):
        self.assertTrue(is_hk_cube_abelian(TorusCube.from_list([HALF, THIRD], 1)))

    def test_incomplete_cube(self):
        with self.assertRaises(IncompleteInputError):
            is_hk_cube_abelian(TorusCube(2, {(0, 0): TorusPoint.of(0)}, 1))

    def test_polynomial_cubes_are_members(self):
        rng = random.Random(3)
        for _ in range(50):
            f = random_polynomial(rng, 2, 8)
            base, sides = random_sides(rng, 4)
            self.assertTrue(is_hk_cube_abelian(evaluate_cube(f, make_parallelepiped(base, sides))))

    def test_agrees_with_generator_closure(self):
        rng = random.Random(10)
        q = 5
        for d, r in ((1, 2), (1, 3), (2, 3)):
            group = generate_hk_group(q, d, r)
            members = sorted(group)
            for trial in range(10**4 // 3):
                if trial % 2:
                    values = members[rng.randrange(len(members))]
                else:
                    values = tuple(rng.randrange(q) for _ in range(1 << r))
                cube = TorusCube.from_list([Fraction(value, q) for value in values], d)
                self.assertEqual(is_hk_cube_abelian(cube), residues(cube, q) in group)

    def test_residues_need_matching_denominator(self):
        with self.assertRaises(DomainError):
            residues(TorusCube.from_list([THIRD, 0], 1), 5)


class TestCornerCompletion(unittest.TestCase):
    def test_square(self):
        partial = point_cube({(0, 0): 0, (0, 1): THIRD, (1, 0): HALF}, 1)
        self.assertEqual(complete_corner_abelian(partial), TorusPoint.of(FIVE_SIXTHS))

    def test_square_formula(self):
        rng = random.Random(2)
        for _ in range(50):
            x00, x01, x10 = (Fraction(rng.randrange(30), 30) for _ in range(3))
            partial = point_cube({(0, 0): x00, (0, 1): x01, (1, 0): x10}, 1)
            self.assertEqual(complete_corner_abelian(partial), TorusPoint.of(x10 + x01 - x00))

    def test_integer_vertices_give_integer_corner(self):
        values = {omega: 0 for omega in all_vertices(3) if omega != (1, 1, 1)}
        self.assertTrue(complete_corner_abelian(point_cube(values, 2)).is_zero())

    def test_completion_gives_member(self):
        rng = random.Random(14)
        for d, r in ((1, 3), (2, 3), (2, 4)):
            for _ in range(20):
                f = random_polynomial(rng, d, 8)
                base, sides = random_sides(rng, r)
                full = evaluate_cube(f, make_parallelepiped(base, sides))
                top = (1,) * r
                partial = TorusCube(r, {o: v for o, v in full.values.items() if o != top}, d)
                self.assertEqual(complete_corner_abelian(partial), full.values[top])

    def test_dimension_too_small(self):
        partial = point_cube({(0,): 0}, 1)
        with self.assertRaises(ParameterError):
            complete_corner_abelian(partial)

    def test_missing_vertices(self):
        with self.assertRaises(IncompleteInputError):
            complete_corner_abelian(point_cube({(0, 0): 0, (0, 1): 0}, 1))

    def test_inconsistent_face(self):
        values = {omega: 0 for omega in all_vertices(3) if omega != (1, 1, 1)}
        values[(0, 0, 1)] = HALF
        with self.assertRaises(InconsistencyError):
            complete_corner_abelian(point_cube(values, 1))


class TestUnitriangularFactorization(unittest.TestCase):
    def test_edge(self):
        a = heisenberg(THIRD, HALF, 0)
        b = heisenberg(1, Fraction(1, 5), 2)
        result = hk_factorize_unitriangular({(0,): a, (1,): b})
        self.assertEqual(result.factors[(0,)], a)
        self.assertEqual(result.factors[(1,)], a.inverse() * b)
        self.assertTrue(result.member)

    def test_identity_cube(self):
        cube = {omega: identity(3) for omega in all_vertices(2)}
        result = hk_factorize_unitriangular(cube)
        self.assertTrue(result.member)
        self.assertTrue(all(factor == identity(3) for factor in result.factors.values()))

    def test_build_then_factorize(self):
        rng = random.Random(7)
        for _ in range(30):
            factors = {}
            for omega in all_vertices(2):
                a, b, c = (Fraction(rng.randrange(-20, 20), 10) for _ in range(3))
                factors[omega] = heisenberg(0, 0, c) if sum(omega) == 2 else heisenberg(a, b, c)
            result = hk_factorize_unitriangular(build_unitriangular_cube(factors, 2))
            self.assertTrue(result.member)
            self.assertEqual(result.factors, factors)

    def test_non_central_top_factor(self):
        factors = {omega: identity(3) for omega in all_vertices(2)}
        factors[(1, 1)] = heisenberg(HALF, 0, 0)
        result = hk_factorize_unitriangular(build_unitriangular_cube(factors, 2))
        self.assertFalse(result.member)
        self.assertEqual(result.violations, ((1, 1),))

    def test_commutator_corner(self):
        g, h = heisenberg(1, 0, 0), heisenberg(0, 1, 0)
        cube = {(0, 0): identity(3), (1, 0): g, (0, 1): h, (1, 1): h * g}
        result = hk_factorize_unitriangular(cube)
        self.assertTrue(result.member)
        self.assertEqual(result.factors[(1, 1)], commutator(h, g))

    def test_orbit_cube_is_member(self):
        g = heisenberg(Fraction(3, 7), Fraction(2, 5), Fraction(1, 3))
        parallelepiped = make_parallelepiped(index_set(1), [index_set(2), index_set(3, 4), index_set(5)])
        cube = orbit_cube(g, [1, 2, 3, 4, 5], parallelepiped)
        self.assertTrue(hk_factorize_unitriangular(cube).member)

    def test_partial_cube_rejected(self):
        with self.assertRaises(DomainError):
            hk_factorize_unitriangular({(0, 0): identity(3)})


if __name__ == "__main__":
    unittest.main()
