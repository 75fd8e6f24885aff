"""
Host-Kra cubes: parallelepipeds of index sets, the exact abelian membership
test on T^m, and face factorization of unitriangular cubes.

Vertices are 0/1 tuples omega of length r.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from loguru import logger
from nilbohr.errors import DomainError, IncompleteInputError, InconsistencyError, ParameterError
from nilbohr.logging_decorator import log_decorator as log
from nilbohr.nilmanifold import identity, in_filtration, power
from nilbohr.setalg import EMPTY, FiniteIndexSet
from nilbohr.toruspoly import TorusPoint, evaluate


def all_vertices(r):
    return list(product((0, 1), repeat=r))


def _binary(omega):
    return int("".join(str(bit) for bit in omega) or "0", 2)


def face_order(r):
    """
    Vertices sorted by |omega|, ties by descending binary value (first
    coordinate most significant). Refines inclusion.
    """
    return sorted(all_vertices(r), key=lambda omega: (sum(omega), -_binary(omega)))


def _dominates(sigma, omega):
    return all(s >= o for s, o in zip(sigma, omega))


@dataclass(frozen=True)
class SetParallelepiped:
    """alpha_omega = base | union of sides[i] over omega_i = 1."""

    base: FiniteIndexSet
    sides: tuple

    @property
    def dimension(self):
        return len(self.sides)

    def vertex(self, omega):
        if len(omega) != self.dimension or any(bit not in (0, 1) for bit in omega):
            raise DomainError(f"{omega} is not a vertex of a {self.dimension}-cube")
        chosen = [side for bit, side in zip(omega, self.sides) if bit]
        return self.base.union(*chosen)

    @property
    def vertices(self):
        return {omega: self.vertex(omega) for omega in all_vertices(self.dimension)}


def make_parallelepiped(base, sides):
    """
    :param base: FiniteIndexSet alpha_0 (may be empty)
    :param sides: non-empty FiniteIndexSets, pairwise disjoint and disjoint from base
    :return: SetParallelepiped
    """
    base = base if base is not None else EMPTY
    sides = tuple(sides)
    seen = set(base.members)
    for position, side in enumerate(sides, start=1):
        if not side:
            raise DomainError(f"side {position} is empty")
        if not seen.isdisjoint(side.members):
            raise DomainError(f"side {position} is not disjoint from the others")
        seen.update(side.members)
    return SetParallelepiped(base, sides)


@dataclass(frozen=True)
class TorusCube:
    """
    Values on the vertices of {0,1}^r for the degree-d abelian filtration.
    Missing vertices are allowed for partial cubes.
    """

    dimension: int
    values: dict = field(default_factory=dict)
    degree: int = 1

    def __post_init__(self):
        for omega in self.values:
            if len(omega) != self.dimension or any(bit not in (0, 1) for bit in omega):
                raise DomainError(f"{omega} is not a vertex of a {self.dimension}-cube")
        object.__setattr__(self, "values", {tuple(k): v for k, v in self.values.items()})

    __hash__ = None

    @classmethod
    def from_list(cls, values, degree):
        """Values listed in ``all_vertices`` order (first coordinate slowest)."""
        size = len(values)
        r = size.bit_length() - 1
        if 1 << r != size:
            raise DomainError(f"{size} values do not fill a cube")
        points = [value if isinstance(value, TorusPoint) else TorusPoint.of(value) for value in values]
        return cls(r, dict(zip(all_vertices(r), points)), degree)

    def is_complete(self):
        return len(self.values) == 1 << self.dimension


def evaluate_cube(f, parallelepiped):
    """omega -> f(alpha_omega)"""
    values = {omega: evaluate(f, alpha) for omega, alpha in parallelepiped.vertices.items()}
    return TorusCube(parallelepiped.dimension, values, f.degree)


def _face_vertices(r, fixed):
    return [
        omega
        for omega in all_vertices(r)
        if all(omega[axis] == bit for axis, bit in fixed.items())
    ]


def _check_selector(r, fixed):
    for axis, bit in fixed.items():
        if not isinstance(axis, int) or not 0 <= axis < r:
            raise DomainError(f"face selector fixes coordinate {axis!r} outside [0, {r})")
        if bit not in (0, 1):
            raise DomainError(f"face selector fixes coordinate {axis} to {bit!r}")


def alternating_sum(cube, face=None):
    """
    Signed sum over a face, the sign of omega being (-1) to the number of
    free coordinates equal to 1.

    :param cube: TorusCube
    :param face: mapping coordinate -> 0/1 for the fixed coordinates (None: whole cube)
    :return: TorusPoint
    """
    fixed = dict(face or {})
    _check_selector(cube.dimension, fixed)
    total = None
    for omega in _face_vertices(cube.dimension, fixed):
        if omega not in cube.values:
            raise IncompleteInputError(f"vertex {omega} missing")
        sign = -1 if sum(bit for axis, bit in enumerate(omega) if axis not in fixed) % 2 else 1
        term = cube.values[omega] * sign
        total = term if total is None else total + term
    return total


def _faces(r, size):
    """(free axes, fixed assignment) for every face of the given dimension."""
    for free in combinations(range(r), size):
        rest = [axis for axis in range(r) if axis not in free]
        for bits in product((0, 1), repeat=len(rest)):
            yield free, dict(zip(rest, bits))


def is_hk_cube_abelian(cube):
    """
    True iff every (d+1)-dimensional face has vanishing alternating sum,
    which is membership in HK^r for the filtration R^m = G_0 = ... = G_d.
    """
    if not cube.is_complete():
        raise IncompleteInputError("membership needs every vertex")
    size = cube.degree + 1
    if cube.dimension < size:
        return True
    return all(
        alternating_sum(cube, fixed).is_zero() for _free, fixed in _faces(cube.dimension, size)
    )


def complete_corner_abelian(partial):
    """
    The value at 1^r making every (d+1)-face through 1^r vanish.

    :param partial: TorusCube with every vertex except 1^r
    :return: TorusPoint
    """
    r, d = partial.dimension, partial.degree
    if r < d + 1:
        raise ParameterError(f"corner completion needs r >= d + 1, got r={r}, d={d}", field="r")
    top = (1,) * r
    missing = [omega for omega in all_vertices(r) if omega != top and omega not in partial.values]
    if missing:
        raise IncompleteInputError(f"vertices {missing} missing")
    candidates = set()
    for free, fixed in _faces(r, d + 1):
        face_vertices = _face_vertices(r, fixed)
        known = {omega: partial.values[omega] for omega in face_vertices if omega != top}
        rest = None
        for omega, point in known.items():
            sign = -1 if sum(omega[axis] for axis in free) % 2 else 1
            rest = point * sign if rest is None else rest + point * sign
        if top not in face_vertices:
            if not rest.is_zero():
                raise InconsistencyError(f"given face {fixed} already fails the cube condition")
            continue
        candidates.add(rest if d % 2 == 0 else -rest)
    if len(candidates) != 1:
        raise InconsistencyError(f"faces force different corners: {sorted(map(repr, candidates))}")
    return candidates.pop()


def residues(cube, q):
    """Cube values on (1/q)Z/Z as integer tuples in ``all_vertices`` order."""
    result = []
    for omega in all_vertices(cube.dimension):
        scaled = cube.values[omega].coords[0] * q
        if scaled.denominator != 1:
            raise DomainError(f"vertex {omega} is not in (1/{q})Z/Z")
        result.append(int(scaled) % q)
    return tuple(result)


@log
def generate_hk_group(q, d, r):
    """
    Closure of the upper-face generators g^[omega], g in (1/q)Z/Z and
    |omega| <= d, as a set of residue tuples in ``all_vertices`` order.
    """
    vertices = all_vertices(r)
    generators = [
        tuple(int(_dominates(sigma, omega)) for sigma in vertices)
        for omega in vertices
        if sum(omega) <= d
    ]
    zero = (0,) * len(vertices)
    group = {zero}
    frontier = [zero]
    while frontier:
        following = []
        for element in frontier:
            for generator in generators:
                candidate = tuple((a + b) % q for a, b in zip(element, generator))
                if candidate not in group:
                    group.add(candidate)
                    following.append(candidate)
        frontier = following
    logger.debug("HK group for q={}, d={}, r={} has {} elements", q, d, r, len(group))
    return frozenset(group)


def build_unitriangular_cube(factors, r):
    """sigma -> product of factors[omega] over omega <= sigma, in face order."""
    order = face_order(r)
    sample = next(iter(factors.values()))
    cube = {}
    for sigma in all_vertices(r):
        value = identity(sample.size)
        for omega in order:
            if omega in factors and _dominates(sigma, omega):
                value = value * factors[omega]
        cube[sigma] = value
    return cube


@dataclass(frozen=True)
class Factorization:
    factors: dict
    member: bool
    violations: tuple = ()

    __hash__ = None


def hk_factorize_unitriangular(cube):
    """
    Peels g_omega^[omega] off the left in face order. Membership holds iff
    every g_omega lies in G_|omega| and the residual ends at the identity.

    :param cube: mapping omega -> UnitriangularElement on all of {0,1}^r
    :return: Factorization
    """
    if not cube:
        raise DomainError("empty cube")
    r = len(next(iter(cube)))
    if set(cube) != set(all_vertices(r)):
        raise DomainError(f"cube does not cover all {1 << r} vertices")
    size = next(iter(cube.values())).size
    residual = dict(cube)
    factors, violations = {}, []
    for omega in face_order(r):
        factor = residual[omega]
        factors[omega] = factor
        if not in_filtration(factor, sum(omega)):
            violations.append(omega)
        inverse = factor.inverse()
        for sigma in residual:
            if _dominates(sigma, omega):
                residual[sigma] = inverse * residual[sigma]
    unit = identity(size)
    leftover = [sigma for sigma, value in residual.items() if value != unit]
    member = not violations and not leftover
    return Factorization(factors, member, tuple(violations))


def orbit_cube(g, n, parallelepiped):
    """omega -> g^(n_alpha_omega) for the sequence n (1-based indices)."""
    return {
        omega: power(g, sum(n[index - 1] for index in alpha))
        for omega, alpha in parallelepiped.vertices.items()
    }


def point_cube(values, degree):
    """TorusCube from a mapping omega -> rational or TorusPoint."""
    points = {
        tuple(omega): value if isinstance(value, TorusPoint) else TorusPoint.of(Fraction(value))
        for omega, value in values.items()
    }
    r = len(next(iter(points)))
    return TorusCube(r, points, degree)
