"""
Upper unitriangular rational matrices modulo the integer lattice.

G is the group of n x n upper unitriangular matrices, Gamma its integer
points, and G_i (the lower central series) consists of the matrices whose
superdiagonals 1..i-1 vanish.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import floor
from nilbohr.errors import DomainError, ParameterError
from nilbohr.toruspoly import TorusPoint

DEFAULT_RADIUS = 2


@dataclass(frozen=True)
class UnitriangularElement:
    """An n x n upper unitriangular matrix with exact rational entries, n >= 2."""

    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(Fraction(value) for value in row) for row in self.entries)
        size = len(rows)
        if size < 2:
            raise DomainError("unitriangular matrices must be at least 2 x 2")
        for i, row in enumerate(rows):
            if len(row) != size:
                raise DomainError(f"row {i} has length {len(row)}, expected {size}")
            if row[i] != 1:
                raise DomainError(f"diagonal entry ({i},{i}) is {row[i]}, expected 1")
            if any(row[j] for j in range(i)):
                raise DomainError(f"row {i} has a non-zero entry below the diagonal")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_rows(cls, rows):
        return cls(tuple(tuple(row) for row in rows))

    @property
    def size(self):
        return len(self.entries)

    def entry(self, i, j):
        return self.entries[i][j]

    def superdiagonal(self, offset):
        return tuple(self.entries[i][i + offset] for i in range(self.size - offset))

    def is_integral(self):
        return all(value.denominator == 1 for row in self.entries for value in row)

    def __mul__(self, other):
        if not isinstance(other, UnitriangularElement):
            return NotImplemented
        if other.size != self.size:
            raise DomainError(f"size mismatch {self.size} vs {other.size}")
        n = self.size
        left, right = self.entries, other.entries
        rows = []
        for i in range(n):
            row = [Fraction(0)] * n
            for j in range(i, n):
                row[j] = sum(
                    (left[i][p] * right[p][j] for p in range(i, j + 1)), Fraction(0)
                )
            rows.append(row)
        return UnitriangularElement.from_rows(rows)

    def inverse(self):
        n = self.size
        upper = self.entries
        rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        for i in range(n - 1, -1, -1):
            for j in range(i + 1, n):
                rows[i][j] = -sum(
                    (upper[i][p] * rows[p][j] for p in range(i + 1, j + 1)), Fraction(0)
                )
        return UnitriangularElement.from_rows(rows)

    def to_rows(self):
        return [list(row) for row in self.entries]

    def __repr__(self):
        return "[" + "; ".join(" ".join(str(value) for value in row) for row in self.entries) + "]"


def identity(n):
    return UnitriangularElement.from_rows(
        [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    )


def elementary(n, i, j, value):
    """Identity plus ``value`` at (i, j), 0-based, i < j."""
    if not 0 <= i < j < n:
        raise DomainError(f"({i},{j}) is not strictly upper in size {n}")
    rows = [[Fraction(int(p == q)) for q in range(n)] for p in range(n)]
    rows[i][j] = Fraction(value)
    return UnitriangularElement.from_rows(rows)


def heisenberg(a, b, c):
    """[[1, a, c], [0, 1, b], [0, 0, 1]]"""
    return UnitriangularElement.from_rows([[1, a, c], [0, 1, b], [0, 0, 1]])


def commutator(g, h):
    """g^-1 h^-1 g h"""
    return g.inverse() * h.inverse() * g * h


def filtration_level(g):
    """
    Largest i >= 1 with g in G_i; the identity sits at level n.

    :param g: UnitriangularElement
    :return: int
    """
    for offset in range(1, g.size):
        if any(g.superdiagonal(offset)):
            return offset
    return g.size


def power(g, exponent):
    """Exact g^exponent by binary exponentiation; negative exponents invert."""
    if exponent < 0:
        return power(g.inverse(), -exponent)
    result = identity(g.size)
    base = g
    while exponent:
        if exponent & 1:
            result = result * base
        exponent >>= 1
        if exponent:
            base = base * base
    return result


def reduce_mod_lattice(g):
    """
    The representative g*gamma (gamma integral) whose strictly upper entries
    all lie in [0, 1). Offsets are cleared in increasing order, rows left to
    right; clearing (i, j) only touches column j above row i.
    """
    n = g.size
    rows = [list(row) for row in g.entries]
    for offset in range(1, n):
        for i in range(n - offset):
            j = i + offset
            whole = floor(rows[i][j])
            if whole:
                for p in range(i + 1):
                    rows[p][j] -= whole * rows[p][i]
    return UnitriangularElement.from_rows(rows)


def _positions(n):
    return [(i, i + offset) for offset in range(1, n) for i in range(n - offset)]


def dist_to_identity(g, radius=DEFAULT_RADIUS):
    """
    min over integral gamma with entries in [-R, R] of the max norm of
    reduce(g)*gamma - I.

    Entries of gamma are chosen offset by offset: entry (i, j) of the product
    is gamma_ij + rho_ij + sum rho_ip gamma_pj over i < p < j, which only
    depends on lower offsets, so a depth-first search with the running best
    as bound is exact.
    """
    if radius < 1:
        raise ParameterError("radius must be at least 1", field="radius")
    rho = reduce_mod_lattice(g).entries
    n = len(rho)
    positions = _positions(n)
    gamma = [[0] * n for _ in range(n)]
    best = [None]

    def search(index, running):
        if best[0] is not None and running >= best[0]:
            return
        if index == len(positions):
            best[0] = running
            return
        i, j = positions[index]
        base = rho[i][j] + sum((rho[i][p] * gamma[p][j] for p in range(i + 1, j)), Fraction(0))
        choices = sorted(range(-radius, radius + 1), key=lambda t: (abs(base + t), t))
        for choice in choices:
            value = max(running, abs(base + choice))
            if best[0] is not None and value >= best[0]:
                break
            gamma[i][j] = choice
            search(index + 1, value)
        gamma[i][j] = 0

    search(0, Fraction(0))
    return best[0]


def orbit_value(g, n):
    """g^n Gamma as its reduced representative."""
    return reduce_mod_lattice(power(g, n))


def project_abelian(g):
    """First-superdiagonal entries mod 1, the image of g in G / G_2 Gamma."""
    return TorusPoint(g.superdiagonal(1))


def in_filtration(g, level):
    """True iff g lies in G_level (levels beyond n - 1 hold only the identity)."""
    return all(not any(g.superdiagonal(offset)) for offset in range(1, min(level, g.size)))
