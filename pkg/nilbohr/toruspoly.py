"""
Torus-valued polynomial maps on finite index sets, in coefficient form
f(alpha) = sum of a_gamma over gamma contained in alpha.

All arithmetic is exact (fractions.Fraction) and reduced mod 1.
"""

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import floor
from loguru import logger
from nilbohr.errors import (
    DomainError,
    IncompleteInputError,
    InconsistencyError,
    OutOfRangeError,
    ParameterError,
)
from nilbohr.logging_decorator import log_decorator as log
from nilbohr.setalg import (
    EMPTY,
    FiniteIndexSet,
    blocks_union,
    canonical_blocks,
    canonical_start_sequences,
    diameter,
)

HALF = Fraction(1, 2)
MAX_REPORTED_FAILURES = 20


def mod_one(value):
    """Reduces a rational into [0, 1)."""
    value = Fraction(value)
    return value - floor(value)


def distance_to_integer(value):
    value = mod_one(value)
    return min(value, 1 - value)


@dataclass(frozen=True)
class TorusPoint:
    """A point of T^m with exact rational coordinates in [0, 1)."""

    coords: tuple

    def __post_init__(self):
        coords = tuple(mod_one(value) for value in self.coords)
        if not coords:
            raise DomainError("a torus point needs at least one coordinate")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, *values):
        return cls(tuple(Fraction(value) for value in values))

    @classmethod
    def zero(cls, dimension):
        return cls((Fraction(0),) * dimension)

    @property
    def dimension(self):
        return len(self.coords)

    def _check(self, other):
        if not isinstance(other, TorusPoint):
            return NotImplemented
        if other.dimension != self.dimension:
            raise DomainError(f"dimension mismatch {self.dimension} vs {other.dimension}")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return TorusPoint(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return TorusPoint(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return TorusPoint(tuple(-a for a in self.coords))

    def __mul__(self, times):
        if not isinstance(times, int):
            return NotImplemented
        return TorusPoint(tuple(a * times for a in self.coords))

    __rmul__ = __mul__

    def norm(self):
        """Largest distance of a coordinate to the nearest integer."""
        return max(distance_to_integer(a) for a in self.coords)

    def is_zero(self):
        return not any(self.coords)

    def __repr__(self):
        return "(" + ", ".join(str(a) for a in self.coords) + ")"


def _as_point(value, dimension):
    if isinstance(value, TorusPoint):
        return value
    if isinstance(value, (tuple, list)):
        return TorusPoint(tuple(Fraction(a) for a in value))
    if dimension != 1:
        raise DomainError(f"scalar coefficient given for dimension {dimension}")
    return TorusPoint((Fraction(value),))


def _as_index_set(gamma):
    if isinstance(gamma, FiniteIndexSet):
        return gamma
    return FiniteIndexSet.of(gamma)


def _support_order(gamma):
    return (len(gamma), gamma.elements)


@dataclass(frozen=True)
class TorusPolynomial:
    """
    Finitely supported coefficients gamma -> a_gamma in T^m, with declared
    degree d (every gamma in the support has at most d elements). Zero
    coefficients are erased, so equal polynomials have equal mappings.
    ``window`` optionally records the ground window [1..W] a stable form was
    materialized on.
    """

    dimension: int
    degree: int
    coefficients: dict = field(default_factory=dict)
    window: int = None

    def __post_init__(self):
        if self.dimension < 1:
            raise DomainError("dimension must be positive")
        if self.degree < 0:
            raise DomainError("degree must be non-negative")
        normalized = {}
        for gamma, value in dict(self.coefficients).items():
            gamma = _as_index_set(gamma)
            point = _as_point(value, self.dimension)
            if point.dimension != self.dimension:
                raise DomainError(f"coefficient of {gamma!r} has the wrong dimension")
            if point.is_zero():
                continue
            if len(gamma) > self.degree:
                raise DomainError(
                    f"coefficient on {gamma!r} exceeds declared degree {self.degree}"
                )
            normalized[gamma] = point
        ordered = dict(sorted(normalized.items(), key=lambda item: _support_order(item[0])))
        object.__setattr__(self, "coefficients", ordered)

    __hash__ = None

    @classmethod
    def from_items(cls, dimension, degree, items, window=None):
        """Sums repeated gammas; ``items`` yields (gamma, value) pairs."""
        totals = {}
        for gamma, value in items:
            gamma = _as_index_set(gamma)
            point = _as_point(value, dimension)
            totals[gamma] = totals[gamma] + point if gamma in totals else point
        return cls(dimension, degree, totals, window)

    def coefficient(self, gamma):
        return self.coefficients.get(_as_index_set(gamma), TorusPoint.zero(self.dimension))

    def support(self):
        return list(self.coefficients)

    def zero_point(self):
        return TorusPoint.zero(self.dimension)


@dataclass(frozen=True)
class RealPolynomialApprox:
    """
    p(x) = c_1 x + ... + c_d x^d with rational coefficients (p(0) = 0).
    Irrational coefficients enter as rational approximants.
    """

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(Fraction(value) for value in self.coeffs)
        if not coeffs:
            raise DomainError("polynomial needs at least one coefficient")
        if coeffs[-1] == 0:
            raise DomainError("leading coefficient must be non-zero")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self):
        return len(self.coeffs)

    def evaluate(self, x):
        total = Fraction(0)
        for coefficient in reversed(self.coeffs):
            total = (total + coefficient) * x
        return total

    def distance(self, x):
        """||p(x)||, the distance of p(x) to the nearest integer."""
        return distance_to_integer(self.evaluate(x))


def evaluate(f, alpha):
    """
    f(alpha) as the exact sum of a_gamma over the support inside alpha.

    :param f: TorusPolynomial
    :param alpha: FiniteIndexSet
    :return: TorusPoint
    """
    totals = [Fraction(0)] * f.dimension
    members = alpha.members
    for gamma, point in f.coefficients.items():
        if members.issuperset(gamma.elements):
            for axis, value in enumerate(point.coords):
                totals[axis] += value
    return TorusPoint(tuple(totals))


def degree(f):
    """Largest |gamma| carrying a non-zero coefficient (0 for constants)."""
    return max((len(gamma) for gamma in f.coefficients), default=0)


def discrete_difference(f, beta):
    """
    Delta_beta f with b_gamma = sum of a_{gamma | delta} over non-empty delta in beta,
    for gamma disjoint from beta; Delta_beta f(alpha) = f(alpha | beta) - f(alpha).
    """
    if not beta:
        raise DomainError("difference along the empty set is undefined")
    totals = {}
    for eta, point in f.coefficients.items():
        if eta.isdisjoint(beta):
            continue
        gamma = eta.difference(beta)
        totals[gamma] = totals[gamma] + point if gamma in totals else point
    return TorusPolynomial(f.dimension, max(f.degree - 1, 0), totals)


def _masks_to_set(ground, mask):
    return FiniteIndexSet(
        tuple(value for bit, value in enumerate(ground.elements) if mask >> bit & 1)
    )


def subset_coefficients(values, ground):
    """
    Untruncated inclusion-exclusion: a_gamma = sum over delta in gamma of
    (-1)^{|gamma - delta|} values[delta], for every gamma inside ``ground``.

    :param values: mapping FiniteIndexSet -> TorusPoint on all subsets of ground
    :param ground: FiniteIndexSet
    :return: dict gamma -> TorusPoint with non-zero entries only
    """
    size = len(ground)
    table = []
    dimension = None
    for mask in range(1 << size):
        subset = _masks_to_set(ground, mask)
        if subset not in values:
            raise IncompleteInputError(f"missing value for subset {subset!r}")
        point = values[subset]
        if dimension is None:
            dimension = point.dimension
        elif point.dimension != dimension:
            raise DomainError("values have mixed dimensions")
        table.append(list(point.coords))
    for bit in range(size):
        step = 1 << bit
        for mask in range(1 << size):
            if mask & step:
                lower = table[mask ^ step]
                row = table[mask]
                for axis in range(dimension):
                    row[axis] -= lower[axis]
    result = {}
    for mask, row in enumerate(table):
        point = TorusPoint(tuple(row))
        if not point.is_zero():
            result[_masks_to_set(ground, mask)] = point
    return result


def coefficients_from_values(values, d, m):
    """
    Recovers coefficients of degree <= d from values on every subset of a
    finite ground set (the union of the keys).
    """
    values = {_as_index_set(key): _as_point(value, m) for key, value in values.items()}
    if EMPTY not in values:
        raise IncompleteInputError("missing value at the empty set")
    ground = FiniteIndexSet.of(value for key in values for value in key)
    for point in values.values():
        if point.dimension != m:
            raise DomainError(f"value of dimension {point.dimension}, expected {m}")
    full = subset_coefficients(values, ground)
    return TorusPolynomial(m, d, {gamma: a for gamma, a in full.items() if len(gamma) <= d})


@log
def lift_integer_polynomial(p, n, window, d=None):
    """
    The map alpha -> p(n_alpha) mod 1 on subsets of [1..window], in
    coefficient form. Coefficients above degree d are computed and must
    vanish; a non-zero one is reported as an inconsistency.
    """
    d = p.degree if d is None else d
    if d < p.degree:
        raise ParameterError(f"degree {d} below polynomial degree {p.degree}", field="d")
    if window > len(n):
        raise OutOfRangeError(f"window {window} exceeds sequence length {len(n)}")
    ground = FiniteIndexSet.interval(1, window)
    values = {}
    for mask in range(1 << window):
        subset = _masks_to_set(ground, mask)
        total = sum(n[index - 1] for index in subset)
        values[subset] = TorusPoint((mod_one(p.evaluate(total)),))
    full = subset_coefficients(values, ground)
    excess = {gamma: a for gamma, a in full.items() if len(gamma) > d}
    if excess:
        logger.error("LIFT FAILURE: {} coefficients above degree {}", len(excess), d)
        raise InconsistencyError(f"non-vanishing coefficients above degree {d}: {excess}")
    logger.debug("LIFT SUCCESS: window {}, all coefficients above degree {} vanish", window, d)
    return TorusPolynomial(1, d, full)


def restrict(f, blocks):
    """
    The restriction beta -> f(alpha_beta) in coefficient form. Each gamma
    contributes to the block set it meets, so degrees never grow.
    """
    owner = {}
    for index, block in enumerate(blocks.blocks, start=1):
        for value in block:
            owner[value] = index
    totals = {}
    for gamma, point in f.coefficients.items():
        missing = [value for value in gamma if value not in owner]
        if missing:
            raise OutOfRangeError(f"support element {gamma!r} leaves the block truncation")
        kappa = FiniteIndexSet.of(owner[value] for value in gamma)
        totals[kappa] = totals[kappa] + point if kappa in totals else point
    return TorusPolynomial(f.dimension, f.degree, totals)


@dataclass(frozen=True)
class StableFormReport:
    stable: bool
    window: int
    violations: tuple = ()

    def __bool__(self):
        return self.stable


def _default_window(f, k):
    top = max((gamma.maximum() for gamma in f.coefficients if gamma), default=k)
    return k * -(-top // k)


def is_stable_form(f, k, window=None):
    """
    Checks a_gamma = 0 when diam(gamma) > k and a_{gamma+k} = a_gamma whenever
    both lie in [1..W].

    :return: StableFormReport (truthy iff stable)
    """
    window = window or f.window or _default_window(f, k)
    if window % k:
        raise ParameterError(f"window {window} is not a multiple of {k}", field="window")
    violations = []
    for gamma, point in f.coefficients.items():
        if not gamma:
            continue
        if gamma.maximum() > window:
            violations.append(("outside-window", gamma.to_list()))
            continue
        if diameter(gamma) > k:
            violations.append(("diameter", gamma.to_list()))
            continue
        if gamma.maximum() + k <= window and f.coefficient(gamma.shift(k)) != point:
            violations.append(("period", gamma.to_list()))
        if gamma.minimum() - k >= 1 and f.coefficient(gamma.shift(-k)) != point:
            violations.append(("period", gamma.shift(-k).to_list()))
    violations = tuple(sorted(set((kind, tuple(gamma)) for kind, gamma in violations)))
    return StableFormReport(not violations, window, violations)


@dataclass(frozen=True)
class StableForm:
    """
    Periodic coefficient family: a_gamma = 0 unless diam(gamma) <= k and
    |gamma| <= d, and a_gamma depends only on gamma modulo shifts by k.
    Representatives are keyed by tuples with minimum in [1..k].
    """

    k: int
    degree: int
    dimension: int
    representatives: dict = field(default_factory=dict)
    constant: tuple = None

    def __post_init__(self):
        reps = {}
        for gamma, value in dict(self.representatives).items():
            gamma = _as_index_set(gamma)
            if not gamma or diameter(gamma) > self.k or len(gamma) > self.degree:
                raise DomainError(f"{gamma!r} cannot carry a stable coefficient")
            point = _as_point(value, self.dimension)
            if point.is_zero():
                continue
            shift = (gamma.minimum() - 1) // self.k * self.k
            key = tuple(value - shift for value in gamma)
            if key in reps and reps[key] != point.coords:
                raise DomainError(f"conflicting coefficients for the class of {gamma!r}")
            reps[key] = point.coords
        object.__setattr__(self, "representatives", reps)
        constant = self.constant or (Fraction(0),) * self.dimension
        object.__setattr__(self, "constant", TorusPoint(tuple(constant)).coords)

    __hash__ = None

    def coefficient(self, gamma):
        gamma = _as_index_set(gamma)
        if not gamma:
            return TorusPoint(self.constant)
        if diameter(gamma) > self.k or len(gamma) > self.degree:
            return TorusPoint.zero(self.dimension)
        shift = (gamma.minimum() - 1) // self.k * self.k
        coords = self.representatives.get(tuple(value - shift for value in gamma))
        return TorusPoint(coords) if coords else TorusPoint.zero(self.dimension)

    def _accumulate(self, elements, totals):
        k, reps = self.k, self.representatives
        for position, first in enumerate(elements):
            stop = bisect_right(elements, first + k, lo=position + 1)
            neighbours = elements[position + 1 : stop]
            shift = (first - 1) // k * k
            for size in range(min(self.degree - 1, len(neighbours)) + 1):
                for rest in combinations(neighbours, size):
                    coords = reps.get((first - shift,) + tuple(v - shift for v in rest))
                    if coords:
                        for axis, value in enumerate(coords):
                            totals[axis] += value

    def evaluate(self, alpha):
        """f(alpha) for sets of any size, walking each element's k-neighbourhood."""
        totals = list(self.constant)
        self._accumulate(alpha.elements, totals)
        return TorusPoint(tuple(totals))

    def insertion_effect(self, alpha, inserted):
        """
        f(alpha | S) - f(alpha) for S disjoint from alpha, computed inside
        [min S - k, max S + k] only.
        """
        inserted = _as_index_set(inserted)
        if not inserted:
            return TorusPoint.zero(self.dimension)
        if not inserted.isdisjoint(alpha):
            raise DomainError("inserted elements already belong to the set")
        low, high = inserted.minimum() - self.k, inserted.maximum() + self.k
        local = tuple(value for value in alpha.elements if low <= value <= high)
        with_insert = tuple(sorted(local + inserted.elements))
        after = [Fraction(0)] * self.dimension
        before = [Fraction(0)] * self.dimension
        self._accumulate(with_insert, after)
        self._accumulate(local, before)
        return TorusPoint(tuple(a - b for a, b in zip(after, before)))

    def to_polynomial(self, window):
        """Materializes the coefficients on [1..window]."""
        items = {}
        if any(self.constant):
            items[EMPTY] = TorusPoint(self.constant)
        for first in range(1, window + 1):
            neighbours = range(first + 1, min(first + self.k, window) + 1)
            for size in range(self.degree):
                for rest in combinations(neighbours, size):
                    gamma = FiniteIndexSet((first,) + rest)
                    point = self.coefficient(gamma)
                    if not point.is_zero():
                        items[gamma] = point
        return TorusPolynomial(self.dimension, self.degree, items, window)


def stable_form_of(f, k):
    """Reads the representatives (minimum in [1..k]) off a stable-form polynomial."""
    reps = {
        gamma: point
        for gamma, point in f.coefficients.items()
        if gamma and gamma.minimum() <= k
    }
    constant = f.coefficient(EMPTY).coords
    return StableForm(k, max(degree(f), 1), f.dimension, reps, constant)


def stable_polynomial(representatives, k, d, window, m=1):
    """Stable-form polynomial on [1..window] from one coefficient per shift class."""
    if window % k:
        raise ParameterError(f"window {window} is not a multiple of {k}", field="window")
    return StableForm(k, d, m, representatives).to_polynomial(window)


def counterexample_form(k, d):
    """
    The periodic form behind the sharpness example: a_gamma = 1/2 for every
    non-empty gamma with diam(gamma) <= k and |gamma| <= d.
    """
    if k < 1 or d < 1:
        raise ParameterError("k and d must be positive")
    if d > k:
        raise ParameterError(f"need d <= k, got d={d}, k={k}", field="d")
    reps = {}
    for first in range(1, k + 1):
        for size in range(d):
            for rest in combinations(range(first + 1, first + k + 1), size):
                reps[(first,) + rest] = (HALF,)
    return StableForm(k, d, 1, reps)


def counterexample_poly(k, d, window=None):
    """counterexample_form(k, d) materialized on [1..window] (default 3k)."""
    window = 3 * k if window is None else window
    return counterexample_form(k, d).to_polynomial(window)


@dataclass(frozen=True)
class InvarianceReport:
    invariant: bool
    sequences_checked: int
    sets_checked: int
    failures: tuple = ()

    def __bool__(self):
        return self.invariant


@log
def check_restriction_invariance(f, k, window=None, tol=0, blocks=None):
    """
    Finite surrogate for stability: for every canonical block sequence
    alpha_j = {i_j, i_j+k, ..., i_{j+k}-k} with i_j = j (mod k) inside the
    window, checks ||f(alpha_beta) - f(beta)|| <= tol for all beta in [1..L].

    :param f: TorusPolynomial in stable form for k
    :param window: W, a multiple of k (default f.window)
    :param tol: rational tolerance
    :param blocks: L, the number of blocks (default max(2, k))
    :return: InvarianceReport (truthy iff invariant)
    """
    window = window or f.window or _default_window(f, k)
    report = is_stable_form(f, k, window)
    if not report.stable:
        raise ParameterError(f"not in stable form for k={k}: {report.violations[:3]}", field="f")
    blocks = max(2, k) if blocks is None else blocks
    if blocks > window:
        raise ParameterError(f"{blocks} blocks do not fit in window {window}", field="blocks")
    tol = Fraction(tol)
    ground = FiniteIndexSet.interval(1, blocks)
    betas = list(ground.subsets())
    baseline = {beta: evaluate(f, beta) for beta in betas}
    failures = []
    sequences = 0
    for starts in canonical_start_sequences(blocks, k, window + k):
        sequences += 1
        sequence = canonical_blocks(starts, k)
        for beta in betas:
            gap = evaluate(f, blocks_union(sequence, beta)) - baseline[beta]
            if gap.norm() > tol:
                failures.append((starts, beta.to_list(), gap))
                if len(failures) >= MAX_REPORTED_FAILURES:
                    break
        if len(failures) >= MAX_REPORTED_FAILURES:
            break
    if failures:
        logger.info("INVARIANCE FAILURE: {} violations, first {}", len(failures), failures[0])
    return InvarianceReport(not failures, sequences, sequences * len(betas), tuple(failures))
