"""
Recurrence engines: SG_k sums, exhaustive searches for polynomial and
nilmanifold recurrence, a staged nilmanifold search, the pattern
perturbation engine, the sharpness counterexample verifier and the
dilation construction.

Brute-force engines walk ``enumerate_syndetic`` in canonical order and may
shard it by rank ranges; the reported witness is always the one of lowest
rank, so results do not depend on the worker count.
"""

import heapq
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache, partial
from itertools import combinations, product
from math import ceil, comb
from loguru import logger
from nilbohr.errors import DomainError, InconsistencyError, ParameterError
from nilbohr.logging_decorator import log_decorator as log
from nilbohr.nilmanifold import DEFAULT_RADIUS, dist_to_identity, orbit_value
from nilbohr.setalg import (
    FiniteIndexSet,
    Pattern,
    blocks_union,
    canonical_blocks,
    canonical_rank,
    count_syndetic,
    diameter,
    enumerate_syndetic,
    generate_generic_blocks,
    is_syndetic,
    is_well_formed,
    maps_syndetic,
)
from nilbohr.toruspoly import (
    HALF,
    TorusPoint,
    counterexample_form,
    degree,
    is_stable_form,
    stable_form_of,
)

DEFAULT_EPSILON = Fraction(1, 20)
DEFAULT_BUDGET = 10_000
DEFAULT_POOL_SIZE = 512
DEFAULT_WINDOWS = 8


@dataclass(frozen=True)
class SearchOutcome:
    """
    Witness record. ``value`` is the witness's distance, or the smallest
    distance seen when no witness was found.
    """

    engine: str
    witness: object = None
    value: Fraction = None
    sets_examined: int = 0
    canonical_rank: int = None
    exhaustive: bool = False
    exploratory: bool = False
    projections_examined: int = 0
    moves: tuple = ()

    @property
    def found(self):
        return self.witness is not None


def subset_sum(n, alpha):
    """n_alpha for a 1-based sequence n."""
    return sum(n[index - 1] for index in alpha)


def _check_instance(n, k, N):
    if k < 0:
        raise ParameterError("k must be non-negative", field="k")
    if N < 1 or N > len(n):
        raise ParameterError(f"N={N} outside the sequence truncation [1..{len(n)}]", field="N")
    if any(value < 1 for value in n[:N]):
        raise ParameterError("sequence terms must be positive integers", field="n")


@log
def sg_enumerate(n, k, bound):
    """
    SG_k(n_i) & [1..bound]: every n_alpha <= bound with alpha k-syndetic
    inside the truncation. Branches stop once the running sum passes the bound.

    :param n: positive integers n_1, n_2, ...
    :param k: gap bound
    :param bound: largest sum reported
    :return: sorted list of sums
    """
    values = set()
    visited = set()
    length = len(n)

    def extend(last, total):
        if (last, total) in visited:
            return
        visited.add((last, total))
        values.add(total)
        for following in range(last + 1, min(last + k, length) + 1):
            candidate = total + n[following - 1]
            if candidate <= bound:
                extend(following, candidate)

    for first in range(1, length + 1):
        if n[first - 1] <= bound:
            extend(first, n[first - 1])
    return sorted(values)


def _scan(metric, N, k, epsilon, start, stop):
    """First rank in [start, stop) whose metric is <= epsilon, plus the best value seen."""
    best = None
    for rank, alpha in enumerate(enumerate_syndetic(N, k, start, stop), start=start):
        value = metric(alpha)
        if best is None or value < best:
            best = value
        if value <= epsilon:
            return rank, alpha, value, best
    return None, None, None, best


def _shards(total, workers):
    size = -(-total // workers)
    return [(start, min(start + size, total)) for start in range(0, total, size)]


def _sharded_scan(metric, N, k, epsilon, workers):
    total = count_syndetic(N, k)
    if workers <= 1 or total < 2 * workers:
        results = [_scan(metric, N, k, epsilon, 0, None)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_scan, metric, N, k, epsilon, start, stop)
                for start, stop in _shards(total, workers)
            ]
            results = [future.result() for future in futures]
    hits = [result for result in results if result[0] is not None]
    if hits:
        rank, alpha, value, _best = min(hits, key=lambda result: result[0])
        return rank, alpha, value, rank + 1
    best = min(result[3] for result in results if result[3] is not None)
    return None, None, best, total


def _outcome(engine, scan, exploratory):
    rank, alpha, value, examined = scan
    if alpha is None:
        logger.info("SEARCH DONE: {} found no witness among {} sets (best {})", engine, examined, value)
        return SearchOutcome(engine, None, value, examined, None, True, exploratory)
    logger.info("SEARCH DONE: {} witness {} at rank {} with value {}", engine, alpha, rank, value)
    return SearchOutcome(engine, alpha, value, examined, rank, False, exploratory)


def _polynomial_distance(p, n, alpha):
    return p.distance(subset_sum(n, alpha))


@lru_cache(maxsize=4096)
def _orbit_distance(g, total, radius):
    return dist_to_identity(orbit_value(g, total), radius)


@lru_cache(maxsize=4096)
def _projection_distance(g, total):
    """||project_abelian(g^total)||; the first superdiagonal of g^total is total times that of g."""
    return TorusPoint(tuple(total * entry for entry in g.superdiagonal(1))).norm()


def _nil_distance(g, n, radius, alpha):
    return _orbit_distance(g, subset_sum(n, alpha), radius)


@log
def brute_force_thmA(p, n, k, epsilon=DEFAULT_EPSILON, N=None, workers=1):
    """
    First alpha in canonical order with ||p(n_alpha)|| <= epsilon.

    :param p: RealPolynomialApprox
    :param n: sequence n_1, n_2, ...
    :param k: gap bound; below deg p the run is labelled exploratory
    :param epsilon: rational tolerance
    :param N: truncation (default len(n))
    :param workers: number of rank shards
    :return: SearchOutcome
    """
    N = len(n) if N is None else N
    _check_instance(n, k, N)
    epsilon = Fraction(epsilon)
    exploratory = k < p.degree
    if exploratory:
        logger.warning("k={} is below deg p = {}: exploratory run", k, p.degree)
    logger.info("SEARCH START: thm-a over {} sets (N={}, k={})", count_syndetic(N, k), N, k)
    metric = partial(_polynomial_distance, p, tuple(n))
    return _outcome("thm-a", _sharded_scan(metric, N, k, epsilon, workers), exploratory)


def nil_gap_bound(g):
    """binom(d+1, 2) for a (d+1) x (d+1) group element."""
    return comb(g.size, 2)


@log
def brute_force_thmB(g, n, k=None, epsilon=DEFAULT_EPSILON, N=None, radius=DEFAULT_RADIUS, workers=1):
    """
    First alpha in canonical order with dist(g^(n_alpha) Gamma, e Gamma) <= epsilon.

    :param g: UnitriangularElement
    :param k: gap bound (default binom(d+1, 2))
    :return: SearchOutcome
    """
    bound = nil_gap_bound(g)
    k = bound if k is None else k
    N = len(n) if N is None else N
    _check_instance(n, k, N)
    epsilon = Fraction(epsilon)
    exploratory = k < bound
    if exploratory:
        logger.warning("k={} is below binom(d+1, 2) = {}: exploratory run", k, bound)
    logger.info("SEARCH START: thm-b over {} sets (N={}, k={})", count_syndetic(N, k), N, k)
    metric = partial(_nil_distance, g, tuple(n), radius)
    return _outcome("thm-b", _sharded_scan(metric, N, k, epsilon, workers), exploratory)


@log
def staged_nil_search(
    g, n, k=None, epsilon=DEFAULT_EPSILON, N=None, radius=DEFAULT_RADIUS, pool_size=DEFAULT_POOL_SIZE
):
    """
    Abelian projection first, full metric second, interleaved in canonical order.

    Each set is screened by its image in the abelianization, which never
    exceeds the full distance. Sets within epsilon there get the full
    metric; failing ones join a candidate pool, and disjoint unions of a new
    candidate with pooled ones are tried ahead of the enumeration when they
    stay k-syndetic and pass the screen. The scan stops at the first
    full-metric witness, so it enumerates no more sets than brute force.
    ``sets_examined`` counts full-metric evaluations, ``projections_examined``
    the sets enumerated. Never exhaustive.
    """
    bound = nil_gap_bound(g)
    k = bound if k is None else k
    N = len(n) if N is None else N
    _check_instance(n, k, N)
    epsilon = Fraction(epsilon)
    exploratory = k < bound

    pool, tried = [], set()
    projections = examined = 0
    best = None

    def full(alpha, total):
        nonlocal examined, best
        tried.add(alpha)
        value = _orbit_distance(g, total, radius)
        examined += 1
        best = value if best is None or value < best else best
        return value

    def done(alpha, value):
        logger.info(
            "SEARCH DONE: staged witness {} with value {} after {} evaluations and {} projections",
            alpha, value, examined, projections,
        )
        return SearchOutcome(
            "staged", alpha, value, examined, canonical_rank(alpha, k), False, exploratory, projections
        )

    for alpha in enumerate_syndetic(N, k):
        projections += 1
        if alpha in tried:
            continue
        total = subset_sum(n, alpha)
        if _projection_distance(g, total) > epsilon:
            continue
        value = full(alpha, total)
        if value <= epsilon:
            return done(alpha, value)
        for earlier in pool:
            if not earlier.isdisjoint(alpha):
                continue
            union = earlier.union(alpha)
            union_total = total + subset_sum(n, earlier)
            if union in tried or not is_syndetic(union, k):
                continue
            if _projection_distance(g, union_total) > epsilon:
                continue
            value = full(union, union_total)
            if value <= epsilon:
                return done(union, value)
        if len(pool) < pool_size:
            pool.append(alpha)
            if len(pool) == pool_size:
                logger.warning("Candidate pool capped at {} sets", pool_size)

    logger.info("SEARCH DONE: staged search found no witness ({} evaluations)", examined)
    return SearchOutcome("staged", None, best, examined, None, False, exploratory, projections)


@dataclass(frozen=True)
class PerturbationMove:
    """
    Adjoins elements of the middle third of an interior window to blocks
    present there. ``insertion`` maps pattern slots to window-relative sets;
    ``effect`` is the change of f(alpha_beta) per tracked beta and
    ``coordinate_effect`` the change of each block-interaction value c_kappa.
    """

    position: int
    signature: tuple
    pattern: Pattern
    insertion: dict
    effect: tuple
    coordinate_effect: dict = field(default_factory=dict)

    __hash__ = None

    def placements(self):
        """(block index, window-relative element) pairs."""
        offset = self.signature[0][0] - 1
        return sorted(
            (offset + slot, element)
            for slot, elements in self.insertion.items()
            for element in elements
        )


def _signature(blocks, position, length):
    return tuple(
        (index, block.window(position, length))
        for index, block in enumerate(blocks.blocks, start=1)
        if block.count_between(position + 1, position + length)
    )


def interior_windows(blocks, k):
    """
    Positions n = 0 (mod 3k) whose window [n+1, n+3k], widened by k on both
    sides, contains no block endpoint, with their signatures.
    """
    length = 3 * k
    endpoints = sorted({block.minimum() for block in blocks} | {block.maximum() for block in blocks})
    last = blocks.support().maximum()
    windows = []
    for position in range(0, last + 1, length):
        low, high = position + 1 - k, position + length + k
        if any(low <= point <= high for point in endpoints):
            continue
        signature = _signature(blocks, position, length)
        if signature:
            windows.append((position, signature))
    return windows


def _mobius(kappa, values):
    """Sum over kappa' in kappa of (-1)^|kappa - kappa'| values[kappa']."""
    total = None
    for size in range(len(kappa) + 1):
        sign = -1 if (len(kappa) - size) % 2 else 1
        for chosen in combinations(kappa.elements, size):
            term = values(FiniteIndexSet(chosen)) * sign
            total = term if total is None else total + term
    return total


def _coordinates(tracked, l, d):
    coordinates = set()
    for beta in tracked:
        for size in range(1, d + 1):
            for chosen in combinations(beta.elements, size):
                kappa = FiniteIndexSet(chosen)
                if diameter(kappa) <= l:
                    coordinates.add(kappa)
    return sorted(coordinates, key=lambda kappa: (-len(kappa), kappa.elements))


def coordinate_values(form, blocks, coordinates):
    """c_kappa: the part of f(alpha_beta) carried by sets meeting exactly the blocks of kappa."""
    cache = {}

    def value(kappa):
        if kappa not in cache:
            cache[kappa] = form.evaluate(blocks_union(blocks, kappa))
        return cache[kappa]

    return {kappa: _mobius(kappa, value) for kappa in coordinates}


def insertion_moves(form, blocks, position, k, tracked, coordinates):
    """
    Every move at one interior window: non-empty sets S of at most deg f
    free elements of [n+k+1, n+2k], each element given to a block present
    in the window. Moves with no effect on any coordinate are dropped.

    :return: list of PerturbationMove in canonical move order
    """
    length = 3 * k
    signature = _signature(blocks, position, length)
    present = tuple(index for index, _window in signature)
    present_set = set(present)
    occupied = set()
    for index in present:
        occupied.update(blocks.block(index).members)
    free = [x for x in range(position + k + 1, position + 2 * k + 1) if x not in occupied]
    offset = present[0] - 1
    pattern = Pattern.from_window(blocks, position, length, k, offset)
    local = [kappa for kappa in coordinates if kappa.members <= present_set]
    cache = {}

    def union_of(kappa):
        if kappa not in cache:
            cache[kappa] = blocks_union(blocks, kappa)
        return cache[kappa]

    moves = []
    for size in range(1, form.degree + 1):
        for chosen in combinations(free, size):
            for owners in product(present, repeat=size):
                effect = {}
                for kappa in local:
                    if kappa.members.isdisjoint(owners):
                        continue

                    def delta(part, chosen=chosen, owners=owners):
                        inserted = FiniteIndexSet.of(
                            x for x, owner in zip(chosen, owners) if owner in part.members
                        )
                        return form.insertion_effect(union_of(part), inserted)

                    change = _mobius(kappa, delta)
                    if not change.is_zero():
                        effect[kappa] = change
                if not effect:
                    continue
                insertion = defaultdict(list)
                for x, owner in zip(chosen, owners):
                    insertion[owner - offset].append(x - position)
                per_beta = tuple(
                    sum(
                        (change for kappa, change in effect.items() if kappa.members <= beta.members),
                        TorusPoint.zero(form.dimension),
                    )
                    for beta in tracked
                )
                moves.append(
                    PerturbationMove(
                        position,
                        signature,
                        pattern,
                        {slot: FiniteIndexSet.of(values) for slot, values in insertion.items()},
                        per_beta,
                        effect,
                    )
                )
    return moves


def _plan_coordinate(target, fixed, values, catalog, tolerance, budget, dimension):
    """
    Best-first search over move sequences bringing c_target within
    tolerance while returning every fixed coordinate to its value.
    Priority: number of disturbed fixed coordinates, then residual, then depth.
    """
    watched = (target,) + tuple(fixed)
    usable = [
        move for move in catalog if any(kappa in move.coordinate_effect for kappa in watched)
    ]
    zero = TorusPoint.zero(dimension)
    start = tuple(values[kappa] for kappa in watched)
    origin = start[1:]

    def priority(state):
        disturbed = sum(1 for now, then in zip(state[1:], origin) if now != then)
        return disturbed, state[0].norm()

    parents = {start: None}
    heap = [(priority(start), 0, 0, start)]
    pushed = expanded = 0
    while heap and expanded < budget:
        (disturbed, residual), depth, _order, state = heapq.heappop(heap)
        expanded += 1
        if not disturbed and residual <= tolerance:
            path = []
            while parents[state] is not None:
                state, move = parents[state]
                path.append(move)
            return list(reversed(path)), expanded
        for move in usable:
            following = tuple(
                point + move.coordinate_effect.get(kappa, zero) for point, kappa in zip(state, watched)
            )
            if following in parents:
                continue
            parents[following] = (state, move)
            pushed += 1
            heapq.heappush(heap, (priority(following), depth + 1, pushed, following))
    return None, expanded


def _tracked_residual(form, blocks, tracked):
    return max(form.evaluate(blocks_union(blocks, beta)).norm() for beta in tracked)


def _realize(blocks, plan, windows):
    """Places each planned move on the next unused window with its signature."""
    free_positions = defaultdict(list)
    for position, signature in windows:
        free_positions[signature].append(position)
    additions = defaultdict(list)
    placed = []
    for move in plan:
        position = free_positions[move.signature].pop(0)
        for index, element in move.placements():
            additions[index].append(position + element)
        placed.append(replace(move, position=position))
    for index, elements in sorted(additions.items()):
        blocks = blocks.replace(index, blocks.block(index).union(FiniteIndexSet.of(elements)))
    return blocks, tuple(placed)


@log
def perturbation_search(
    f, k, l, tracked, epsilon=DEFAULT_EPSILON, budget=DEFAULT_BUDGET, windows=DEFAULT_WINDOWS
):
    """
    Drives max over tracked beta of ||f(alpha_beta)|| below epsilon by
    inserting elements into a generic block sequence.

    f(alpha_beta) splits as the sum of c_kappa over kappa in beta, c_kappa
    collecting the coefficients of sets meeting exactly the blocks of
    kappa; only kappa with diam <= l and |kappa| <= deg f survive on a
    well-formed sequence. Coordinates are brought within epsilon / |K| one
    at a time, largest kappa first, using moves (or move combinations) that
    leave the coordinates already handled unchanged. The plan is then
    realized on fresh windows and re-evaluated exactly.

    :param f: TorusPolynomial in stable form for k, with f(empty) = 0
    :param l: gap bound of the tracked sets, l <= k - deg f - 1
    :param tracked: FiniteIndexSets in S_l
    :param budget: total number of search states expanded
    :param windows: occurrence count requested from the generic construction
    :return: SearchOutcome with a BlockSequence witness, or none after the budget
    """
    report = is_stable_form(f, k)
    if not report:
        raise ParameterError(f"not in stable form for k={k}: {report.violations[:3]}", field="f")
    d = degree(f)
    if l < 0 or l > k - d - 1:
        raise ParameterError(f"need 0 <= l <= k - deg f - 1 = {k - d - 1}, got {l}", field="l")
    tracked = tuple(beta if isinstance(beta, FiniteIndexSet) else FiniteIndexSet.of(beta) for beta in tracked)
    if not tracked or any(not beta or not is_syndetic(beta, l) for beta in tracked):
        raise ParameterError(f"tracked sets must be non-empty members of S_{l}", field="tracked")
    form = stable_form_of(f, k)
    if any(form.constant):
        raise ParameterError("f(empty) must be 0", field="f")
    epsilon = Fraction(epsilon)
    coordinates = _coordinates(tracked, l, d)
    tolerance = epsilon / len(coordinates) if coordinates else epsilon
    count = max(max(beta.maximum() for beta in tracked), 2 * (l + 1) + 1)
    logger.info(
        "SEARCH START: perturbation over {} coordinates (k={}, l={}, deg={})", len(coordinates), k, l, d
    )

    expanded = 0
    value = None
    while expanded < budget:
        blocks = generate_generic_blocks(k, l, 3 * k, windows, count)
        value = _tracked_residual(form, blocks, tracked)
        if value <= epsilon:
            logger.info("SEARCH DONE: generic blocks already within {}", epsilon)
            return SearchOutcome("perturbation", blocks, value, expanded)

        values = coordinate_values(form, blocks, coordinates)
        available = interior_windows(blocks, k)
        supply = Counter(signature for _position, signature in available)
        catalog = []
        seen = set()
        for position, signature in available:
            if signature not in seen:
                seen.add(signature)
                catalog.extend(insertion_moves(form, blocks, position, k, tracked, coordinates))
        logger.debug("{} windows, {} signatures, {} moves", len(available), len(supply), len(catalog))

        plan, fixed = [], []
        for kappa in coordinates:
            path, used = _plan_coordinate(
                kappa, fixed, values, catalog, tolerance, budget - expanded, form.dimension
            )
            expanded += used
            if path is None:
                logger.info("SEARCH DONE: no plan for c_{} within budget", kappa)
                return SearchOutcome("perturbation", None, value, expanded)
            for move in path:
                for target, change in move.coordinate_effect.items():
                    values[target] = values[target] + change
            plan.extend(path)
            fixed.append(kappa)

        need = Counter(move.signature for move in plan)
        short = [signature for signature, wanted in need.items() if wanted > supply[signature]]
        if short:
            # interior windows grow roughly in proportion to the requested occurrences
            scale = max(ceil(need[signature] * windows / max(supply[signature], 1)) for signature in short)
            windows = max(2 * windows, scale + 1)
            logger.warning(
                "Plan of {} moves is short on {} signatures; asking for {} occurrences",
                len(plan),
                len(short),
                windows,
            )
            continue

        realized, placed = _realize(blocks, plan, available)
        achieved = _tracked_residual(form, realized, tracked)
        if achieved <= epsilon and is_well_formed(realized, k, l):
            logger.info("SEARCH DONE: {} moves reach {}", len(placed), achieved)
            return SearchOutcome("perturbation", realized, achieved, expanded, moves=placed)
        logger.info("SEARCH DONE: realized plan reaches {} > {}", achieved, epsilon)
        return SearchOutcome("perturbation", None, achieved, expanded, moves=placed)
    logger.info("SEARCH DONE: budget of {} expansions spent", budget)
    return SearchOutcome("perturbation", None, value, expanded)


@dataclass(frozen=True)
class CounterexampleReport:
    k: int
    d: int
    l: int
    block_values: tuple
    half_from_l: bool
    minimum: Fraction
    maximum: Fraction
    minimizer: FiniteIndexSet
    sets_checked: int
    covering_max: int
    sharpness_regime: bool

    @property
    def covering_holds(self):
        return self.covering_max <= self.d


def _largest_local_subset(alpha, k):
    """Largest |gamma| with gamma in alpha and diam(gamma) <= k."""
    return max((alpha.count_between(x, x + k) for x in alpha), default=0)


@log
def verify_counterexample(k, d, l, blocks):
    """
    Evaluates the sharpness polynomial (a_gamma = 1/2 for diam <= k,
    |gamma| <= d) on the blocks and on every alpha_beta, beta in S_l.

    :param blocks: BlockSequence mapping S_l into S_k
    :return: CounterexampleReport
    """
    form = counterexample_form(k, d)
    if not maps_syndetic(blocks, l, k):
        raise DomainError(f"blocks do not send S_{l} into S_{k}")
    block_values = tuple(form.evaluate(block) for block in blocks)
    first = max(l, 1)
    half = TorusPoint((HALF,))
    half_from_l = all(value == half for value in block_values[first - 1 :])
    minimum = maximum = minimizer = None
    checked = 0
    for beta in enumerate_syndetic(blocks.length, l):
        checked += 1
        norm = form.evaluate(blocks_union(blocks, beta)).norm()
        if minimum is None or norm < minimum:
            minimum, minimizer = norm, beta
        if maximum is None or norm > maximum:
            maximum = norm
    covering = max(_largest_local_subset(block, k) for block in blocks)
    report = CounterexampleReport(
        k, d, l, block_values, half_from_l, minimum, maximum, minimizer, checked, covering,
        l >= k - d + 2,
    )
    logger.info(
        "VERIFY SUCCESS: k={}, d={}, l={}, blocks all 1/2 from index {}: {}, min {} max {}",
        k, d, l, first, half_from_l, minimum, maximum,
    )
    return report


@dataclass(frozen=True)
class DivisibilityReport:
    blocks: object
    cut_points: tuple
    targets: dict
    residue_counts: dict

    __hash__ = None

    @property
    def found(self):
        return self.blocks is not None


@log
def find_divisible_blocks(n, k, m, target_length):
    """
    Canonical blocks alpha_j = {i_j, i_j + k, ..., i_{j+k} - k} whose sums
    n_alpha_j are all divisible by m.

    n over such a block is a difference of two prefix sums along one
    residue class mod k, so it suffices that every cut point of a class
    sees the same prefix residue. Each class uses its most frequent prefix
    residue (pigeonhole) and cut points are taken greedily.

    :return: DivisibilityReport; blocks is None when the truncation is too short
    """
    if k < 1:
        raise ParameterError("k must be positive", field="k")
    if m < 1:
        raise ParameterError("m must be positive", field="m")
    if target_length < 1:
        raise ParameterError("target length must be positive", field="target_length")
    length = len(n)
    prefix = {}
    running = [0] * k
    for index in range(1, length + 1):
        residue = index % k
        prefix[index] = running[residue] % m
        running[residue] += n[index - 1]
    counts = {
        residue: Counter(prefix[index] for index in prefix if index % k == residue)
        for residue in range(k)
    }
    targets = {
        residue: max(counter.items(), key=lambda item: (item[1], -item[0]))[0]
        for residue, counter in counts.items()
        if counter
    }

    cuts, previous = [], 0
    for position in range(1, target_length + k + 1):
        residue = position % k
        candidate = previous + 1
        candidate += (position - candidate) % k
        while candidate <= length and prefix[candidate] != targets.get(residue):
            candidate += k
        if candidate > length:
            logger.warning(
                "DIVISIBLE FAILURE: truncation {} too short after {} cut points", length, len(cuts)
            )
            return DivisibilityReport(None, tuple(cuts), targets, counts)
        cuts.append(candidate)
        previous = candidate

    blocks = canonical_blocks(cuts, k)
    for beta in enumerate_syndetic(blocks.length, k):
        if subset_sum(n, blocks_union(blocks, beta)) % m:
            raise InconsistencyError(f"block sum over {beta!r} is not divisible by {m}")
    if not maps_syndetic(blocks, k, k):
        raise InconsistencyError("canonical blocks failed the S_k -> S_k check")
    logger.info("DIVISIBLE SUCCESS: {} blocks with sums divisible by {}", blocks.length, m)
    return DivisibilityReport(blocks, tuple(cuts), targets, counts)


def dilation_sums(n, blocks, k):
    """The SG_k sums n_alpha_beta, beta in S_k, of a block sequence (sorted, distinct)."""
    sums = {subset_sum(n, blocks_union(blocks, beta)) for beta in enumerate_syndetic(blocks.length, k)}
    return sorted(sums)
