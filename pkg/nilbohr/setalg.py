"""
Finite index sets, k-syndetic sets, block sequences, patterns and generic
block sequences.

Everything here is an immutable value. Infinite objects (IP rings, block
sequences) are represented by explicit finite truncations and every "for all
i" statement is checked over the truncation only.
"""

from bisect import bisect_left, bisect_right
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import chain, combinations, islice
from loguru import logger
from nilbohr.errors import DomainError, OutOfRangeError, ParameterError
from nilbohr.logging_decorator import log_decorator as log

MAX_GENERIC_ATTEMPTS = 6


@dataclass(frozen=True)
class FiniteIndexSet:
    """
    A finite set of positive integers stored as a strictly increasing tuple.
    The empty tuple stands for the empty set.
    """

    elements: tuple = ()

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        previous = 0
        for value in elements:
            if not isinstance(value, int) or isinstance(value, bool):
                raise DomainError(f"index {value!r} is not an integer")
            if value < 1:
                raise DomainError(f"index {value} is not positive")
            if value <= previous:
                raise DomainError(f"elements {elements} are not strictly increasing")
            previous = value

    @classmethod
    def of(cls, values=()):
        """Builds a set from any iterable, sorting and dropping repeats."""
        return cls(tuple(sorted(set(values))))

    @classmethod
    def interval(cls, first, last):
        return cls(tuple(range(first, last + 1)))

    @cached_property
    def members(self):
        return frozenset(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __bool__(self):
        return bool(self.elements)

    def __contains__(self, value):
        return value in self.members

    def __repr__(self):
        return "{" + ",".join(str(value) for value in self.elements) + "}"

    def minimum(self):
        if not self.elements:
            raise DomainError("the empty set has no minimum")
        return self.elements[0]

    def maximum(self):
        if not self.elements:
            raise DomainError("the empty set has no maximum")
        return self.elements[-1]

    def union(self, *others):
        return FiniteIndexSet.of(chain(self.elements, *(other.elements for other in others)))

    def intersection(self, other):
        return FiniteIndexSet(tuple(value for value in self.elements if value in other.members))

    def difference(self, other):
        return FiniteIndexSet(tuple(value for value in self.elements if value not in other.members))

    def shift(self, offset):
        """Translates every element by ``offset``; the result must stay positive."""
        return FiniteIndexSet(tuple(value + offset for value in self.elements))

    def issubset(self, other):
        return self.members <= other.members

    def isdisjoint(self, other):
        return self.members.isdisjoint(other.members)

    def window(self, position, length):
        """
        Elements in [position+1, position+length], translated by -position.

        :param position: window offset n
        :param length: window length M
        :return: tuple of relative positions in [1..M]
        """
        low = bisect_right(self.elements, position)
        high = bisect_right(self.elements, position + length)
        return tuple(value - position for value in self.elements[low:high])

    def count_between(self, low, high):
        """Number of elements in [low, high]."""
        return bisect_right(self.elements, high) - bisect_left(self.elements, low)

    def subsets(self, max_size=None):
        """All subsets (including the empty set), by size then lexicographically."""
        top = len(self.elements) if max_size is None else min(max_size, len(self.elements))
        for size in range(top + 1):
            for combo in combinations(self.elements, size):
                yield FiniteIndexSet(combo)

    def to_list(self):
        return list(self.elements)


EMPTY = FiniteIndexSet()


def index_set(*values):
    """Shorthand used throughout: ``index_set(1, 3, 4)``."""
    return FiniteIndexSet.of(values)


def gaps(alpha):
    """
    Consecutive differences of a non-empty index set.

    :param alpha: FiniteIndexSet
    :return: list of positive integers (empty for a singleton)
    """
    if not alpha:
        raise DomainError("gaps of the empty set are undefined")
    elements = alpha.elements
    return [later - earlier for earlier, later in zip(elements, elements[1:])]


def is_syndetic(alpha, k):
    """
    True iff every gap of alpha is at most k. The empty set and singletons are
    k-syndetic for every k; with k = 0 only those qualify.
    """
    elements = alpha.elements
    return all(later - earlier <= k for earlier, later in zip(elements, elements[1:]))


def diameter(alpha):
    if not alpha:
        raise DomainError("diameter of the empty set is undefined")
    return alpha.elements[-1] - alpha.elements[0]


@dataclass(frozen=True)
class BlockSequence:
    """
    A finite truncation (alpha_1, ..., alpha_L) of pairwise disjoint,
    non-empty index sets. Block indices are 1-based.
    """

    blocks: tuple = field(default_factory=tuple)

    def __post_init__(self):
        blocks = tuple(self.blocks)
        object.__setattr__(self, "blocks", blocks)
        seen = set()
        for position, block in enumerate(blocks, start=1):
            if not isinstance(block, FiniteIndexSet):
                raise DomainError(f"block {position} is not a FiniteIndexSet")
            if not block:
                raise DomainError(f"block {position} is empty")
            if not seen.isdisjoint(block.members):
                raise DomainError(f"block {position} meets an earlier block")
            seen.update(block.members)

    @classmethod
    def of(cls, *blocks):
        return cls(tuple(FiniteIndexSet.of(block) for block in blocks))

    @property
    def length(self):
        return len(self.blocks)

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __repr__(self):
        return "(" + ", ".join(repr(block) for block in self.blocks) + ")"

    def block(self, index):
        if not 1 <= index <= len(self.blocks):
            raise OutOfRangeError(f"block index {index} outside [1..{len(self.blocks)}]")
        return self.blocks[index - 1]

    def support(self):
        return FiniteIndexSet.of(chain.from_iterable(block.elements for block in self.blocks))

    def replace(self, index, block):
        """Returns a copy with block ``index`` (1-based) replaced."""
        blocks = list(self.blocks)
        blocks[index - 1] = block
        return BlockSequence(tuple(blocks))

    def to_lists(self):
        return [block.to_list() for block in self.blocks]


def blocks_union(blocks, beta):
    """
    alpha_beta, the union of the blocks indexed by beta.

    :param blocks: BlockSequence
    :param beta: FiniteIndexSet of block indices
    :return: FiniteIndexSet
    """
    if beta and beta.maximum() > blocks.length:
        raise OutOfRangeError(
            f"index {beta.maximum()} beyond truncation of length {blocks.length}"
        )
    return FiniteIndexSet.of(
        chain.from_iterable(blocks.blocks[index - 1].elements for index in beta)
    )


def _sets_with_max(top, k):
    """k-syndetic sets with maximum ``top``, in lexicographic order."""
    prefix = []

    def extend():
        last = prefix[-1]
        if last == top:
            yield FiniteIndexSet(tuple(prefix))
            return
        for following in range(last + 1, min(last + k, top) + 1):
            prefix.append(following)
            yield from extend()
            prefix.pop()

    first_values = range(1, top + 1) if k >= 1 else (top,)
    for first in first_values:
        prefix.append(first)
        yield from extend()
        prefix.pop()


def enumerate_syndetic(N, k, start=0, stop=None):
    """
    Streams every non-empty k-syndetic subset of [1..N] exactly once, by
    increasing maximum and then lexicographically.

    :param N: truncation
    :param k: gap bound (0 gives singletons)
    :param start: first canonical rank to yield
    :param stop: rank to stop before (None for the end)
    """
    if N < 1:
        raise ParameterError("truncation must be at least 1", field="N")
    stream = chain.from_iterable(_sets_with_max(top, k) for top in range(1, N + 1))
    return islice(stream, start, stop)


def canonical_key(alpha):
    """Sort key realizing the enumeration order."""
    if not alpha:
        return (0, ())
    return (alpha.maximum(), alpha.elements)


def _count_with_max(N, k):
    counts = [0] * (N + 1)
    for top in range(1, N + 1):
        counts[top] = 1 + sum(counts[max(1, top - k) : top])
    return counts


def count_syndetic(N, k):
    """Number of non-empty k-syndetic subsets of [1..N]."""
    return sum(_count_with_max(N, k))


def canonical_rank(alpha, k):
    """0-based position of alpha in ``enumerate_syndetic(max alpha, k)``."""
    if not alpha or not is_syndetic(alpha, k):
        raise DomainError(f"{alpha!r} is not a non-empty {k}-syndetic set")
    top = alpha.maximum()
    rank = sum(_count_with_max(top - 1, k)) if top > 1 else 0
    for candidate in _sets_with_max(top, k):
        if candidate == alpha:
            return rank
        rank += 1
    raise DomainError(f"{alpha!r} not reached by the enumeration")


def maps_syndetic(blocks, l, k):
    """True iff beta -> alpha_beta sends every S_l subset of the truncation into S_k."""
    if blocks.length < 1:
        raise DomainError("empty block sequence")
    for beta in enumerate_syndetic(blocks.length, l):
        if not is_syndetic(blocks_union(blocks, beta), k):
            logger.debug("S_l -> S_k fails at beta = {}", beta)
            return False
    return True


def is_well_formed(blocks, k, l):
    """
    Well-formedness of a block sequence:
    (1) min and max of every block agree mod k,
    (2) min alpha_{i+l+1} > max alpha_i + k,
    (3) S_l subsets are sent to S_k sets.
    """
    for block in blocks:
        if (block.maximum() - block.minimum()) % k:
            return False
    for index in range(blocks.length - l - 1):
        if blocks.blocks[index + l + 1].minimum() <= blocks.blocks[index].maximum() + k:
            return False
    return maps_syndetic(blocks, l, k)


@dataclass(frozen=True)
class Pattern:
    """
    Slot configuration seen through a window of length M. Missing trailing
    slots are padded with the empty set.
    """

    slots: tuple
    length: int
    k: int

    def __post_init__(self):
        if self.length < 1 or self.k < 1:
            raise DomainError("pattern length and syndeticity must be positive")
        slots = tuple(FiniteIndexSet.of(slot) for slot in self.slots)
        if len(slots) > self.length:
            raise DomainError("more slots than the pattern length")
        slots = slots + (EMPTY,) * (self.length - len(slots))
        object.__setattr__(self, "slots", slots)
        seen = set()
        for slot in slots:
            if slot and (slot.minimum() < 1 or slot.maximum() > self.length):
                raise DomainError(f"slot {slot!r} leaves the window [1..{self.length}]")
            if not seen.isdisjoint(slot.members):
                raise DomainError("pattern slots overlap")
            if not is_syndetic(slot, self.k):
                raise DomainError(f"slot {slot!r} is not {self.k}-syndetic")
            seen.update(slot.members)

    @classmethod
    def from_window(cls, blocks, position, length, k, offset=0):
        """The pattern B shows at ``position`` for slots offset+1 .. offset+length."""
        slots = []
        for slot in range(1, length + 1):
            index = offset + slot
            if index > blocks.length:
                slots.append(())
            else:
                slots.append(blocks.blocks[index - 1].window(position, length))
        return cls(tuple(slots), length, k)


def pattern_occurrences(blocks, pattern, offset=0):
    """
    Positions n = 0 (mod k) at which (alpha_i - n) & [1..M] equals slot
    (i - offset) for every block i, blocks outside the slot range seeing the
    empty slot.

    :param blocks: BlockSequence
    :param pattern: Pattern
    :param offset: block index aligned with slot 0 (slot s meets block offset+s)
    :return: strictly increasing list of positions
    """
    length, k = pattern.length, pattern.k
    for slot_index, slot in enumerate(pattern.slots, start=1):
        if slot and offset + slot_index > blocks.length:
            return []
    if blocks.length == 0:
        return []
    last = blocks.support().maximum()
    positions = []
    for position in range(0, last + 1, k):
        matched = True
        for index, block in enumerate(blocks.blocks, start=1):
            slot_index = index - offset
            expected = (
                pattern.slots[slot_index - 1].elements if 1 <= slot_index <= length else ()
            )
            if block.window(position, length) != expected:
                matched = False
                break
        if matched:
            positions.append(position)
    return positions


def _touches_endpoint(blocks, position, length):
    low, high = position + 1, position + length
    return any(
        low <= block.minimum() <= high or low <= block.maximum() <= high
        for block in blocks
    )


def generic_occurrence_counts(blocks, k, length):
    """
    Counts how often each window signature occurs at positions n = 0 (mod k).

    Signatures whose window contains a block's global min or max are
    bounded (they can only occur near that endpoint) and are counted
    separately; every other signature repeats along the progressions.

    :return: (Counter of unbounded signatures, Counter of bounded signatures)
    """
    unbounded, bounded = Counter(), Counter()
    last = blocks.support().maximum()
    for position in range(0, last + 1, k):
        signature = tuple(
            (index, block.window(position, length))
            for index, block in enumerate(blocks.blocks, start=1)
            if block.count_between(position + 1, position + length)
        )
        if not signature:
            continue
        if _touches_endpoint(blocks, position, length):
            bounded[signature] += 1
        else:
            unbounded[signature] += 1
    return unbounded, bounded


def _progression_blocks(k, l, count, spacing):
    extent = l * spacing + spacing // 2
    blocks = []
    for index in range(count):
        first = index * spacing * k + index % k + 1
        blocks.append(FiniteIndexSet(tuple(range(first, first + extent * k + 1, k))))
    return BlockSequence(tuple(blocks))


@log
def generate_generic_blocks(k, l, M=None, N=1, count=None):
    """
    Builds a well-formed block sequence from long step-k progressions.

    Block j starts at j*D*k + (j mod k) + 1 and spans (l*D + D//2)*k, so the
    blocks within l indices of each other interleave with distinct residues
    while blocks l+1 apart are separated by more than k. D grows until every
    unbounded window signature is counted at least N times.

    :param k: syndeticity of the image
    :param l: syndeticity of the index sets, l < k
    :param M: window length, a multiple of k (default 3k)
    :param N: required number of occurrences
    :param count: number of blocks (default 2(l+1)+1)
    :return: BlockSequence
    """
    if k < 1:
        raise ParameterError("k must be positive", field="k")
    if l < 0 or l >= k:
        raise ParameterError(f"need 0 <= l < k, got l={l}, k={k}", field="l")
    M = 3 * k if M is None else M
    if M < 1 or M % k:
        raise ParameterError(f"window length {M} is not a positive multiple of {k}", field="M")
    if N < 1:
        raise ParameterError("N must be positive", field="N")
    count = 2 * (l + 1) + 1 if count is None else count
    if count < 1:
        raise ParameterError("block count must be positive", field="count")

    spacing = max(6, 2 * (N + M // k + 3))
    for _ in range(MAX_GENERIC_ATTEMPTS):
        blocks = _progression_blocks(k, l, count, spacing)
        unbounded, _bounded = generic_occurrence_counts(blocks, k, M)
        if unbounded and min(unbounded.values()) >= N:
            if not is_well_formed(blocks, k, l):
                raise ParameterError(f"construction failed well-formedness for k={k}, l={l}")
            logger.info(
                "GENERATE SUCCESS: {} blocks, {} unbounded signatures, min count {}",
                count,
                len(unbounded),
                min(unbounded.values()),
            )
            return blocks
        logger.debug("Spacing {} too short for N = {}; doubling", spacing, N)
        spacing *= 2
    raise ParameterError(f"could not certify {N} occurrences", field="N")


def canonical_blocks(starts, k):
    """
    The canonical restriction shape alpha_j = {i_j, i_j + k, ..., i_{j+k} - k}.

    :param starts: increasing i_1, ..., i_{L+k} with i_j = j (mod k)
    :param k: step
    :return: BlockSequence of length L
    """
    starts = tuple(starts)
    if len(starts) <= k:
        raise DomainError(f"need more than {k} starts")
    for position, (earlier, later) in enumerate(zip(starts, starts[1:]), start=1):
        if later <= earlier:
            raise DomainError(f"starts not increasing at position {position}")
    for position, start in enumerate(starts, start=1):
        if (start - position) % k:
            raise DomainError(f"start i_{position} = {start} is not {position} mod {k}")
    return BlockSequence(
        tuple(
            FiniteIndexSet(tuple(range(starts[index], starts[index + k], k)))
            for index in range(len(starts) - k)
        )
    )


def canonical_start_sequences(count, k, bound):
    """
    Every increasing (i_1, ..., i_{count+k}) with i_j = j (mod k) and
    i_{count+k} <= bound, in lexicographic order.
    """
    total = count + k
    chosen = []

    def extend(position, floor):
        if position > total:
            yield tuple(chosen)
            return
        value = floor + 1
        value += (position - value) % k
        # leave room for the remaining positions, each at least one larger
        while value + (total - position) <= bound:
            chosen.append(value)
            yield from extend(position + 1, value)
            chosen.pop()
            value += k

    yield from extend(1, 0)
