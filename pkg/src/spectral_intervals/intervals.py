"""Unions of finite open intervals and their set-level geometry.

An :class:`IntervalUnion` is an ordered union of disjoint finite open
intervals (a_1, b_1), ..., (a_n, b_n).  Adjacent intervals may share an
endpoint (b_i = a_{i+1}) but never overlap.  All operations here are pure
functions on immutable values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    EmptyInterval,
    GuardExceeded,
    MoveCollision,
    NonFinite,
    OverlappingIntervals,
)

#: cap on the number of nodes visited by the gap decomposition search
COMBINATION_CAP = 10 ** 6


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted union of disjoint finite open intervals."""

    endpoints: tuple[tuple[float, float], ...]

    @property
    def n(self) -> int:
        return len(self.endpoints)

    @property
    def lefts(self) -> tuple[float, ...]:
        return tuple(a for a, _ in self.endpoints)

    @property
    def rights(self) -> tuple[float, ...]:
        return tuple(b for _, b in self.endpoints)

    @property
    def lengths(self) -> tuple[float, ...]:
        return tuple(b - a for a, b in self.endpoints)

    @property
    def gaps(self) -> tuple[float, ...]:
        eps = self.endpoints
        return tuple(eps[i + 1][0] - eps[i][1] for i in range(self.n - 1))

    @property
    def measure(self) -> float:
        return sum(self.lengths)

    @property
    def lmin(self) -> float:
        return min(self.lengths)

    @property
    def diameter(self) -> float:
        return self.endpoints[-1][1] - self.endpoints[0][0]

    def tol(self) -> float:
        """Absolute comparison tolerance, scaled by the largest endpoint."""
        return 1e-9 * max(1.0, abs(self.endpoints[-1][1]), abs(self.endpoints[0][0]))

    def index_of(self, x: float) -> int | None:
        """Index of the open interval containing x, or None."""
        for i, (a, b) in enumerate(self.endpoints):
            if a < x < b:
                return i
        return None

    def __contains__(self, x: float) -> bool:
        return self.index_of(x) is not None

    def equal_lengths(self) -> bool:
        ls = self.lengths
        return max(ls) - min(ls) <= self.tol()


@dataclass(frozen=True)
class CongruenceMap:
    """Whole-interval shifts, all multiples of ``modulus``, tiling an interval.

    ``pieces`` lists (source interval index, shift).
    """

    pieces: tuple[tuple[int, float], ...]
    modulus: float


def new_interval_union(endpoints) -> IntervalUnion:
    """Validate and sort a list of (a, b) pairs into an IntervalUnion."""
    if not endpoints:
        raise EmptyInterval("need at least one interval")
    eps = []
    for pair in endpoints:
        a, b = float(pair[0]), float(pair[1])
        if not (math.isfinite(a) and math.isfinite(b)):
            raise NonFinite(f"non-finite endpoint in ({a}, {b})")
        eps.append((a, b))
    eps.sort()
    scale = max(1.0, *(abs(v) for pair in eps for v in pair))
    tol = 1e-9 * scale
    for a, b in eps:
        if b - a <= tol:
            raise EmptyInterval(f"interval ({a}, {b}) has nonpositive length")
    for (a1, b1), (a2, b2) in zip(eps, eps[1:]):
        if a2 < b1 - tol:
            raise OverlappingIntervals(
                f"intervals ({a1}, {b1}) and ({a2}, {b2}) overlap"
            )
    return IntervalUnion(tuple(eps))


def gap_decomposition(omega: IntervalUnion, gap: float, tol: float | None = None):
    """All multisets of interval lengths (repetition allowed) summing to ``gap``.

    Returns a sorted list of tuples of length values; empty if no combination
    fits.  Lengths equal within tolerance are merged to one value, so two
    witnesses with the same length multiset collapse.
    """
    if gap <= 0:
        raise ValueError("gap must be positive")
    tol = omega.tol() if tol is None else tol
    # cluster lengths into distinct values
    values: list[float] = []
    for l in sorted(omega.lengths):
        if not values or l - values[-1] > tol:
            values.append(l)
    max_terms = math.ceil((gap + tol) / omega.lmin)
    results: set[tuple[float, ...]] = set()
    nodes = 0

    def search(start: int, chosen: list[float], total: float):
        nonlocal nodes
        nodes += 1
        if nodes > COMBINATION_CAP:
            raise GuardExceeded(
                f"gap decomposition search exceeded {COMBINATION_CAP} nodes"
            )
        if abs(total - gap) <= tol and chosen:
            results.add(tuple(chosen))
            return
        if total > gap + tol or len(chosen) >= max_terms:
            return
        for k in range(start, len(values)):
            chosen.append(values[k])
            search(k, chosen, total + values[k])
            chosen.pop()

    search(0, [], 0.0)
    return sorted(results)


def tiles_by_lattice(omega: IntervalUnion, a: float, tol: float | None = None):
    """Whether the translates {omega + k*a} partition R up to measure zero.

    Equivalent to the mod-a reductions of the intervals covering [0, a)
    exactly once.  Returns (bool, certificate) where the certificate lists
    the mod-a pieces and any holes/overlaps found.
    """
    if a <= 0:
        raise ValueError("lattice step must be positive")
    tol = omega.tol() if tol is None else tol
    pieces = []
    for i, (lo, hi) in enumerate(omega.endpoints):
        k = math.floor(lo / a)
        while k * a < hi - tol:
            s = max(lo, k * a)
            e = min(hi, (k + 1) * a)
            if e - s > tol:
                pieces.append((s - k * a, e - k * a, i))
            k += 1
    pieces.sort()
    holes = []
    overlaps = []
    pos = 0.0
    for s, e, _ in pieces:
        if s > pos + tol:
            holes.append((pos, s))
        elif s < pos - tol:
            overlaps.append((s, min(e, pos)))
        pos = max(pos, e)
    if pos < a - tol:
        holes.append((pos, a))
    ok = not holes and not overlaps
    certificate = {"pieces": pieces, "holes": holes, "overlaps": overlaps}
    return ok, certificate


def translates_disjoint(omega: IntervalUnion, a: float, tol: float | None = None) -> bool:
    """True iff omega and omega + k*a overlap in measure zero for every k != 0."""
    if a == 0:
        raise ValueError("shift must be nonzero")
    tol = omega.tol() if tol is None else tol
    kmax = math.ceil(omega.diameter / abs(a))
    for k in range(1, kmax + 1):
        shift = k * abs(a)
        overlap = 0.0
        for a1, b1 in omega.endpoints:
            for a2, b2 in omega.endpoints:
                lo = max(a1, a2 + shift)
                hi = min(b1, b2 + shift)
                if hi - lo > 0:
                    overlap += hi - lo
        if overlap > tol:
            return False
    return True


def translation_congruence_to_interval(
    omega: IntervalUnion, a: float, tol: float | None = None
) -> CongruenceMap | None:
    """Shift whole intervals by multiples of ``a`` onto (a_1, a_1 + L).

    Returns the congruence map, or None if no assignment of shifts in a*Z
    tiles the target interval with the intervals of omega.
    """
    if a <= 0:
        raise ValueError("modulus must be positive")
    tol = omega.tol() if tol is None else tol
    target_lo = omega.endpoints[0][0]
    lengths = omega.lengths

    def backtrack(pos: float, used: list[int | None], order: list[tuple[int, float]]):
        if len(order) == omega.n:
            return list(order)
        for j in range(omega.n):
            if j in (idx for idx, _ in order):
                continue
            shift = pos - omega.endpoints[j][0]
            k = round(shift / a)
            if abs(shift - k * a) > tol:
                continue
            order.append((j, k * a))
            found = backtrack(pos + lengths[j], used, order)
            if found is not None:
                return found
            order.pop()
        return None

    solution = backtrack(target_lo, [], [])
    if solution is None:
        return None
    return CongruenceMap(tuple(solution), a)


def reflect(omega: IntervalUnion) -> IntervalUnion:
    """The reflected set -omega, re-sorted."""
    return IntervalUnion(tuple((-b, -a) for a, b in reversed(omega.endpoints)))


def move_interval(omega: IntervalUnion, j: int, i: int) -> IntervalUnion:
    """Move interval j to the end of interval i (0-based indices).

    The result keeps every other interval and replaces intervals i and j by
    (a_i, a_i + l_i + l_j).  Raises MoveCollision if the enlarged interval
    overlaps a third one.
    """
    if i == j:
        raise ValueError("source and destination must differ")
    for idx in (i, j):
        if not 0 <= idx < omega.n:
            raise IndexError(f"interval index {idx} out of range")
    a_i = omega.endpoints[i][0]
    merged = (a_i, a_i + omega.lengths[i] + omega.lengths[j])
    kept = [omega.endpoints[k] for k in range(omega.n) if k not in (i, j)]
    try:
        return new_interval_union(kept + [merged])
    except OverlappingIntervals as exc:
        raise MoveCollision(str(exc)) from exc
