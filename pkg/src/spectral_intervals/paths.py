"""Admissible paths of the unitary group flow.

A point x flows to the right (t > 0) inside its interval, and at each right
endpoint splits into all intervals with weights from the corresponding row
of B.  An admissible path records the visited interval indices; its weight
is the product of matrix entries along the word, its remainder the time
spent inside the final interval.  Negative times mirror the construction
through left endpoints with adjoint weights.
"""
from __future__ import annotations

import math
import os
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import GuardExceeded, PreconditionViolated, XNotInOmega, XPlusTNotInOmega
from .intervals import IntervalUnion

DEFAULT_MAX_PATHS = 10 ** 6
MAX_PATHS_ENV = "SPECTRAL_INTERVALS_MAX_PATHS"


def path_cap() -> int:
    return int(os.environ.get(MAX_PATHS_ENV, DEFAULT_MAX_PATHS))


@dataclass(frozen=True)
class Path:
    """One admissible path: index word, remainder, end point, and weight."""

    word: tuple[int, ...]
    direction: str  # "forward" or "backward"
    remainder: float
    end: float
    weight: complex

    @property
    def length(self) -> int:
        return len(self.word)


def predicted_path_count(omega: IntervalUnion, t: float) -> int:
    """Upper bound n^(ceil(|t|/lmin) + 1) on the number of admissible paths."""
    return omega.n ** (math.ceil(abs(t) / omega.lmin) + 1)


def enumerate_paths(
    omega: IntervalUnion, b, x: float, t: float, max_paths: int | None = None
) -> list[Path]:
    """The complete set of admissible paths for (x, t).

    Raises GuardExceeded when the predicted or actual path count passes the
    cap (default 10^6, overridable via SPECTRAL_INTERVALS_MAX_PATHS).
    """
    b = np.asarray(b, dtype=complex)
    cap = path_cap() if max_paths is None else max_paths
    i = omega.index_of(x)
    if i is None:
        raise XNotInOmega(f"x={x} is not in an open interval of the set")
    predicted = predicted_path_count(omega, t)
    if predicted > cap:
        raise GuardExceeded(
            f"predicted path count {predicted} exceeds cap {cap} for t={t}"
        )

    forward = t >= 0
    lengths = omega.lengths
    lefts, rights = omega.lefts, omega.rights
    n = omega.n
    if forward:
        exit_time = rights[i] - x
        weights = b
    else:
        exit_time = x - lefts[i]
        weights = b.conj().T  # adjoint entries b*_{i,j} = conj(b_{j,i})

    big_t = abs(t)
    if big_t < exit_time:
        end = x + t
        r = end - lefts[i] if forward else rights[i] - end
        return [Path((i,), "forward" if forward else "backward", r, end, 1.0 + 0j)]

    paths: list[Path] = []

    def extend(word: list[int], elapsed: float, weight: complex):
        if len(paths) > cap:
            raise GuardExceeded(f"path count exceeded cap {cap}")
        j_prev = word[-1]
        for j in range(n):
            w = weight * weights[j_prev, j]
            remaining = big_t - elapsed
            if remaining < lengths[j]:
                end = lefts[j] + remaining if forward else rights[j] - remaining
                paths.append(
                    Path(
                        tuple(word) + (j,),
                        "forward" if forward else "backward",
                        remaining,
                        end,
                        complex(w),
                    )
                )
            else:
                word.append(j)
                extend(word, elapsed + lengths[j], w)
                word.pop()

    extend([i], exit_time, 1.0 + 0j)
    return paths


@dataclass
class EndSums:
    """Path weights aggregated by end point (merged within tolerance)."""

    sums: list[tuple[float, complex]]
    flagged: list[tuple[float, float]]  # clusters of analytically distinct ends

    def sum_at(self, e: float, tol: float = 1e-9) -> complex:
        for end, s in self.sums:
            if abs(end - e) <= tol:
                return s
        return 0.0 + 0j

    @property
    def ends(self) -> list[float]:
        return [end for end, _ in self.sums]


def path_sum_by_end(paths: list[Path], tol: float | None = None) -> EndSums:
    """Sum of weights per distinct end.

    Ends closer than the merging tolerance but not numerically identical are
    merged and flagged rather than silently collapsed.
    """
    if not paths:
        return EndSums([], [])
    if tol is None:
        tol = 1e-9 * max(1.0, max(abs(p.end) for p in paths))
    ordered = sorted(paths, key=lambda p: p.end)
    sums: list[tuple[float, complex]] = []
    flagged: list[tuple[float, float]] = []
    cluster: list[Path] = []

    def close_cluster():
        ends = [p.end for p in cluster]
        total = sum(p.weight for p in cluster)
        sums.append((float(np.mean(ends)), complex(total)))
        spread = max(ends) - min(ends)
        if spread > 1e-13 * max(1.0, abs(ends[0])):
            flagged.append((min(ends), max(ends)))

    for p in ordered:
        if cluster and p.end - cluster[-1].end > tol:
            close_cluster()
            cluster = []
        cluster.append(p)
    close_cluster()
    return EndSums(sums, flagged)


@dataclass
class TranslationIdentityReport:
    """Path-sum identities at a target point: weight 1 at x+t, 0 elsewhere."""

    passed: bool
    target: float
    target_sum: complex
    other_sums: list[tuple[float, complex]]
    offending: list[tuple[float, complex]]


def local_translation_identities(
    omega: IntervalUnion, b, x: float, t: float, tol: float = 1e-10
) -> TranslationIdentityReport:
    """Check the spectral-set path-sum identities for one (x, t) pair."""
    target = x + t
    if omega.index_of(target) is None:
        raise XPlusTNotInOmega(f"x+t={target} is not in an open interval of the set")
    paths = enumerate_paths(omega, b, x, t)
    end_tol = 1e-9 * max(1.0, abs(omega.endpoints[-1][1]))
    sums = path_sum_by_end(paths, end_tol)
    target_sum = sums.sum_at(target, tol=end_tol)
    offending = []
    others = []
    if not any(abs(end - target) <= end_tol for end in sums.ends):
        offending.append((target, 0.0 + 0j))
    elif abs(target_sum - 1.0) > tol:
        offending.append((target, target_sum))
    for end, s in sums.sums:
        if abs(end - target) <= end_tol:
            continue
        others.append((end, s))
        if abs(s) > tol:
            offending.append((end, s))
    return TranslationIdentityReport(not offending, target, target_sum, others, offending)


def aggregate_equal_length(omega: IntervalUnion, b, x: float, t: float, p: int):
    """Path-weight aggregation on equal-length sets versus rows of B^p.

    For (p-1)l < t - (b_i - x) < p*l all paths share the same remainder and
    the coefficient of f(a_j + r) is [B^p]_{i,j}.  Returns (coefficients,
    matrix row, max difference).
    """
    b = np.asarray(b, dtype=complex)
    if not omega.equal_lengths():
        raise PreconditionViolated("intervals must have equal lengths")
    ell = omega.measure / omega.n
    i = omega.index_of(x)
    if i is None:
        raise XNotInOmega(f"x={x} is not in the set")
    tau = t - (omega.rights[i] - x)
    if not (p - 1) * ell < tau < p * ell:
        raise PreconditionViolated(
            f"need (p-1)l < t - (b_i - x) < p*l, got {tau} with l={ell}, p={p}"
        )
    paths = enumerate_paths(omega, b, x, t)
    coeffs = np.zeros(omega.n, dtype=complex)
    for path in paths:
        coeffs[path.word[-1]] += path.weight
    row = np.linalg.matrix_power(b, p)[i]
    return coeffs, row, float(np.max(np.abs(coeffs - row)))


def cumulative_sums(omega: IntervalUnion, budget: float, cap: int | None = None):
    """All sums of interval-length words not exceeding ``budget`` (with 0).

    Used to locate the x-breakpoints where the admissible path set changes.
    """
    cap = path_cap() if cap is None else cap
    seen = {0.0}
    frontier = [0.0]
    lengths = omega.lengths
    while frontier:
        nxt = []
        for c in frontier:
            for l in lengths:
                v = c + l
                if v > budget:
                    continue
                key = round(v, 12)
                if key not in seen:
                    seen.add(key)
                    nxt.append(key)
                if len(seen) > cap:
                    raise GuardExceeded("cumulative length sums exceed the path cap")
        frontier = nxt
    return sorted(seen)
