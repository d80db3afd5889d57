"""Discrete spectra of the self-adjoint extensions D_B.

A real lambda belongs to the spectrum iff 1 is an eigenvalue of the unitary
transfer matrix M(lambda) = E(lambda*b_vec)* B E(lambda*a_vec); the
eigenspace is spanned by the null vectors of I - M(lambda).  The general
solver scans a grid of the indicator h(lambda) = min_j |1 - mu_j(M(lambda))|
and refines the dips; the equal-length shortcut reads the spectrum off the
eigenphases of B.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .boundary import cis, eig_unitary, require_unitary
from .errors import ConvergenceFailure, NotEqualLength
from .intervals import IntervalUnion

TOL_ROOT = 1e-10
TOL_EIG = 1e-8
#: refined minima of h above this value are rejected as spurious dips
ACCEPT_H = 1e-7


def transfer_matrix(omega: IntervalUnion, b, lam: float) -> np.ndarray:
    """M(lambda) = E(lambda*b_vec)* B E(lambda*a_vec), unitary for real lambda."""
    b = np.asarray(b, dtype=complex)
    left = np.conj(cis(lam * np.array(omega.rights)))
    right = cis(lam * np.array(omega.lefts))
    return left[:, None] * b * right[None, :]


def eigenvalue_distance(omega: IntervalUnion, b, lam: float) -> float:
    """h(lambda): distance from 1 to the closest eigenvalue of M(lambda)."""
    mu = np.linalg.eigvals(transfer_matrix(omega, b, lam))
    return float(np.min(np.abs(1.0 - mu)))


def _nearest_eigenvalue_angle(omega: IntervalUnion, b, lam: float) -> float:
    """Signed angle of the eigenvalue of M(lambda) closest to 1.

    Every eigenphase of M is strictly decreasing in lambda (each interval
    has positive length), so this crosses zero transversally at spectrum
    points and supports bracketed root finding to machine precision.
    """
    mu = np.linalg.eigvals(transfer_matrix(omega, b, lam))
    return float(np.angle(mu[np.argmin(np.abs(1.0 - mu))]))


def nullspace_at(omega: IntervalUnion, b, lam: float, tol_eig: float = TOL_EIG):
    """Orthonormal basis of {c : B E(lambda a)c = E(lambda b)c}; [] off spectrum."""
    m = transfer_matrix(omega, b, lam)
    n = omega.n
    _, s, vh = np.linalg.svd(np.eye(n) - m)
    return [vh[k].conj() for k in range(n) if s[k] < tol_eig]


def default_grid_step(omega: IntervalUnion) -> float:
    scale = max(1.0, abs(omega.endpoints[-1][1]), abs(omega.endpoints[0][0]))
    return 1.0 / (8.0 * omega.measure * scale)


def default_window(omega: IntervalUnion) -> tuple[float, float]:
    half = max(5.0 * omega.measure, 5.0 * omega.n / omega.measure)
    return (-half, half)


@dataclass
class SpectrumReport:
    """Eigenvalues of D_B in a window, with eigenspace data."""

    eigenvalues: list[float]
    eigenspaces: list[list[np.ndarray]]
    residuals: list[float]
    window: tuple[float, float]
    method: str
    warnings: list[str] = field(default_factory=list)

    @property
    def dims(self) -> list[int]:
        return [len(basis) for basis in self.eigenspaces]

    def constant_flags(self, tol: float = 1e-6) -> list[bool]:
        flags = []
        for basis in self.eigenspaces:
            if len(basis) != 1:
                flags.append(False)
                continue
            v = basis[0]
            u = np.ones(len(v)) / math.sqrt(len(v))
            flags.append(bool(np.linalg.norm(v - (u @ v.conj()).conjugate() * u) < tol))
        return flags


def _boundary_residual(omega, b, lam, c):
    lhs = np.asarray(b, dtype=complex) @ (cis(lam * np.array(omega.lefts)) * c)
    rhs = cis(lam * np.array(omega.rights)) * c
    return float(np.linalg.norm(lhs - rhs))


def compute_spectrum(
    omega: IntervalUnion,
    b,
    window: tuple[float, float] | None = None,
    grid_step: float | None = None,
    tol_root: float = TOL_ROOT,
    tol_eig: float = TOL_EIG,
    jobs: int = 1,
) -> SpectrumReport:
    """Scan-and-refine solver for the spectrum in a window.

    Grid-scans h(lambda), brackets the dips below a phase-speed threshold,
    refines each by bounded golden-section minimization, and attaches
    eigenspaces.  Flags suspiciously wide gaps between consecutive roots.
    """
    b = require_unitary(b)
    if window is None:
        window = default_window(omega)
    lo, hi = window
    if not lo < hi:
        raise ValueError("window must satisfy lo < hi")
    if grid_step is None:
        grid_step = default_grid_step(omega)
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")

    # eigenphases of M move at most this fast in lambda
    phase_speed = 2 * np.pi * (
        max(abs(v) for v in omega.lefts) + max(abs(v) for v in omega.rights)
    )
    threshold = max(0.75 * phase_speed * grid_step, 1e-6)

    grid = np.arange(lo, hi + grid_step, grid_step)
    grid[-1] = min(grid[-1], hi)

    def scan(chunk):
        return [eigenvalue_distance(omega, b, lam) for lam in chunk]

    if jobs > 1:
        chunks = np.array_split(grid, jobs)
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            h = np.concatenate([np.array(r) for r in pool.map(scan, chunks)])
    else:
        h = np.array(scan(grid))

    brackets = []
    for k in range(len(grid)):
        if h[k] >= threshold:
            continue
        left_ok = k == 0 or h[k] <= h[k - 1]
        right_ok = k == len(grid) - 1 or h[k] <= h[k + 1]
        if left_ok and right_ok:
            a = grid[max(k - 1, 0)]
            c = grid[min(k + 1, len(grid) - 1)]
            brackets.append((a, c))

    roots: list[float] = []
    for a, c in brackets:
        ga = _nearest_eigenvalue_angle(omega, b, a)
        gc = _nearest_eigenvalue_angle(omega, b, c)
        if ga == 0.0 or gc == 0.0 or ga * gc < 0:
            # the signed angle crosses zero: locate it to machine precision
            root = scipy.optimize.brentq(
                lambda lam: _nearest_eigenvalue_angle(omega, b, lam),
                a,
                c,
                xtol=min(tol_root * 1e-2, 1e-13),
                rtol=1e-15,
            )
            if eigenvalue_distance(omega, b, root) < ACCEPT_H:
                roots.append(float(root))
            continue
        # no sign change: minimize to distinguish a grazing dip from noise
        res = scipy.optimize.minimize_scalar(
            lambda lam: eigenvalue_distance(omega, b, lam),
            bounds=(a, c),
            method="bounded",
            options={"xatol": min(tol_root * 1e-2, 1e-12)},
        )
        if not res.success:
            raise ConvergenceFailure(f"refinement failed in bracket ({a}, {c})")
        if res.fun < ACCEPT_H:
            roots.append(float(res.x))

    roots.sort()
    merged: list[float] = []
    merge_tol = max(10 * tol_root, 1e-12 * max(1.0, abs(lo), abs(hi)))
    for r in roots:
        if merged and r - merged[-1] < merge_tol:
            continue
        merged.append(r)
    merged = [r for r in merged if lo - merge_tol <= r <= hi + merge_tol]

    warnings = []
    max_gap = 1.1 / omega.lmin
    for r1, r2 in zip(merged, merged[1:]):
        if r2 - r1 > max_gap:
            warnings.append(
                f"suspected missed root between {r1:.6g} and {r2:.6g}: "
                f"gap {r2 - r1:.6g} exceeds {max_gap:.6g}; refine the grid"
            )

    eigenspaces = []
    residuals = []
    for r in merged:
        basis = nullspace_at(omega, b, r, tol_eig)
        eigenspaces.append(basis)
        residuals.append(
            max((_boundary_residual(omega, b, r, c) for c in basis), default=0.0)
        )
    return SpectrumReport(merged, eigenspaces, residuals, (lo, hi), "scan", warnings)


def equal_length_spectrum(
    omega: IntervalUnion, b, window: tuple[float, float] | None = None
) -> SpectrumReport:
    """Spectrum via the eigenphases of B when all interval lengths are equal.

    lambda = (theta_j + k)/l for eigenphases theta_j; eigenspace vectors are
    c = E(-lambda a_vec) v with v an eigenvector of B.
    """
    if not omega.equal_lengths():
        raise NotEqualLength("intervals do not all have the same length")
    b = require_unitary(b)
    if window is None:
        window = default_window(omega)
    lo, hi = window
    ell = omega.measure / omega.n
    eig = eig_unitary(b)
    alphas = np.array(omega.lefts)

    entries = []  # (lambda, basis)
    for group in eig.phase_groups():
        theta = eig.phases[group[0]]
        kmin = math.ceil(lo * ell - theta - 1e-12)
        kmax = math.floor(hi * ell - theta + 1e-12)
        for k in range(kmin, kmax + 1):
            lam = (theta + k) / ell
            basis = [
                np.conj(cis(lam * alphas)) * eig.vectors[:, idx] for idx in group
            ]
            entries.append((lam, basis))
    entries.sort(key=lambda e: e[0])
    eigenvalues = [e[0] for e in entries]
    eigenspaces = [e[1] for e in entries]
    residuals = [
        max((_boundary_residual(omega, b, lam, c) for c in basis), default=0.0)
        for lam, basis in entries
    ]
    return SpectrumReport(eigenvalues, eigenspaces, residuals, (lo, hi), "equal_length")


@dataclass
class SpectralCheck:
    """Outcome of the constant-eigenvector criterion for spectrality.

    verdict is one of "spectral_exact", "spectral_on_window", "not_spectral",
    "undecided".  For not_spectral, witness_lambda and witness_vectors hold
    an eigenvalue whose eigenspace is multidimensional or non-constant.
    """

    verdict: str
    witness_lambda: float | None
    witness_vectors: list[np.ndarray] | None
    report: SpectrumReport

    @property
    def is_spectral(self) -> bool:
        return self.verdict in ("spectral_exact", "spectral_on_window")


def _is_constant(v: np.ndarray, tol: float) -> bool:
    u = np.ones(len(v), dtype=complex) / math.sqrt(len(v))
    proj = (u.conj() @ v) * u
    return bool(np.linalg.norm(v - proj) < tol)


def spectral_matrix_check(
    omega: IntervalUnion,
    b,
    window: tuple[float, float] | None = None,
    tol_const: float = 1e-6,
    **solver_kwargs,
) -> SpectralCheck:
    """Decide whether B is a spectral boundary matrix for omega.

    Every spectrum point must have a one-dimensional eigenspace spanned by a
    constant vector.  Equal-length sets whose left endpoints are congruent
    modulo the common length admit an exact verdict from the finite
    eigenphase set; otherwise the verdict is limited to the window.
    """
    if omega.equal_lengths():
        report = equal_length_spectrum(omega, b, window)
        ell = omega.measure / omega.n
        # one representative lambda per phase class, plus every window point
        eig = eig_unitary(require_unitary(b))
        alphas = np.array(omega.lefts)
        for group in eig.phase_groups():
            theta = eig.phases[group[0]]
            lam = theta / ell
            basis = [np.conj(cis(lam * alphas)) * eig.vectors[:, idx] for idx in group]
            if len(basis) > 1 or not _is_constant(basis[0], tol_const):
                return SpectralCheck("not_spectral", lam, basis, report)
        offsets = [(a - omega.lefts[0]) / ell for a in omega.lefts]
        exact = all(abs(o - round(o)) < omega.tol() for o in offsets)
        if exact:
            return SpectralCheck("spectral_exact", None, None, report)
        for lam, basis in zip(report.eigenvalues, report.eigenspaces):
            if len(basis) > 1 or not _is_constant(basis[0], tol_const):
                return SpectralCheck("not_spectral", lam, basis, report)
        return SpectralCheck("spectral_on_window", None, None, report)

    report = compute_spectrum(omega, b, window, **solver_kwargs)
    if not report.eigenvalues:
        return SpectralCheck("undecided", None, None, report)
    for lam, basis in zip(report.eigenvalues, report.eigenspaces):
        if len(basis) != 1 or not _is_constant(basis[0], tol_const):
            return SpectralCheck("not_spectral", lam, basis, report)
    return SpectralCheck("spectral_on_window", None, None, report)
