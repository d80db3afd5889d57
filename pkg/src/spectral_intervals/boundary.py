"""Unitary boundary matrices and their structure.

The boundary matrix B relates boundary values of functions in the domain of
the self-adjoint extension by B f(a_vec) = f(b_vec).  This module holds the
diagonal exponential matrices E(z), structural classification (permutation /
weighted permutation / general), eigenphase extraction, and reconstruction
of B from a candidate spectrum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ConvergenceFailure,
    DeficientSpan,
    Inconsistent,
    NotUnitary,
    WrongStructure,
)
from .intervals import IntervalUnion

UNITARITY_TOL = 1e-10


def cis(z):
    """e^{2*pi*i*z}, elementwise."""
    return np.exp(2j * np.pi * np.asarray(z, dtype=float))


def exp_diag(z) -> np.ndarray:
    """Diagonal matrix with entries e^{2*pi*i*z_k}."""
    return np.diag(cis(z))


def is_unitary(b: np.ndarray, tol: float = UNITARITY_TOL) -> bool:
    b = np.asarray(b, dtype=complex)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        return False
    return np.max(np.abs(b.conj().T @ b - np.eye(b.shape[0]))) < tol


def require_unitary(b, tol: float = UNITARITY_TOL) -> np.ndarray:
    b = np.asarray(b, dtype=complex)
    if not is_unitary(b, tol):
        raise NotUnitary("matrix is not unitary within tolerance")
    return b


@dataclass(frozen=True)
class MatrixStructure:
    """Classification of a unitary matrix.

    kind is one of "permutation", "weighted_permutation", "general".  For the
    first two, sigma maps row index i to the column of its unimodular entry,
    and weights holds those entries.  multiplicative_everywhere mirrors the
    fact that the associated unitary group is multiplicative for all t iff B
    is a permutation matrix; forelli_everywhere the analogous weighted
    permutation criterion.
    """

    kind: str
    sigma: tuple[int, ...] | None = None
    weights: tuple[complex, ...] | None = None

    @property
    def is_cycle(self) -> bool | None:
        if self.sigma is None:
            return None
        seen = {0}
        k = self.sigma[0]
        while k not in seen:
            seen.add(k)
            k = self.sigma[k]
        return len(seen) == len(self.sigma)

    @property
    def multiplicative_everywhere(self) -> bool:
        return self.kind == "permutation"

    @property
    def forelli_everywhere(self) -> bool:
        return self.kind in ("permutation", "weighted_permutation")


def classify_structure(b, tol: float = UNITARITY_TOL) -> MatrixStructure:
    """Classify B as permutation, weighted permutation, or general."""
    b = require_unitary(b, max(tol, UNITARITY_TOL))
    n = b.shape[0]
    sigma = []
    weights = []
    for i in range(n):
        row = b[i]
        unimod = [j for j in range(n) if abs(abs(row[j]) - 1.0) < tol]
        zero = [j for j in range(n) if abs(row[j]) < tol]
        if len(unimod) != 1 or len(zero) != n - 1 or unimod[0] in zero:
            return MatrixStructure("general")
        sigma.append(unimod[0])
        weights.append(complex(row[unimod[0]]))
    if len(set(sigma)) != n:
        return MatrixStructure("general")
    if all(abs(w - 1.0) < tol for w in weights):
        return MatrixStructure("permutation", tuple(sigma), tuple(weights))
    return MatrixStructure("weighted_permutation", tuple(sigma), tuple(weights))


def permutation_matrix(sigma) -> np.ndarray:
    n = len(sigma)
    p = np.zeros((n, n))
    for i, j in enumerate(sigma):
        p[i, j] = 1.0
    return p


@dataclass(frozen=True)
class UnitaryEigenData:
    """Eigenphases in [0, 1) and an orthonormal eigenbasis of a unitary matrix."""

    phases: tuple[float, ...]
    vectors: np.ndarray  # column k is the eigenvector for phases[k]

    def phase_groups(self, tol: float = 1e-9) -> list[list[int]]:
        """Indices grouped by equal phase (mod 1, merged within tol)."""
        order = sorted(range(len(self.phases)), key=lambda k: self.phases[k])
        groups: list[list[int]] = []
        for k in order:
            if groups and self.phases[k] - self.phases[groups[-1][0]] < tol:
                groups[-1].append(k)
            else:
                groups.append([k])
        # wrap-around: phases just below 1 belong with phase 0
        if len(groups) > 1 and (1.0 - self.phases[groups[-1][0]]) + self.phases[groups[0][0]] < tol:
            groups[0].extend(groups.pop())
        return groups


def eig_unitary(b, residual_tol: float = 1e-8) -> UnitaryEigenData:
    """Eigenphases and orthonormal eigenvectors of a unitary matrix.

    Uses the complex Schur form; for a unitary (hence normal) matrix the
    Schur vectors are an orthonormal eigenbasis.
    """
    b = require_unitary(b)
    t, q = scipy.linalg.schur(b, output="complex")
    eigvals = np.diag(t)
    phases = (np.angle(eigvals) / (2 * np.pi)) % 1.0
    # snap phases that rounded up to 1.0
    phases = np.where(phases >= 1.0 - 1e-15, 0.0, phases)
    order = np.argsort(phases, kind="stable")
    phases = phases[order]
    vectors = q[:, order]
    resid = np.max(
        np.abs(b @ vectors - vectors * cis(phases)[np.newaxis, :])
    )
    if resid > residual_tol:
        raise ConvergenceFailure(f"eigen residual {resid:.3e} above {residual_tol:.1e}")
    return UnitaryEigenData(tuple(float(p) for p in phases), vectors)


def boundary_exponential_vectors(omega: IntervalUnion, lam: float):
    """The vectors e_lambda(a_vec) and e_lambda(b_vec)."""
    return cis(lam * np.array(omega.lefts)), cis(lam * np.array(omega.rights))


def matrix_from_spectrum(
    omega: IntervalUnion, lambdas, tol: float = 1e-8
) -> np.ndarray:
    """The unique B with B e_lambda(a_vec) = e_lambda(b_vec) for all samples.

    Solves an n x n linear system from n spanning sample points, then
    validates the remaining samples and unitarity.
    """
    lambdas = [float(l) for l in lambdas]
    n = omega.n
    if len(lambdas) < n:
        raise DeficientSpan(f"need at least {n} sample points, got {len(lambdas)}")
    amat = np.column_stack([boundary_exponential_vectors(omega, l)[0] for l in lambdas])
    cmat = np.column_stack([boundary_exponential_vectors(omega, l)[1] for l in lambdas])
    # greedy column selection by QR with pivoting
    _, _, piv = scipy.linalg.qr(amat, pivoting=True)
    sel = piv[:n]
    asel = amat[:, sel]
    if np.linalg.matrix_rank(asel, tol=1e-8) < n:
        raise DeficientSpan("boundary exponential vectors do not span C^n")
    b = cmat[:, sel] @ np.linalg.inv(asel)
    rest = [k for k in range(len(lambdas)) if k not in set(sel)]
    for k in rest:
        if np.max(np.abs(b @ amat[:, k] - cmat[:, k])) > tol:
            raise Inconsistent(
                f"no single matrix fits all samples; mismatch at lambda={lambdas[k]}"
            )
    if not is_unitary(b, max(tol, UNITARITY_TOL)):
        raise NotUnitary("fitted matrix is not unitary; samples are not a spectrum")
    return b


def forelli_weight_check(
    b, omega: IntervalUnion, theta0: float, tol: float = 1e-8
) -> bool:
    """Check the weighted-permutation phase law against the set geometry.

    For each row i with unimodular entry at sigma(i), the weight must equal
    e^{2*pi*i*(theta0/L)*(a_{sigma(i)} - b_i)} and a_{sigma(i)} - b_i must be
    an integer multiple of L.
    """
    structure = classify_structure(b)
    if structure.kind not in ("permutation", "weighted_permutation"):
        raise WrongStructure("matrix is not a weighted permutation")
    big_l = omega.measure
    for i, j in enumerate(structure.sigma):
        jump = omega.lefts[j] - omega.rights[i]
        expected = complex(cis(theta0 / big_l * jump))
        if abs(structure.weights[i] - expected) > tol:
            return False
        if abs(jump / big_l - round(jump / big_l)) > tol:
            return False
    return True


def power(b, p: int) -> np.ndarray:
    """B^p for a positive integer p."""
    if p < 1:
        raise ValueError("exponent must be >= 1")
    b = np.asarray(b, dtype=complex)
    return np.linalg.matrix_power(b, p)


def rational_order_check(b, d: int, n: int) -> bool:
    """Whether B^(d*n) = I, the consequence of a rational spectrum of common
    denominator d on an equal-length set of measure 1 with n intervals."""
    b = np.asarray(b, dtype=complex)
    bp = np.linalg.matrix_power(b, d * n)
    return np.max(np.abs(bp - np.eye(b.shape[0]))) < 1e-7


def reflected_boundary_matrix(b) -> np.ndarray:
    """Boundary matrix of the reflected set -omega in sorted index order.

    Reflection pairs interval i with interval n-1-i of -omega, so the
    adjoint must be conjugated by the index reversal R: the result is
    R B* R.
    """
    b = np.asarray(b, dtype=complex)
    return b.conj().T[::-1, ::-1]
