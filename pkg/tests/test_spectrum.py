import numpy as np
import pytest
from scipy.stats import unitary_group

from spectral_intervals.errors import NotEqualLength
from spectral_intervals.intervals import new_interval_union
from spectral_intervals.spectrum import (
    compute_spectrum,
    default_window,
    eigenvalue_distance,
    equal_length_spectrum,
    nullspace_at,
    spectral_matrix_check,
    transfer_matrix,
)

SQRT_SWAP = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
SWAP = np.array([[0, 1], [1, 0]], dtype=complex)


@pytest.fixture
def pair():
    return new_interval_union([(0, 1), (2, 3)]), SQRT_SWAP


def test_transfer_matrix_unitary(pair):
    om, b = pair
    for lam in (0.0, 0.3, -1.7, 12.5):
        m = transfer_matrix(om, b, lam)
        assert np.max(np.abs(m.conj().T @ m - np.eye(2))) < 1e-12


def test_eigenvalue_distance_vanishes_on_spectrum(pair):
    om, b = pair
    assert eigenvalue_distance(om, b, 0.25) < 1e-12
    assert eigenvalue_distance(om, b, -3.0) < 1e-12
    assert eigenvalue_distance(om, b, 0.1) > 1e-2


def test_nullspace(pair):
    om, b = pair
    basis = nullspace_at(om, b, 0.25)
    assert len(basis) == 1
    # constant eigenvector for a spectral pair
    v = basis[0]
    assert abs(abs(v[0]) - abs(v[1])) < 1e-10
    assert nullspace_at(om, b, 0.1) == []


def test_single_interval_lattice():
    om = new_interval_union([(0, 1)])
    rep = compute_spectrum(om, np.eye(1), window=(-5.5, 5.5))
    assert rep.eigenvalues == pytest.approx(list(range(-5, 6)), abs=1e-9)
    assert rep.dims == [1] * 11


def test_scan_matches_equal_length_shortcut(pair):
    om, b = pair
    window = (-4.2, 4.2)
    scan = compute_spectrum(om, b, window=window)
    short = equal_length_spectrum(om, b, window=window)
    assert short.method == "equal_length"
    assert len(scan.eigenvalues) == len(short.eigenvalues)
    for a, c in zip(scan.eigenvalues, short.eigenvalues):
        assert abs(a - c) < 1e-8


def test_scan_general_lengths():
    # (0,1) u (1,3) with identity is unitarily a circle of circumference 3
    om = new_interval_union([(0, 1), (1, 3)])
    b = np.array([[0, 1], [1, 0]], dtype=complex)
    rep = compute_spectrum(om, b, window=(-2.1, 2.1))
    expected = [k / 3 for k in range(-6, 7)]
    assert rep.eigenvalues == pytest.approx(expected, abs=1e-9)


def test_equal_length_requires_equal_lengths():
    om = new_interval_union([(0, 1), (2, 4)])
    with pytest.raises(NotEqualLength):
        equal_length_spectrum(om, np.eye(2))


def test_residuals_and_window(pair):
    om, b = pair
    rep = compute_spectrum(om, b, window=(-1.1, 1.1))
    assert all(r < 1e-10 for r in rep.residuals)
    assert all(-1.1 <= lam <= 1.1 for lam in rep.eigenvalues)
    assert rep.window == (-1.1, 1.1)


def test_default_window_positive(pair):
    om, _ = pair
    lo, hi = default_window(om)
    assert lo < 0 < hi


def test_spectral_check_exact(pair):
    om, b = pair
    check = spectral_matrix_check(om, b)
    assert check.verdict == "spectral_exact"
    assert check.is_spectral
    assert all(check.report.constant_flags())


def test_spectral_check_witness(pair):
    om, _ = pair
    check = spectral_matrix_check(om, SWAP)
    assert check.verdict == "not_spectral"
    assert not check.is_spectral
    # the known witness: lambda = 1/2 with eigenvector proportional to (1, -1)
    assert check.witness_lambda == pytest.approx(0.5, abs=1e-9)
    v = check.witness_vectors[0]
    assert abs(v[0] + v[1]) < 1e-8


def test_spectral_check_window_only():
    # equal lengths but offsets not congruent mod the common length
    om = new_interval_union([(0, 1), (2.5, 3.5)])
    b = np.array([[0, 1j], [1j, 0]], dtype=complex)
    check = spectral_matrix_check(om, b, window=(-3, 3))
    assert check.verdict in ("spectral_on_window", "not_spectral")


def test_spectral_check_undecided():
    om = new_interval_union([(0, 1), (2, 3.5)])
    b = unitary_group.rvs(2, random_state=7)
    full = compute_spectrum(om, b, window=(-2, 2))
    gaps = list(zip(full.eigenvalues, full.eigenvalues[1:]))
    lo, hi = max(gaps, key=lambda g: g[1] - g[0])
    eps = (hi - lo) / 10
    check = spectral_matrix_check(om, b, window=(lo + eps, hi - eps))
    assert check.verdict == "undecided"


def test_jobs_parallel_scan(pair):
    om, b = pair
    serial = compute_spectrum(om, b, window=(-2.2, 2.2))
    parallel = compute_spectrum(om, b, window=(-2.2, 2.2), jobs=4)
    assert serial.eigenvalues == pytest.approx(parallel.eigenvalues, abs=1e-12)


def test_bad_window_and_grid(pair):
    om, b = pair
    with pytest.raises(ValueError):
        compute_spectrum(om, b, window=(1, 1))
    with pytest.raises(ValueError):
        compute_spectrum(om, b, grid_step=0)
