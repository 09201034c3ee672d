"""Dense complex-Hermitian matrix kernel.

Eigendecomposition (cyclic Jacobi on the real symmetric embedding),
partial transpose over the first qubit, trace norm, positivity tests and
the negativity functional, for matrices of dimension <= 16.

Index convention, fixed project-wide: a 4x4 state is ordered A-major,
|0 e0>, |0 e1>, |1 e0>, |1 e1>.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

HERMITICITY_TOL = 1e-12
PSD_TOL = 1e-9

# Off-diagonal Frobenius mass at which the Jacobi sweep stops; relative to
# the matrix scale so large-norm inputs terminate too.
_JACOBI_OFF_TOL = 1e-14
_JACOBI_MAX_SWEEPS = 100


class NonHermitianError(ValueError):
    """Input matrix is not Hermitian within tolerance."""


class Spectrum(NamedTuple):
    """Eigenvalues in descending order with orthonormal column eigenvectors."""

    values: np.ndarray
    vectors: np.ndarray


def as_hermitian(m, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Validate Hermiticity within ``tol`` and return the symmetrized copy.

    The returned matrix is (m + m^H)/2, so downstream code sees exact
    Hermiticity.  Raises :class:`NonHermitianError` with the maximum
    asymmetry when the check fails.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError("matrix entries must be finite")
    asym = np.max(np.abs(m - m.conj().T))
    if asym > tol:
        raise NonHermitianError(
            f"matrix is not Hermitian: max asymmetry {asym:.3e} exceeds {tol:.1e}"
        )
    return 0.5 * (m + m.conj().T)


def _jacobi_sym(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a real symmetric matrix.

    Returns (eigenvalues, eigenvectors as columns), unsorted.  Deterministic:
    fixed sweep order, no pivot search.
    """
    a = a.copy()
    n = a.shape[0]
    v = np.eye(n)
    scale = max(1.0, float(np.linalg.norm(a)))
    stop = _JACOBI_OFF_TOL * scale
    mask = ~np.eye(n, dtype=bool)
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = np.sqrt(np.sum(a[mask] ** 2))
        if off < stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 0.1 * stop / n:
                    continue
                # Stable rotation angle: tan(2*phi) = 2*apq / (aqq - app).
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                a[p, q] = a[q, p] = 0.0
                rot_p = c * v[:, p] - s * v[:, q]
                rot_q = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = rot_p, rot_q
    else:
        raise RuntimeError("Jacobi sweep limit exceeded")
    return np.diag(a).copy(), v


def real_embedding(m: np.ndarray) -> np.ndarray:
    """Map a complex n x n matrix to its 2n x 2n real representation.

    [[Re m, -Im m], [Im m, Re m]]; Hermitian maps to symmetric, PSD to PSD.
    """
    re, im = m.real, m.imag
    return np.block([[re, -im], [im, re]])


def from_real_embedding(x: np.ndarray) -> np.ndarray:
    """Adjoint-average inverse of :func:`real_embedding` for symmetric x."""
    n = x.shape[0] // 2
    re = 0.5 * (x[:n, :n] + x[n:, n:])
    im = 0.5 * (x[n:, :n] - x[:n, n:])
    return re + 1j * im


def _collapse_embedded(values: np.ndarray, vectors: np.ndarray, n: int) -> Spectrum:
    """Collapse the doubled spectrum of the real embedding back to C^n.

    Each complex eigenvector of the original matrix appears twice in the
    embedding (z and i*z).  Candidates [u; v] -> u + i*v are filtered by
    Gram-Schmidt; duplicates project to zero.  Two passes so that a skipped
    borderline candidate cannot leave the basis short.
    """
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    kept_vals: list[float] = []
    kept_vecs: list[np.ndarray] = []
    remaining = list(range(2 * n))
    for threshold in (0.3, 1e-8):
        for idx in list(remaining):
            if len(kept_vecs) == n:
                break
            z = vectors[:n, idx] + 1j * vectors[n:, idx]
            for kz in kept_vecs:
                z = z - np.vdot(kz, z) * kz
            nrm = np.linalg.norm(z)
            if nrm > threshold:
                kept_vals.append(values[idx])
                kept_vecs.append(z / nrm)
                remaining.remove(idx)
        if len(kept_vecs) == n:
            break
    if len(kept_vecs) != n:
        raise RuntimeError("embedding collapse failed to recover a full basis")
    vals = np.array(kept_vals)
    order = np.argsort(-vals, kind="stable")
    return Spectrum(vals[order], np.column_stack(kept_vecs)[:, order])


def eig_hermitian(m, tol: float = HERMITICITY_TOL) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Parameters
    ----------
    m : array_like
        Square Hermitian matrix (within ``tol``); dimension <= 16.
    tol : float
        Maximum tolerated asymmetry before rejection.

    Returns
    -------
    Spectrum
        Real eigenvalues in descending order and orthonormal eigenvectors
        as columns.  Deterministic for identical input.
    """
    h = as_hermitian(m, tol)
    n = h.shape[0]
    if n > 16:
        raise ValueError(f"kernel supports dim <= 16, got {n}")
    if np.max(np.abs(h.imag)) == 0.0:
        vals, vecs = _jacobi_sym(h.real)
        order = np.argsort(-vals, kind="stable")
        return Spectrum(vals[order], vecs[:, order].astype(complex))
    vals, vecs = _jacobi_sym(real_embedding(h))
    return _collapse_embedded(vals, vecs, n)


def eigvals_hermitian(m, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Descending eigenvalues of a Hermitian matrix."""
    return eig_hermitian(m, tol).values


def partial_transpose_A(rho) -> np.ndarray:
    """Partial transpose over qubit A of a 4x4 A-major two-qubit matrix.

    Swaps the off-diagonal 2x2 blocks of the A-indexed block structure;
    Hermiticity and trace are preserved and the map is an involution.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"partial transpose expects a 4x4 matrix, got {rho.shape}")
    return rho.reshape(2, 2, 2, 2).transpose(2, 1, 0, 3).reshape(4, 4)


def trace_norm(m, tol: float = HERMITICITY_TOL) -> float:
    """Trace norm (sum of absolute eigenvalues) of a Hermitian matrix."""
    return float(np.sum(np.abs(eigvals_hermitian(m, tol))))


def is_psd(m, tol: float = PSD_TOL) -> bool:
    """True iff the minimum eigenvalue of Hermitian ``m`` is >= -tol."""
    return bool(eigvals_hermitian(m)[-1] >= -tol)


def negativity(rho, tol: float = PSD_TOL) -> float:
    """Negativity ||rho^{T_A}||_Tr - Tr(rho) of a 4x4 two-qubit state.

    Normalized so a maximally entangled two-qubit state gives 1.
    Unnormalized states with trace <= 1 are accepted; the result is
    clipped to 0 from below.

    Raises
    ------
    ValueError
        If ``rho`` has an eigenvalue below ``-tol`` or trace above 1 + tol.
    """
    h = as_hermitian(rho)
    if h.shape != (4, 4):
        raise ValueError(f"negativity expects a 4x4 state, got {h.shape}")
    lo = eigvals_hermitian(h)[-1]
    if lo < -tol:
        raise ValueError(f"state has negative eigenvalue {lo:.3e} below -{tol:.1e}")
    tr = float(h.trace().real)
    if tr > 1.0 + tol:
        raise ValueError(f"state trace {tr:.6f} exceeds 1 (unnormalized cap)")
    return max(0.0, trace_norm(partial_transpose_A(h)) - tr)
