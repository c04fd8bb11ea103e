"""Dense complex linear algebra on qubit operator spaces.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Composite indices
are row-major with qubit 1 as the most significant bit, so subsystem A (the
leading ``n_A`` qubits) occupies the high-order part of every index.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, PreconditionError, RankDeficiencyError


@dataclass(frozen=True)
class Tolerance:
    atol: float = 1e-9
    rtol: float = 1e-9

    def __post_init__(self):
        if self.atol < 0 or self.rtol < 0:
            raise ValueError("tolerances must be nonnegative")


def as_tolerance(tol: Tolerance | float | None) -> Tolerance:
    """Accept a bare float as shorthand for ``Tolerance(tol, tol)``."""
    if tol is None:
        return Tolerance()
    if isinstance(tol, Tolerance):
        return tol
    return Tolerance(float(tol), float(tol))


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or m.size == 0:
        raise DimensionError(f"expected a nonempty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DimensionError("matrix contains NaN or Inf entries")
    return m


def qubits_of(dim: int) -> int:
    """Return ``k`` with ``2**k == dim``; raise if ``dim`` is not a power of two."""
    k = int(dim).bit_length() - 1
    if dim < 1 or (1 << k) != dim:
        raise DimensionError(f"dimension {dim} is not a power of 2")
    return k


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``Tr(a^dagger b)``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"hs_inner needs equal square shapes, got {a.shape} and {b.shape}")
    # Tr(a^dagger b) = sum_ij conj(a_ij) b_ij
    return complex(np.vdot(a, b))


def hs_norm(a) -> float:
    return float(np.linalg.norm(np.asarray(a)))


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def kron_all(mats: Sequence) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def partial_trace(m, n: int, n_a: int) -> np.ndarray:
    """Trace out the trailing ``n - n_a`` qubits of a ``2**n`` square matrix.

    ``result[i, j] = sum_k m[i*dB + k, j*dB + k]`` with ``dB = 2**(n - n_a)``.
    """
    m = np.asarray(m)
    d = 1 << n
    if m.shape != (d, d):
        raise DimensionError(f"expected a {d}x{d} matrix for n={n}, got {m.shape}")
    if not 0 < n_a <= n:
        raise DimensionError(f"need 0 < n_A <= n, got n_A={n_a}, n={n}")
    da, db = 1 << n_a, 1 << (n - n_a)
    return np.trace(m.reshape(da, db, da, db), axis1=1, axis2=3)


def gram_schmidt(vectors: Sequence, tol: Tolerance | float | None = None) -> list[np.ndarray]:
    """Orthonormalize matrices under the Hilbert-Schmidt inner product.

    Modified Gram-Schmidt with a second orthogonalization pass. Output order
    follows input order.

    Raises
    ------
    RankDeficiencyError
        If a residual norm drops below ``tol.atol`` times the largest input norm.
    """
    tol = as_tolerance(tol)
    vecs = [np.array(v, dtype=complex) for v in vectors]
    if not vecs:
        return []
    shape = vecs[0].shape
    if any(v.shape != shape for v in vecs):
        raise DimensionError("gram_schmidt inputs must share one shape")
    scale = max(hs_norm(v) for v in vecs)
    out: list[np.ndarray] = []
    for idx, v in enumerate(vecs):
        w = v.copy()
        for _ in range(2):
            for q in out:
                w -= np.vdot(q, w) * q
        norm = hs_norm(w)
        if norm <= tol.atol * scale or norm == 0.0:
            raise RankDeficiencyError(
                f"vector {idx} is linearly dependent on its predecessors "
                f"(residual {norm:.3e})")
        out.append(w / norm)
    return out


def is_hermitian(m, tol: Tolerance | float | None = None) -> bool:
    tol = as_tolerance(tol)
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return float(np.max(np.abs(m - dagger(m)))) <= tol.atol


def is_unitary(m, tol: Tolerance | float | None = None) -> bool:
    tol = as_tolerance(tol)
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return unitarity_defect(m) <= tol.atol


def unitarity_defect(m) -> float:
    """``max |m^dagger m - I|``."""
    m = np.asarray(m)
    return float(np.max(np.abs(dagger(m) @ m - np.eye(m.shape[0]))))


def is_density(m, tol: Tolerance | float | None = None) -> bool:
    tol = as_tolerance(tol)
    m = np.asarray(m)
    if not is_hermitian(m, tol):
        return False
    if abs(np.trace(m) - 1.0) > tol.atol:
        return False
    return float(np.min(np.linalg.eigvalsh((m + dagger(m)) / 2))) >= -tol.atol


def unitary_eigenvalues(u, tol: Tolerance | float | None = None) -> np.ndarray:
    """Eigenvalues of a unitary, projected onto the unit circle. Order is unspecified."""
    u = as_matrix(u)
    if not is_unitary(u, tol):
        raise PreconditionError("unitary_eigenvalues called on a non-unitary matrix")
    lam = np.linalg.eigvals(u)
    return lam / np.abs(lam)


def fix_global_phase(m: np.ndarray, rel: float = 1e-8) -> np.ndarray:
    """Multiply by a unit phase so the first non-negligible entry is real positive."""
    flat = m.ravel()
    scale = float(np.max(np.abs(flat))) if flat.size else 0.0
    if scale == 0.0:
        return m
    idx = int(np.argmax(np.abs(flat) > rel * scale))
    z = flat[idx]
    out = m * (np.conj(z) / abs(z))
    out.flat[idx] = abs(z)  # drop the rounding residue in the imaginary part
    return out
