"""Conjugation superoperators ``X -> U X U^dagger`` as matrices on operator space.

Matrix elements follow ``s[i, j] = (B_i, U B_j U^dagger) = Tr(B_i^dagger U B_j U^dagger)``,
so column ``j`` holds the coordinates of the image of basis vector ``j``. In the
computational unit basis (row-major vectorization) this is ``kron(U, conj(U))``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, PreconditionError, UsageError
from .linalg import Tolerance, as_matrix, as_tolerance, dagger, fix_global_phase, is_unitary
from .opbasis import BasisSplit, OperatorBasis

COMPUTATIONAL = "computational"


@dataclass(eq=False)
class SuperOp:
    matrix: np.ndarray
    basis_tag: str = COMPUTATIONAL
    split: tuple[int, int] | None = None  # (n, n_A) when tagged QK-split

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(eq=False)
class BlockDecomposition:
    qq: np.ndarray
    qk: np.ndarray  # K-components of images of Q vectors, k x q
    kq: np.ndarray  # Q-components of images of K vectors, q x k
    kk: np.ndarray
    max_qk: float
    max_kq: float

    @property
    def max_offdiag(self) -> float:
        return max(self.max_qk, self.max_kq)


def conj_superop(u, basis: OperatorBasis | None = None,
                 tol: Tolerance | float | None = None) -> SuperOp:
    """Superoperator of conjugation by ``u`` relative to an orthonormal basis.

    ``basis=None`` (or a computational basis) uses ``kron(u, conj(u))``
    directly; any other basis ``C`` gets ``C^dagger kron(u, conj(u)) C``.
    """
    u = as_matrix(u)
    if not is_unitary(u, tol):
        raise PreconditionError("conj_superop needs a unitary")
    s = np.kron(u, np.conj(u))
    if basis is None or basis.label in (COMPUTATIONAL, "image"):
        if basis is not None and basis.vectors.shape[1] != u.shape[0]:
            raise DimensionError("basis and unitary act on different spaces")
        return SuperOp(s)
    if basis.vectors.shape[1] != u.shape[0]:
        raise DimensionError("basis and unitary act on different spaces")
    c = basis.coefficients()
    return SuperOp(dagger(c) @ s @ c, basis.label)


def change_basis(s: SuperOp, split: BasisSplit) -> SuperOp:
    """Express a computational-basis superoperator in the Q (+) K basis."""
    if s.basis_tag != COMPUTATIONAL:
        raise UsageError(f"change_basis expects a computational superoperator, got {s.basis_tag}")
    c = split.transition
    if s.matrix.shape != (c.shape[0], c.shape[0]):
        raise DimensionError(f"superoperator {s.matrix.shape} vs transition {c.shape}")
    # transition is real (built from matrix units), so its inverse is its transpose
    return SuperOp(dagger(c) @ s.matrix @ c, "QK-split", (split.n, split.n_a))


def undo_basis_change(s: SuperOp, split: BasisSplit) -> SuperOp:
    c = split.transition
    return SuperOp(c @ s.matrix @ dagger(c))


def blocks(s: SuperOp, q: int) -> BlockDecomposition:
    if s.basis_tag != "QK-split":
        raise UsageError("blocks() needs a superoperator in the QK-split basis")
    m = s.matrix
    qq, kq = m[:q, :q], m[:q, q:]
    qk, kk = m[q:, :q], m[q:, q:]
    max_qk = float(np.max(np.abs(qk))) if qk.size else 0.0
    max_kq = float(np.max(np.abs(kq))) if kq.size else 0.0
    return BlockDecomposition(qq, qk, kq, kk, max_qk, max_kq)


def offdiag_threshold(s: SuperOp, tol: Tolerance | float | None = None) -> float:
    return as_tolerance(tol).atol * float(np.max(np.abs(s.matrix)))


def invariant_under(s: SuperOp, q: int, tol: Tolerance | float | None = None) -> bool:
    """True iff both off-diagonal blocks vanish (relative to the largest entry)."""
    b = blocks(s, q)
    thr = offdiag_threshold(s, tol)
    return b.max_qk <= thr and b.max_kq <= thr


def compose(s1: SuperOp, s2: SuperOp) -> SuperOp:
    """``s1 . s2``: apply ``s2`` first."""
    if s1.basis_tag != s2.basis_tag or s1.split != s2.split:
        raise UsageError(f"cannot compose {s1.basis_tag} with {s2.basis_tag}")
    if s1.matrix.shape != s2.matrix.shape:
        raise DimensionError(f"shape mismatch {s1.matrix.shape} vs {s2.matrix.shape}")
    return SuperOp(s1.matrix @ s2.matrix, s1.basis_tag, s1.split)


def extract_unitary(qq, n_a: int, tol: Tolerance | float | None = None) -> np.ndarray | None:
    """Recover ``V`` with ``kron(V, conj(V)) == qq`` on ``n_a`` qubits, up to phase.

    Realigning ``qq[(a,b),(c,d)] = V[a,c] conj(V[b,d])`` gives the rank-one
    Choi-type matrix ``vec(V) vec(V)^dagger``; ``V`` is read off its top
    eigenvector. Returns ``None`` when the rank-one test or the round trip fails.
    """
    atol = as_tolerance(tol).atol
    qq = as_matrix(qq)
    d = 1 << n_a
    if qq.shape != (d * d, d * d):
        raise DimensionError(f"expected {d * d}x{d * d} block for n_A={n_a}, got {qq.shape}")
    choi = qq.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)
    choi = (choi + dagger(choi)) / 2
    w, v = np.linalg.eigh(choi)
    top = w[-1]
    if top <= 0 or (len(w) > 1 and max(abs(w[0]), abs(w[-2])) > atol * top):
        return None
    vmat = (v[:, -1] * np.sqrt(top)).reshape(d, d)
    vmat = fix_global_phase(vmat * (np.sqrt(d) / np.linalg.norm(vmat)))
    # one polar step removes residual non-unitarity from rounding
    uu, _, wh = np.linalg.svd(vmat)
    vmat = fix_global_phase(uu @ wh)
    if np.max(np.abs(np.kron(vmat, np.conj(vmat)) - qq)) > max(atol, 1e-9):
        return None
    return vmat
