"""Operator bases adapted to the partial trace over trailing qubits.

The operator space on ``n`` qubits splits as Q (+) K, where K is the kernel of
``X -> Tr_B X`` and Q its orthogonal complement. Every basis here is built from
matrix units, so all coefficients are real.

Indices are 0-based: unit ``r`` is ``E[r // 2**n, r % 2**n]``, and image unit
``j`` is ``E[j // 2**n_A, j % 2**n_A]`` on the leading ``n_A`` qubits.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstructionError, PreconditionError, RankDeficiencyError
from .linalg import gram_schmidt, partial_trace

LABELS = ("computational", "image", "Q", "K", "QK-union")


@dataclass(eq=False)
class OperatorBasis:
    n: int
    vectors: np.ndarray  # shape (count, 2**n, 2**n)
    label: str

    def __len__(self):
        return len(self.vectors)

    def __getitem__(self, i):
        return self.vectors[i]

    def coefficients(self) -> np.ndarray:
        """Column ``i`` holds vector ``i`` in computational-unit coordinates."""
        return self.vectors.reshape(len(self.vectors), -1).T

    def gram(self) -> np.ndarray:
        c = self.coefficients()
        return np.conj(c).T @ c


@dataclass(eq=False)
class BasisSplit:
    n: int
    n_a: int
    q_basis: OperatorBasis
    k_basis: OperatorBasis
    transition: np.ndarray
    s0: list[int]
    class_sets: dict[int, list[int]]

    @property
    def q(self) -> int:
        return len(self.q_basis)

    @property
    def k(self) -> int:
        return len(self.k_basis)

    @property
    def s0_size(self) -> int:
        return len(self.s0)

    def union(self) -> OperatorBasis:
        return OperatorBasis(self.n, np.concatenate([self.q_basis.vectors, self.k_basis.vectors]),
                             "QK-union")


def _unit(d: int, r: int) -> np.ndarray:
    e = np.zeros((d, d), dtype=complex)
    e[r // d, r % d] = 1.0
    return e


def comp_op_basis(n: int) -> OperatorBasis:
    if n < 1:
        raise PreconditionError("n must be >= 1")
    d = 1 << n
    return OperatorBasis(n, np.eye(d * d, dtype=complex).reshape(d * d, d, d), "computational")


def image_basis(n_a: int) -> OperatorBasis:
    b = comp_op_basis(n_a)
    return OperatorBasis(n_a, b.vectors, "image")


def _check(n: int, n_a: int) -> None:
    if not 1 <= n_a < n:
        raise PreconditionError(f"need 1 <= n_A < n, got n_A={n_a}, n={n}")


def classify(n: int, n_a: int) -> tuple[list[int], dict[int, list[int]]]:
    """Sort computational units by their partial-trace image.

    Returns ``(s0, sets)``: ``s0`` lists units traced to zero, ``sets[j]`` the
    units traced to image unit ``j``. Both in ascending unit order.
    """
    _check(n, n_a)
    d, da = 1 << n, 1 << n_a
    s0: list[int] = []
    sets: dict[int, list[int]] = {j: [] for j in range(da * da)}
    for r in range(d * d):
        img = partial_trace(_unit(d, r), n, n_a)
        nz = np.flatnonzero(np.abs(img.ravel()) > 0.5)
        if len(nz) == 0:
            s0.append(r)
        elif len(nz) == 1 and img.ravel()[nz[0]] == 1:
            sets[int(nz[0])].append(r)
        else:  # a unit can only trace to zero or to a single unit
            raise ConstructionError(f"unit {r} has an unexpected image")
    m = 1 << (n - n_a)
    if len(s0) != d * (d - da) or any(len(v) != m for v in sets.values()):
        raise ConstructionError("class sizes do not match the expected counts")
    return s0, sets


def q_basis(n: int, n_a: int, sets: dict[int, list[int]] | None = None) -> OperatorBasis:
    """``B_j^Q = (sum of the units in S_j) / sqrt(2**(n - n_A))``."""
    if sets is None:
        _, sets = classify(n, n_a)
    d = 1 << n
    m = 1 << (n - n_a)
    vecs = np.zeros((len(sets), d, d), dtype=complex)
    for j in sorted(sets):
        for r in sets[j]:
            vecs[j, r // d, r % d] = 1.0
    return OperatorBasis(n, vecs / np.sqrt(m), "Q")


def kernel_combinations(members: list[int], d: int) -> list[np.ndarray]:
    """Coefficient-sum-zero combinations of one class set, before orthonormalizing.

    Coefficients are ``1/(m-1)`` except a single ``-1``; the ``-1`` starts in
    the last slot and cycles through slots ``1 .. m-1``.
    """
    m = len(members)
    out = []
    for l in range(m - 1):
        c = np.full(m, 1.0 / (m - 1))
        c[1 + (m - 2 + l) % (m - 1)] = -1.0
        v = np.zeros((d, d), dtype=complex)
        for ck, r in zip(c, members):
            v[r // d, r % d] = ck
        out.append(v)
    return out


def k_basis(n: int, n_a: int, s0: list[int] | None = None,
            sets: dict[int, list[int]] | None = None) -> OperatorBasis:
    """Orthonormal kernel basis: the ``S_0`` units, then each orthonormalized ``C_j``."""
    if s0 is None or sets is None:
        s0, sets = classify(n, n_a)
    d = 1 << n
    vecs = [_unit(d, r) for r in s0]
    for j in sorted(sets):
        try:
            vecs.extend(gram_schmidt(kernel_combinations(sets[j], d), 1e-10))
        except RankDeficiencyError as exc:
            raise ConstructionError(f"kernel set C_{j} is degenerate: {exc}") from exc
    return OperatorBasis(n, np.array(vecs), "K")


def build_split(n: int, n_a: int) -> BasisSplit:
    """Q and K bases plus the transition matrix (columns: Q vectors, then K vectors)."""
    s0, sets = classify(n, n_a)
    qb = q_basis(n, n_a, sets)
    kb = k_basis(n, n_a, s0, sets)
    c = np.concatenate([qb.coefficients(), kb.coefficients()], axis=1)
    if c.shape[0] != c.shape[1]:
        raise ConstructionError(f"transition matrix has shape {c.shape}")
    return BasisSplit(n, n_a, qb, kb, c, s0, sets)
