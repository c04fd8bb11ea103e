"""Measured-once quantum automata over qubits.

A word is read left to right; each letter conjugates the density operator by
its unitary, so the first letter read acts first (``U_{w s} = U_s U_w``). After
the whole word the observable on the leading ``n1`` qubits is measured.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetError, DimensionError, PreconditionError, SymbolError
from .linalg import (
    Tolerance,
    as_matrix,
    as_tolerance,
    dagger,
    fix_global_phase,
    is_unitary,
    partial_trace,
    qubits_of,
    unitarity_defect,
    unitary_eigenvalues,
)

DEFAULT_WORD_CAP = 100_000
EIGEN_GAP = 1e-8

Word = tuple[str, ...]


@dataclass(eq=False)
class Observable:
    """Spectral form of a hermitian observable on ``n1`` qubits.

    ``eigenvalues[k]`` is the outcome whose eigenspace projector is
    ``projectors[k]``. Canonical order is strictly increasing eigenvalues.
    """

    eigenvalues: np.ndarray
    projectors: list[np.ndarray]

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=float).ravel()
        self.projectors = [as_matrix(p) for p in self.projectors]
        if len(self.projectors) != len(self.eigenvalues):
            raise DimensionError(
                f"{len(self.eigenvalues)} eigenvalues but {len(self.projectors)} projectors")
        if not self.projectors:
            raise DimensionError("observable needs at least one outcome")
        shape = self.projectors[0].shape
        if shape[0] != shape[1] or any(p.shape != shape for p in self.projectors):
            raise DimensionError("projectors must be square and of equal size")
        qubits_of(shape[0])

    @classmethod
    def from_hermitian(cls, a, gap: float = EIGEN_GAP) -> "Observable":
        """Eigendecompose ``a`` and group eigenvalues closer than ``gap``."""
        a = as_matrix(a)
        a = (a + dagger(a)) / 2
        w, v = np.linalg.eigh(a)
        groups: list[list[int]] = []
        for i in range(len(w)):
            if groups and w[i] - w[groups[-1][-1]] <= gap:
                groups[-1].append(i)
            else:
                groups.append([i])
        eigenvalues = [float(np.mean(w[g])) for g in groups]
        projectors = [v[:, g] @ dagger(v[:, g]) for g in groups]
        return cls(np.array(eigenvalues), projectors)

    @property
    def n_qubits(self) -> int:
        return qubits_of(self.projectors[0].shape[0])

    def matrix(self) -> np.ndarray:
        return sum(a * p for a, p in zip(self.eigenvalues, self.projectors))

    def extended(self, n: int) -> list[np.ndarray]:
        """Projectors ``P_k (x) I`` on ``n`` qubits."""
        extra = np.eye(1 << (n - self.n_qubits))
        return [np.kron(p, extra) for p in self.projectors]

    def same_as(self, other: "Observable", tol: float = 1e-9) -> bool:
        if len(self.eigenvalues) != len(other.eigenvalues):
            return False
        if self.projectors[0].shape != other.projectors[0].shape:
            return False
        if np.max(np.abs(self.eigenvalues - other.eigenvalues)) > tol:
            return False
        return all(np.max(np.abs(p - q)) <= tol
                   for p, q in zip(self.projectors, other.projectors))


@dataclass(eq=False)
class QuantumAutomaton:
    n: int
    n1: int
    rho0: np.ndarray
    alphabet: tuple[str, ...]
    unitaries: dict[str, np.ndarray]
    observable: Observable

    def __post_init__(self):
        self.n = int(self.n)
        self.n1 = int(self.n1)
        if self.n < 1:
            raise DimensionError(f"n must be positive, got {self.n}")
        d = self.dim
        self.rho0 = as_matrix(self.rho0)
        if self.rho0.shape != (d, d):
            raise DimensionError(f"rho0 must be {d}x{d}, got {self.rho0.shape}")
        self.alphabet = tuple(self.alphabet)
        missing = [s for s in self.alphabet if s not in self.unitaries]
        if missing:
            raise SymbolError(f"no unitary given for symbols {missing}")
        unitaries = {}
        for s in self.alphabet:
            u = as_matrix(self.unitaries[s])
            if u.shape != (d, d):
                raise DimensionError(f"unitary {s!r} must be {d}x{d}, got {u.shape}")
            unitaries[s] = u
        self.unitaries = unitaries
        if self.observable.projectors[0].shape[0] != 1 << self.n1:
            raise DimensionError(
                f"observable acts on {self.observable.n_qubits} qubits, n1 = {self.n1}")

    @property
    def dim(self) -> int:
        return 1 << self.n

    def unitary(self, symbol: str) -> np.ndarray:
        try:
            return self.unitaries[symbol]
        except KeyError:
            raise SymbolError(f"symbol {symbol!r} not in alphabet {list(self.alphabet)}") from None

    def word_unitary(self, word: Iterable[str]) -> np.ndarray:
        u = np.eye(self.dim, dtype=complex)
        for s in word:
            u = self.unitary(s) @ u
        return u


@dataclass(frozen=True)
class Violation:
    name: str
    message: str
    norm: float

    def __str__(self):
        return f"{self.name}: {self.message} (norm {self.norm:.3e})"


def validate(m: QuantumAutomaton, tol: Tolerance | float | None = None) -> list[Violation]:
    """Return every violated physical invariant; an empty list means valid."""
    atol = as_tolerance(tol).atol
    out: list[Violation] = []
    if not 1 <= m.n1 <= m.n:
        out.append(Violation("n1", f"need 1 <= n1 <= n, got n1={m.n1}, n={m.n}", float(m.n1)))

    rho = m.rho0
    herm = float(np.max(np.abs(rho - dagger(rho))))
    if herm > atol:
        out.append(Violation("rho0", "not hermitian", herm))
    tr = abs(np.trace(rho) - 1.0)
    if tr > atol:
        out.append(Violation("rho0", "trace differs from 1", tr))
    lam_min = float(np.min(np.linalg.eigvalsh((rho + dagger(rho)) / 2)))
    if lam_min < -atol:
        out.append(Violation("rho0", "negative eigenvalue", -lam_min))

    if len(set(m.alphabet)) != len(m.alphabet):
        out.append(Violation("alphabet", "duplicate symbols", 0.0))
    if any(not isinstance(s, str) or s == "" for s in m.alphabet):
        out.append(Violation("alphabet", "symbols must be nonempty strings", 0.0))
    for s in m.alphabet:
        defect = unitarity_defect(m.unitaries[s])
        if defect > atol:
            out.append(Violation(f"unitaries[{s}]", "not unitary", defect))

    obs = m.observable
    if np.any(np.diff(obs.eigenvalues) <= 0):
        out.append(Violation("observable", "eigenvalues not strictly increasing", 0.0))
    eye = np.eye(obs.projectors[0].shape[0])
    total = np.zeros_like(eye, dtype=complex)
    for k, p in enumerate(obs.projectors):
        total = total + p
        h = float(np.max(np.abs(p - dagger(p))))
        if h > atol:
            out.append(Violation(f"projectors[{k}]", "not hermitian", h))
        idem = float(np.max(np.abs(p @ p - p)))
        if idem > atol:
            out.append(Violation(f"projectors[{k}]", "not idempotent", idem))
        for l in range(k + 1, len(obs.projectors)):
            overlap = float(np.max(np.abs(p @ obs.projectors[l])))
            if overlap > atol:
                out.append(Violation(f"projectors[{k},{l}]", "not mutually orthogonal", overlap))
    comp = float(np.max(np.abs(total - eye)))
    if comp > atol:
        out.append(Violation("observable", "projectors do not sum to identity", comp))
    return out


def step(m: QuantumAutomaton, rho: np.ndarray, sigma: str) -> np.ndarray:
    u = m.unitary(sigma)
    if rho.shape != u.shape:
        raise DimensionError(f"state is {rho.shape}, automaton dimension {u.shape}")
    return u @ rho @ dagger(u)


def run_word(m: QuantumAutomaton, word: Iterable[str]) -> np.ndarray:
    rho = m.rho0
    for s in word:
        rho = step(m, rho, s)
    return rho


def probabilities(m: QuantumAutomaton, rho: np.ndarray) -> np.ndarray:
    """Outcome probabilities in eigenvalue order, clamped to [0, 1].

    Uses the reduced state on the measured qubits, which gives the same numbers
    as tracing against ``P_k (x) I`` on the full space.
    """
    reduced = partial_trace(rho, m.n, m.n1)
    p = np.array([np.real(np.vdot(pk, reduced)) for pk in m.observable.projectors])
    return np.clip(p, 0.0, 1.0)


def output_dist(m: QuantumAutomaton, rho: np.ndarray) -> dict[float, float]:
    p = probabilities(m, rho)
    return {float(a): float(x) for a, x in zip(m.observable.eigenvalues, p)}


def word_count(alphabet_size: int, max_len: int) -> int:
    return sum(alphabet_size ** l for l in range(max_len + 1))


def iter_words(alphabet: Sequence[str], max_len: int):
    """All words of length <= max_len, by length then alphabet order."""
    for length in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=length)


def _check_budget(alphabet_size: int, max_len: int, cap: int) -> None:
    if max_len < 0:
        raise PreconditionError("max_len must be nonnegative")
    count = word_count(alphabet_size, max_len)
    if count > cap:
        raise BudgetError(f"{count} words up to length {max_len} exceed the cap of {cap}")


def _reachable(m: QuantumAutomaton, rho0: np.ndarray, max_len: int, cap: int):
    """Yield ``(word, rho_w)`` breadth-first, reusing the parent state."""
    _check_budget(len(m.alphabet), max_len, cap)
    level: list[tuple[Word, np.ndarray]] = [((), rho0)]
    yield (), rho0
    for _ in range(max_len):
        # parents are in order, so children come out lexicographically
        nxt = [(w + (s,), step(m, rho, s)) for w, rho in level for s in m.alphabet]
        yield from nxt
        level = nxt


def behavior_probs(m: QuantumAutomaton, max_len: int,
                   cap: int = DEFAULT_WORD_CAP) -> tuple[list[Word], np.ndarray]:
    """Words of length <= max_len and a ``(words, outcomes)`` probability array."""
    words, rows = [], []
    for w, rho in _reachable(m, m.rho0, max_len, cap):
        words.append(w)
        rows.append(probabilities(m, rho))
    return words, np.array(rows)


def behavior(m: QuantumAutomaton, max_len: int,
             cap: int = DEFAULT_WORD_CAP) -> dict[Word, dict[float, float]]:
    """Truncated behavior map ``word -> output distribution``."""
    words, probs = behavior_probs(m, max_len, cap)
    eig = [float(a) for a in m.observable.eigenvalues]
    return {w: dict(zip(eig, map(float, row))) for w, row in zip(words, probs)}


@dataclass(frozen=True)
class Comparison:
    """Outcome of a truncated behavioral comparison; truthy iff equal."""

    equal: bool
    max_deviation: float
    depth: int

    def __bool__(self):
        return self.equal


def states_equivalent(m: QuantumAutomaton, rho_i, rho_j, max_len: int,
                      tol: Tolerance | float | None = None,
                      cap: int = DEFAULT_WORD_CAP) -> Comparison:
    """Compare the output distributions reachable from two states, up to ``max_len``."""
    atol = as_tolerance(tol).atol
    rho_i, rho_j = as_matrix(rho_i), as_matrix(rho_j)
    dev = 0.0
    for (_, a), (_, b) in zip(_reachable(m, rho_i, max_len, cap),
                              _reachable(m, rho_j, max_len, cap)):
        dev = max(dev, float(np.max(np.abs(probabilities(m, a) - probabilities(m, b)))))
    return Comparison(dev <= atol, dev, max_len)


DEFAULT_MAX_PERIOD = 1024


def finiteness_period(u, max_p: int | None = None,
                      tol: Tolerance | float | None = None) -> int | None:
    """Smallest ``p <= max_p`` with every eigenvalue a ``p``-th root of unity.

    ``max_p`` defaults to ``4**n`` for a unitary on ``n`` qubits.
    """
    u = as_matrix(u)
    atol = as_tolerance(tol).atol
    if not is_unitary(u, tol):
        raise PreconditionError("finiteness_period needs a unitary")
    if max_p is None:
        max_p = u.shape[0] ** 2
    if max_p < 1:
        raise PreconditionError("max_p must be >= 1")
    theta = np.angle(unitary_eigenvalues(u, tol))
    p = np.arange(1, max_p + 1)[:, None]
    turns = theta[None, :] * p / (2 * np.pi)
    # distance from theta to the nearest 2*pi*j/p
    miss = np.abs(turns - np.round(turns)) * 2 * np.pi / p
    ok = np.all(miss <= atol, axis=1)
    if not ok.any():
        return None
    return int(np.argmax(ok)) + 1


@dataclass
class FinitenessVerdict:
    verdict: str  # "finite" | "infinite" | "unknown"
    periods: dict[str, int | None]
    noncommuting: list[tuple[str, str]] = field(default_factory=list)
    max_p: int = 0
    reason: str = ""


def is_finite_automaton(m: QuantumAutomaton, max_p: int | None = None,
                        tol: Tolerance | float | None = None,
                        assume_period_bound: bool = False) -> FinitenessVerdict:
    """Decide whether the reachable state set is finite.

    Every letter periodic and all letters commuting gives ``finite``. A letter
    with no period up to ``max_p`` gives ``infinite`` only when ``max_p``
    reaches ``4**n`` and the caller opts in to treating ``4**n`` as an upper
    bound on periods (``assume_period_bound``); otherwise ``unknown``. The
    bound is not safe in general: T on one qubit has period 8 > 4. Periodic
    but non-commuting letters are ``unknown``: commutativity is sufficient,
    not necessary.

    ``max_p`` defaults to ``max(4**n, 1024)``.
    """
    atol = as_tolerance(tol).atol
    bound = m.dim ** 2
    if max_p is None:
        max_p = max(bound, DEFAULT_MAX_PERIOD)
    periods = {s: finiteness_period(m.unitaries[s], max_p, tol) for s in m.alphabet}
    aperiodic = [s for s, p in periods.items() if p is None]
    if aperiodic:
        if assume_period_bound and max_p >= bound:
            return FinitenessVerdict("infinite", periods, [], max_p,
                                     f"no period <= {max_p} for {aperiodic}")
        return FinitenessVerdict("unknown", periods, [], max_p,
                                 f"no period <= {max_p} for {aperiodic}; bound not assumed")
    noncommuting = []
    for a, b in itertools.combinations(m.alphabet, 2):
        ua, ub = m.unitaries[a], m.unitaries[b]
        if np.max(np.abs(ua @ ub - ub @ ua)) > atol:
            noncommuting.append((a, b))
    if noncommuting:
        return FinitenessVerdict("unknown", periods, noncommuting, max_p,
                                 "periodic letters that do not commute")
    return FinitenessVerdict("finite", periods, [], max_p,
                             "periodic, pairwise commuting letters")


def _rearrange(x: np.ndarray, n: int, n_a: int) -> np.ndarray:
    da, db = 1 << n_a, 1 << (n - n_a)
    return x.reshape(da, db, da, db).transpose(0, 2, 1, 3).reshape(da * da, db * db)


def factor_product(x, n: int, n_a: int, tol: Tolerance | float | None = None,
                   kind: str = "auto") -> tuple[np.ndarray, np.ndarray] | None:
    """Split ``x`` as ``A (x) B`` across the leading ``n_a`` qubits, if possible.

    Nearest Kronecker product via SVD of the rearranged matrix; accepted when
    the second singular value is at most ``tol.atol`` times the first.

    ``kind`` picks the normalization: ``"density"`` makes both factors trace
    one, ``"unitary"`` makes both unitary with ``A``'s first nonzero entry
    real positive, ``"auto"`` chooses by testing ``x``.
    """
    x = as_matrix(x)
    atol = as_tolerance(tol).atol
    d = 1 << n
    if x.shape != (d, d):
        raise DimensionError(f"expected {d}x{d}, got {x.shape}")
    if not 0 < n_a < n:
        raise PreconditionError(f"need 0 < n_A < n, got n_A={n_a}, n={n}")
    da = 1 << n_a
    db = d // da
    r = _rearrange(x, n, n_a)
    u, s, vh = np.linalg.svd(r, full_matrices=False)
    if s[0] == 0.0:
        return None
    if len(s) > 1 and s[1] > atol * s[0]:
        return None
    a = (u[:, 0] * np.sqrt(s[0])).reshape(da, da)
    if kind == "auto":
        kind = "unitary" if is_unitary(x, tol) else "density"
    if kind == "unitary":
        a = fix_global_phase(a * (np.sqrt(da) / np.linalg.norm(a)))
    elif kind == "density":
        t = np.trace(a)
        if abs(t) > 0:
            a = a / t
    else:
        raise ValueError(f"unknown kind {kind!r}")
    # least-squares B for the chosen A
    b = (np.conj(a).ravel() @ r / np.vdot(a, a).real).reshape(db, db)
    if kind == "density":
        a = (a + dagger(a)) / 2
        b = (b + dagger(b)) / 2
    return a, b


def sober_reduce(m: QuantumAutomaton, n_a: int,
                 tol: Tolerance | float | None = None) -> QuantumAutomaton | None:
    """Restrict to the leading ``n_a`` qubits when state and letters all factor."""
    if not m.n1 <= n_a < m.n:
        raise PreconditionError(f"need n1 <= n_A < n, got n_A={n_a} (n1={m.n1}, n={m.n})")
    rho = factor_product(m.rho0, m.n, n_a, tol, kind="density")
    if rho is None:
        return None
    letters = {}
    for s in m.alphabet:
        f = factor_product(m.unitaries[s], m.n, n_a, tol, kind="unitary")
        if f is None:
            return None
        letters[s] = f[0]
    return QuantumAutomaton(n_a, m.n1, rho[0], m.alphabet, letters, m.observable)
