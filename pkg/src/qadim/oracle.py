"""Brute-force references for cross-checking the fast paths.

Each routine is written in the most literal form possible and deliberately
shares no helpers with the optimized modules: explicit traces of matrix
products, explicit bit-decomposed index sums, and full recomputation of every
state from the initial one.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError


@dataclass(frozen=True)
class OracleConfig:
    max_words: int = 100_000
    tol: float = 1e-9

    def __post_init__(self):
        if self.max_words < 1:
            raise ValueError("max_words must be >= 1")


def superop_elementwise(u, basis) -> np.ndarray:
    """``s[i, j] = Tr(B_i^dagger u B_j u^dagger)``, one trace per entry.

    ``basis`` is an iterable of square matrices (an ``OperatorBasis`` works).
    """
    u = np.asarray(u, dtype=complex)
    ud = u.conj().T
    vecs = [np.asarray(b, dtype=complex) for b in basis]
    size = len(vecs)
    out = np.zeros((size, size), dtype=complex)
    for j in range(size):
        image = u @ vecs[j] @ ud
        for i in range(size):
            out[i, j] = np.trace(vecs[i].conj().T @ image)
    return out


def partial_trace_naive(m, n: int, n_a: int) -> np.ndarray:
    """Quadruple loop over bit strings: sum over the traced-out index ``k``."""
    m = np.asarray(m, dtype=complex)
    nb = n - n_a
    out = np.zeros((2 ** n_a, 2 ** n_a), dtype=complex)
    for i_bits in itertools.product((0, 1), repeat=n_a):
        for j_bits in itertools.product((0, 1), repeat=n_a):
            total = 0j
            for k_bits in itertools.product((0, 1), repeat=nb):
                row = int("".join(map(str, i_bits + k_bits)), 2)
                col = int("".join(map(str, j_bits + k_bits)), 2)
                total += m[row, col]
            i = int("".join(map(str, i_bits)), 2)
            j = int("".join(map(str, j_bits)), 2)
            out[i, j] = total
    return out


def _distribution(m, word) -> list[float]:
    d = 2 ** m.n
    u_w = np.eye(d, dtype=complex)
    for s in word:
        u_w = np.asarray(m.unitaries[s]) @ u_w
    rho = u_w @ np.asarray(m.rho0) @ u_w.conj().T
    rest = np.eye(2 ** (m.n - m.n1))
    probs = []
    for p in m.observable.projectors:
        big = np.kron(np.asarray(p), rest)
        probs.append(float(np.trace(big @ rho).real))
    return probs


def behavior_table(m, depth: int, config: OracleConfig | None = None) -> str:
    """Canonical text table, one row per word: ``word<TAB>p_1<TAB>p_2...``.

    Rows follow length, then alphabet order; the empty word is written ``<eps>``
    and letters are joined by ``.``. Probabilities use 17 significant digits.
    """
    config = config or OracleConfig()
    k = len(m.alphabet)
    count = sum(k ** l for l in range(depth + 1))
    if count > config.max_words:
        raise BudgetError(f"{count} words exceed the oracle cap of {config.max_words}")
    header = "word\t" + "\t".join(f"{float(a):.17g}" for a in m.observable.eigenvalues)
    rows = [header]
    for length in range(depth + 1):
        for word in itertools.product(m.alphabet, repeat=length):
            label = ".".join(word) if word else "<eps>"
            rows.append(label + "\t" + "\t".join(f"{p:.17g}" for p in _distribution(m, word)))
    return "\n".join(rows) + "\n"


def parse_table(text: str) -> tuple[list[str], dict[str, list[float]]]:
    lines = text.strip("\n").split("\n")
    header = lines[0].split("\t")[1:]
    rows = {}
    for line in lines[1:]:
        label, *vals = line.split("\t")
        rows[label] = [float(v) for v in vals]
    return header, rows


def table_deviation(t1: str, t2: str) -> float:
    """Largest per-entry probability difference; ``inf`` if rows or outcomes differ."""
    h1, r1 = parse_table(t1)
    h2, r2 = parse_table(t2)
    if h1 != h2 or list(r1) != list(r2):
        return float("inf")
    return max(abs(a - b) for w in r1 for a, b in zip(r1[w], r2[w]))
