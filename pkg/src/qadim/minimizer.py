"""Qubit-count minimization of a quantum automaton.

For each candidate width ``n_A`` (ascending from ``n1``) the kernel of the
partial trace onto the leading ``n_A`` qubits is tested for invariance under
every letter's superoperator. The first width that passes yields an equivalent
automaton on ``n_A`` qubits: the reduced initial state plus, for each letter,
the unitary whose superoperator is the Q-Q block.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .automaton import (
    DEFAULT_WORD_CAP,
    Comparison,
    QuantumAutomaton,
    behavior_probs,
    sober_reduce,
    word_count,
)
from .errors import BudgetError, InternalConsistencyError, PreconditionError, UsageError
from .linalg import Tolerance, as_tolerance, partial_trace
from .opbasis import BasisSplit, build_split
from .superop import (
    BlockDecomposition,
    blocks,
    change_basis,
    conj_superop,
    extract_unitary,
    invariant_under,
    offdiag_threshold,
)

log = logging.getLogger(__name__)


class OpCounter(Counter):
    """Approximate arithmetic-operation tally keyed by phase.

    Counts come from textbook flop formulas for the dense operations actually
    executed, not from hardware counters.
    """

    def matmul(self, phase: str, a: int, b: int, c: int, times: int = 1):
        self[phase] += 2 * a * b * c * times

    @property
    def total(self) -> int:
        return sum(self.values())


@dataclass
class MinimizationOptions:
    tol: Tolerance = field(default_factory=Tolerance)
    verify_len: int = 4
    try_sober_first: bool = True
    max_word_cap: int = DEFAULT_WORD_CAP

    def __post_init__(self):
        self.tol = as_tolerance(self.tol)
        if self.verify_len < 0:
            raise UsageError("verify_len must be >= 0")


@dataclass
class CutTest:
    """Diagnostics for one candidate width.

    ``method`` is ``"invariance"`` for a superoperator test or ``"sober"`` when
    the width was accepted by tensor factorization, in which case no
    superoperator was built and ``max_offdiag`` is empty.
    """

    n_a: int
    max_offdiag: dict[str, float]
    invariant: bool
    method: str = "invariance"


@dataclass
class MinimizationReport:
    original_dim: int
    tried: list[CutTest]
    n_bar: int | None = None
    reduced: QuantumAutomaton | None = None
    verified: tuple[int, float] | None = None
    op_count: OpCounter = field(default_factory=OpCounter)

    @property
    def already_minimal(self) -> bool:
        return self.reduced is None


def _count_split(counter: OpCounter, n: int, n_a: int) -> None:
    N, NA = 4 ** n, 4 ** n_a
    m = 1 << (n - n_a)
    counter["basis"] += N * NA * m  # partial trace of every unit
    counter["basis"] += N  # Q sums
    counter["basis"] += NA * 4 * N * (m - 1) ** 2  # two-pass Gram-Schmidt per class
    counter["basis"] += N * N  # transition matrix assembly


def _test_cut(m: QuantumAutomaton, n_a: int, tol: Tolerance, counter: OpCounter,
              split: BasisSplit | None = None):
    split = split or build_split(m.n, n_a)
    _count_split(counter, m.n, n_a)
    N = 4 ** m.n
    offdiag: dict[str, float] = {}
    decomps: dict[str, BlockDecomposition] = {}
    ok = True
    for s in m.alphabet:
        sup = conj_superop(m.unitaries[s], tol=tol)
        counter["superop"] += N * N
        rotated = change_basis(sup, split)
        counter.matmul("change_basis", N, N, N, times=2)
        b = blocks(rotated, split.q)
        counter["blocks"] += 2 * split.q * split.k
        decomps[s] = b
        offdiag[s] = b.max_offdiag
        if not invariant_under(rotated, split.q, tol):
            ok = False
            log.debug("n_A=%d letter %r: off-diagonal %.3e above %.3e",
                      n_a, s, b.max_offdiag, offdiag_threshold(rotated, tol))
    return ok, offdiag, decomps, split


def _assemble(m: QuantumAutomaton, n_a: int, decomps: dict[str, BlockDecomposition],
              tol: Tolerance, counter: OpCounter) -> QuantumAutomaton:
    q = 4 ** n_a
    letters = {}
    for s in m.alphabet:
        v = extract_unitary(decomps[s].qq, n_a, tol)
        counter["extract"] += 10 * q ** 3
        if v is None:
            raise InternalConsistencyError(
                f"letter {s!r} passed the invariance test at n_A={n_a} "
                "but its Q-Q block is not a unitary conjugation")
        letters[s] = v
    rho = partial_trace(m.rho0, m.n, n_a)
    counter["partial_trace"] += q * (1 << (m.n - n_a))
    rho = (rho + np.conj(rho).T) / 2
    return QuantumAutomaton(n_a, m.n1, rho, m.alphabet, letters, m.observable)


def reduce_at(m: QuantumAutomaton, n_a: int, tol: Tolerance | float | None = None,
              counter: OpCounter | None = None) -> QuantumAutomaton | None:
    """Equivalent automaton on the leading ``n_a`` qubits, or ``None`` if the
    kernel is not invariant under some letter."""
    if not m.n1 <= n_a < m.n:
        raise PreconditionError(f"need n1 <= n_A < n, got n_A={n_a} (n1={m.n1}, n={m.n})")
    tol = as_tolerance(tol)
    counter = counter if counter is not None else OpCounter()
    ok, _, decomps, _ = _test_cut(m, n_a, tol, counter)
    if not ok:
        return None
    return _assemble(m, n_a, decomps, tol, counter)


def verify_equivalence(m1: QuantumAutomaton, m2: QuantumAutomaton, depth: int,
                       tol: Tolerance | float | None = None,
                       cap: int = DEFAULT_WORD_CAP) -> Comparison:
    """Compare output distributions of both automata on every word up to ``depth``."""
    atol = as_tolerance(tol).atol
    if set(m1.alphabet) != set(m2.alphabet):
        raise UsageError(f"alphabets differ: {list(m1.alphabet)} vs {list(m2.alphabet)}")
    if not m1.observable.same_as(m2.observable, max(atol, 1e-9)):
        raise UsageError("automata measure different observables")
    if word_count(len(m1.alphabet), depth) > cap:
        raise BudgetError(f"verification to depth {depth} exceeds the cap of {cap} words")
    if m1.alphabet != m2.alphabet:
        m2 = QuantumAutomaton(m2.n, m2.n1, m2.rho0, m1.alphabet, m2.unitaries, m2.observable)
    _, p1 = behavior_probs(m1, depth, cap)
    _, p2 = behavior_probs(m2, depth, cap)
    dev = float(np.max(np.abs(p1 - p2)))
    return Comparison(dev <= atol, dev, depth)


def _count_sober(counter: OpCounter, n: int, n_a: int, letters: int) -> None:
    rows, cols = 4 ** n_a, 4 ** (n - n_a)
    counter["sober"] += (letters + 1) * 4 * rows * cols * min(rows, cols)


def minimize(m: QuantumAutomaton, opts: MinimizationOptions | None = None) -> MinimizationReport:
    """Find the smallest leading-qubit width admitting an equivalent automaton."""
    opts = opts or MinimizationOptions()
    tol = opts.tol
    report = MinimizationReport(original_dim=4 ** m.n, tried=[])
    counter = report.op_count

    sober_hit = None
    if opts.try_sober_first:
        for n_a in range(m.n1, m.n):
            _count_sober(counter, m.n, n_a, len(m.alphabet))
            r = sober_reduce(m, n_a, tol)
            if r is not None:
                sober_hit = (n_a, r)
                break

    # a sober width also passes the invariance test, so only narrower widths can win
    upper = sober_hit[0] if sober_hit else m.n
    for n_a in range(m.n1, upper):
        ok, offdiag, decomps, _ = _test_cut(m, n_a, tol, counter)
        report.tried.append(CutTest(n_a, offdiag, ok))
        if ok:
            report.n_bar = n_a
            report.reduced = _assemble(m, n_a, decomps, tol, counter)
            break
    else:
        if sober_hit:
            report.tried.append(CutTest(sober_hit[0], {}, True, "sober"))
            report.n_bar, report.reduced = sober_hit

    if report.reduced is not None and opts.verify_len > 0:
        if word_count(len(m.alphabet), opts.verify_len) > opts.max_word_cap:
            raise BudgetError(
                f"verification to depth {opts.verify_len} exceeds {opts.max_word_cap} words")
        cmp = verify_equivalence(m, report.reduced, opts.verify_len, tol, opts.max_word_cap)
        words = word_count(len(m.alphabet), opts.verify_len)
        counter.matmul("verify", m.dim, m.dim, m.dim, times=2 * words)
        counter.matmul("verify", report.reduced.dim, report.reduced.dim, report.reduced.dim,
                       times=2 * words)
        report.verified = (opts.verify_len, cmp.max_deviation)
    return report


def format_report(report: MinimizationReport) -> str:
    lines = [f"original dimension N = {report.original_dim}"]
    if not report.tried:
        lines.append("no candidate widths (n1 == n)")
    for t in report.tried:
        verdict = "invariant" if t.invariant else "not invariant"
        lines.append(f"n_A = {t.n_a}: {verdict} [{t.method}]")
        for s, v in t.max_offdiag.items():
            lines.append(f"    {s}: max_offdiag = {v:.3e}")
    if report.reduced is None:
        lines.append("result: already minimal")
    else:
        lines.append(f"result: reduced to n = {report.n_bar} qubits")
    if report.verified is not None:
        depth, dev = report.verified
        lines.append(f"verified to depth {depth}: max deviation {dev:.3e}")
    lines.append("operation count:")
    for phase in sorted(report.op_count):
        lines.append(f"    {phase}: {report.op_count[phase]}")
    lines.append(f"    total: {report.op_count.total}")
    return "\n".join(lines)
