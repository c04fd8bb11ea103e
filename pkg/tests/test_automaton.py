import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qadim.automaton import (
    Observable,
    QuantumAutomaton,
    behavior,
    factor_product,
    finiteness_period,
    is_finite_automaton,
    output_dist,
    run_word,
    sober_reduce,
    states_equivalent,
    step,
    validate,
)
from qadim.errors import BudgetError, DimensionError, PreconditionError, SymbolError
from qadim.fileio import gen_instance, random_density, z_observable
from qadim.oracle import behavior_table, table_deviation

from conftest import CNOT, H, I2, KET0, KET1, S, T, X, Z, random_unitary

seeds = st.integers(0, 2**32 - 1)


def one_qubit(letters, rho=KET0):
    return QuantumAutomaton(1, 1, rho, tuple(letters), dict(letters), z_observable(1))


def test_observable_from_hermitian_groups_degenerate_eigenvalues():
    obs = Observable.from_hermitian(np.kron(Z, I2))
    assert list(obs.eigenvalues) == [-1.0, 1.0]
    assert np.allclose(obs.projectors[0], np.kron(KET1, I2))
    assert np.allclose(obs.projectors[1], np.kron(KET0, I2))
    assert np.allclose(obs.matrix(), np.kron(Z, I2))


def test_validate_valid_and_invalid():
    assert validate(one_qubit({"a": H})) == []
    bad = one_qubit({"a": H}, rho=np.diag([0.6, 0.3]))
    report = validate(bad)
    assert any(v.name == "rho0" and v.norm == pytest.approx(0.1) for v in report)


def test_validate_bad_projectors():
    obs = Observable([0.0, 1.0], [KET0, KET0])
    m = QuantumAutomaton(1, 1, KET0, ("a",), {"a": I2}, obs)
    messages = {v.message for v in validate(m)}
    assert "projectors do not sum to identity" in messages
    assert "not mutually orthogonal" in messages


def test_validate_non_unitary_letter():
    m = one_qubit({"a": np.diag([1, 2])})
    assert [v.name for v in validate(m)] == ["unitaries[a]"]


def test_shape_errors():
    with pytest.raises(DimensionError):
        QuantumAutomaton(1, 1, np.eye(4) / 4, ("a",), {"a": I2}, z_observable(1))
    with pytest.raises(SymbolError):
        QuantumAutomaton(1, 1, KET0, ("a", "b"), {"a": I2}, z_observable(1))


def test_step_examples():
    m = one_qubit({"i": I2, "x": X, "h": H})
    rho = np.array([[0.3, 0.1j], [-0.1j, 0.7]])
    assert np.allclose(step(m, rho, "i"), rho)
    assert np.allclose(step(m, KET0, "x"), KET1)
    assert np.allclose(step(m, KET0, "h"), [[0.5, 0.5], [0.5, 0.5]])
    with pytest.raises(SymbolError):
        step(m, KET0, "q")


def test_run_word_examples():
    m = one_qubit({"a": X, "b": H})
    assert np.allclose(run_word(m, ""), KET0)
    assert np.allclose(run_word(m, "aa"), KET0)
    m = one_qubit({"a": H, "b": X})
    # first letter acts first: X H |0><0| H X
    assert np.allclose(run_word(m, "ab"), X @ H @ KET0 @ H @ X)
    assert np.allclose(run_word(m, "ab"), [[0.5, 0.5], [0.5, 0.5]])


def test_output_dist_examples():
    rho = np.kron(KET0, KET0)
    m = QuantumAutomaton(2, 1, rho, ("a",), {"a": np.eye(4)}, z_observable(1))
    assert output_dist(m, rho) == {-1.0: 0.0, 1.0: 1.0}
    assert output_dist(m, np.eye(4) / 4) == pytest.approx({-1.0: 0.5, 1.0: 0.5})
    plus = np.kron(H @ KET0 @ H, KET0)
    assert output_dist(m, plus) == pytest.approx({-1.0: 0.5, 1.0: 0.5}, abs=1e-15)


def test_behavior_counts_and_order():
    m = one_qubit({"a": H})
    assert list(behavior(m, 0)) == [()]
    assert list(behavior(m, 2)) == [(), ("a",), ("a", "a")]
    m = one_qubit({"a": H, "b": X})
    assert list(behavior(m, 2)) == [(), ("a",), ("b",), ("a", "a"), ("a", "b"), ("b", "a"),
                                    ("b", "b")]
    with pytest.raises(BudgetError):
        behavior(m, 20)


def test_behavior_matches_oracle_table():
    m = gen_instance("random", 2, 1, 5, 2)
    b = behavior(m, 3)
    ref = behavior_table(m, 3)
    rows = ref.strip().split("\n")[1:]
    assert len(rows) == len(b)
    for (w, dist), row in zip(b.items(), rows):
        label, *vals = row.split("\t")
        assert label == (".".join(w) or "<eps>")
        assert list(dist.values()) == pytest.approx([float(v) for v in vals], abs=1e-12)


def test_states_equivalent_examples(rng):
    m = one_qubit({"a": H})
    assert states_equivalent(m, KET0, KET0, 3)
    assert not states_equivalent(m, KET0, KET1, 0)
    # B never affects outputs under product unitaries
    ua, ub = random_unitary(rng, 2), random_unitary(rng, 2)
    rho_a = random_density(2, rng)
    big = QuantumAutomaton(2, 1, np.kron(rho_a, KET0), ("a",), {"a": np.kron(ua, ub)},
                           z_observable(1))
    res = states_equivalent(big, np.kron(rho_a, KET0), np.kron(rho_a, random_density(2, rng)), 4)
    assert res.equal and res.max_deviation <= 1e-12 and res.depth == 4


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(1, 3))
def test_run_word_physical_and_compositional(seed, n):
    m = gen_instance("random", n, 1, seed, 2)
    rng = np.random.default_rng(seed)
    w1 = "".join(rng.choice(["a", "b"], rng.integers(0, 5)))
    w2 = "".join(rng.choice(["a", "b"], rng.integers(0, 5)))
    rho = run_word(m, w1 + w2)
    assert abs(np.trace(rho) - 1) <= 1e-10
    assert np.max(np.abs(rho - rho.conj().T)) <= 1e-10
    assert np.min(np.linalg.eigvalsh(rho)) >= -1e-9
    u2 = m.word_unitary(w2)
    assert np.max(np.abs(rho - u2 @ run_word(m, w1) @ u2.conj().T)) <= 1e-12
    assert sum(output_dist(m, rho).values()) == pytest.approx(1, abs=1e-10)


def test_finiteness_period_examples():
    assert finiteness_period(S) == 4
    assert finiteness_period(T, 64) == 8
    assert finiteness_period(np.diag([1, np.exp(1j)]), 1024) is None
    assert finiteness_period(I2) == 1
    with pytest.raises(PreconditionError):
        finiteness_period(np.diag([1, 2]))


@pytest.mark.parametrize("p", [1, 2, 3, 5, 7, 12])
def test_finiteness_period_property(rng, p):
    # conjugated diagonal of p-th roots with gcd(j..., p) forcing order exactly p
    phases = np.exp(2j * np.pi * np.array([0, 1, p - 1 if p > 1 else 0, 1]) / p)
    v = random_unitary(rng, 4)
    u = v @ np.diag(phases) @ v.conj().T
    got = finiteness_period(u, 64)
    assert got == p
    assert np.max(np.abs(np.linalg.matrix_power(u, got) - np.eye(4))) <= 1e-9
    for q in range(1, got):
        assert np.max(np.abs(np.linalg.matrix_power(u, q) - np.eye(4))) > 1e-6


def test_is_finite_automaton_verdicts():
    v = is_finite_automaton(one_qubit({"s": S}))
    assert v.verdict == "finite" and v.periods == {"s": 4}
    assert is_finite_automaton(one_qubit({"s": S, "t": T}), 64).verdict == "finite"
    # T's period 8 exceeds 4**1, so trusting that bound would misreport it
    assert is_finite_automaton(one_qubit({"t": T})).verdict == "finite"
    assert is_finite_automaton(one_qubit({"t": T}), 4, assume_period_bound=True).verdict == "infinite"
    v = is_finite_automaton(one_qubit({"x": X, "h": H}))
    assert v.verdict == "unknown" and v.noncommuting == [("x", "h")]
    irr = one_qubit({"r": np.diag([1, np.exp(1j)])})
    assert is_finite_automaton(irr, assume_period_bound=True).verdict == "infinite"
    assert is_finite_automaton(irr).verdict == "unknown"
    assert is_finite_automaton(irr, max_p=2).verdict == "unknown"


def test_factor_product_recovers_density_factors(rng):
    ra, rb = random_density(2, rng), random_density(4, rng)
    a, b = factor_product(np.kron(ra, rb), 3, 1)
    assert np.max(np.abs(a - ra)) <= 1e-12 and np.max(np.abs(b - rb)) <= 1e-12


def test_factor_product_unitary_normalization(rng):
    va, vb = random_unitary(rng, 4), random_unitary(rng, 2)
    a, b = factor_product(np.kron(va, vb), 3, 2, kind="unitary")
    assert np.allclose(a @ a.conj().T, np.eye(4), atol=1e-12)
    assert np.allclose(b @ b.conj().T, np.eye(2), atol=1e-12)
    assert np.allclose(np.kron(a, b), np.kron(va, vb), atol=1e-12)
    assert a[0, 0].imag == 0 and a[0, 0].real > 0


def test_factor_product_rejects_entangled():
    bell = np.zeros((4, 4), dtype=complex)
    bell[np.ix_([0, 3], [0, 3])] = 0.5
    assert factor_product(bell, 2, 1) is None
    assert factor_product(CNOT, 2, 1) is None


def test_factor_product_bell_rearrangement_spectrum():
    # oracle for the rejection: the rearranged Bell projector has two equal singular values
    bell = np.zeros((4, 4))
    bell[np.ix_([0, 3], [0, 3])] = 0.5
    r = bell.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    s = np.linalg.svd(r, compute_uv=False)
    assert s[0] == pytest.approx(0.5) and s[1] == pytest.approx(0.5)


def test_sober_reduce_product_instance():
    m = gen_instance("product", 3, 1, 7, 2)
    r = sober_reduce(m, 1)
    assert r is not None and r.n == 1
    assert table_deviation(behavior_table(m, 4), behavior_table(r, 4)) <= 1e-9
    assert sober_reduce(gen_instance("entangling", 2, 1, 7, 2), 1) is None


def test_sober_reduce_returns_embedded_automaton_up_to_phase(rng):
    ua = {s: random_unitary(rng, 2) for s in "ab"}
    small = QuantumAutomaton(1, 1, random_density(2, rng), ("a", "b"), ua, z_observable(1))
    ub = {s: random_unitary(rng, 2) for s in "ab"}
    big = QuantumAutomaton(2, 1, np.kron(small.rho0, KET0), ("a", "b"),
                           {s: np.kron(ua[s], ub[s]) for s in "ab"}, z_observable(1))
    r = sober_reduce(big, 1)
    assert np.allclose(r.rho0, small.rho0, atol=1e-12)
    for s in "ab":
        overlap = np.vdot(ua[s], r.unitaries[s])
        assert abs(abs(overlap) - 2) <= 1e-12  # equal up to a global phase


def test_sober_reduce_precondition():
    m = gen_instance("product", 2, 2, 1, 1)
    with pytest.raises(PreconditionError):
        sober_reduce(m, 2)
