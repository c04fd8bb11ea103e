import json

import numpy as np
import pytest

from qadim.automaton import validate
from qadim.errors import DimensionError, ParseError, UsageError, ValidationError
from qadim.fileio import (
    dumps,
    from_dict,
    gen_instance,
    haar_unitary,
    letter_names,
    load,
    save,
    to_dict,
)
from qadim.minimizer import minimize

MINIMAL = {
    "schema_version": "1",
    "n": 1,
    "n1": 1,
    "alphabet": ["a"],
    "rho0": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
    "unitaries": {"a": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]},
    "observable": {"hermitian": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]},
}


def _write(tmp_path, data, name="m.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


def _same(a, b):
    if a.n != b.n or a.n1 != b.n1 or a.alphabet != b.alphabet:
        return False
    mats = [(a.rho0, b.rho0)] + [(a.unitaries[s], b.unitaries[s]) for s in a.alphabet]
    mats += list(zip(a.observable.projectors, b.observable.projectors))
    return all(np.array_equal(x, y) for x, y in mats) and \
        np.array_equal(a.observable.eigenvalues, b.observable.eigenvalues)


def test_minimal_file_loads(tmp_path):
    m = load(_write(tmp_path, MINIMAL))
    assert m.n == 1 and m.alphabet == ("a",)
    assert sorted(m.observable.eigenvalues) == [-1.0, 1.0]


def test_trace_violation_names_rho0(tmp_path):
    data = json.loads(json.dumps(MINIMAL))
    data["rho0"][0][0] = [0.9, 0]
    with pytest.raises(ValidationError) as exc:
        load(_write(tmp_path, data))
    assert "rho0" in str(exc.value)
    assert any("rho0" in v.name for v in exc.value.violations)


def test_non_square_unitary(tmp_path):
    data = json.loads(json.dumps(MINIMAL))
    data["unitaries"]["a"] = [[[1, 0]] * 4] * 3
    with pytest.raises(DimensionError):
        load(_write(tmp_path, data))


@pytest.mark.parametrize("text", ["{", "[]", '{"n": 1}'])
def test_malformed(tmp_path, text):
    p = tmp_path / "bad.json"
    p.write_text(text)
    with pytest.raises(ParseError):
        load(p)


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load(tmp_path / "nope.json")


def test_round_trip_bit_exact(tmp_path):
    m = gen_instance("random", 2, 1, seed=99)
    save(m, tmp_path / "r.json")
    assert _same(m, load(tmp_path / "r.json"))
    assert _same(m, from_dict(json.loads(dumps(m))))


def test_reduced_pipeline(tmp_path):
    r = minimize(gen_instance("product", 3, 1, seed=6)).reduced
    save(r, tmp_path / "red.json")
    assert minimize(load(tmp_path / "red.json")).already_minimal


def test_unwritable_path(tmp_path):
    m = gen_instance("product", 2, 1, seed=0)
    with pytest.raises(OSError):
        save(m, tmp_path / "no" / "such" / "dir" / "m.json")


def test_generator_determinism():
    assert dumps(gen_instance("entangling", 3, 1, 5)) == dumps(gen_instance("entangling", 3, 1, 5))
    assert dumps(gen_instance("product", 2, 1, 5)) != dumps(gen_instance("product", 2, 1, 6))


@pytest.mark.parametrize("kind", ["product", "entangling", "random"])
@pytest.mark.parametrize("n,n1", [(2, 1), (3, 1), (3, 2)])
def test_generated_instances_validate(kind, n, n1):
    assert validate(gen_instance(kind, n, n1, seed=n * 10 + n1)) == []


def test_generated_pipeline_examples():
    assert minimize(gen_instance("product", 2, 1, 42)).n_bar == 1
    assert minimize(gen_instance("entangling", 2, 1, 42)).already_minimal


def test_generator_usage_errors():
    with pytest.raises(UsageError):
        gen_instance("weird", 2, 1, 0)
    with pytest.raises(UsageError):
        gen_instance("product", 2, 3, 0)
    with pytest.raises(UsageError):
        gen_instance("entangling", 2, 2, 0)
    with pytest.raises(UsageError):
        letter_names(0)


def test_haar_unitary_is_unitary(rng):
    u = haar_unitary(8, rng)
    assert np.max(np.abs(u.conj().T @ u - np.eye(8))) <= 1e-12


def test_schema_fields():
    d = to_dict(gen_instance("product", 2, 1, 0))
    assert d["schema_version"] == "1"
    assert set(d) == {"schema_version", "n", "n1", "alphabet", "rho0", "unitaries", "observable"}
