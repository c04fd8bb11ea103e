"""JSON automaton files and seeded instance generation.

File layout (``schema_version`` "1")::

    {
      "schema_version": "1",
      "n": 2, "n1": 1,
      "alphabet": ["a", "b"],
      "rho0": [[[re, im], ...], ...],
      "unitaries": {"a": <matrix>, "b": <matrix>},
      "observable": {"eigenvalues": [...], "projectors": [<matrix>, ...]}
                 or {"hermitian": <matrix>}
    }

Floats are written with ``repr`` precision, which round-trips bit-exactly.
"""
from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .automaton import Observable, QuantumAutomaton, validate
from .errors import DimensionError, ParseError, UsageError, ValidationError
from .linalg import Tolerance, kron_all

SCHEMA_VERSION = "1"
KINDS = ("product", "entangling", "random")


def _encode(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def _decode(obj, name: str, dim: int | None = None) -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise ParseError(f"{name}: expected a nested list of [re, im] pairs")
    width = len(obj[0])
    if any(len(r) != width for r in obj):
        raise DimensionError(f"{name}: rows have unequal lengths")
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{name}: non-numeric entry ({exc})") from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ParseError(f"{name}: entries must be [re, im] pairs")
    m = arr[..., 0] + 1j * arr[..., 1]
    if not np.all(np.isfinite(m)):
        raise ParseError(f"{name}: non-finite entry")
    if dim is not None and m.shape != (dim, dim):
        raise DimensionError(f"{name}: expected {dim}x{dim}, got {m.shape[0]}x{m.shape[1]}")
    return m


def to_dict(m: QuantumAutomaton) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "n": m.n,
        "n1": m.n1,
        "alphabet": list(m.alphabet),
        "rho0": _encode(m.rho0),
        "unitaries": {s: _encode(m.unitaries[s]) for s in m.alphabet},
        "observable": {
            "eigenvalues": [float(a) for a in m.observable.eigenvalues],
            "projectors": [_encode(p) for p in m.observable.projectors],
        },
    }


def from_dict(data, tol: Tolerance | float | None = None) -> QuantumAutomaton:
    if not isinstance(data, dict):
        raise ParseError("top level must be a JSON object")
    missing = [k for k in ("n", "n1", "alphabet", "rho0", "unitaries", "observable")
               if k not in data]
    if missing:
        raise ParseError(f"missing fields: {missing}")
    version = str(data.get("schema_version", SCHEMA_VERSION))
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {version!r}")
    n, n1 = data["n"], data["n1"]
    if not isinstance(n, int) or not isinstance(n1, int) or n < 1:
        raise ParseError("n and n1 must be positive integers")
    alphabet = data["alphabet"]
    if not isinstance(alphabet, list) or not all(isinstance(s, str) for s in alphabet):
        raise ParseError("alphabet must be a list of strings")
    d = 1 << n
    rho0 = _decode(data["rho0"], "rho0", d)
    raw_u = data["unitaries"]
    if not isinstance(raw_u, dict):
        raise ParseError("unitaries must be an object keyed by symbol")
    unknown = set(raw_u) - set(alphabet)
    if unknown:
        raise ParseError(f"unitaries given for symbols outside the alphabet: {sorted(unknown)}")
    absent = [s for s in alphabet if s not in raw_u]
    if absent:
        raise ParseError(f"no unitary for symbols {absent}")
    unitaries = {s: _decode(raw_u[s], f"unitaries[{s}]", d) for s in alphabet}
    obs = data["observable"]
    if not isinstance(obs, dict):
        raise ParseError("observable must be an object")
    d1 = 1 << n1 if 0 < n1 <= n else None
    if "hermitian" in obs:
        observable = Observable.from_hermitian(_decode(obs["hermitian"], "observable", d1))
    elif "eigenvalues" in obs and "projectors" in obs:
        projs = obs["projectors"]
        if not isinstance(projs, list):
            raise ParseError("observable.projectors must be a list")
        observable = Observable(
            obs["eigenvalues"],
            [_decode(p, f"projectors[{k}]", d1) for k, p in enumerate(projs)])
    else:
        raise ParseError("observable needs either 'hermitian' or 'eigenvalues' + 'projectors'")
    m = QuantumAutomaton(n, n1, rho0, tuple(alphabet), unitaries, observable)
    problems = validate(m, tol)
    if problems:
        raise ValidationError("invalid automaton:\n  " + "\n  ".join(map(str, problems)),
                              problems)
    return m


def load(path, tol: Tolerance | float | None = None) -> QuantumAutomaton:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed JSON ({exc})") from None
    return from_dict(data, tol)


def dumps(m: QuantumAutomaton) -> str:
    return json.dumps(to_dict(m), indent=1)


def save(m: QuantumAutomaton, path) -> None:
    """Write ``m`` as JSON. ``OSError`` propagates for unwritable paths."""
    text = dumps(m)
    with open(os.fspath(path), "w") as fh:
        fh.write(text)
        fh.write("\n")


# -- instance generation ------------------------------------------------------

def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed ``d x d`` unitary: QR of a complex Ginibre matrix, with
    R's diagonal phases folded back into Q."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_density(d: int, rng: np.random.Generator, pure: bool = False) -> np.ndarray:
    if pure:
        psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        psi /= np.linalg.norm(psi)
        return np.outer(psi, np.conj(psi))
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ np.conj(g).T
    rho = rho / np.trace(rho).real
    return (rho + np.conj(rho).T) / 2


def z_observable(n1: int) -> Observable:
    """Pauli Z on the first qubit, identity on the rest of the ``n1`` measured qubits."""
    z = np.diag([1.0, -1.0]).astype(complex)
    return Observable.from_hermitian(np.kron(z, np.eye(1 << (n1 - 1))))


def cnot_across(n: int, control: int, target: int) -> np.ndarray:
    """CNOT on ``n`` qubits, qubits numbered from 1 (most significant)."""
    d = 1 << n
    out = np.zeros((d, d), dtype=complex)
    cbit, tbit = 1 << (n - control), 1 << (n - target)
    for i in range(d):
        out[i ^ tbit if i & cbit else i, i] = 1.0
    return out


def letter_names(count: int) -> tuple[str, ...]:
    if count < 1:
        raise UsageError("need at least one letter")
    if count <= 26:
        return tuple(chr(ord("a") + i) for i in range(count))
    return tuple(f"s{i}" for i in range(count))


def gen_instance(kind: str, n: int, n1: int, seed: int, letters: int = 2) -> QuantumAutomaton:
    """Deterministic test automaton.

    ``product``: state and letters factor across the cut after qubit ``n1``.
    ``entangling``: as product, but letter one is preceded by a CNOT from
    qubit ``n1`` to qubit ``n1 + 1``. ``random``: Haar letters on all qubits
    and a random pure initial state.
    """
    if kind not in KINDS:
        raise UsageError(f"unknown kind {kind!r}; choose from {KINDS}")
    if not 1 <= n1 <= n:
        raise UsageError(f"need 1 <= n1 <= n, got n1={n1}, n={n}")
    if kind == "entangling" and n1 == n:
        raise UsageError("entangling instances need n1 < n")
    rng = np.random.default_rng(seed)
    alphabet = letter_names(letters)
    da, db = 1 << n1, 1 << (n - n1)
    if kind == "random":
        rho0 = random_density(1 << n, rng, pure=True)
        unitaries = {s: haar_unitary(1 << n, rng) for s in alphabet}
    else:
        rho0 = np.kron(random_density(da, rng), random_density(db, rng))
        unitaries = {s: np.kron(haar_unitary(da, rng), haar_unitary(db, rng)) for s in alphabet}
        if kind == "entangling":
            first = alphabet[0]
            unitaries[first] = cnot_across(n, n1, n1 + 1) @ unitaries[first]
    return QuantumAutomaton(n, n1, rho0, alphabet, unitaries, z_observable(n1))


def embed_product(a: QuantumAutomaton, rho_b: np.ndarray,
                  letters_b: dict[str, np.ndarray]) -> QuantumAutomaton:
    """``a`` tensored with a decoration on extra trailing qubits."""
    nb = int(np.log2(rho_b.shape[0]))
    unitaries = {s: kron_all([a.unitaries[s], letters_b[s]]) for s in a.alphabet}
    return QuantumAutomaton(a.n + nb, a.n1, np.kron(a.rho0, rho_b), a.alphabet, unitaries,
                            a.observable)
