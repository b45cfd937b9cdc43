"""Statevector simulation of the feature-map circuit and the fidelity kernel.

Conventions, fixed across the package:
  * qubit q is the q-th least significant bit of the amplitude index;
  * rotations are exp(i * angle * P) for P in {X, Y, Z}, with no half-angle;
  * the entangler on (j, k) with angle phi is CNOT(j->k), exp(i*phi*Z) on k,
    CNOT(j->k), i.e. exactly exp(i * phi * Z_j Z_k).

Gates mutate the statevector in place and also return it. All gate helpers
accept an optional leading batch axis, so a whole fold of feature vectors is
prepared as one (n_rows, 2^N) array.
"""

from __future__ import annotations

import math

import numpy as np

from .encoding import CircuitSpec

MAX_QUBITS = 16

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def _n_qubits_of(state: np.ndarray) -> int:
    dim = state.shape[-1]
    n = dim.bit_length() - 1
    if dim != 1 << n:
        raise ValueError("statevector length must be a power of two")
    return n


def _split(state: np.ndarray, qubit: int) -> np.ndarray:
    """View with the target qubit isolated on its own axis of size 2."""
    n = _n_qubits_of(state)
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for {n} qubits")
    return state.reshape(state.shape[:-1] + (1 << (n - 1 - qubit), 2, 1 << qubit))


def _per_row(values, template: np.ndarray):
    """Broadcast a per-row angle factor over the amplitude axes of a view slice."""
    arr = np.asarray(values)
    if arr.ndim == 0:
        return arr
    return arr.reshape(arr.shape + (1,) * (template.ndim - arr.ndim))


def zero_state(n_qubits: int, batch: int | None = None) -> np.ndarray:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}]")
    shape = (1 << n_qubits,) if batch is None else (batch, 1 << n_qubits)
    state = np.zeros(shape, dtype=np.complex128)
    state[..., 0] = 1.0
    return state


def apply_h(state: np.ndarray, qubit: int) -> np.ndarray:
    v = _split(state, qubit)
    a = v[..., 0, :].copy()
    b = v[..., 1, :]
    v[..., 0, :] = (a + b) * _INV_SQRT2
    v[..., 1, :] = (a - b) * _INV_SQRT2
    return state


def apply_rotation(state: np.ndarray, qubit: int, axis: str, angle) -> np.ndarray:
    """exp(i * angle * P) on one qubit; axis I is the identity.

    angle may be a scalar or a per-row array matching the batch axis.
    """
    if axis == "I":
        return state
    if axis not in ("X", "Y", "Z"):
        raise ValueError(f"unknown rotation axis {axis!r}")
    v = _split(state, qubit)
    v0 = v[..., 0, :]
    v1 = v[..., 1, :]
    if axis == "Z":
        phase = np.exp(1j * np.asarray(angle, dtype=np.float64))
        p = _per_row(phase, v0)
        v[..., 0, :] = v0 * p
        v[..., 1, :] = v1 * np.conj(p)
        return state
    c = _per_row(np.cos(angle), v0)
    s = _per_row(np.sin(angle), v0)
    a = v0.copy()
    if axis == "X":
        v[..., 0, :] = c * a + 1j * s * v1
        v[..., 1, :] = 1j * s * a + c * v1
    else:  # Y
        v[..., 0, :] = c * a + s * v1
        v[..., 1, :] = -s * a + c * v1
    return state


def apply_cnot(state: np.ndarray, control: int, target: int) -> np.ndarray:
    if control == target:
        raise ValueError("control and target must differ")
    n = _n_qubits_of(state)
    for q in (control, target):
        if not 0 <= q < n:
            raise ValueError(f"qubit {q} out of range for {n} qubits")
    idx = np.arange(1 << n)
    sel = ((idx >> control) & 1 == 1) & ((idx >> target) & 1 == 0)
    a = idx[sel]
    b = a | (1 << target)
    tmp = state[..., a].copy()
    state[..., a] = state[..., b]
    state[..., b] = tmp
    return state


def apply_entangler(state: np.ndarray, pair: tuple[int, int], angle) -> np.ndarray:
    """CNOT(j->k), exp(i*angle*Z) on k, CNOT(j->k): a ZZ phase on the pair."""
    j, k = pair
    apply_cnot(state, j, k)
    apply_rotation(state, k, "Z", angle)
    apply_cnot(state, j, k)
    return state


def prepare_feature_states(spec: CircuitSpec, X: np.ndarray) -> np.ndarray:
    """Map scaled feature rows to statevectors, one circuit run per row.

    Each repetition applies a Hadamard wall, then the flagged single-qubit
    rotations with angle x[f_q], then the entanglers with angle
    2 * x[f_j] * x[f_k].
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if not np.all(np.isfinite(X)):
        raise ValueError("feature rows must be finite scaled angles")
    n = spec.n_qubits
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"circuit width must be in [1, {MAX_QUBITS}]")
    if max(spec.qubit_feature) >= X.shape[1]:
        raise ValueError("qubit_feature references a column beyond the data")
    state = zero_state(n, batch=X.shape[0])
    for _ in range(spec.repetitions):
        for q in range(n):
            apply_h(state, q)
        if spec.axis != "I":
            for q in range(n):
                if spec.rotation_flags[q]:
                    apply_rotation(state, q, spec.axis, X[:, spec.qubit_feature[q]])
        for j, k in spec.entangler_pairs:
            apply_entangler(
                state, (j, k), 2.0 * X[:, spec.qubit_feature[j]] * X[:, spec.qubit_feature[k]]
            )
    return state


def prepare_feature_state(spec: CircuitSpec, x: np.ndarray) -> np.ndarray:
    return prepare_feature_states(spec, np.asarray(x, dtype=np.float64)[None, :])[0]


def fidelity_gram(S_a: np.ndarray, S_b: np.ndarray) -> np.ndarray:
    """|<a_i|b_j>|^2 between prepared state batches, clamped into [0, 1].

    einsum rather than matmul: its summation order over the state axis does
    not depend on the batch sizes, so a batched matrix reproduces singleton
    entries bit for bit.
    """
    G = np.abs(np.einsum("id,jd->ij", S_a.conj(), S_b)) ** 2
    return np.clip(G, 0.0, 1.0)


def kernel_matrix(
    spec: CircuitSpec, X_a: np.ndarray, X_b: np.ndarray | None = None
) -> np.ndarray:
    """Fidelity kernel |<phi(a)|phi(b)>|^2 between two row sets.

    States are prepared once per row and reused for every entry. Round-off
    is clamped so entries always land in [0, 1].
    """
    S_a = prepare_feature_states(spec, X_a)
    S_b = S_a if X_b is None else prepare_feature_states(spec, X_b)
    return fidelity_gram(S_a, S_b)


def kernel_entry(spec: CircuitSpec, x: np.ndarray, z: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    return float(kernel_matrix(spec, x[None, :], z[None, :])[0, 0])
