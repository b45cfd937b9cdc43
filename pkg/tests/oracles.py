"""Independent dense-matrix reference implementations used only by tests.

Everything here is built from explicit Kronecker products and permutation
matrices, deliberately sharing no code with the package's simulator.
"""

import numpy as np


def op_on(U: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Embed a one-qubit operator; qubit 0 is the least significant index bit."""
    return np.kron(np.eye(1 << (n - 1 - qubit)), np.kron(U, np.eye(1 << qubit)))


def rot_dense(axis: str, phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    if axis == "X":
        return np.array([[c, 1j * s], [1j * s, c]])
    if axis == "Y":
        return np.array([[c, s], [-s, c]], dtype=complex)
    if axis == "Z":
        return np.diag([np.exp(1j * phi), np.exp(-1j * phi)])
    return np.eye(2, dtype=complex)


def cnot_dense(control: int, target: int, n: int) -> np.ndarray:
    dim = 1 << n
    M = np.zeros((dim, dim))
    for i in range(dim):
        j = i ^ (1 << target) if (i >> control) & 1 else i
        M[j, i] = 1.0
    return M


def prepare_dense(spec, x: np.ndarray) -> np.ndarray:
    """Dense-matrix replay of the feature-map circuit on one row."""
    n = spec.n_qubits
    H = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    state = np.zeros(1 << n, dtype=complex)
    state[0] = 1.0
    for _ in range(spec.repetitions):
        for qb in range(n):
            state = op_on(H, qb, n) @ state
        if spec.axis != "I":
            for qb in range(n):
                if spec.rotation_flags[qb]:
                    state = op_on(rot_dense(spec.axis, x[spec.qubit_feature[qb]]), qb, n) @ state
        for j, k in spec.entangler_pairs:
            phi = 2.0 * x[spec.qubit_feature[j]] * x[spec.qubit_feature[k]]
            CN = cnot_dense(j, k, n)
            state = CN @ (op_on(rot_dense("Z", phi), k, n) @ (CN @ state))
    return state


def kernel_dense(spec, x: np.ndarray, z: np.ndarray) -> float:
    a = prepare_dense(spec, x)
    b = prepare_dense(spec, z)
    return float(np.abs(np.vdot(a, b)) ** 2)


def random_spec(rng: np.random.Generator, n_qubits: int, n_features: int = 6):
    """Random CircuitSpec built directly, covering N=1 where chromosomes cannot."""
    from qsvmf import CircuitSpec, qubit_pairs

    n_sel = int(rng.integers(1, n_features + 1))
    selected = tuple(sorted(rng.choice(n_features, size=n_sel, replace=False).tolist()))
    qubit_feature = tuple(int(rng.choice(selected)) for _ in range(n_qubits))
    flags = tuple(int(b) for b in rng.integers(0, 2, size=n_qubits))
    axis = ("I", "X", "Y", "Z")[int(rng.integers(0, 4))]
    pairs = tuple(p for p in qubit_pairs(n_qubits) if rng.random() < 0.5)
    return CircuitSpec(
        selected_features=selected,
        qubit_feature=qubit_feature,
        rotation_flags=flags,
        axis=axis,
        entangler_pairs=pairs,
        repetitions=int(rng.integers(1, 5)),
    )


def brute_force_fronts(objectives) -> list:
    """O(n^2) repeated-peeling domination oracle."""
    objs = [np.asarray(o, dtype=float) for o in objectives]
    remaining = list(range(len(objs)))
    fronts = []
    while remaining:
        front = []
        for i in remaining:
            dominated = False
            for j in remaining:
                if j == i:
                    continue
                if np.all(objs[j] <= objs[i]) and np.any(objs[j] < objs[i]):
                    dominated = True
                    break
            if not dominated:
                front.append(i)
        fronts.append(sorted(front))
        remaining = [i for i in remaining if i not in set(front)]
    return fronts
