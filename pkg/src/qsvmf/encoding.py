"""Chromosome bit layout and its decoding into a feature-map circuit.

Layout, in order: feature mask (p bits), per-qubit rotation flags (N bits),
rotation axis (2 bits), entangler pair mask (N(N-1)/2 bits over lexicographic
qubit pairs), repetition count (2 bits). Two-bit fields read most significant
bit first; the repetition field value v means d = v + 1 layers.
"""

from __future__ import annotations

import itertools
import zlib
from dataclasses import dataclass

import numpy as np

AXES = ("I", "X", "Y", "Z")


def chromosome_length(n_features: int, n_qubits: int) -> int:
    if n_features < 1:
        raise ValueError("n_features must be positive")
    if n_qubits < 2:
        raise ValueError("n_qubits must be at least 2")
    return n_features + n_qubits + n_qubits * (n_qubits - 1) // 2 + 4


def qubit_pairs(n_qubits: int) -> tuple[tuple[int, int], ...]:
    """Lexicographic qubit pairs (0,1), (0,2), ..., (N-2,N-1)."""
    return tuple(itertools.combinations(range(n_qubits), 2))


@dataclass(frozen=True)
class Chromosome:
    bits: tuple[int, ...]
    n_features: int
    n_qubits: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be 0 or 1")
        expected = chromosome_length(self.n_features, self.n_qubits)
        if len(self.bits) != expected:
            raise ValueError(
                f"expected {expected} bits for p={self.n_features}, "
                f"N={self.n_qubits}; got {len(self.bits)}"
            )

    def to_string(self) -> str:
        return "".join(str(b) for b in self.bits)

    @classmethod
    def from_string(cls, text: str, n_features: int, n_qubits: int) -> "Chromosome":
        if set(text) - {"0", "1"}:
            raise ValueError("chromosome string must contain only 0 and 1")
        return cls(tuple(int(c) for c in text), n_features, n_qubits)


@dataclass(frozen=True)
class CircuitSpec:
    """Decoded feature map: which features enter and how the circuit is built."""

    selected_features: tuple[int, ...]
    qubit_feature: tuple[int, ...]
    rotation_flags: tuple[int, ...]
    axis: str
    entangler_pairs: tuple[tuple[int, int], ...]
    repetitions: int

    @property
    def n_qubits(self) -> int:
        return len(self.qubit_feature)


@dataclass(frozen=True)
class GateCounts:
    local: int
    cnot: int

    @property
    def total(self) -> int:
        return self.local + self.cnot


def sub_seed_for(seed: int, bits) -> int:
    """Stable per-chromosome stream id: run seed combined with a CRC of the bits."""
    crc = zlib.crc32(bytes(int(b) for b in bits))
    return (int(seed) << 32) ^ crc


def decode(chromosome: Chromosome, sub_seed: int) -> CircuitSpec:
    """Read the bit fields into a CircuitSpec.

    An all-zero mask falls back to feature 0 so every chromosome stays
    evaluable. When the selected set and qubit count differ, the qubit ->
    feature assignment is drawn from a PRNG keyed by sub_seed: surplus
    features are subsampled, a shortfall is filled by cycling the selected
    list with the fill order shuffled.
    """
    p, n = chromosome.n_features, chromosome.n_qubits
    bits = chromosome.bits
    mask = bits[:p]
    rot = bits[p:p + n]
    axis_bits = bits[p + n:p + n + 2]
    n_pairs = n * (n - 1) // 2
    pair_bits = bits[p + n + 2:p + n + 2 + n_pairs]
    rep_bits = bits[p + n + 2 + n_pairs:]

    selected = tuple(i for i in range(p) if mask[i]) or (0,)
    rng = np.random.default_rng(sub_seed)
    if len(selected) == n:
        qubit_feature = selected
    elif len(selected) > n:
        chosen = rng.choice(len(selected), size=n, replace=False)
        qubit_feature = tuple(selected[i] for i in sorted(chosen))
    else:
        fill = np.array([selected[i % len(selected)] for i in range(n - len(selected))])
        rng.shuffle(fill)
        qubit_feature = selected + tuple(int(f) for f in fill)

    axis = AXES[2 * axis_bits[0] + axis_bits[1]]
    pairs = tuple(pr for pr, b in zip(qubit_pairs(n), pair_bits) if b)
    repetitions = 2 * rep_bits[0] + rep_bits[1] + 1
    return CircuitSpec(
        selected_features=selected,
        qubit_feature=qubit_feature,
        rotation_flags=rot,
        axis=axis,
        entangler_pairs=pairs,
        repetitions=repetitions,
    )


def gate_counts(spec: CircuitSpec) -> GateCounts:
    """Per-layer tally times repetitions; axis I disables the rotation layer."""
    n = spec.n_qubits
    active = sum(spec.rotation_flags) if spec.axis != "I" else 0
    per_layer_local = n + active + len(spec.entangler_pairs)
    d = spec.repetitions
    return GateCounts(local=d * per_layer_local, cnot=d * 2 * len(spec.entangler_pairs))


def random_chromosome(n_features: int, n_qubits: int, rng: np.random.Generator) -> Chromosome:
    length = chromosome_length(n_features, n_qubits)
    bits = rng.integers(0, 2, size=length)
    return Chromosome(tuple(int(b) for b in bits), n_features, n_qubits)
