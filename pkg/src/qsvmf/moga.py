"""NSGA-II over feature-map chromosomes: sorting, crowding, variation, loop.

All five objectives are minimized: (1 - validation accuracy, local gate
count, CNOT count, selected feature count, pairwise covariance score).
Every random draw comes from one Generator in a fixed order, so a (config,
evaluator) pair replays bit-identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .encoding import Chromosome, random_chromosome

N_OBJECTIVES = 5


class EvaluationError(RuntimeError):
    """An evaluator failed; the offending chromosome is named in the message."""


@dataclass
class Individual:
    chromosome: Chromosome
    objectives: np.ndarray
    rank: int = -1
    crowding: float = 0.0


@dataclass
class GaConfig:
    population_size: int = 100
    generations: int = 100
    crossover_prob: float = 0.2
    mutation_prob: float = 0.2
    tournament_size: int = 2
    seed: int = 0
    restarts: int = 1
    early_stop_accuracy: float | None = None

    def validate(self) -> None:
        if self.population_size < 4 or self.population_size % 2:
            raise ValueError("population_size must be an even number >= 4")
        if self.generations < 1:
            raise ValueError("generations must be positive")
        for name in ("crossover_prob", "mutation_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.tournament_size < 2:
            raise ValueError("tournament_size must be at least 2")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")


@dataclass
class EvolveResult:
    population: list[Individual]
    fronts: list[list[int]]
    history: np.ndarray  # rows: generation, best accuracy, then objective minima
    generations_run: int


def dominates(a: np.ndarray, b: np.ndarray) -> bool:
    """a dominates b: no objective worse, at least one strictly better."""
    return bool(np.all(a <= b) and np.any(a < b))


def fast_nondominated_sort(objectives: Sequence[np.ndarray]) -> list[list[int]]:
    """Deb's bookkeeping sort; returns fronts as index lists, best first.

    Within a front, indices keep ascending order.
    """
    n = len(objectives)
    dominated_by: list[list[int]] = [[] for _ in range(n)]
    counts = [0] * n
    fronts: list[list[int]] = [[]]
    for i in range(n):
        for j in range(i + 1, n):
            if dominates(objectives[i], objectives[j]):
                dominated_by[i].append(j)
                counts[j] += 1
            elif dominates(objectives[j], objectives[i]):
                dominated_by[j].append(i)
                counts[i] += 1
    for i in range(n):
        if counts[i] == 0:
            fronts[0].append(i)
    current = 0
    while fronts[current]:
        nxt: list[int] = []
        for i in fronts[current]:
            for j in dominated_by[i]:
                counts[j] -= 1
                if counts[j] == 0:
                    nxt.append(j)
        current += 1
        fronts.append(sorted(nxt))
    fronts.pop()
    return fronts


def crowding_distance(front_objectives: np.ndarray) -> np.ndarray:
    """Per-member crowding: boundary members inf, interiors the normalized
    neighbor gap summed over objectives; a zero-range objective adds 0."""
    F = np.asarray(front_objectives, dtype=np.float64)
    m = F.shape[0]
    dist = np.zeros(m)
    if m <= 2:
        dist[:] = np.inf
        return dist
    for k in range(F.shape[1]):
        order = np.argsort(F[:, k], kind="stable")
        lo, hi = F[order[0], k], F[order[-1], k]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        span = hi - lo
        if span <= 0:
            continue
        gaps = (F[order[2:], k] - F[order[:-2], k]) / span
        interior = order[1:-1]
        finite = np.isfinite(dist[interior])
        dist[interior[finite]] += gaps[finite]
    return dist


def _better(a: Individual, b: Individual, ia: int, ib: int) -> bool:
    """Tournament order: lower rank, then larger crowding, then lower index."""
    if a.rank != b.rank:
        return a.rank < b.rank
    if a.crowding != b.crowding:
        return a.crowding > b.crowding
    return ia < ib


def tournament_select(population: list[Individual], rng: np.random.Generator,
                      size: int = 2) -> int:
    draws = rng.integers(0, len(population), size=size)
    best = int(draws[0])
    for d in draws[1:]:
        d = int(d)
        if _better(population[d], population[best], d, best):
            best = d
    return best


def two_point_crossover(a: np.ndarray, b: np.ndarray, cut1: int, cut2: int):
    """Swap the [cut1, cut2) slice between two bit arrays; parents untouched."""
    if not 0 < cut1 < cut2 < a.shape[0] + 1:
        raise ValueError("cuts must satisfy 0 < cut1 < cut2 <= length")
    c1 = a.copy()
    c2 = b.copy()
    c1[cut1:cut2] = b[cut1:cut2]
    c2[cut1:cut2] = a[cut1:cut2]
    return c1, c2


def crossover(a: np.ndarray, b: np.ndarray, rng: np.random.Generator, prob: float):
    """With probability prob, two-point crossover at uniformly drawn cuts."""
    if rng.random() >= prob:
        return a.copy(), b.copy()
    L = a.shape[0]
    cuts = np.sort(rng.choice(L - 1, size=2, replace=False)) + 1
    return two_point_crossover(a, b, int(cuts[0]), int(cuts[1]))


def mutate(bits: np.ndarray, rng: np.random.Generator, prob: float) -> np.ndarray:
    """With probability prob, flip each bit independently with chance 1/L."""
    out = bits.copy()
    if rng.random() >= prob:
        return out
    flips = rng.random(out.shape[0]) < 1.0 / out.shape[0]
    out[flips] ^= 1
    return out


Evaluator = Callable[[Chromosome], np.ndarray]


def _evaluate(chromosome: Chromosome, evaluator: Evaluator) -> np.ndarray:
    try:
        obj = np.asarray(evaluator(chromosome), dtype=np.float64)
    except Exception as exc:
        raise EvaluationError(
            f"evaluator failed on chromosome {chromosome.to_string()}: {exc}"
        ) from exc
    if obj.shape != (N_OBJECTIVES,) or not np.all(np.isfinite(obj)):
        raise EvaluationError(
            f"evaluator returned a bad objective vector for {chromosome.to_string()}"
        )
    return obj


def _assign_ranks(population: list[Individual]) -> list[list[int]]:
    fronts = fast_nondominated_sort([ind.objectives for ind in population])
    for rank, front in enumerate(fronts):
        F = np.array([population[i].objectives for i in front])
        crowd = crowding_distance(F)
        for pos, i in enumerate(front):
            population[i].rank = rank
            population[i].crowding = float(crowd[pos])
    return fronts


def _history_row(generation: int, population: list[Individual]) -> np.ndarray:
    objs = np.array([ind.objectives for ind in population])
    mins = objs.min(axis=0)
    return np.concatenate(([generation, 1.0 - mins[0]], mins[1:]))


def evolve(config: GaConfig, n_features: int, n_qubits: int,
           evaluator: Evaluator) -> EvolveResult:
    """One GA run. The caller owns restarts and the fitness function."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    pop_size = config.population_size
    population = []
    for _ in range(pop_size):
        chrom = random_chromosome(n_features, n_qubits, rng)
        population.append(Individual(chrom, _evaluate(chrom, evaluator)))
    _assign_ranks(population)
    history = [_history_row(0, population)]
    generations_run = 0
    for gen in range(1, config.generations + 1):
        offspring: list[Individual] = []
        while len(offspring) < pop_size:
            pa = population[tournament_select(population, rng, config.tournament_size)]
            pb = population[tournament_select(population, rng, config.tournament_size)]
            bits_a = np.array(pa.chromosome.bits, dtype=np.int64)
            bits_b = np.array(pb.chromosome.bits, dtype=np.int64)
            ca, cb = crossover(bits_a, bits_b, rng, config.crossover_prob)
            for child_bits in (mutate(ca, rng, config.mutation_prob),
                               mutate(cb, rng, config.mutation_prob)):
                if len(offspring) == pop_size:
                    break
                chrom = Chromosome(tuple(int(v) for v in child_bits),
                                   n_features, n_qubits)
                offspring.append(Individual(chrom, _evaluate(chrom, evaluator)))
        merged = population + offspring
        fronts = fast_nondominated_sort([ind.objectives for ind in merged])
        survivors: list[Individual] = []
        for front in fronts:
            if len(survivors) + len(front) <= pop_size:
                survivors.extend(merged[i] for i in front)
                if len(survivors) == pop_size:
                    break
                continue
            F = np.array([merged[i].objectives for i in front])
            crowd = crowding_distance(F)
            # truncate by descending crowding; ties keep the lower merged index
            order = sorted(range(len(front)), key=lambda t: (-crowd[t], front[t]))
            need = pop_size - len(survivors)
            survivors.extend(merged[front[t]] for t in order[:need])
            break
        population = survivors
        _assign_ranks(population)
        history.append(_history_row(gen, population))
        generations_run = gen
        if config.early_stop_accuracy is not None:
            best_acc = 1.0 - min(ind.objectives[0] for ind in population)
            if best_acc >= config.early_stop_accuracy:
                break
    fronts = _assign_ranks(population)
    return EvolveResult(
        population=population,
        fronts=fronts,
        history=np.array(history),
        generations_run=generations_run,
    )
