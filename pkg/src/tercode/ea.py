"""Evolutionary search for a good matching-vector set.

An individual is a string of L*K genes over {0,1,U}; gene slice
[i*K, (i+1)*K) is vector i.  Fitness is the compression rate reached by
covering and Huffman-coding the block sequence with those vectors, so
evaluation is pure and the only randomness lives in the generation of
individuals.  Selection is elitist: the best S of S parents plus C
children survive, which makes the best-fitness series nondecreasing.

When the all-U reservation is on, the last vector is pinned to all U and
no operator touches it, so every individual can cover every block
sequence and the infeasibility penalty is unreachable.
"""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass, field, fields, replace
from typing import Sequence

from .baseline9c import nine_mvs
from .codec import (
    BlockStats,
    as_block_stats,
    compression_rate,
    match_frequencies,
    merge_subsumed_frequencies,
    mv_masks,
    payload_bits_for,
)
from .core import InputBlock
from .errors import InvalidConfig

GENE_ALPHABET = "01U"

# Fitness assigned to individuals whose vectors leave blocks uncovered;
# always below any reachable compression rate.
INFEASIBLE_BASE = -1000.0


@dataclass
class EaConfig:
    """Search parameters; defaults follow the reference experiment setup."""

    k: int = 12
    l: int = 64
    population_size: int = 10
    children_per_generation: int = 5
    p_crossover: float = 0.3
    p_mutation: float = 0.3
    p_inversion: float = 0.1
    stagnation_limit: int = 500
    max_evaluations: int | None = None
    rng_seed: int = 0
    reserve_all_u: bool = True
    runs: int = 5
    subsume: bool = False
    uniform_crossover: bool = False
    seed_nine_code: bool = False

    def __post_init__(self):
        for name in ("k", "l", "population_size", "children_per_generation",
                     "stagnation_limit", "runs"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise InvalidConfig(f"{name} must be an integer, got {value!r}")
        if self.k < 1 or self.l < 1:
            raise InvalidConfig("k and l must be >= 1")
        if self.population_size < 1 or self.children_per_generation < 1:
            raise InvalidConfig("population and children counts must be >= 1")
        probs = (self.p_crossover, self.p_mutation, self.p_inversion)
        if any(p < 0 or p > 1 for p in probs) or sum(probs) > 1 + 1e-12:
            raise InvalidConfig("operator probabilities must lie in [0,1] and sum to <= 1")
        if self.stagnation_limit < 1:
            raise InvalidConfig("stagnation_limit must be >= 1")
        if self.max_evaluations is None:
            self.max_evaluations = (
                100 * self.population_size * self.children_per_generation
            )
        if self.max_evaluations < 1:
            raise InvalidConfig("max_evaluations must be >= 1")
        if self.runs < 1:
            raise InvalidConfig("runs must be >= 1")
        if self.seed_nine_code and self.k % 2:
            raise InvalidConfig("nine-code seeding needs an even block length")

    @property
    def n_genes(self) -> int:
        return self.k * self.l

    @classmethod
    def from_file(cls, path: str) -> "EaConfig":
        """Load key=value lines ('#' comments allowed) into a config."""
        names = {f.name for f in fields(cls)}
        values = {}
        with open(path, encoding="utf-8") as handle:
            for lineno, raw in enumerate(handle, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise InvalidConfig(f"{path}:{lineno}: expected key=value")
                key, _, text = line.partition("=")
                key = key.strip().replace("-", "_")
                if key not in names:
                    raise InvalidConfig(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = _parse_value(text.strip())
        return cls(**values)


def _parse_value(text: str):
    lowered = text.lower()
    if lowered in ("true", "yes", "on"):
        return True
    if lowered in ("false", "no", "off"):
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise InvalidConfig(f"cannot parse config value {text!r}") from None


@dataclass
class Individual:
    """An ordered vector set as a gene string, plus its cached fitness."""

    genes: str
    k: int
    reserve_all_u: bool
    fitness: float | None = None

    @property
    def n_vectors(self) -> int:
        return len(self.genes) // self.k

    def vector_symbols(self) -> list[str]:
        return [
            self.genes[i * self.k : (i + 1) * self.k]
            for i in range(self.n_vectors)
        ]


def _reimpose_reservation(genes: str, k: int, reserved: bool) -> str:
    if not reserved:
        return genes
    return genes[:-k] + "U" * k


def random_individual(cfg: EaConfig, rng: random.Random) -> Individual:
    """Uniform random genes; the reserved tail vector is pinned to all U."""
    body = cfg.n_genes - cfg.k if cfg.reserve_all_u else cfg.n_genes
    genes = "".join(rng.choice(GENE_ALPHABET) for _ in range(body))
    if cfg.reserve_all_u:
        genes += "U" * cfg.k
    return Individual(genes, cfg.k, cfg.reserve_all_u)


def crossover(
    a: Individual,
    b: Individual,
    rng: random.Random,
    uniform: bool = False,
) -> tuple[Individual, Individual]:
    """Two children exchanging parent genes: one cut point by default,
    per-gene coin flips in uniform mode."""
    n = len(a.genes)
    if uniform:
        picks = [rng.getrandbits(1) for _ in range(n)]
        g1 = "".join(a.genes[i] if p else b.genes[i] for i, p in enumerate(picks))
        g2 = "".join(b.genes[i] if p else a.genes[i] for i, p in enumerate(picks))
    elif n < 2:
        g1, g2 = a.genes, b.genes
    else:
        p = rng.randrange(1, n)
        g1 = a.genes[:p] + b.genes[p:]
        g2 = b.genes[:p] + a.genes[p:]
    g1 = _reimpose_reservation(g1, a.k, a.reserve_all_u)
    g2 = _reimpose_reservation(g2, a.k, a.reserve_all_u)
    return (
        Individual(g1, a.k, a.reserve_all_u),
        Individual(g2, a.k, a.reserve_all_u),
    )


def mutate(a: Individual, rng: random.Random) -> Individual:
    """Redraw one non-reserved gene uniformly (it may keep its old value)."""
    body = len(a.genes) - a.k if a.reserve_all_u else len(a.genes)
    if body == 0:
        return Individual(a.genes, a.k, a.reserve_all_u)
    pos = rng.randrange(body)
    ch = rng.choice(GENE_ALPHABET)
    return Individual(
        a.genes[:pos] + ch + a.genes[pos + 1 :], a.k, a.reserve_all_u
    )


def invert(a: Individual, rng: random.Random) -> Individual:
    """Reverse the gene order between two uniformly drawn positions."""
    n = len(a.genes)
    i, j = rng.randrange(n), rng.randrange(n)
    p, q = min(i, j), max(i, j)
    genes = a.genes[:p] + a.genes[p : q + 1][::-1] + a.genes[q + 1 :]
    genes = _reimpose_reservation(genes, a.k, a.reserve_all_u)
    return Individual(genes, a.k, a.reserve_all_u)


def _clone(a: Individual) -> Individual:
    return Individual(a.genes, a.k, a.reserve_all_u)


def genome_masks(
    genes: str, k: int
) -> tuple[list[int], list[int], list[int]]:
    """(ones, zeros, U counts) for each K-gene vector slice."""
    ones, zeros, n_us = [], [], []
    for i in range(0, len(genes), k):
        seg = genes[i : i + k]
        o, z = mv_masks(seg)
        ones.append(o)
        zeros.append(z)
        n_us.append(seg.count("U"))
    return ones, zeros, n_us


def evaluate_fitness(
    ind: Individual,
    blocks: Sequence[InputBlock] | BlockStats,
    original_bits: int,
    subsume: bool = False,
) -> float:
    """Compression rate of the individual's vector set over ``blocks``.

    Infeasible coverings yield INFEASIBLE_BASE minus the unmatched block
    count instead of an error, so the search can rank near-feasible
    individuals.
    """
    stats = as_block_stats(blocks)
    ones, zeros, n_us = genome_masks(ind.genes, ind.k)
    freqs, _, unmatched, _ = match_frequencies(stats, ones, zeros, n_us)
    if unmatched:
        return INFEASIBLE_BASE - unmatched
    if subsume:
        freqs, _ = merge_subsumed_frequencies(freqs, ones, zeros, n_us)
    return compression_rate(original_bits, payload_bits_for(freqs, n_us))


@dataclass
class RunStats:
    """One evolve() run condensed for reporting."""

    seed: int
    rate: float
    generations: int
    evaluations: int
    termination: str


@dataclass
class EvolutionReport:
    """Outcome of one or several evolution runs."""

    best: Individual
    best_fitness: float
    history: list[float]
    generations: int
    evaluations: int
    termination: str
    min_fitness_evaluated: float
    run_rates: list[float]
    mean_rate: float
    best_rate: float
    per_run: list[RunStats] = field(default_factory=list)


def evolve(
    blocks: Sequence[InputBlock] | BlockStats,
    original_bits: int,
    cfg: EaConfig,
) -> EvolutionReport:
    """One elitist evolution run, bit-for-bit reproducible from the seed.

    Per generation, C child slots are filled by drawing an operator per
    slot (crossover fills two slots when two remain) on uniformly chosen
    parents; the residual probability mass clones a parent unchanged.
    Survivors are the best S of S+C, incumbents winning ties.  The run
    stops after ``stagnation_limit`` generations without improvement or
    once ``max_evaluations`` fitness lookups occurred (cache hits count:
    caching only skips recomputation and cannot change the outcome).
    """
    stats = as_block_stats(blocks)
    if stats.total == 0:
        raise InvalidConfig("cannot evolve against an empty block sequence")
    rng = random.Random(cfg.rng_seed)
    cache: dict[str, float] = {}
    evaluations = 0
    min_seen = float("inf")

    def fitness(ind: Individual) -> float:
        nonlocal evaluations, min_seen
        evaluations += 1
        value = cache.get(ind.genes)
        if value is None:
            value = evaluate_fitness(ind, stats, original_bits, subsume=cfg.subsume)
            cache[ind.genes] = value
        ind.fitness = value
        if value < min_seen:
            min_seen = value
        return value

    population = [random_individual(cfg, rng) for _ in range(cfg.population_size)]
    if cfg.seed_nine_code:
        injected = "".join(v.symbols for v in nine_mvs(cfg.k))[: cfg.n_genes]
        genes = injected + population[0].genes[len(injected) :]
        genes = _reimpose_reservation(genes, cfg.k, cfg.reserve_all_u)
        population[0] = Individual(genes, cfg.k, cfg.reserve_all_u)
    for ind in population:
        fitness(ind)
    population.sort(key=lambda ind: -ind.fitness)
    best = population[0]
    history = [best.fitness]
    generations = 0
    stagnant = 0
    termination = "max_evaluations"
    while evaluations < cfg.max_evaluations:
        if stagnant >= cfg.stagnation_limit:
            termination = "stagnation"
            break
        children: list[Individual] = []
        while len(children) < cfg.children_per_generation:
            roll = rng.random()
            if roll < cfg.p_crossover:
                first, second = crossover(
                    rng.choice(population),
                    rng.choice(population),
                    rng,
                    uniform=cfg.uniform_crossover,
                )
                children.append(first)
                if len(children) < cfg.children_per_generation:
                    children.append(second)
            elif roll < cfg.p_crossover + cfg.p_mutation:
                children.append(mutate(rng.choice(population), rng))
            elif roll < cfg.p_crossover + cfg.p_mutation + cfg.p_inversion:
                children.append(invert(rng.choice(population), rng))
            else:
                children.append(_clone(rng.choice(population)))
        for child in children:
            fitness(child)
        pool = population + children
        pool.sort(key=lambda ind: -ind.fitness)
        population = pool[: cfg.population_size]
        generations += 1
        if population[0].fitness > best.fitness:
            best = population[0]
            stagnant = 0
        else:
            stagnant += 1
        history.append(best.fitness)
    return EvolutionReport(
        best=best,
        best_fitness=best.fitness,
        history=history,
        generations=generations,
        evaluations=evaluations,
        termination=termination,
        min_fitness_evaluated=min_seen,
        run_rates=[best.fitness],
        mean_rate=best.fitness,
        best_rate=best.fitness,
        per_run=[
            RunStats(cfg.rng_seed, best.fitness, generations, evaluations, termination)
        ],
    )


def run_many(
    blocks: Sequence[InputBlock] | BlockStats,
    original_bits: int,
    cfg: EaConfig,
) -> EvolutionReport:
    """``cfg.runs`` independent evolve() runs with seeds derived from
    ``cfg.rng_seed``; reports per-run rates, their mean and their max."""
    stats = as_block_stats(blocks)
    seed_source = random.Random(cfg.rng_seed)
    seeds = [seed_source.randrange(2**62) for _ in range(cfg.runs)]
    reports = [
        evolve(stats, original_bits, replace(cfg, rng_seed=seed)) for seed in seeds
    ]
    winner = max(reports, key=lambda r: r.best_fitness)
    rates = [r.best_fitness for r in reports]
    return EvolutionReport(
        best=winner.best,
        best_fitness=winner.best_fitness,
        history=winner.history,
        generations=sum(r.generations for r in reports),
        evaluations=sum(r.evaluations for r in reports),
        termination=winner.termination,
        min_fitness_evaluated=min(r.min_fitness_evaluated for r in reports),
        run_rates=rates,
        mean_rate=statistics.fmean(rates),
        best_rate=max(rates),
        per_run=[r.per_run[0] for r in reports],
    )
