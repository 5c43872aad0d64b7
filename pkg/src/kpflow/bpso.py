"""Binary particle swarm optimizer for the 0/1 knapsack.

Positions are bit vectors, velocities are real vectors updated with the
classic inertia + cognitive + social rule, and each bit is re-sampled
through a sigmoid transfer of its velocity.  Constraint violations are
penalized in the fitness rather than forbidden, and the final answer is
repaired to feasibility if the penalty did not push it there.

Every particle draws from its own random stream, spawned from the master
seed, and all draws a particle will ever make are generated up front.
Results are therefore reproducible and independent of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .knapsack import KnapsackInstance


class DimensionMismatch(ValueError):
    """Position length does not match the instance's item count."""


@dataclass(frozen=True)
class BpsoConfig:
    num_particles: int = 300
    max_iterations: int = 30
    c1: float = 2.0
    c2: float = 2.0
    inertia_start: float = 0.9
    inertia_end: float = 0.4
    v_min: float = -6.0
    v_max: float = 6.0
    penalty_q: float | str = "auto"
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.num_particles < 1:
            raise ValueError("num_particles must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not (self.c1 > 0 and self.c2 > 0):
            raise ValueError("c1 and c2 must be positive")
        if not self.v_min < self.v_max:
            raise ValueError("v_min must be below v_max")
        if self.inertia_start < self.inertia_end:
            raise ValueError("inertia_start must be >= inertia_end")
        for name in ("inertia_start", "inertia_end"):
            w = getattr(self, name)
            if not 0.4 <= w <= 0.9:
                raise ValueError(f"{name} must lie in [0.4, 0.9], got {w}")
        if isinstance(self.penalty_q, str):
            if self.penalty_q != "auto":
                raise ValueError("penalty_q must be a positive number or 'auto'")
        elif self.penalty_q <= 0:
            raise ValueError("penalty_q must be positive")


@dataclass
class Particle:
    """Read-only view of one particle's state."""

    position: np.ndarray
    velocity: np.ndarray
    personal_best_position: np.ndarray
    personal_best_fitness: float


@dataclass
class Swarm:
    """Full swarm state between iterations.

    ``tape`` holds every uniform draw each particle will consume over the
    whole run: n position draws + n velocity draws at init, then per
    iteration n r1 + n r2 + n transfer draws.
    """

    positions: np.ndarray
    velocities: np.ndarray
    pbest_positions: np.ndarray
    pbest_fitness: np.ndarray
    gbest_position: np.ndarray
    gbest_fitness: float
    penalty_q: float
    tape: np.ndarray = field(repr=False)

    @property
    def num_particles(self) -> int:
        return self.positions.shape[0]

    @property
    def dimensions(self) -> int:
        return self.positions.shape[1]

    def particle(self, i: int) -> Particle:
        return Particle(
            self.positions[i].copy(),
            self.velocities[i].copy(),
            self.pbest_positions[i].copy(),
            float(self.pbest_fitness[i]),
        )


@dataclass(frozen=True)
class SwarmResult:
    best_position: tuple[int, ...]
    best_fitness: float
    feasible: bool
    iterations_run: int
    fitness_trace: tuple[float, ...]
    repaired: bool = False

    @property
    def selected_ids(self) -> tuple[int, ...]:
        return tuple(i for i, b in enumerate(self.best_position) if b)


def resolve_penalty(instance: KnapsackInstance, config: BpsoConfig) -> float:
    """'auto' penalty: one KB of violation outweighs the entire value pool."""
    if config.penalty_q == "auto":
        return 1.0 + float(instance.values().sum())
    return float(config.penalty_q)


def fitness(position, instance: KnapsackInstance, penalty_q: float) -> float:
    """Penalized objective: total value minus penalty_q per KB of overweight."""
    pos = np.asarray(position, dtype=np.int64)
    if pos.shape != (instance.n,):
        raise DimensionMismatch(f"position length {pos.shape} does not match {instance.n} items")
    total_value = float(pos @ instance.values()) if instance.n else 0.0
    total_weight = float(pos @ instance.weights()) if instance.n else 0.0
    return total_value - penalty_q * abs(min(0.0, instance.capacity - total_weight))


def _fitness_batch(positions: np.ndarray, weights: np.ndarray, values: np.ndarray,
                   capacity: int, penalty_q: float) -> np.ndarray:
    total_value = positions @ values
    total_weight = positions @ weights
    return total_value - penalty_q * np.abs(np.minimum(0.0, capacity - total_weight))


def _tape_length(n: int, max_iterations: int) -> int:
    return 2 * n + 3 * n * max_iterations


def initialize_swarm(instance: KnapsackInstance, config: BpsoConfig) -> Swarm:
    """Random initial swarm: fair coin per bit, uniform velocities in range."""
    n, num = instance.n, config.num_particles
    streams = np.random.SeedSequence(config.rng_seed).spawn(num)
    length = _tape_length(n, config.max_iterations)
    tape = np.empty((num, length), dtype=np.float64)
    for i, ss in enumerate(streams):
        tape[i] = np.random.Generator(np.random.PCG64(ss)).random(length)

    positions = (tape[:, :n] >= 0.5).astype(np.int8)
    velocities = config.v_min + tape[:, n:2 * n] * (config.v_max - config.v_min)

    penalty_q = resolve_penalty(instance, config)
    weights, values = instance.weights(), instance.values()
    fit = _fitness_batch(positions, weights, values, instance.capacity, penalty_q)

    best = int(np.argmax(fit)) if num else 0
    return Swarm(
        positions=positions,
        velocities=velocities,
        pbest_positions=positions.copy(),
        pbest_fitness=fit.astype(np.float64),
        gbest_position=positions[best].copy(),
        gbest_fitness=float(fit[best]) if n or num else 0.0,
        penalty_q=penalty_q,
        tape=tape,
    )


def _inertia(config: BpsoConfig, t: int) -> float:
    if config.max_iterations == 1:
        return config.inertia_start
    frac = (t - 1) / (config.max_iterations - 1)
    return config.inertia_start + (config.inertia_end - config.inertia_start) * frac


def step(swarm: Swarm, instance: KnapsackInstance, config: BpsoConfig, t: int) -> Swarm:
    """Advance the swarm by one iteration (t is 1-based).

    Velocities follow the inertia/cognitive/social update and are clamped
    to [v_min, v_max]; each bit is then set with probability
    sigmoid(velocity); personal and global bests are refreshed afterwards
    (strict improvement only, lowest particle index wins ties).
    """
    if not 1 <= t <= config.max_iterations:
        raise ValueError(f"iteration {t} outside [1, {config.max_iterations}]")
    n = swarm.dimensions
    base = 2 * n + (t - 1) * 3 * n
    r1 = swarm.tape[:, base:base + n]
    r2 = swarm.tape[:, base + n:base + 2 * n]
    u = swarm.tape[:, base + 2 * n:base + 3 * n]

    w = _inertia(config, t)
    x = swarm.positions.astype(np.float64)
    vel = (w * swarm.velocities
           + config.c1 * r1 * (swarm.pbest_positions - x)
           + config.c2 * r2 * (swarm.gbest_position[None, :] - x))
    np.clip(vel, config.v_min, config.v_max, out=vel)
    swarm.velocities = vel

    swarm.positions = (u < 1.0 / (1.0 + np.exp(-vel))).astype(np.int8)

    fit = _fitness_batch(swarm.positions, instance.weights(), instance.values(),
                         instance.capacity, swarm.penalty_q)
    improved = fit > swarm.pbest_fitness
    swarm.pbest_positions[improved] = swarm.positions[improved]
    swarm.pbest_fitness[improved] = fit[improved]

    if fit.size:
        best = int(np.argmax(fit))
        if float(fit[best]) > swarm.gbest_fitness:
            swarm.gbest_fitness = float(fit[best])
            swarm.gbest_position = swarm.positions[best].copy()
    return swarm


def _repair(position: np.ndarray, instance: KnapsackInstance) -> np.ndarray:
    """Drop set bits in increasing value/weight density until feasible."""
    bits = position.copy()
    overweight = int(bits @ instance.weights()) - instance.capacity
    if overweight <= 0:
        return bits
    chosen = [i for i in range(instance.n) if bits[i]]
    chosen.sort(key=lambda i: (Fraction(instance.items[i].value, instance.items[i].weight)
                               if instance.items[i].weight else Fraction(1 << 62), i))
    for i in chosen:
        if overweight <= 0:
            break
        if instance.items[i].weight == 0:
            continue
        bits[i] = 0
        overweight -= instance.items[i].weight
    return bits


def solve(instance: KnapsackInstance, config: BpsoConfig) -> SwarmResult:
    """Run the full optimization and return a feasible best selection."""
    swarm = initialize_swarm(instance, config)
    trace = [swarm.gbest_fitness]
    for t in range(1, config.max_iterations + 1):
        step(swarm, instance, config, t)
        trace.append(swarm.gbest_fitness)

    best = swarm.gbest_position.astype(np.int64)
    repaired = False
    if instance.n and int(best @ instance.weights()) > instance.capacity:
        best = _repair(best, instance)
        repaired = True
    best_fitness = fitness(best, instance, swarm.penalty_q) if instance.n else 0.0

    return SwarmResult(
        best_position=tuple(int(b) for b in best),
        best_fitness=float(best_fitness),
        feasible=True,
        iterations_run=config.max_iterations,
        fitness_trace=tuple(trace),
        repaired=repaired,
    )
