"""Jellyfish-swarm optimization with the self-upgraded extensions.

A population of candidate vectors drifts by three motion rules selected by
a time-control schedule: following the "ocean current" toward the best
candidate (exploration), small passive drift inside the swarm (Type A),
and directed active motion toward a fitter neighbor (Type B). The
self-upgraded variant adds an attraction term to the active move and a
differential population-update phase after the motion phase. Candidates
leaving the box re-enter through the opposite boundary; moves are kept
only when they improve fitness, so the best-so-far trace never increases.

Per-candidate draw order is part of each move's contract (tests replay
the documented sequence against a recorded RNG):

* time control: one uniform draw
* ocean current: two scalar draws (r1, r2)
* passive: one draw per component (or one scalar, by config)
* active: neighbor index, one draw per component for the step, then in
  upgraded mode two scalar draws (r_n, r_n1) for the attraction term
* population update: three distinct non-self indices, then one scalar draw
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError

__all__ = [
    "SwarmConfig",
    "Swarm",
    "OptimizeResult",
    "Benchmark",
    "initialize",
    "time_control",
    "ocean_current_move",
    "swarm_passive_move",
    "swarm_active_move",
    "population_update",
    "boundary_reentry",
    "optimize",
    "benchmark_objectives",
]

MODE_SUJFO = "sujfo"
MODE_JFO = "jfo"


@dataclass
class SwarmConfig:
    """Swarm knobs. Defaults follow the published parameter study.

    population 10, bounds [0, 1], distribution coefficient beta = 3,
    passive motion coefficient gamma = 0.1, active-move attraction
    coefficient 3 (the formula reuses beta's symbol; kept separate here),
    inertia endpoints i_max = i_min = 0.9 as printed (i_min looks like a
    typo for 0.4 in the source; exposed rather than silently fixed) and
    r0 = 0.7 for the optional inertia schedule. The schedule replaces the
    ocean-current move's outer uniform draw with
    r0 * i_min + (i_max - i_min) * t / t_max when enabled; the default
    path uses plain uniform draws.
    """

    population: int = 10
    t_max: int = 100
    lower_bound: float | np.ndarray = 0.0
    upper_bound: float | np.ndarray = 1.0
    beta: float = 3.0
    gamma: float = 0.1
    active_attraction: float = 3.0
    inertia_max: float = 0.9
    inertia_min: float = 0.9
    r0: float = 0.7
    use_inertia_schedule: bool = False
    passive_scalar_draw: bool = False

    def bounds(self, dimension: int) -> tuple[np.ndarray, np.ndarray]:
        lower = np.broadcast_to(np.asarray(self.lower_bound, dtype=np.float64), (dimension,)).copy()
        upper = np.broadcast_to(np.asarray(self.upper_bound, dtype=np.float64), (dimension,)).copy()
        return lower, upper

    def validate(self, dimension: int) -> None:
        if self.population < 2:
            raise ConfigError("population must be >= 2")
        if self.t_max < 1:
            raise ConfigError("t_max must be >= 1")
        if self.beta <= 0:
            raise ConfigError("beta must be > 0")
        if self.gamma < 0:
            raise ConfigError("gamma must be >= 0")
        if dimension < 1:
            raise ConfigError("dimension must be >= 1")
        lower, upper = self.bounds(dimension)
        if not np.all(lower < upper):
            raise ConfigError("lower bound must be strictly below upper bound")


@dataclass
class Swarm:
    positions: np.ndarray  # (population, dimension)
    fitnesses: np.ndarray  # (population,)
    best_position: np.ndarray
    best_fitness: float
    iteration: int = 0

    @property
    def population(self) -> int:
        return self.positions.shape[0]

    @property
    def dimension(self) -> int:
        return self.positions.shape[1]


def initialize(objective, config: SwarmConfig, dimension: int, rng) -> Swarm:
    """Uniform-random population in the box, with fitnesses and best recorded."""
    config.validate(dimension)
    lower, upper = config.bounds(dimension)
    positions = rng.uniform(lower, upper, size=(config.population, dimension))
    fitnesses = np.array([float(objective(p)) for p in positions])
    fitnesses[~np.isfinite(fitnesses)] = np.inf
    best = int(np.argmin(fitnesses))
    return Swarm(
        positions=positions,
        fitnesses=fitnesses,
        best_position=positions[best].copy(),
        best_fitness=float(fitnesses[best]),
    )


def time_control(t: int, t_max: int, rng) -> float:
    """c(t) = |(1 - t/t_max) * (2 u - 1)| with u uniform; always in [0, 1]."""
    if t_max < 1:
        raise DomainError("t_max must be >= 1")
    if not 0 <= t <= t_max:
        raise DomainError(f"iteration {t} outside [0, {t_max}]")
    return abs((1.0 - t / t_max) * (2.0 * rng.random() - 1.0))


def _inertia_schedule(config: SwarmConfig, t: int, t_max: int) -> float:
    return config.r0 * config.inertia_min + (config.inertia_max - config.inertia_min) * t / t_max


def ocean_current_move(swarm: Swarm, config: SwarmConfig, i: int, rng, r1: float | None = None) -> np.ndarray:
    """Drift toward the best candidate minus the beta-scaled mean attraction.

    new = pos_i + r1 * (best - beta * r2 * mean_of_positions), with r1, r2
    independent scalar draws (r1 may be supplied by the inertia schedule).
    """
    if r1 is None:
        r1 = rng.random()
    r2 = rng.random()
    mu = swarm.positions.mean(axis=0)
    return swarm.positions[i] + r1 * (swarm.best_position - config.beta * r2 * mu)


def swarm_passive_move(swarm: Swarm, config: SwarmConfig, i: int, rng) -> np.ndarray:
    """Type A: drift by gamma * u * (upper - lower) around the own position."""
    lower, upper = config.bounds(swarm.dimension)
    if config.passive_scalar_draw:
        u = rng.random()
    else:
        u = rng.random(swarm.dimension)
    return swarm.positions[i] + config.gamma * u * (upper - lower)


def swarm_active_move(swarm: Swarm, config: SwarmConfig, i: int, rng, upgraded: bool = True) -> np.ndarray:
    """Type B: step toward (or away from) a random neighbor by fitness.

    The step is u * direction where direction points from the worse to the
    better of the pair. In upgraded mode the attraction term
    r_n * (best - a * r_n1 * mean) is added, a being `active_attraction`.
    """
    n = swarm.population
    if n < 2:
        raise ConfigError("active move needs a population of at least 2")
    j = int(rng.integers(n - 1))
    if j >= i:
        j += 1
    if swarm.fitnesses[i] >= swarm.fitnesses[j]:
        direction = swarm.positions[j] - swarm.positions[i]
    else:
        direction = swarm.positions[i] - swarm.positions[j]
    step = rng.random(swarm.dimension) * direction
    new = swarm.positions[i] + step
    if upgraded:
        r_n = rng.random()
        r_n1 = rng.random()
        mu = swarm.positions.mean(axis=0)
        new = new + r_n * (swarm.best_position - config.active_attraction * r_n1 * mu)
    return new


def population_update(swarm: Swarm, i: int, rng) -> np.ndarray | None:
    """Differential update toward two random peers and the best candidate.

    new = pos_i + r * (pos_R1 - pos_R2) + (1 - r) * (best - pos_R3) with
    R1, R2, R3 distinct from each other and from i. Returns None when the
    population is too small to pick them (caller records the skip).
    """
    n = swarm.population
    if n < 4:
        return None
    pool = np.delete(np.arange(n), i)
    r1, r2, r3 = pool[rng.choice(n - 1, size=3, replace=False)]
    r = rng.random()
    return (
        swarm.positions[i]
        + r * (swarm.positions[r1] - swarm.positions[r2])
        + (1.0 - r) * (swarm.best_position - swarm.positions[r3])
    )


def boundary_reentry(position, lower, upper) -> np.ndarray:
    """Re-enter through the opposite face, repeated until inside the box."""
    pos = np.array(position, dtype=np.float64)
    lower = np.broadcast_to(np.asarray(lower, dtype=np.float64), pos.shape)
    upper = np.broadcast_to(np.asarray(upper, dtype=np.float64), pos.shape)
    if not np.all(np.isfinite(pos)):
        raise DomainError("cannot re-enter a non-finite position")
    while True:
        over = pos > upper
        under = pos < lower
        if not (over.any() or under.any()):
            return pos
        pos = np.where(over, pos - upper + lower, pos)
        pos = np.where(under, pos - lower + upper, pos)


@dataclass
class OptimizeResult:
    best_position: np.ndarray
    best_fitness: float
    trace: list  # rows (iteration, best_fitness, mean_fitness)
    counters: dict = field(default_factory=dict)
    n_rejected: int = 0
    population_update_skipped: bool = False

    def trace_array(self) -> np.ndarray:
        return np.array(self.trace, dtype=np.float64)


def optimize(
    objective,
    config: SwarmConfig,
    dimension: int,
    rng,
    mode: str = MODE_SUJFO,
    initial_positions: np.ndarray | None = None,
) -> OptimizeResult:
    """Run the swarm for t_max iterations and return the best point found.

    Per iteration, each candidate draws its own time-control value c(t):
    c >= 0.5 follows the ocean current; otherwise an extra uniform draw u
    selects passive motion (u > 1 - c) or active motion. In `sujfo` mode a
    second phase applies the population update to every candidate; `jfo`
    runs the plain baseline (no update phase, no upgraded active term).
    Every new position re-enters the box and is kept only if it improves
    that candidate's fitness; non-finite objective values reject the move.

    `initial_positions` optionally overwrites the first rows of the
    uniform initial population (clipped to bounds) so externally
    pretrained weights can seed the search.
    """
    if mode not in (MODE_SUJFO, MODE_JFO):
        raise ConfigError(f"unknown mode {mode!r}")
    upgraded = mode == MODE_SUJFO
    swarm = initialize(objective, config, dimension, rng)
    lower, upper = config.bounds(dimension)

    if initial_positions is not None:
        seeds = np.atleast_2d(np.asarray(initial_positions, dtype=np.float64))
        if seeds.shape[1] != dimension:
            raise ConfigError("initial_positions dimension mismatch")
        k = min(seeds.shape[0], config.population)
        swarm.positions[:k] = np.clip(seeds[:k], lower, upper)
        for idx in range(k):
            f = float(objective(swarm.positions[idx]))
            swarm.fitnesses[idx] = f if np.isfinite(f) else np.inf
        best = int(np.argmin(swarm.fitnesses))
        if swarm.fitnesses[best] < swarm.best_fitness:
            swarm.best_fitness = float(swarm.fitnesses[best])
            swarm.best_position = swarm.positions[best].copy()

    counters = {"ocean_current": 0, "passive": 0, "active": 0, "population_update": 0}
    n_rejected = 0
    pop_update_skipped = False
    trace = [(0, swarm.best_fitness, float(swarm.fitnesses.mean()))]

    def try_accept(i: int, candidate: np.ndarray) -> None:
        nonlocal n_rejected
        candidate = boundary_reentry(candidate, lower, upper)
        f = float(objective(candidate))
        if not np.isfinite(f):
            n_rejected += 1
            return
        if f < swarm.fitnesses[i]:
            swarm.positions[i] = candidate
            swarm.fitnesses[i] = f
            if f < swarm.best_fitness:
                swarm.best_fitness = f
                swarm.best_position = candidate.copy()

    for t in range(1, config.t_max + 1):
        swarm.iteration = t
        for i in range(config.population):
            c = time_control(t, config.t_max, rng)
            if c >= 0.5:
                counters["ocean_current"] += 1
                r1 = _inertia_schedule(config, t, config.t_max) if config.use_inertia_schedule else None
                candidate = ocean_current_move(swarm, config, i, rng, r1=r1)
            elif rng.random() > (1.0 - c):
                counters["passive"] += 1
                candidate = swarm_passive_move(swarm, config, i, rng)
            else:
                counters["active"] += 1
                candidate = swarm_active_move(swarm, config, i, rng, upgraded=upgraded)
            try_accept(i, candidate)
        if upgraded:
            for i in range(config.population):
                candidate = population_update(swarm, i, rng)
                if candidate is None:
                    pop_update_skipped = True
                    continue
                counters["population_update"] += 1
                try_accept(i, candidate)
        trace.append((t, swarm.best_fitness, float(swarm.fitnesses.mean())))

    return OptimizeResult(
        best_position=swarm.best_position.copy(),
        best_fitness=swarm.best_fitness,
        trace=trace,
        counters=counters,
        n_rejected=n_rejected,
        population_update_skipped=pop_update_skipped,
    )


@dataclass
class Benchmark:
    name: str
    fn: object
    lower: float
    upper: float
    minimizer: float  # every coordinate of the global minimizer


def _sphere(x: np.ndarray) -> float:
    return float(np.sum(x * x))


def _rastrigin(x: np.ndarray) -> float:
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


def _rosenbrock(x: np.ndarray) -> float:
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


def benchmark_objectives() -> dict[str, Benchmark]:
    """Standard test functions, all with global minimum value 0."""
    return {
        "sphere": Benchmark("sphere", _sphere, -5.0, 5.0, 0.0),
        "rastrigin": Benchmark("rastrigin", _rastrigin, -5.12, 5.12, 0.0),
        "rosenbrock": Benchmark("rosenbrock", _rosenbrock, -5.0, 10.0, 1.0),
    }
