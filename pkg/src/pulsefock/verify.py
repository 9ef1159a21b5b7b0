"""Self-checks run by ``pulsefock verify`` and by the test suite.

Every check returns a :class:`CheckResult` with the worst residual seen and
the tolerance it is held to. Random inputs come from a fixed seed so repeated
runs print identical numbers.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .detection import hom_sweep
from .fock import (
    inner_product,
    monomial_state,
    oracle_inner_product,
    permanent,
    vacuum_expectation_oracle,
)
from .grid_modes import Grid, Mode, PulseSpec, make_pulse, normalize, scalar_product
from .propagation import Dispersion, FrequencyOperator1D, evolve
from .spectral_iso import appendix_b_equivalence, to_reciprocal

SEED = 20240917


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)


def random_mode(rng: np.random.Generator, grid: Grid) -> Mode:
    n = grid.n_points
    return normalize(Mode(grid, rng.normal(size=n) + 1j * rng.normal(size=n)))


def random_pulse(rng: np.random.Generator, grid: Grid, max_width: int) -> Mode:
    """sin² pulse with random width, centre and carrier, kept clear of the grid edges."""
    n = grid.n_points
    width = int(rng.integers(max_width // 2, max_width + 1))
    center = float(rng.integers(width + width // 2 + 1, n - width - width // 2 - 1))
    k = float(rng.choice(grid.wavenumbers()))
    spec = PulseSpec("sin2", center=grid.origin + center * grid.dx, width=width * grid.dx, k=k)
    return make_pulse(grid, spec)


def _timed(fn: Callable[[], tuple[str, float, float]]) -> CheckResult:
    t0 = time.perf_counter()
    name, residual, tol = fn()
    return CheckResult(name, float(residual), float(tol), time.perf_counter() - t0)


def check_unitarity(pairs: int = 50, n_points: int = 256, seed: int = SEED) -> CheckResult:
    """Position-space and reciprocal-space scalar products agree."""

    def run():
        rng = np.random.default_rng(seed)
        grid = Grid(n_points, dx=0.5, origin=-3.0)
        worst = 0.0
        for _ in range(pairs):
            a, b = random_mode(rng, grid), random_mode(rng, grid)
            diff = scalar_product(a, b) - to_reciprocal(a).inner(to_reciprocal(b))
            worst = max(worst, abs(diff))
        return "unitarity", worst, 1e-12

    return _timed(run)


def check_evolution_diagonal(
    samples: int = 20, n_points: int = 256, seed: int = SEED
) -> CheckResult:
    """Spectral evolution multiplies each reciprocal coefficient by its phase."""

    def run():
        rng = np.random.default_rng(seed + 1)
        grid = Grid(n_points, dx=0.5)
        op = FrequencyOperator1D(grid, c=1.3, dispersion=Dispersion.FULL_ABS_K)
        phase_w = op.omega()
        worst = 0.0
        for _ in range(samples):
            m = random_mode(rng, grid)
            t = float(rng.uniform(0.0, 50.0))
            lhs = to_reciprocal(evolve(op, m, t, check=False)).z
            rhs = np.exp(-1j * phase_w * t) * to_reciprocal(m).z
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        return "evolution_diagonal", worst, 1e-12

    return _timed(run)


def check_permanent_oracle(
    instances: int = 200, max_n: int = 5, n_points: int = 16, seed: int = SEED
) -> CheckResult:
    """Ryser permanent of the Gram matrix versus normal-ordering rewrites.

    The residual is ``|perm - oracle| / N!`` so the tolerance is ``1e-12``.
    """

    def run():
        rng = np.random.default_rng(seed + 2)
        grid = Grid(n_points)
        worst = 0.0
        for _ in range(instances):
            n = int(rng.integers(1, max_n + 1))
            a = [random_mode(rng, grid) for _ in range(n)]
            b = [random_mode(rng, grid) for _ in range(n)]
            gram = np.array([[scalar_product(x, y) for y in b] for x in a])
            word = [(False, m) for m in reversed(a)] + [(True, m) for m in b]
            diff = permanent(gram) - vacuum_expectation_oracle(word)
            worst = max(worst, abs(diff) / math.factorial(n))
        return "permanent_oracle", worst, 1e-12

    return _timed(run)


def check_evolution_equivalence(
    configs: int = 5,
    times: tuple = (3.0, 17.5, 40.0),
    n_points: int = 64,
    basis_size: int = 64,
    seed: int = SEED,
) -> CheckResult:
    """Worst ``1 - fidelity`` over N = 1, 2, 3 photons, ``configs`` pulse sets and ``times``."""

    def run():
        rng = np.random.default_rng(seed + 3)
        grid = Grid(n_points)
        worst = 0.0
        for n in (1, 2, 3):
            for _ in range(configs):
                modes = [random_pulse(rng, grid, 16) for _ in range(n)]
                for t in times:
                    fid = appendix_b_equivalence(modes, t, basis_size, check=False)
                    worst = max(worst, 1.0 - fid)
        return "evolution_equivalence", worst, 1e-9

    return _timed(run)


def check_oracle_fock(samples: int = 10, n_points: int = 16, seed: int = SEED) -> CheckResult:
    """Fock inner products of two-term superpositions: permanent route against the oracle."""

    def run():
        rng = np.random.default_rng(seed + 4)
        grid = Grid(n_points)
        worst = 0.0
        for _ in range(samples):
            n = int(rng.integers(1, 4))
            s1 = monomial_state([random_mode(rng, grid) for _ in range(n)], 0.6) + monomial_state(
                [random_mode(rng, grid) for _ in range(n)], 0.8j
            )
            s2 = monomial_state([random_mode(rng, grid) for _ in range(n)])
            worst = max(worst, abs(inner_product(s1, s2) - oracle_inner_product(s1, s2)))
        return "fock_inner_oracle", worst, 1e-12

    return _timed(run)


def check_scenarios(setup) -> list[CheckResult]:
    """HOM null at zero delay and the single-photon splitter numbers for ``setup``."""
    from .scenarios import run_single_bs

    out = []
    t0 = time.perf_counter()
    (rep,) = hom_sweep(setup.circuit, setup.pulse, [0.0])
    out.append(CheckResult("hom_null", abs(rep.raw["p_coincidence"]), 1e-10, time.perf_counter() - t0))
    t0 = time.perf_counter()
    res = run_single_bs(setup)
    r, t = setup.splitter.r, setup.splitter.t
    residual = max(
        abs(res.p_detector_x - abs(t) ** 2),
        abs(res.p_detector_y - abs(r) ** 2),
        abs(res.comm_RR - abs(r) ** 2),
        abs(res.comm_TT - abs(t) ** 2),
        abs(res.comm_RT),
        abs(res.comm_total - 1.0),
    )
    out.append(CheckResult("single_bs", residual, 1e-12, time.perf_counter() - t0))
    return out


def run_all(setup=None) -> list[CheckResult]:
    results = [
        check_unitarity(),
        check_evolution_diagonal(),
        check_permanent_oracle(),
        check_oracle_fock(),
        check_evolution_equivalence(),
    ]
    if setup is not None:
        results.extend(check_scenarios(setup))
    return results
