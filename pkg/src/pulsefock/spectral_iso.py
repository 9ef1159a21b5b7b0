"""Position/reciprocal-space isomorphism and the N-photon evolution equivalence check.

The discrete eigenbasis of ``Omega`` on a periodic grid is the set of
orthonormal plane waves ``phi_kappa(x) = exp(i kappa x) / sqrt(L)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import GridMismatch, TruncationError
from .grid_modes import Grid, Mode
from .propagation import Dispersion, FrequencyOperator1D, evolve

MAX_EQUIVALENCE_N = 3
MAX_BASIS_SIZE = 64
CAPTURE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SpectralCoefficients:
    """``z[kappa] = <phi_kappa|psi>`` in numpy FFT index order."""

    grid: Grid
    z: np.ndarray

    def __post_init__(self):
        z = np.array(self.z, dtype=np.complex128)
        if z.shape != (self.grid.n_points,):
            raise ValueError(f"z must have shape ({self.grid.n_points},), got {z.shape}")
        z.flags.writeable = False
        object.__setattr__(self, "z", z)

    def inner(self, other: "SpectralCoefficients") -> complex:
        if other.grid != self.grid:
            raise GridMismatch(f"{self.grid} vs {other.grid}")
        return complex(np.vdot(self.z, other.z))


def to_reciprocal(m: Mode) -> SpectralCoefficients:
    g = m.grid
    phase = np.exp(-1j * g.wavenumbers() * g.origin)
    z = g.dx / math.sqrt(g.length) * phase * np.fft.fft(m.samples)
    return SpectralCoefficients(g, z)


def from_reciprocal(zc: SpectralCoefficients, polarization: str = "z") -> Mode:
    g = zc.grid
    phase = np.exp(1j * g.wavenumbers() * g.origin)
    samples = g.n_points / math.sqrt(g.length) * np.fft.ifft(zc.z * phase)
    return Mode(g, samples, polarization)


def plane_wave(grid: Grid, index: int) -> Mode:
    kappa = grid.wavenumbers()[index]
    return Mode(grid, np.exp(1j * kappa * grid.x) / math.sqrt(grid.length))


def symmetric_tensor_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Fock overlap of ``sum a[k] prod Bdag_k |vac>`` and ``sum b[k] prod Bdag_k |vac>``.

    Over an orthonormal basis the Gram permanent reduces to a sum over index
    permutations of ``b``.
    """
    if a.shape != b.shape:
        raise ValueError("tensor shapes differ")
    return complex(
        sum(np.vdot(a, b.transpose(p)) for p in itertools.permutations(range(a.ndim)))
    )


def _outer(vectors: Sequence[np.ndarray]) -> np.ndarray:
    out = np.array(1.0 + 0j)
    for v in vectors:
        out = np.multiply.outer(out, v)
    return out


def select_basis(coeffs: Sequence[np.ndarray], basis_size: int) -> np.ndarray:
    """Indices of the ``basis_size`` eigenmodes carrying the most combined weight."""
    weight = sum(np.abs(z) ** 2 for z in coeffs)
    order = np.argsort(-weight, kind="stable")
    return np.sort(order[:basis_size])


def appendix_b_equivalence(
    initial_modes: Sequence[Mode],
    t: float,
    basis_size: int,
    op: Optional[FrequencyOperator1D] = None,
    check: bool = True,
) -> float:
    """Fidelity between two constructions of the evolved N-photon state.

    (i) evolve each mode classically, then build ``prod_j Bdag(psi_j(t)) |vac>``;
    (ii) expand the initial monomial over eigenmodes and attach
    ``exp(-i (omega_k1 + ... + omega_kN) t)`` to each product. Both live in the
    same truncated eigenbasis.
    """
    n = len(initial_modes)
    if not 1 <= n <= MAX_EQUIVALENCE_N:
        raise ValueError(f"need 1 <= N <= {MAX_EQUIVALENCE_N} modes, got {n}")
    grid = initial_modes[0].grid
    if any(m.grid != grid for m in initial_modes):
        raise GridMismatch("all modes must share one grid")
    if not 1 <= basis_size <= min(MAX_BASIS_SIZE, grid.n_points):
        raise ValueError(f"basis_size must be in [1, {min(MAX_BASIS_SIZE, grid.n_points)}]")
    if op is None:
        op = FrequencyOperator1D(grid, dispersion=Dispersion.FULL_ABS_K)

    alphas = [to_reciprocal(m).z for m in initial_modes]
    basis = select_basis(alphas, basis_size)
    for j, a in enumerate(alphas):
        total = np.sum(np.abs(a) ** 2)
        captured = np.sum(np.abs(a[basis]) ** 2) / total
        if captured < 1 - CAPTURE_TOL:
            raise TruncationError(
                f"mode {j}: basis of {basis_size} captures weight {captured!r}"
            )

    betas = [to_reciprocal(evolve(op, m, t, check=check)).z[basis] for m in initial_modes]
    classical = _outer(betas)

    omega = op.omega()[basis]
    total_omega = sum(
        np.reshape(omega, [-1 if k == j else 1 for k in range(n)]) for j in range(n)
    )
    expanded = _outer([a[basis] for a in alphas]) * np.exp(-1j * total_omega * t)

    overlap = symmetric_tensor_inner(classical, expanded)
    n_cl = symmetric_tensor_inner(classical, classical).real
    n_ex = symmetric_tensor_inner(expanded, expanded).real
    return abs(overlap) ** 2 / (n_cl * n_ex)
