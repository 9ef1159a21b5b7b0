"""Classical modes as sampled complex pulses on a uniform periodic 1D grid.

A :class:`Mode` is an element of the single-photon Hilbert space: a complex
sample vector whose squared modulus integrates (Riemann sum) to a
dimensionless number. Only the longitudinal profile is stored; the transverse
profile and polarization vector only contribute a constant that is absorbed
into the normalization.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .errors import GridMismatch, SupportOutOfBounds, ZeroMode

_uid = itertools.count()

# Relative amplitude below which a sample is treated as outside the support.
SUPPORT_RTOL = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform periodic lattice ``x_j = origin + j * dx``, ``j = 0 .. n_points - 1``."""

    n_points: int
    dx: float = 1.0
    origin: float = 0.0

    def __post_init__(self):
        n = self.n_points
        if not isinstance(n, (int, np.integer)) or n <= 0 or (n & (n - 1)) != 0:
            raise ValueError(f"n_points must be a positive power of two, got {n!r}")
        if not (math.isfinite(self.dx) and self.dx > 0):
            raise ValueError(f"dx must be finite and > 0, got {self.dx!r}")

    @property
    def length(self) -> float:
        return self.n_points * self.dx

    @property
    def x(self) -> np.ndarray:
        return self.origin + self.dx * np.arange(self.n_points)

    def index_of(self, position: float) -> int:
        """Nearest lattice index of ``position`` (not wrapped)."""
        return int(round((position - self.origin) / self.dx))

    def wavenumbers(self) -> np.ndarray:
        """Discrete Fourier wavenumbers in numpy FFT order (rad per unit length)."""
        return 2 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)


@dataclass(frozen=True, eq=False)
class Mode:
    """A classical mode: complex samples on ``grid``.

    Instances are immutable; arithmetic returns new modes. ``uid`` is a
    process-unique label used only for bookkeeping in the Fock layer.
    """

    grid: Grid
    samples: np.ndarray
    polarization: str = "z"
    uid: int = field(default_factory=lambda: next(_uid), compare=False, repr=False)

    def __post_init__(self):
        s = np.array(self.samples, dtype=np.complex128)
        if s.shape != (self.grid.n_points,):
            raise ValueError(
                f"samples must have shape ({self.grid.n_points},), got {s.shape}"
            )
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    def _like(self, samples) -> "Mode":
        return Mode(self.grid, samples, self.polarization)

    def _check(self, other: "Mode"):
        if not isinstance(other, Mode):
            return NotImplemented
        if other.grid != self.grid:
            raise GridMismatch(f"{self.grid} vs {other.grid}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self._like(self.samples + other.samples)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self._like(self.samples - other.samples)

    def __mul__(self, alpha):
        if not isinstance(alpha, (int, float, complex, np.number)):
            return NotImplemented
        return self._like(alpha * self.samples)

    __rmul__ = __mul__

    def __truediv__(self, alpha):
        return self * (1.0 / alpha)

    def __neg__(self):
        return self._like(-self.samples)

    def norm(self) -> float:
        return math.sqrt(max(scalar_product(self, self).real, 0.0))

    def is_zero(self) -> bool:
        return not np.any(self.samples)


def zero_mode(grid: Grid) -> Mode:
    return Mode(grid, np.zeros(grid.n_points, dtype=np.complex128))


def scalar_product(a: Mode, b: Mode) -> complex:
    """Riemann-sum inner product, antilinear in ``a``."""
    if a.grid != b.grid:
        raise GridMismatch(f"{a.grid} vs {b.grid}")
    return complex(np.vdot(a.samples, b.samples) * a.grid.dx)


def normalize(m: Mode) -> Mode:
    nrm2 = scalar_product(m, m).real
    if not nrm2 > 0:
        raise ZeroMode("cannot normalize a zero mode")
    return m * (1.0 / math.sqrt(nrm2))


def support_indices(m: Mode, rtol: float = SUPPORT_RTOL) -> Optional[tuple[int, int]]:
    """First and last sample index whose modulus exceeds ``rtol * max|samples|``."""
    amp = np.abs(m.samples)
    peak = amp.max()
    if peak == 0:
        return None
    idx = np.flatnonzero(amp > rtol * peak)
    return int(idx[0]), int(idx[-1])


def check_guard(grid: Grid, lo: int, hi: int, guard: int, what: str = "mode") -> None:
    """Require ``guard`` empty samples on either side of ``[lo, hi]``."""
    if lo - guard < 0 or hi + guard > grid.n_points - 1:
        raise SupportOutOfBounds(
            f"{what} support [{lo}, {hi}] needs a guard band of {guard} samples "
            f"inside [0, {grid.n_points - 1}]"
        )


class Envelope(str, Enum):
    SIN2 = "sin2"
    GAUSS_TRUNCATED = "gauss_truncated"


@dataclass(frozen=True)
class PulseSpec:
    """Finite-support pulse ``E(x - center) * exp(i k x) * amplitude_phase``.

    For the truncated Gaussian, ``sigma`` defaults to ``width / 10`` so the
    cut at the support edge is below 4e-6 of the peak.
    """

    envelope_kind: Envelope = Envelope.SIN2
    center: float = 0.0
    width: float = 1.0
    k: float = 0.0
    amplitude_phase: complex = 1.0
    sigma: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "envelope_kind", Envelope(self.envelope_kind))
        if not (math.isfinite(self.width) and self.width > 0):
            raise ValueError(f"width must be > 0, got {self.width!r}")
        if abs(abs(self.amplitude_phase) - 1.0) > 1e-12:
            raise ValueError("amplitude_phase must have unit modulus")

    def envelope(self, x: np.ndarray) -> np.ndarray:
        u = x - (self.center - self.width / 2)
        inside = (u >= 0) & (u <= self.width)
        if self.envelope_kind is Envelope.SIN2:
            env = np.sin(np.pi * u / self.width) ** 2
        else:
            sigma = self.sigma if self.sigma is not None else self.width / 10
            env = np.exp(-0.5 * ((u - self.width / 2) / sigma) ** 2)
        return np.where(inside, env, 0.0)


def pulse_guard_samples(grid: Grid, spec: PulseSpec) -> int:
    return int(math.ceil(spec.width / grid.dx - 1e-9))


def make_pulse(grid: Grid, spec: PulseSpec) -> Mode:
    """Sample ``spec`` on ``grid`` and normalize to unit norm (real positive factor)."""
    lo = int(math.ceil((spec.center - spec.width / 2 - grid.origin) / grid.dx - 1e-9))
    hi = int(math.floor((spec.center + spec.width / 2 - grid.origin) / grid.dx + 1e-9))
    check_guard(grid, lo, hi, pulse_guard_samples(grid, spec), "pulse")
    x = grid.x
    samples = spec.envelope(x) * np.exp(1j * spec.k * x) * spec.amplitude_phase
    m = Mode(grid, samples)
    if m.is_zero():
        raise ZeroMode("pulse support contains no lattice points")
    return normalize(m)


def shift(m: Mode, distance: float, check: bool = True) -> Mode:
    """Translate by ``round(distance / dx)`` lattice sites.

    With ``check`` the shifted support must keep a guard band as wide as the
    support itself.
    """
    sites = int(round(distance / m.grid.dx))
    if sites == 0:
        return m
    if check:
        sup = support_indices(m)
        if sup is not None:
            lo, hi = sup
            check_guard(m.grid, lo + sites, hi + sites, hi - lo, "shifted mode")
    return Mode(m.grid, np.roll(m.samples, sites), m.polarization)
