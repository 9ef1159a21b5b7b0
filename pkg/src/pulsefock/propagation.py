"""Free evolution of classical modes and beam-splitter scattering on rail circuits.

Photon-state dynamics is reduced to the dynamics of the classical modes that
carry the photons, so everything here acts on classical modes only.

Circuit geometry uses one path-length coordinate shared by every rail: an
element sitting at ``position`` joins its input rails (``s < position``) to its
output rails (``s >= position``). A mode at time ``t`` is obtained by evolving
the free pulse and cutting it at each element in order of position; the part
that has crossed is scattered onto the output rails. Free evolution commutes
with the rail-copy map, so this is the same as scattering at the crossing time.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import GridMismatch, NonCommensurateShift, RailMismatch, SupportOutOfBounds
from .grid_modes import Grid, Mode, check_guard, scalar_product, support_indices

_uid = itertools.count(start=1 << 40)

BS_TOL = 1e-12
# Spectral evolution leaves low-level tails across the grid (finite-support
# envelopes are not band limited); guard checks track the bulk of the pulse.
SPECTRAL_SUPPORT_RTOL = 1e-4


class Dispersion(str, Enum):
    FULL_ABS_K = "full_abs_k"
    CARRIER_TRANSLATION = "carrier_translation"


@dataclass(frozen=True)
class FrequencyOperator1D:
    """``Omega`` for the 1D vacuum: ``omega(kappa) = c |kappa|`` on the grid's Fourier modes.

    ``carrier_translation`` replaces the spectral propagator by an exact lattice
    translation at speed ``c`` (the narrowband right-mover limit).
    """

    grid: Grid
    c: float = 1.0
    dispersion: Dispersion = Dispersion.FULL_ABS_K

    def __post_init__(self):
        object.__setattr__(self, "dispersion", Dispersion(self.dispersion))
        if not (math.isfinite(self.c) and self.c > 0):
            raise ValueError(f"c must be > 0, got {self.c!r}")

    def omega(self) -> np.ndarray:
        return self.c * np.abs(self.grid.wavenumbers())

    def apply(self, m: Mode) -> Mode:
        """``Omega psi`` evaluated spectrally."""
        spec = np.fft.fft(m.samples) * self.omega()
        return Mode(m.grid, np.fft.ifft(spec), m.polarization)


@dataclass(frozen=True, eq=False)
class RailMode:
    """A classical mode spread over several rails; absent rails carry zero.

    Distinct rails are orthogonal subspaces, so the scalar product is the sum
    of per-rail scalar products.
    """

    components: Mapping[str, Mode]
    uid: int = field(default_factory=lambda: next(_uid), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "components", dict(self.components))

    @property
    def rails(self) -> tuple[str, ...]:
        return tuple(self.components)

    def component(self, rail: str) -> Optional[Mode]:
        return self.components.get(rail)

    def restrict(self, rails: Iterable[str]) -> "RailMode":
        keep = set(rails)
        return RailMode({r: m for r, m in self.components.items() if r in keep})

    def __add__(self, other):
        if not isinstance(other, RailMode):
            return NotImplemented
        comps = dict(self.components)
        for r, m in other.components.items():
            comps[r] = comps[r] + m if r in comps else m
        return RailMode(comps)

    def __mul__(self, alpha):
        if not isinstance(alpha, (int, float, complex, np.number)):
            return NotImplemented
        return RailMode({r: alpha * m for r, m in self.components.items()})

    __rmul__ = __mul__

    def __truediv__(self, alpha):
        return self * (1.0 / alpha)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        if not isinstance(other, RailMode):
            return NotImplemented
        return self + (-other)

    def norm(self) -> float:
        return math.sqrt(max(inner(self, self).real, 0.0))

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.components.values())


AnyMode = Union[Mode, RailMode]


def inner(a: AnyMode, b: AnyMode) -> complex:
    """Scalar product of two modes of the same kind (antilinear in ``a``)."""
    if isinstance(a, Mode) and isinstance(b, Mode):
        return scalar_product(a, b)
    if isinstance(a, RailMode) and isinstance(b, RailMode):
        total = 0j
        for rail, ma in a.components.items():
            mb = b.components.get(rail)
            if mb is not None:
                total += scalar_product(ma, mb)
        return total
    raise TypeError(f"cannot take scalar product of {type(a).__name__} and {type(b).__name__}")


def _spectral_support(op: FrequencyOperator1D, m: Mode, t: float) -> Optional[tuple[int, int]]:
    """Support estimate after ``t``: translate by ``c t`` along the dominant direction(s)."""
    sup = support_indices(m, SPECTRAL_SUPPORT_RTOL)
    if sup is None:
        return None
    lo, hi = sup
    power = np.abs(np.fft.fft(m.samples)) ** 2
    kap = m.grid.wavenumbers()
    total = power.sum()
    right = power[kap > 0].sum() / total
    left = power[kap < 0].sum() / total
    sites = int(math.ceil(abs(op.c * t) / m.grid.dx))
    sign = 1 if t >= 0 else -1
    moves = [0]
    if right > 1e-6:
        moves.append(sign * sites)
    if left > 1e-6:
        moves.append(-sign * sites)
    if len(moves) > 1:
        moves.remove(0)
    return lo + min(moves), hi + max(moves)


def _evolve_mode(op: FrequencyOperator1D, m: Mode, t: float, check: bool) -> Mode:
    if m.grid != op.grid:
        raise GridMismatch(f"operator grid {op.grid} vs mode grid {m.grid}")
    if t == 0:
        return m
    if op.dispersion is Dispersion.CARRIER_TRANSLATION:
        exact = op.c * t / m.grid.dx
        sites = int(round(exact))
        if abs(exact - sites) > 1e-9 * max(1.0, abs(exact)):
            raise NonCommensurateShift(
                f"c*t = {op.c * t!r} is not a multiple of dx = {m.grid.dx!r}"
            )
        if check:
            sup = support_indices(m)
            if sup is not None:
                lo, hi = sup
                check_guard(m.grid, lo + sites, hi + sites, hi - lo, "evolved mode")
        return Mode(m.grid, np.roll(m.samples, sites), m.polarization)
    if check:
        sup = support_indices(m, SPECTRAL_SUPPORT_RTOL)
        est = _spectral_support(op, m, t)
        if est is not None:
            check_guard(m.grid, est[0], est[1], sup[1] - sup[0], "evolved mode")
    phase = np.exp(-1j * op.omega() * t)
    return Mode(m.grid, np.fft.ifft(np.fft.fft(m.samples) * phase), m.polarization)


def evolve(op: FrequencyOperator1D, m: AnyMode, t: float, check: bool = True) -> AnyMode:
    """``exp(-i Omega t) psi``; a :class:`RailMode` is evolved rail by rail.

    ``check=False`` skips the guard-band test (for modes that fill the grid).
    """
    if isinstance(m, RailMode):
        return RailMode({r: _evolve_mode(op, c, t, check) for r, c in m.components.items()})
    return _evolve_mode(op, m, t, check)


@dataclass(frozen=True)
class BeamSplitter:
    """Instantaneous two-port mode map.

    Input rail 1 -> ``t`` on output 1 plus ``r`` on output 2; input rail 2 ->
    ``r`` on output 1 plus ``t`` on output 2. ``position`` is the element's
    location on the shared path coordinate.
    """

    r: complex
    t: complex
    input_rails: tuple[str, str] = ("a", "b")
    output_rails: tuple[str, str] = ("x", "y")
    position: float = 0.0

    def __post_init__(self):
        r, t = complex(self.r), complex(self.t)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "input_rails", tuple(self.input_rails))
        object.__setattr__(self, "output_rails", tuple(self.output_rails))
        if abs(abs(r) ** 2 + abs(t) ** 2 - 1) > BS_TOL:
            raise ValueError(f"|r|^2 + |t|^2 = {abs(r) ** 2 + abs(t) ** 2!r} != 1")
        if abs(r.conjugate() * t + r * t.conjugate()) > BS_TOL:
            raise ValueError("r* t + r t* != 0")
        rails = self.input_rails + self.output_rails
        if len(set(rails)) != 4:
            raise ValueError(f"beam splitter rails must be four distinct ids, got {rails}")

    @classmethod
    def from_angle(cls, theta: float, alpha: float = 0.0, sign: int = 1, **kw) -> "BeamSplitter":
        """``r = cos(theta) e^{i alpha}``, ``t = sin(theta) e^{i(alpha + sign*pi/2)}``."""
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        r = math.cos(theta) * cmath.exp(1j * alpha)
        t = math.sin(theta) * cmath.exp(1j * (alpha + sign * math.pi / 2))
        return cls(r, t, **kw)

    @classmethod
    def fifty_fifty(cls, alpha: float = 0.0, sign: int = 1, **kw) -> "BeamSplitter":
        """Balanced splitter; the default is ``r = 1/sqrt(2)``, ``t = i/sqrt(2)``."""
        bs = cls.from_angle(math.pi / 4, alpha, sign, **kw)
        if abs(bs.r ** 2 + bs.t ** 2) > BS_TOL:
            raise ValueError("50-50 splitter requires r^2 + t^2 = 0")
        return bs

    def matrix(self) -> np.ndarray:
        """Output-by-input amplitude matrix."""
        return np.array([[self.t, self.r], [self.r, self.t]])


def scatter(bs: BeamSplitter, psi: RailMode) -> RailMode:
    extra = set(psi.rails) - set(bs.input_rails)
    if extra:
        raise RailMismatch(f"components on {sorted(extra)} are not inputs of {bs.input_rails}")
    in1, in2 = (psi.component(r) for r in bs.input_rails)
    present = [m for m in (in1, in2) if m is not None]
    if not present:
        return RailMode({})
    grid = present[0].grid
    for m in present:
        if m.grid != grid:
            raise GridMismatch("beam splitter inputs live on different grids")
    a = in1.samples if in1 is not None else 0
    b = in2.samples if in2 is not None else 0
    pol = present[0].polarization
    out1 = Mode(grid, bs.t * a + bs.r * b + np.zeros(grid.n_points), pol)
    out2 = Mode(grid, bs.r * a + bs.t * b + np.zeros(grid.n_points), pol)
    return RailMode({bs.output_rails[0]: out1, bs.output_rails[1]: out2})


@dataclass(frozen=True)
class Rail:
    rail_id: str
    axis: str
    grid: Grid

    def __post_init__(self):
        if self.axis not in ("x", "y"):
            raise ValueError(f"rail axis must be 'x' or 'y', got {self.axis!r}")


@dataclass(frozen=True)
class Circuit:
    """Rails, beam splitters and detectors on a shared path coordinate.

    Detectors downstream of the same element must sit at the same distance
    from it unless ``allow_unequal_detectors`` is set.
    """

    rails: Sequence[Rail]
    elements: Sequence[BeamSplitter] = ()
    detector_positions: Mapping[str, tuple[str, float]] = field(default_factory=dict)
    c: float = 1.0
    dispersion: Dispersion = Dispersion.CARRIER_TRANSLATION
    allow_unequal_detectors: bool = False

    def __post_init__(self):
        object.__setattr__(self, "rails", tuple(self.rails))
        object.__setattr__(
            self, "elements", tuple(sorted(self.elements, key=lambda e: e.position))
        )
        object.__setattr__(self, "detector_positions", dict(self.detector_positions))
        object.__setattr__(self, "dispersion", Dispersion(self.dispersion))
        ids = [r.rail_id for r in self.rails]
        if len(set(ids)) != len(ids):
            raise ValueError(f"rail ids must be unique, got {ids}")
        by_id = self.rail_map
        for el in self.elements:
            for rid in el.input_rails + el.output_rails:
                if rid not in by_id:
                    raise RailMismatch(f"element references unknown rail {rid!r}")
            grids = {by_id[rid].grid for rid in el.input_rails + el.output_rails}
            if len(grids) != 1:
                raise GridMismatch("all rails of an element must share one grid")
        distances: dict[int, set] = {}
        for det, (rid, pos) in self.detector_positions.items():
            if rid not in by_id:
                raise RailMismatch(f"detector {det!r} on unknown rail {rid!r}")
            for i, el in enumerate(self.elements):
                if rid in el.output_rails:
                    distances.setdefault(i, set()).add(round(pos - el.position, 12))
        if not self.allow_unequal_detectors:
            for i, d in distances.items():
                if len(d) > 1:
                    raise ValueError(
                        f"detectors after element {i} are at unequal distances {sorted(d)}"
                    )

    @property
    def rail_map(self) -> dict[str, Rail]:
        return {r.rail_id: r for r in self.rails}

    def operator(self, rail_id: str) -> FrequencyOperator1D:
        return FrequencyOperator1D(self.rail_map[rail_id].grid, self.c, self.dispersion)


def _cut(m: Mode, index: int) -> tuple[Mode, Mode]:
    """Split into samples below ``index`` and samples at or beyond it."""
    before = m.samples.copy()
    after = m.samples.copy()
    before[max(index, 0):] = 0
    after[: max(index, 0)] = 0
    return Mode(m.grid, before, m.polarization), Mode(m.grid, after, m.polarization)


def propagate(circuit: Circuit, psi: RailMode, t: float, check: bool = True) -> RailMode:
    """Classical mode at time ``t`` for the circuit (no upstream precondition)."""
    for rid in psi.rails:
        if rid not in circuit.rail_map:
            raise RailMismatch(f"mode has a component on unknown rail {rid!r}")
    comps = {
        rid: _evolve_mode(circuit.operator(rid), m, t, check)
        for rid, m in psi.components.items()
    }
    for el in circuit.elements:
        crossed = {}
        for rid in el.input_rails:
            m = comps.get(rid)
            if m is None:
                continue
            idx = m.grid.index_of(el.position)
            before, after = _cut(m, idx)
            comps[rid] = before
            if not after.is_zero():
                crossed[rid] = after
        if not crossed:
            continue
        for rid, m in scatter(el, RailMode(crossed)).components.items():
            comps[rid] = comps[rid] + m if rid in comps else m
    return RailMode({r: m for r, m in comps.items() if not m.is_zero()})


def _check_upstream(circuit: Circuit, psi: RailMode) -> None:
    for el in circuit.elements:
        for rid in el.input_rails + el.output_rails:
            m = psi.component(rid)
            sup = None if m is None else support_indices(m)
            if sup is None:
                continue
            if rid in el.output_rails or sup[1] >= m.grid.index_of(el.position):
                raise SupportOutOfBounds(
                    f"input component on rail {rid!r} is not upstream of the element at "
                    f"{el.position!r}"
                )


def run_circuit(circuit: Circuit, inputs: Sequence[RailMode], t_final: float) -> list[RailMode]:
    """Evolve and scatter each input independently up to ``t_final``.

    Inputs must lie upstream of every element. Each returned mode is the
    classical mode carrying the corresponding photon at ``t_final``.
    """
    out = []
    for psi in inputs:
        _check_upstream(circuit, psi)
        out.append(propagate(circuit, psi, t_final))
    return out


def two_port_circuit(
    grid: Grid,
    bs: BeamSplitter,
    detector_position: float,
    c: float = 1.0,
    dispersion: Dispersion = Dispersion.CARRIER_TRANSLATION,
) -> Circuit:
    """The one-splitter layout: input rails ``a`` (x) and ``b`` (y), outputs ``x`` and ``y``.

    Detectors ``D_X`` and ``D_Y`` sit at ``detector_position`` on the output rails.
    """
    (ia, ib), (ox, oy) = bs.input_rails, bs.output_rails
    rails = [Rail(ia, "x", grid), Rail(ib, "y", grid), Rail(ox, "x", grid), Rail(oy, "y", grid)]
    dets = {"D_X": (ox, detector_position), "D_Y": (oy, detector_position)}
    return Circuit(rails, [bs], dets, c=c, dispersion=dispersion)
