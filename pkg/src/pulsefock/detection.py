"""Detector observables, rail-sector probabilities and the HOM delay sweep.

Ideal detectors: unit efficiency, no dark counts. The output rails of a
splitter have disjoint supports, so the probability of finding ``n_x`` photons
on one rail and ``n_y`` on the other is the squared norm of the corresponding
multilinear sector of the state. The two-rail split generalizes to any photon
number, but only the one- and two-photon cases are reported.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

from .errors import NotNormalized, RailMismatch
from .fock import FockState, Monomial, annihilate, inner_product, monomial_state
from .grid_modes import PulseSpec, make_pulse, scalar_product, shift, support_indices
from .propagation import AnyMode, Circuit, RailMode, inner, run_circuit

NORM_TOL = 1e-10
PROB_SLACK = 1e-12
STRAY_TOL = 1e-10


class ObservableKind(str, Enum):
    SINGLE_AT = "single_at"
    DOUBLE_AT = "double_at"
    COINCIDENCE = "coincidence"


def orthonormalize(modes: Sequence[AnyMode], tol: float = 1e-10) -> list[AnyMode]:
    """Modified Gram-Schmidt; drops modes that are (numerically) in the span of earlier ones."""
    basis: list[AnyMode] = []
    for m in modes:
        v = m
        for e in basis:
            v = v - inner(e, v) * e
        nrm = math.sqrt(max(inner(v, v).real, 0.0))
        if nrm > tol * max(1.0, math.sqrt(inner(m, m).real)):
            basis.append(v / nrm)
    return basis


@dataclass(frozen=True)
class DetectorObservable:
    """Observable built from detection-time reference modes.

    ``single_at`` is the photon-number operator of the span of ``x_modes``
    (``|X><X| x 1 + 1 x |X><X|`` on two photons, a projector on one photon).
    ``double_at`` projects two photons onto that span, ``coincidence`` projects
    one photon onto the ``x_modes`` span and one onto the ``y_modes`` span.
    """

    kind: ObservableKind
    x_modes: tuple
    y_modes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", ObservableKind(self.kind))
        object.__setattr__(self, "x_modes", tuple(self.x_modes))
        object.__setattr__(self, "y_modes", tuple(self.y_modes))
        if self.kind is ObservableKind.COINCIDENCE and not self.y_modes:
            raise ValueError("coincidence observable needs y reference modes")

    @classmethod
    def single_at(cls, *refs: AnyMode) -> "DetectorObservable":
        return cls(ObservableKind.SINGLE_AT, refs)

    @classmethod
    def double_at(cls, *refs: AnyMode) -> "DetectorObservable":
        return cls(ObservableKind.DOUBLE_AT, refs)

    @classmethod
    def coincidence(cls, x_refs: Sequence[AnyMode], y_refs: Sequence[AnyMode]) -> "DetectorObservable":
        return cls(ObservableKind.COINCIDENCE, tuple(x_refs), tuple(y_refs))


def expectation(state: FockState, obs: DetectorObservable) -> float:
    """``<Phi|O|Phi>`` for a normalized state, evaluated with Fock inner products."""
    norm2 = state.norm2()
    if abs(norm2 - 1) > NORM_TOL:
        raise NotNormalized(f"<Phi|Phi> = {norm2!r}")
    ex = orthonormalize(obs.x_modes)
    if obs.kind is ObservableKind.SINGLE_AT:
        value = sum(annihilate(state, e).norm2() for e in ex)
        return float(value)
    if state.photon_number != 2:
        raise ValueError("two-photon observables need a two-photon state")
    if obs.kind is ObservableKind.DOUBLE_AT:
        vectors = [
            monomial_state([ex[i], ex[j]], 1 / math.sqrt(2) if i == j else 1.0)
            for i in range(len(ex))
            for j in range(i, len(ex))
        ]
    else:
        ey = orthonormalize(obs.y_modes)
        vectors = [monomial_state([e, f]) for e in ex for f in ey]
    value = sum(abs(inner_product(v, state)) ** 2 for v in vectors)
    return float(value)


def _split(psi: AnyMode, rails: tuple[str, str], cache: dict, stray_tol: float) -> tuple:
    key = psi.uid
    if key in cache:
        return cache[key]
    if not isinstance(psi, RailMode):
        raise RailMismatch("rail-sector decomposition needs RailMode photons")
    stray = [
        r
        for r in psi.rails
        if r not in rails and psi.component(r).norm() ** 2 > stray_tol
    ]
    if stray:
        raise RailMismatch(f"mode has support on rails {stray} outside {rails}")
    parts = []
    for r in rails:
        comp = psi.component(r)
        parts.append(None if comp is None or comp.is_zero() else RailMode({r: comp}))
    if all(p is None for p in parts):
        raise RailMismatch(f"mode has no support on rails {rails}")
    cache[key] = tuple(parts)
    return cache[key]


def rail_sectors(
    state: FockState, rails: tuple[str, str], stray_tol: float = STRAY_TOL
) -> dict[tuple[int, int], FockState]:
    """Split ``state`` by how many photons sit on each of the two rails.

    Components on other rails with squared norm up to ``stray_tol`` are
    discarded (spectral evolution leaves such tails behind a splitter).
    """
    n = state.photon_number
    cache: dict = {}
    grouped: dict[tuple[int, int], list] = {(k, n - k): [] for k in range(n, -1, -1)}
    for term in state.terms:
        parts = [_split(m, rails, cache, stray_tol) for m in term.modes]
        for choice in itertools.product((0, 1), repeat=n):
            modes = [parts[j][c] for j, c in enumerate(choice)]
            if any(m is None for m in modes):
                continue
            n_x = choice.count(0)
            grouped[(n_x, n - n_x)].append(Monomial(term.coeff, modes))
    return {key: FockState(terms, n) for key, terms in grouped.items()}


def rail_sector_decompose(
    state: FockState, rails: tuple[str, str], stray_tol: float = STRAY_TOL
) -> dict[tuple[int, int], float]:
    """Squared norm of each ``(n_on_rail_0, n_on_rail_1)`` sector; they sum to ``<Phi|Phi>``."""
    return {key: s.norm2() for key, s in rail_sectors(state, rails, stray_tol).items()}


def _clamp(p: float) -> float:
    if not -PROB_SLACK <= p <= 1 + PROB_SLACK:
        raise ValueError(f"probability {p!r} outside [0, 1]")
    return min(max(p, 0.0), 1.0)


@dataclass(frozen=True)
class DetectionReport:
    """Two-detector readout. ``p_single_*`` is the probability that the detector
    registers exactly one photon; values are clamped to [0, 1] and the unclamped
    numbers are kept in ``raw``."""

    p_single_x: float
    p_single_y: float
    p_double_x: float
    p_double_y: float
    p_coincidence: float
    overlap: complex = 0j
    raw: Mapping[str, float] = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_raw(cls, overlap: complex = 0j, **probs: float) -> "DetectionReport":
        clamped = {k: _clamp(v) for k, v in probs.items()}
        return cls(overlap=complex(overlap), raw=dict(probs), **clamped)

    @classmethod
    def from_sectors(cls, weights: Mapping[tuple[int, int], float], overlap: complex = 0j):
        n = sum(next(iter(weights)))
        if n == 1:
            return cls.from_raw(
                overlap,
                p_single_x=weights[(1, 0)],
                p_single_y=weights[(0, 1)],
                p_double_x=0.0,
                p_double_y=0.0,
                p_coincidence=0.0,
            )
        if n == 2:
            return cls.from_raw(
                overlap,
                p_single_x=weights[(1, 1)],
                p_single_y=weights[(1, 1)],
                p_double_x=weights[(2, 0)],
                p_double_y=weights[(0, 2)],
                p_coincidence=weights[(1, 1)],
            )
        raise ValueError(f"reports cover one or two photons, got {n}")


def classical_particle_baseline() -> DetectionReport:
    """Two distinguishable particles, each independently transmitted or reflected with 1/2."""
    return DetectionReport.from_raw(
        p_single_x=0.5, p_single_y=0.5, p_double_x=0.25, p_double_y=0.25, p_coincidence=0.5
    )


def classical_wave_baseline() -> DetectionReport:
    """Classical waves: both detectors always receive energy, so they always fire together."""
    return DetectionReport.from_raw(
        p_single_x=1.0, p_single_y=1.0, p_double_x=0.0, p_double_y=0.0, p_coincidence=1.0
    )


def clearance_time(circuit: Circuit, modes: Sequence[RailMode]) -> float:
    """Smallest lattice-commensurate time after which every mode has crossed the first element."""
    el = circuit.elements[0]
    latest = None
    for psi in modes:
        for m in psi.components.values():
            sup = support_indices(m)
            if sup is not None:
                latest = sup[0] if latest is None else min(latest, sup[0])
    if latest is None:
        return 0.0
    grid = circuit.rail_map[el.input_rails[0]].grid
    sites = max(grid.index_of(el.position) - latest, 0)
    return sites * grid.dx / circuit.c


def hom_sweep(
    circuit: Circuit,
    pulse: PulseSpec,
    delays: Sequence[float],
    t_final: float | None = None,
) -> list[DetectionReport]:
    """Coincidence statistics for two identical pulses versus relative delay.

    Pulse A enters on the first input rail of the circuit's first element; B is
    the same pulse on the second input rail, moved upstream by ``c * delay`` (a
    positive delay makes B arrive later). ``t_final`` defaults to the time at
    which the latest pulse has fully crossed the splitter.
    """
    el = circuit.elements[0]
    rail_a, rail_b = el.input_rails
    grid = circuit.rail_map[rail_a].grid
    psi_a = make_pulse(grid, pulse)
    pairs = []
    for tau in delays:
        psi_b = shift(psi_a, -circuit.c * tau)
        pairs.append((RailMode({rail_a: psi_a}), RailMode({rail_b: psi_b}), psi_b))
    if t_final is None:
        t_final = clearance_time(circuit, [p for a, b, _ in pairs for p in (a, b)])
    reports = []
    for in_a, in_b, psi_b in pairs:
        out_a, out_b = run_circuit(circuit, [in_a, in_b], t_final)
        state = monomial_state([out_a, out_b])
        weights = rail_sector_decompose(state, el.output_rails)
        reports.append(DetectionReport.from_sectors(weights, scalar_product(psi_a, psi_b)))
    return reports
