"""Builds the one-splitter scenarios from a :class:`ScenarioConfig` and runs them."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import PHASE_CONVENTIONS, ScenarioConfig
from .detection import (
    DetectionReport,
    DetectorObservable,
    clearance_time,
    expectation,
    hom_sweep,
)
from .errors import ConfigError, SupportOutOfBounds
from .fock import commutator_BBdag, monomial_state
from .grid_modes import Grid, PulseSpec, check_guard, make_pulse, shift, support_indices
from .propagation import BeamSplitter, Circuit, RailMode, propagate, run_circuit, two_port_circuit


@dataclass(frozen=True)
class Setup:
    grid: Grid
    pulse: PulseSpec
    circuit: Circuit

    @property
    def splitter(self) -> BeamSplitter:
        return self.circuit.elements[0]


def _snap_up(grid: Grid, position: float) -> float:
    return grid.origin + grid.dx * math.ceil((position - grid.origin) / grid.dx - 1e-9)


def build_setup(cfg: ScenarioConfig) -> Setup:
    """Grid, pulse and two-port circuit; raises :class:`ConfigError` for bad geometry."""
    grid = Grid(cfg.grid.n, cfg.grid.dx)
    p = cfg.pulse
    pulse = PulseSpec(p.envelope, center=p.center, width=p.width, k=p.k)
    c = cfg.constants.c
    max_shift = c * max((abs(d) for d in cfg.sweep.delays), default=0.0)
    bs_cfg = cfg.beam_splitter
    position = bs_cfg.position
    if position is None:
        position = _snap_up(grid, p.center + p.width / 2 + max_shift + grid.dx)
    distance = bs_cfg.detector_distance if bs_cfg.detector_distance is not None else p.width
    bs = BeamSplitter.from_angle(
        bs_cfg.theta,
        alpha=bs_cfg.alpha,
        sign=PHASE_CONVENTIONS[bs_cfg.phase_convention],
        position=position,
    )
    circuit = two_port_circuit(
        grid, bs, position + distance, c=c, dispersion=cfg.propagation.dispersion
    )
    setup = Setup(grid, pulse, circuit)
    _check_geometry(setup, cfg)
    return setup


def _check_geometry(setup: Setup, cfg: ScenarioConfig) -> None:
    try:
        psi = make_pulse(setup.grid, setup.pulse)
    except SupportOutOfBounds as exc:
        raise ConfigError(f"pulse.center/pulse.width: {exc}") from None
    c = cfg.constants.c
    try:
        shifted = [shift(psi, -c * d) for d in cfg.sweep.delays] or [psi]
    except SupportOutOfBounds as exc:
        raise ConfigError(f"sweep.delays: {exc}") from None
    bs_index = setup.grid.index_of(setup.splitter.position)
    for m in shifted:
        if support_indices(m)[1] >= bs_index:
            raise ConfigError("beam_splitter.position: input pulse is not upstream of the splitter")
    modes = [RailMode({"a": m}) for m in shifted]
    t_final = clearance_time(setup.circuit, modes)
    sites = int(round(c * t_final / setup.grid.dx))
    tail = min(support_indices(m)[0] for m in shifted)
    lead = max(support_indices(m)[1] for m in shifted)
    width = int(math.ceil(setup.pulse.width / setup.grid.dx))
    try:
        check_guard(setup.grid, tail + sites, lead + sites, width, "outgoing pulses")
    except SupportOutOfBounds as exc:
        raise ConfigError(f"sweep.delays/grid.n: {exc}") from None


@dataclass(frozen=True)
class SingleBSResult:
    p_detector_x: float
    p_detector_y: float
    comm_RR: complex
    comm_TT: complex
    comm_RT: complex
    comm_total: complex
    t_final: float


def run_single_bs(setup: Setup) -> SingleBSResult:
    el = setup.splitter
    psi_i = RailMode({el.input_rails[0]: make_pulse(setup.grid, setup.pulse)})
    t_final = clearance_time(setup.circuit, [psi_i])
    (psi_f,) = run_circuit(setup.circuit, [psi_i], t_final)
    psi_t = psi_f.restrict([el.output_rails[0]])
    psi_r = psi_f.restrict([el.output_rails[1]])
    state = monomial_state([psi_f])
    p_x = expectation(state, DetectorObservable.single_at(normalize_rail(psi_t)))
    p_y = expectation(state, DetectorObservable.single_at(normalize_rail(psi_r)))
    return SingleBSResult(
        p_x,
        p_y,
        commutator_BBdag(psi_r, psi_r),
        commutator_BBdag(psi_t, psi_t),
        commutator_BBdag(psi_r, psi_t),
        commutator_BBdag(psi_f, psi_f),
        t_final,
    )


def normalize_rail(psi: RailMode) -> RailMode:
    n = psi.norm()
    if n == 0:
        return psi
    return psi / n


def snapshots(setup: Setup, times) -> dict[tuple[str, float], np.ndarray]:
    """Single-photon classical mode at each time, keyed by ``(rail, time)``."""
    el = setup.splitter
    psi_i = RailMode({el.input_rails[0]: make_pulse(setup.grid, setup.pulse)})
    out = {}
    for t in times:
        psi_t = propagate(setup.circuit, psi_i, t)
        for rail, m in psi_t.components.items():
            out[(rail, t)] = m.samples
    return out


def run_hom_sweep(setup: Setup, delays) -> list[DetectionReport]:
    return hom_sweep(setup.circuit, setup.pulse, delays)
