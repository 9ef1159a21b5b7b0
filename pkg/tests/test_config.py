import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pulsefock.config import (
    ScenarioConfig,
    load_config,
    parse_config,
    serialize_config,
)
from pulsefock.errors import ConfigError

FULL = """
[scenario]
kind = hom_sweep
[grid]
n = 1024
dx = 0.5
[constants]
c = 2.0
hbar = 1.0
[pulse]
envelope = gauss_truncated
width = 64
k = 1.2
center = 200     # inline comment
[beam_splitter]
theta = 0.6
phase_convention = t_eq_minus_ir
alpha = 0.3
position = 400
[propagation]
dispersion = full_abs_k
[sweep]
delays = -10:10:5
[output]
directory = results/%(run)s
snapshot_times = 0, 12.5
"""


def test_parse_full_config():
    cfg = parse_config(FULL)
    assert cfg.grid.n == 1024 and cfg.grid.dx == 0.5
    assert cfg.constants.c == 2.0
    assert cfg.pulse.envelope == "gauss_truncated"
    assert cfg.pulse.center == 200.0
    assert cfg.beam_splitter.phase_convention == "t_eq_minus_ir"
    assert cfg.beam_splitter.position == 400.0
    assert cfg.beam_splitter.detector_distance is None
    assert cfg.sweep.delays == (-10.0, -5.0, 0.0, 5.0, 10.0)
    assert cfg.output.snapshot_times == (0.0, 12.5)
    assert cfg.output.directory == "results/%(run)s"


def test_defaults():
    cfg = parse_config("")
    assert cfg == ScenarioConfig()
    assert cfg.constants.c == 1 and cfg.constants.hbar == 1
    assert cfg.beam_splitter.theta == pytest.approx(math.pi / 4)


def test_round_trip_full():
    cfg = parse_config(FULL)
    assert parse_config(serialize_config(cfg)) == cfg


@pytest.mark.parametrize(
    "text,field",
    [
        ("[grid]\nn = 1000", "grid.n"),
        ("[grid]\ndx = 0", "grid.dx"),
        ("[grid]\ndx = nan", "grid.dx"),
        ("[constants]\nc = -1", "constants.c"),
        ("[pulse]\nwidth = inf", "pulse.width"),
        ("[pulse]\nenvelope = box", "pulse.envelope"),
        ("[pulse]\nk = abc", "pulse.k"),
        ("[beam_splitter]\ntheta = 1.6", "beam_splitter.theta"),
        ("[beam_splitter]\ntheta = 0", "beam_splitter.theta"),
        ("[beam_splitter]\nphase_convention = up", "beam_splitter.phase_convention"),
        ("[scenario]\nkind = other", "scenario.kind"),
        ("[sweep]\ndelays = 1:2", "sweep.delays"),
        ("[sweep]\ndelays = 1, x", "sweep.delays"),
        ("[sweep]\ndelays = 1, nan", "sweep.delays"),
        ("[output]\nsnapshot_times = -1", "output.snapshot_times"),
        ("[grid]\nbogus = 1", "grid.bogus"),
        ("[bogus]\nx = 1", "bogus"),
        ("[propagation]\ndispersion = split_step", "propagation.dispersion"),
    ],
)
def test_invalid_fields_are_named(text, field):
    with pytest.raises(ConfigError, match=field.replace(".", r"\.")):
        parse_config(text)


def test_malformed_text():
    with pytest.raises(ConfigError):
        parse_config("n = 3")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.ini")


finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@given(
    n=st.sampled_from([16, 256, 4096]),
    dx=st.floats(1e-3, 10),
    width=st.floats(1e-2, 1e3),
    k=finite,
    center=finite,
    theta=st.floats(1e-3, math.pi / 2 - 1e-3),
    conv=st.sampled_from(["t_eq_ir", "t_eq_minus_ir"]),
    position=st.none() | finite,
    delays=st.lists(finite, max_size=5),
    times=st.lists(st.floats(0, 1e4), max_size=3),
    kind=st.sampled_from(["", "single_bs", "hom_sweep", "verify"]),
)
def test_round_trip_property(n, dx, width, k, center, theta, conv, position, delays, times, kind):
    cfg = ScenarioConfig()
    cfg.grid.n, cfg.grid.dx = n, dx
    cfg.pulse.width, cfg.pulse.k, cfg.pulse.center = width, k, center
    cfg.beam_splitter.theta, cfg.beam_splitter.phase_convention = theta, conv
    cfg.beam_splitter.position = position
    cfg.sweep.delays = tuple(delays)
    cfg.output.snapshot_times = tuple(times)
    cfg.scenario.kind = kind
    cfg.validate()
    assert parse_config(serialize_config(cfg)) == cfg
