import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import SMALL, coeffs, unit_modes
from pulsefock.errors import ZeroMode
from pulsefock.fock import (
    FockState,
    Monomial,
    annihilate,
    commutator_BBdag,
    create,
    energy_expectation,
    evolve_fock_state,
    inner_product,
    monomial_state,
    oracle_inner_product,
    permanent,
    vacuum,
    vacuum_expectation_oracle,
    zero_state,
)
from pulsefock.grid_modes import Grid, Mode, PulseSpec, make_pulse, zero_mode
from pulsefock.propagation import (
    BeamSplitter,
    FrequencyOperator1D,
    RailMode,
    evolve,
    run_circuit,
    two_port_circuit,
)
from pulsefock.spectral_iso import plane_wave


def brute_permanent(a):
    n = a.shape[0]
    return sum(
        np.prod([a[i, p[i]] for i in range(n)]) for p in itertools.permutations(range(n))
    )


def assert_same_state(a, b, tol=1e-12):
    """Equality probed through inner products (direct norms of differences cancel badly)."""
    scale = 1 + a.norm2() + b.norm2()
    for probe in (a, b):
        assert abs(inner_product(probe, a) - inner_product(probe, b)) <= tol * scale


matrices = st.integers(1, 6).flatmap(
    lambda n: st.lists(coeffs, min_size=n * n, max_size=n * n).map(
        lambda v: np.array(v, dtype=complex).reshape(n, n)
    )
)


# permanent


@given(matrices)
def test_permanent_matches_brute_force(a):
    expect = brute_permanent(a)
    scale = max(1.0, np.abs(a).max() ** len(a) * math.factorial(len(a)))
    assert abs(permanent(a) - expect) <= 1e-12 * scale


def test_permanent_small_cases():
    assert permanent(np.zeros((0, 0))) == 1
    assert permanent(np.eye(7)) == pytest.approx(1.0)
    assert permanent(np.ones((6, 6))) == pytest.approx(720.0)
    assert permanent([[1, 2], [3, 4]]) == pytest.approx(10.0)
    with pytest.raises(ValueError):
        permanent(np.ones((2, 3)))
    with pytest.raises(ValueError):
        permanent(np.ones((21, 21)))


# creation and annihilation


def pulses(n=2, grid=Grid(256)):
    return [
        make_pulse(grid, PulseSpec("sin2", center=60 + 40 * j, width=24, k=1.0)) for j in range(n)
    ]


def test_one_photon_state():
    (psi,) = pulses(1)
    s = create(vacuum(), psi)
    assert s.photon_number == 1
    assert s.norm2() == pytest.approx(1.0, abs=1e-12)


@given(unit_modes(), unit_modes())
def test_two_photon_norm(a, b):
    s = create(create(vacuum(), a), b)
    overlap = commutator_BBdag(a, b)
    assert s.norm2() == pytest.approx(1 + abs(overlap) ** 2, abs=1e-12)


def test_disjoint_two_photon_state_is_normalized():
    a, b = pulses(2)
    assert create(create(vacuum(), a), b).norm2() == pytest.approx(1.0, abs=1e-12)


@given(unit_modes(), coeffs)
def test_create_is_linear_in_mode(psi, alpha):
    if abs(alpha) < 1e-6:
        alpha = 1.0
    lhs = create(vacuum(), alpha * psi)
    rhs = create(vacuum(), psi) * alpha
    assert_same_state(lhs, rhs)


def test_create_zero_mode_raises():
    with pytest.raises(ZeroMode):
        create(vacuum(), zero_mode(SMALL))


def test_annihilate_vacuum_is_zero():
    (psi,) = pulses(1)
    assert annihilate(vacuum(), psi).is_zero()


@given(unit_modes(), unit_modes())
def test_annihilate_one_photon(a, b):
    out = annihilate(create(vacuum(), b), a)
    assert out.photon_number == 0
    assert inner_product(vacuum(), out) == pytest.approx(commutator_BBdag(a, b), abs=1e-12)


@given(unit_modes(), unit_modes(), unit_modes())
def test_annihilate_two_photons(a, b, c):
    out = annihilate(monomial_state([a, b]), c)
    expect = monomial_state([b], commutator_BBdag(c, a)) + monomial_state(
        [a], commutator_BBdag(c, b)
    )
    assert_same_state(out, expect)


# inner products


def test_orthonormal_pair_state_has_unit_norm():
    a = plane_wave(SMALL, 1)
    b = plane_wave(SMALL, 3)
    s = monomial_state([a, b])
    assert inner_product(s, s) == pytest.approx(1.0, abs=1e-12)


@given(unit_modes(), unit_modes(), unit_modes())
def test_photon_number_sectors_orthogonal(a, b, c):
    assert inner_product(monomial_state([a, b]), monomial_state([c])) == 0
    assert oracle_inner_product(monomial_state([a]), monomial_state([b, c])) == 0


mode_lists = st.integers(1, 4).flatmap(
    lambda n: st.tuples(
        st.lists(unit_modes(), min_size=n, max_size=n),
        st.lists(unit_modes(), min_size=n, max_size=n),
    )
)


@given(mode_lists)
def test_permanent_route_matches_oracle(pair):
    a, b = pair
    sa, sb = monomial_state(a), monomial_state(b)
    assert abs(inner_product(sa, sb) - oracle_inner_product(sa, sb)) <= 1e-12 * math.factorial(len(a))


@given(st.lists(unit_modes(), min_size=2, max_size=4), st.randoms(use_true_random=False))
def test_bosonic_symmetry(ms, rnd):
    perm = list(ms)
    rnd.shuffle(perm)
    probe = monomial_state(ms[::-1])
    assert inner_product(probe, monomial_state(ms)) == inner_product(probe, monomial_state(perm))


@given(st.lists(unit_modes(), min_size=1, max_size=3), unit_modes(), unit_modes(), coeffs, coeffs)
def test_create_linearity_ledger(rest, a, b, alpha, beta):
    base = monomial_state(rest)
    mixed = alpha * a + beta * b
    if mixed.norm() < 1e-6:
        return
    lhs = create(base, mixed)
    rhs = create(base, a) * alpha + create(base, b) * beta
    assert_same_state(lhs, rhs)


def test_inner_product_is_hermitian_positive():
    rng = np.random.default_rng(5)
    ms = [Mode(SMALL, rng.normal(size=16) + 1j * rng.normal(size=16)) for _ in range(6)]
    s = monomial_state(ms[:3], 0.3) + monomial_state(ms[3:], 1j)
    val = inner_product(s, s)
    assert val.real > 0
    assert abs(val.imag) <= 1e-12 * val.real


def test_state_arithmetic():
    a, b = pulses(2)
    s = monomial_state([a, b])
    assert (s - s).is_zero()
    assert (s + s).norm2() == pytest.approx(4 * s.norm2())
    assert monomial_state([b, a]).terms == s.terms
    assert zero_state(2).is_zero()
    with pytest.raises(ValueError):
        s + monomial_state([a])
    with pytest.raises(AttributeError):
        s.photon_number = 3


def test_term_pruning():
    (a,) = pulses(1)
    s = FockState([Monomial(1e-16, (a,)), Monomial(1.0, (a,))], 1)
    assert len(s.terms) == 1
    assert FockState([Monomial(1e-16, (a,))], 1).is_zero()


# oracle


def test_oracle_basic_values():
    (psi,) = pulses(1)
    assert vacuum_expectation_oracle([(False, psi), (True, psi)]) == pytest.approx(1.0)
    assert vacuum_expectation_oracle([(True, psi), (False, psi)]) == 0
    assert vacuum_expectation_oracle([]) == 1


def split_photon():
    grid = Grid(1024)
    circuit = two_port_circuit(grid, BeamSplitter.fifty_fifty(position=300.0), 400.0)
    psi = RailMode({"a": make_pulse(grid, PulseSpec("sin2", center=200, width=64, k=1.0))})
    (out,) = run_circuit(circuit, [psi], 140.0)
    return circuit, psi, out


def test_split_photon_commutators():
    _, _, out = split_photon()
    psi_t = out.restrict(["x"])
    psi_r = out.restrict(["y"])
    assert vacuum_expectation_oracle([(False, psi_r), (True, psi_r)]) == pytest.approx(0.5, abs=1e-12)
    assert vacuum_expectation_oracle([(False, out), (True, out)]) == pytest.approx(1.0, abs=1e-12)
    assert commutator_BBdag(psi_t, psi_t) == pytest.approx(0.5, abs=1e-12)
    assert commutator_BBdag(psi_r, psi_t) == 0


def test_eigenmode_commutators():
    a, b = plane_wave(SMALL, 2), plane_wave(SMALL, 5)
    assert commutator_BBdag(a, a) == pytest.approx(1.0, abs=1e-12)
    assert abs(commutator_BBdag(a, b)) < 1e-12


# evolution


def test_evolution_at_zero_time():
    a, b = pulses(2)
    s = monomial_state([a, b])
    op = FrequencyOperator1D(a.grid, dispersion="full_abs_k")
    assert evolve_fock_state(s, op, 0.0).terms == s.terms


def test_one_photon_through_splitter_is_single_monomial():
    circuit, psi, out = split_photon()
    s = evolve_fock_state(monomial_state([psi]), circuit, 140.0)
    (term,) = s.terms
    (mode,) = term.modes
    assert set(mode.rails) == {"x", "y"}
    assert s.norm2() == pytest.approx(1.0, abs=1e-12)


def test_hom_state_has_no_cross_sector():
    circuit, psi, _ = split_photon()
    in_b = RailMode({"b": psi.component("a")})
    s = evolve_fock_state(monomial_state([psi, in_b]), circuit, 140.0)
    x = RailMode({"x": s.terms[0].modes[0].component("x")})
    y = RailMode({"y": s.terms[0].modes[0].component("y")})
    xn, yn = x / x.norm(), y / y.norm()
    assert abs(inner_product(monomial_state([xn, yn]), s)) < 1e-12
    assert abs(inner_product(monomial_state([xn, xn]), s)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_norm_conserved_under_evolution(n):
    rng = np.random.default_rng(n)
    grid = Grid(64)
    op = FrequencyOperator1D(grid, c=1.0, dispersion="full_abs_k")
    for _ in range(5):
        ms = [Mode(grid, rng.normal(size=64) + 1j * rng.normal(size=64)) for _ in range(n)]
        s = monomial_state(ms, 0.7) + monomial_state(ms[::-1][:1] + ms[1:], 0.2j)
        t = float(rng.uniform(0, 40))
        out = evolve_state(s, op, t)
        assert out.norm2() == pytest.approx(s.norm2(), rel=1e-10)


def evolve_state(s, op, t):
    """Mode-by-mode evolution without the guard test (random modes fill the grid)."""
    return FockState(
        [Monomial(tm.coeff, [evolve(op, m, t, check=False) for m in tm.modes]) for tm in s.terms],
        s.photon_number,
    )


# energy


def test_vacuum_energy_is_zero():
    op = FrequencyOperator1D(SMALL, dispersion="full_abs_k")
    assert energy_expectation(vacuum(), op) == 0


def test_narrowband_photon_energy_is_c_k0():
    grid = Grid(4096)
    k0 = math.pi / 2
    w = 512.0
    psi = make_pulse(grid, PulseSpec("sin2", center=1500, width=w, k=k0))
    op = FrequencyOperator1D(grid, c=1.5, dispersion="full_abs_k")
    e = energy_expectation(monomial_state([psi]), op, hbar=2.0)
    # spectral half-width of a sin^2 pulse of width w is about 4 pi / w
    assert abs(e - 2.0 * 1.5 * k0) <= 2.0 * 1.5 * 4 * math.pi / w


def test_energy_methods_agree():
    rng = np.random.default_rng(11)
    grid = Grid(8, dx=0.7)
    op = FrequencyOperator1D(grid, c=1.2, dispersion="full_abs_k")
    for n in (1, 2, 3):
        ms = [Mode(grid, rng.normal(size=8) + 1j * rng.normal(size=8)) for _ in range(2 * n)]
        s = monomial_state(ms[:n], 0.5) + monomial_state(ms[n:], 0.3 - 0.4j)
        e_min = energy_expectation(s, op, method="minors")
        e_orc = energy_expectation(s, op, method="oracle")
        assert e_min == pytest.approx(e_orc, rel=1e-10)


def test_orthonormal_energy_shortcut():
    op = FrequencyOperator1D(SMALL, dispersion="full_abs_k")
    s = monomial_state([plane_wave(SMALL, 1), plane_wave(SMALL, 3)])
    expect = op.omega()[1] + op.omega()[3]
    assert energy_expectation(s, op, method="orthonormal") == pytest.approx(expect)
    assert energy_expectation(s, op, method="minors") == pytest.approx(expect)


def test_energy_conserved_under_evolution():
    rng = np.random.default_rng(3)
    grid = Grid(64)
    op = FrequencyOperator1D(grid, dispersion="full_abs_k")
    ms = [Mode(grid, rng.normal(size=64) + 1j * rng.normal(size=64)) for _ in range(2)]
    s = monomial_state(ms)
    e0 = energy_expectation(s, op)
    for t in (1.0, 7.3, 30.0):
        assert energy_expectation(evolve_state(s, op, t), op) == pytest.approx(e0, abs=1e-10 * max(1, e0))


def apply_hamiltonian(state, op):
    """``H|Phi>`` for a monomial superposition: replace one mode at a time by ``Omega psi``."""
    out = zero_state(state.photon_number)
    for tm in state.terms:
        for j in range(len(tm.modes)):
            ms = list(tm.modes)
            ms[j] = op.apply(ms[j])
            out = out + FockState([Monomial(tm.coeff, ms)], state.photon_number)
    return out


@pytest.mark.parametrize("n", [1, 2, 3])
def test_schrodinger_equation_by_finite_difference(n):
    rng = np.random.default_rng(40 + n)
    grid = Grid(32)
    op = FrequencyOperator1D(grid, dispersion="full_abs_k")
    ms = [make_pulse(grid, PulseSpec("sin2", center=10 + 2 * j, width=6, k=0.8)) for j in range(n)]
    s = monomial_state(ms)
    t, h = float(rng.uniform(0, 5)), 1e-4

    deriv = (evolve_state(s, op, t + h) - evolve_state(s, op, t - h)) * (1 / (2 * h))
    rhs = apply_hamiltonian(evolve_state(s, op, t), op) * -1j
    assert_same_state(deriv, rhs, tol=1e-7)
