"""Bosonic Fock states built on arbitrary (non-orthonormal) classical modes.

A state is a finite linear combination of monomials
``coeff * Bdag(psi_1) ... Bdag(psi_N) |vac>``. Creation operators are linear in
their mode and satisfy ``[B(a), Bdag(b)] = <a|b>``, so the overlap of two
monomials is the permanent of the Gram matrix of their modes. The permanent
route is the fast path; :func:`vacuum_expectation_oracle` evaluates the same
numbers by literally commuting annihilators to the vacuum and is kept as an
independent check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .errors import ZeroMode
from .grid_modes import Mode
from .propagation import (
    AnyMode,
    Circuit,
    FrequencyOperator1D,
    RailMode,
    evolve,
    inner,
    run_circuit,
)
from .spectral_iso import plane_wave

PRUNE_TOL = 1e-15
MAX_PERMANENT_N = 20
MAX_ORACLE_WORD = 14
MAX_ORACLE_N = 6
_RYSER_CHUNK = 1 << 15


def permanent(a) -> complex:
    """Permanent by Ryser's inclusion-exclusion formula, ``O(2^n n^2)`` vectorized."""
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"permanent needs a square matrix, got shape {a.shape}")
    if n == 0:
        return 1.0 + 0j
    if n > MAX_PERMANENT_N:
        raise ValueError(f"permanent limited to n <= {MAX_PERMANENT_N}, got {n}")
    cols = np.arange(n)
    total = 0j
    n_subsets = 1 << n
    for start in range(1, n_subsets, _RYSER_CHUNK):
        idx = np.arange(start, min(start + _RYSER_CHUNK, n_subsets))
        bits = (idx[:, None] >> cols) & 1
        prods = np.prod(bits @ a.T, axis=1)
        signs = 1 - 2 * (bits.sum(axis=1) & 1)
        total += np.sum(signs * prods)
    return complex((-1) ** n * total)


@dataclass(frozen=True)
class Monomial:
    """``coeff * Bdag(modes[0]) ... Bdag(modes[-1]) |vac>``; mode order carries no meaning."""

    coeff: complex
    modes: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeff", complex(self.coeff))
        object.__setattr__(self, "modes", tuple(self.modes))


def _canonical(terms: Iterable[Monomial]) -> tuple[Monomial, ...]:
    merged: dict[tuple, list] = {}
    for term in terms:
        modes = tuple(sorted(term.modes, key=lambda m: m.uid))
        key = tuple(m.uid for m in modes)
        if key in merged:
            merged[key][0] += term.coeff
        else:
            merged[key] = [term.coeff, modes]
    return tuple(Monomial(c, modes) for c, modes in merged.values() if abs(c) >= PRUNE_TOL)


class FockState:
    """Immutable N-photon state; ``photon_number`` is fixed even for the zero state.

    Monomials with ``|coeff| < 1e-15`` are dropped after every operation.
    """

    __slots__ = ("terms", "photon_number")

    def __init__(self, terms: Iterable[Monomial], photon_number: int):
        terms = _canonical(terms)
        for t in terms:
            if len(t.modes) != photon_number:
                raise ValueError(
                    f"monomial with {len(t.modes)} photons in a {photon_number}-photon state"
                )
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "photon_number", photon_number)

    def __setattr__(self, name, value):
        raise AttributeError("FockState is immutable")

    def __repr__(self):
        return f"FockState(N={self.photon_number}, terms={len(self.terms)})"

    def __add__(self, other: "FockState") -> "FockState":
        if not isinstance(other, FockState):
            return NotImplemented
        if other.photon_number != self.photon_number:
            if not other.terms:
                return self
            if not self.terms:
                return other
            raise ValueError("cannot add states with different photon numbers")
        return FockState(self.terms + other.terms, self.photon_number)

    def __mul__(self, alpha) -> "FockState":
        if not isinstance(alpha, (int, float, complex, np.number)):
            return NotImplemented
        return FockState((Monomial(alpha * t.coeff, t.modes) for t in self.terms), self.photon_number)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self) -> bool:
        return not self.terms

    def norm2(self) -> float:
        return inner_product(self, self).real

    def modes(self) -> list:
        seen = {}
        for t in self.terms:
            for m in t.modes:
                seen.setdefault(m.uid, m)
        return list(seen.values())


def vacuum() -> FockState:
    return FockState([Monomial(1.0, ())], 0)


def zero_state(photon_number: int = 0) -> FockState:
    return FockState([], photon_number)


def _is_zero_mode(psi: AnyMode) -> bool:
    return psi.is_zero()


def create(state: FockState, psi: AnyMode) -> FockState:
    """Apply ``Bdag(psi)``."""
    if _is_zero_mode(psi):
        raise ZeroMode("creation operator on a zero mode")
    return FockState(
        (Monomial(t.coeff, t.modes + (psi,)) for t in state.terms), state.photon_number + 1
    )


def monomial_state(modes: Sequence[AnyMode], coeff: complex = 1.0) -> FockState:
    """``coeff * prod_j Bdag(modes[j]) |vac>``."""
    state = vacuum() * coeff
    for m in modes:
        state = create(state, m)
    return state


def annihilate(state: FockState, psi: AnyMode) -> FockState:
    """Apply ``B(psi)``: ``B(psi) prod_j Bdag(phi_j)|vac> = sum_j <psi|phi_j> prod_{j'!=j} Bdag(phi_j')|vac>``."""
    if state.photon_number == 0:
        return zero_state(0)
    out = []
    for t in state.terms:
        for j, phi in enumerate(t.modes):
            amp = inner(psi, phi)
            if amp != 0:
                out.append(Monomial(t.coeff * amp, t.modes[:j] + t.modes[j + 1:]))
    return FockState(out, state.photon_number - 1)


def commutator_BBdag(a: AnyMode, b: AnyMode) -> complex:
    """``[B(a), Bdag(b)] = <a|b>`` (a c-number, not necessarily 0 or 1)."""
    return inner(a, b)


class _GramCache:
    def __init__(self):
        self._cache: dict[tuple[int, int], complex] = {}

    def __call__(self, a: AnyMode, b: AnyMode) -> complex:
        key = (a.uid, b.uid)
        val = self._cache.get(key)
        if val is None:
            val = inner(a, b)
            self._cache[key] = val
            self._cache[(b.uid, a.uid)] = val.conjugate()
        return val

    def matrix(self, rows: Sequence[AnyMode], cols: Sequence[AnyMode]) -> np.ndarray:
        return np.array([[self(r, c) for c in cols] for r in rows], dtype=np.complex128).reshape(
            len(rows), len(cols)
        )


def inner_product(a: FockState, b: FockState) -> complex:
    """``<a|b>`` as a sum of Gram-matrix permanents over monomial pairs."""
    if a.photon_number != b.photon_number:
        return 0j
    gram = _GramCache()
    total = 0j
    for ta in a.terms:
        for tb in b.terms:
            total += ta.coeff.conjugate() * tb.coeff * permanent(gram.matrix(ta.modes, tb.modes))
    return total


def vacuum_expectation_oracle(
    word: Sequence[tuple[bool, AnyMode]],
    scalar: Callable[[AnyMode, AnyMode], complex] = inner,
) -> complex:
    """``<vac| w_1 w_2 ... w_m |vac>`` by repeated use of ``B(a) Bdag(b) = Bdag(b) B(a) + <a|b>``.

    ``word`` lists operators left to right as ``(is_creator, mode)``. Cost is
    factorial in the photon number.
    """
    word = tuple((bool(d), m) for d, m in word)
    if len(word) > MAX_ORACLE_WORD:
        raise ValueError(f"oracle limited to words of length <= {MAX_ORACLE_WORD}")

    def rec(w):
        if not w:
            return 1.0 + 0j
        if w[0][0] or not w[-1][0]:
            # <vac| Bdag = 0 and B |vac> = 0
            return 0j
        i = next(k for k in range(len(w) - 1) if not w[k][0] and w[k + 1][0])
        a, b = w[i][1], w[i + 1][1]
        swapped = w[:i] + (w[i + 1], w[i]) + w[i + 2:]
        contracted = w[:i] + w[i + 2:]
        return rec(swapped) + scalar(a, b) * rec(contracted)

    return rec(word)


def oracle_inner_product(a: FockState, b: FockState) -> complex:
    """``<a|b>`` through :func:`vacuum_expectation_oracle` (slow reference)."""
    if a.photon_number != b.photon_number:
        return 0j
    if a.photon_number > MAX_ORACLE_N:
        raise ValueError(f"oracle limited to N <= {MAX_ORACLE_N} photons")
    total = 0j
    for ta in a.terms:
        bra = [(False, m) for m in reversed(ta.modes)]
        for tb in b.terms:
            ket = [(True, m) for m in tb.modes]
            total += ta.coeff.conjugate() * tb.coeff * vacuum_expectation_oracle(bra + ket)
    return total


def evolve_fock_state(
    state: FockState, op: Union[FrequencyOperator1D, Circuit], t: float
) -> FockState:
    """Replace every mode by its classically evolved image; coefficients are unchanged."""
    images: dict[int, AnyMode] = {}
    for m in state.modes():
        if isinstance(op, Circuit):
            if not isinstance(m, RailMode):
                raise TypeError("circuit evolution needs RailMode photons")
            images[m.uid] = run_circuit(op, [m], t)[0]
        else:
            images[m.uid] = evolve(op, m, t)
    return FockState(
        (Monomial(tm.coeff, tuple(images[m.uid] for m in tm.modes)) for tm in state.terms),
        state.photon_number,
    )


def _apply_omega(op: FrequencyOperator1D, m: AnyMode) -> AnyMode:
    if isinstance(m, RailMode):
        return RailMode({r: op.apply(c) for r, c in m.components.items()})
    return op.apply(m)


def _permanent_minor(g: np.ndarray, i: int, j: int) -> complex:
    return permanent(np.delete(np.delete(g, i, axis=0), j, axis=1))


def one_body_expectation(
    state: FockState, op_apply: Callable[[AnyMode], AnyMode]
) -> complex:
    """Unnormalized ``<state| dGamma(A) |state>`` for a one-mode operator ``A``.

    Uses ``<Phi_a|dGamma(A)|Phi_b> = sum_ij <phi_i|A psi_j> perm(G without row i, col j)``.
    """
    gram = _GramCache()
    applied: dict[int, AnyMode] = {}
    total = 0j
    for ta in state.terms:
        for tb in state.terms:
            g = gram.matrix(ta.modes, tb.modes)
            acc = 0j
            for j, psi in enumerate(tb.modes):
                if psi.uid not in applied:
                    applied[psi.uid] = op_apply(psi)
                a_psi = applied[psi.uid]
                for i, phi in enumerate(ta.modes):
                    acc += inner(phi, a_psi) * _permanent_minor(g, i, j)
            total += ta.coeff.conjugate() * tb.coeff * acc
    return total


def energy_expectation(
    state: FockState, op: FrequencyOperator1D, hbar: float = 1.0, method: str = "auto"
) -> float:
    """``<Phi|H|Phi> / <Phi|Phi>`` with ``H = sum_kappa hbar omega_kappa Bdag_kappa B_kappa``.

    ``method``:
      * ``"orthonormal"``: one monomial of orthonormal modes, ``sum_j <psi_j|hbar Omega|psi_j>``.
      * ``"minors"``: general second-quantized one-body formula.
      * ``"oracle"``: inserts ``H`` over the full discrete eigenbasis and evaluates each
        term with :func:`vacuum_expectation_oracle`; only for small grids.
      * ``"auto"``: ``orthonormal`` when it applies, otherwise ``minors``.
    """
    if state.is_zero():
        raise ZeroMode("energy of the zero state is undefined")
    if state.photon_number == 0:
        return 0.0
    if method == "auto":
        method = "orthonormal" if _is_orthonormal_monomial(state) else "minors"
    if method == "orthonormal":
        if not _is_orthonormal_monomial(state):
            raise ValueError("orthonormal method needs a single monomial of orthonormal modes")
        (term,) = state.terms
        e = sum(inner(m, _apply_omega(op, m)).real for m in term.modes)
        return hbar * e
    norm2 = state.norm2()
    if method == "minors":
        num = one_body_expectation(state, lambda m: _apply_omega(op, m))
    elif method == "oracle":
        num = _energy_oracle(state, op)
    else:
        raise ValueError(f"unknown method {method!r}")
    return hbar * num.real / norm2


def _is_orthonormal_monomial(state: FockState) -> bool:
    if len(state.terms) != 1:
        return False
    (term,) = state.terms
    if abs(abs(term.coeff) - 1) > 1e-12:
        return False
    g = _GramCache().matrix(term.modes, term.modes)
    return bool(np.allclose(g, np.eye(len(term.modes)), atol=1e-12, rtol=0))


def _energy_oracle(state: FockState, op: FrequencyOperator1D) -> complex:
    grid = op.grid
    if grid.n_points > 64:
        raise ValueError("oracle energy evaluation limited to grids of <= 64 points")
    for m in state.modes():
        if not isinstance(m, Mode):
            raise TypeError("oracle energy evaluation needs plain Mode photons")
    omega = op.omega()
    basis = [plane_wave(grid, k) for k in range(grid.n_points)]
    total = 0j
    for ta in state.terms:
        bra = [(False, m) for m in reversed(ta.modes)]
        for tb in state.terms:
            ket = [(True, m) for m in tb.modes]
            acc = 0j
            for w, phi in zip(omega, basis):
                if w == 0:
                    continue
                acc += w * vacuum_expectation_oracle(bra + [(True, phi), (False, phi)] + ket)
            total += ta.coeff.conjugate() * tb.coeff * acc
    return total
