"""Two-mode squeezer (OPA), arm phase shifts and the inverting second OPA.

The squeezer exp[g(e^{i theta} a^dag b^dag - e^{-i theta} a b)] conserves
n_a - n_b, so it is applied block by block.  Inside the block with
difference d the basis is |m + d_a, m + d_b> (d_a = max(d, 0),
d_b = max(-d, 0)), and the generator equals

    g * P (-i T) P^dag,   P = diag((i e^{i theta})^m),

with T real symmetric tridiagonal, off-diagonal sqrt((m+|d|+1)(m+1)).  T is
diagonalised once per (|d|, size) and cached; gain and pump phase only enter
through the eigenphases and P.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceError
from .fock import Branch, NumberDiagonalEnsemble, TwoModePureState


@dataclass(frozen=True)
class OpaParams:
    gain: float
    pump_phase: float = 0.0

    def __post_init__(self):
        if self.gain < 0:
            raise ValueError(f"OPA gain must be >= 0, got {self.gain!r}")

    @property
    def n_kappa(self) -> float:
        """Mean photon number the OPA makes from vacuum, 2 sinh^2 g."""
        return 2.0 * np.sinh(self.gain) ** 2

    def inverse(self) -> "OpaParams":
        return OpaParams(self.gain, self.pump_phase + np.pi)


@dataclass(frozen=True)
class PhaseModel:
    """Unknown phase shifts inside the interferometer.

    kinds: ``upper`` (phi on mode A), ``lower`` (phi on mode B), ``split``
    (exp(i g_s phi), i.e. phi/2 per arm) and ``two_phase`` (phi = phase sum,
    phi_d = phase difference).
    """

    kind: str
    phi: float = 0.0
    phi_d: float = 0.0

    def __post_init__(self):
        if self.kind not in ("upper", "lower", "split", "two_phase"):
            raise ValueError(f"unknown phase model {self.kind!r}")

    @classmethod
    def upper(cls, phi):
        return cls("upper", phi)

    @classmethod
    def lower(cls, phi):
        return cls("lower", phi)

    @classmethod
    def split(cls, phi):
        return cls("split", phi)

    @classmethod
    def two_phase(cls, phi_s, phi_d):
        return cls("two_phase", phi_s, phi_d)

    def arm_phases(self) -> tuple[float, float]:
        if self.kind == "upper":
            return self.phi, 0.0
        if self.kind == "lower":
            return 0.0, self.phi
        if self.kind == "split":
            return self.phi / 2, self.phi / 2
        return (self.phi + self.phi_d) / 2, (self.phi - self.phi_d) / 2


@functools.lru_cache(maxsize=1024)
def _block_eig(abs_d: int, size: int):
    m = np.arange(size - 1, dtype=float)
    offdiag = np.sqrt((m + abs_d + 1.0) * (m + 1.0))
    if size == 1:
        lam, vec = np.zeros(1), np.ones((1, 1))
    else:
        lam, vec = eigh_tridiagonal(np.zeros(size), offdiag)
    lam.setflags(write=False)
    vec.setflags(write=False)
    return lam, vec


@functools.lru_cache(maxsize=64)
def _block_indices(max_total: int):
    blocks = []
    for d in range(-max_total, max_total + 1):
        kept = (max_total - abs(d)) // 2 + 1
        m = np.arange(kept)
        blocks.append((abs(d), m + max(d, 0), m + max(-d, 0)))
    return tuple(blocks)


def _evolve_block(vec, abs_d, params, guard):
    kept = vec.shape[0]
    lam, v = _block_eig(abs_d, kept + guard)
    phase = np.exp(1j * np.arange(kept) * (params.pump_phase + np.pi / 2))
    rows = v[:kept]
    coeff = rows.T @ (phase.conj() * vec)
    coeff *= np.exp(-1j * params.gain * lam)
    # guard-band rows are never formed: that weight is what gets discarded
    return phase * (rows @ coeff)


def apply_opa(state: TwoModePureState, params: OpaParams, check: bool = True) -> TwoModePureState:
    """Apply the squeezer to ``state``; weight pushed past the cutoff is dropped."""
    if params.gain == 0:
        return state
    cutoff = state.cutoff
    amps = state.amplitudes
    out = np.zeros_like(amps)
    for abs_d, ia, ib in _block_indices(cutoff.max_total):
        vec = amps[ia, ib]
        if not vec.any():
            continue
        out[ia, ib] = _evolve_block(vec, abs_d, params, cutoff.guard)
    result = TwoModePureState(out, cutoff)
    if check:
        _check(result.norm_deficit, cutoff)
    return result


def _check(deficit, cutoff):
    if deficit > cutoff.tail_tol:
        bigger = 2 * cutoff.max_total
        raise ConvergenceError(
            f"OPA output loses {deficit:.3e} beyond max_total={cutoff.max_total} "
            f"(tail_tol={cutoff.tail_tol:g}); try max_total={bigger}",
            norm_deficit=deficit, suggested_max_total=bigger)


def apply_opa_ensemble(ens: NumberDiagonalEnsemble, params: OpaParams) -> NumberDiagonalEnsemble:
    """Branchwise OPA.  Truncation loss is judged on the weighted total, so a
    negligible branch may be cut harder than the ensemble as a whole."""
    members = tuple(Branch(b.weight, b.label, apply_opa(b.state, params, check=False))
                    for b in ens)
    result = NumberDiagonalEnsemble(members)
    _check(result.norm_deficit, ens.cutoff)
    return result


def second_opa(state, params: OpaParams, gain: float | None = None):
    """Inverting squeezer: pump phase shifted by pi, same gain unless overridden."""
    inv = params.inverse()
    if gain is not None:
        inv = OpaParams(gain, inv.pump_phase)
    if isinstance(state, NumberDiagonalEnsemble):
        return apply_opa_ensemble(state, inv)
    return apply_opa(state, inv)


def phase_factors(model: PhaseModel, max_total: int) -> np.ndarray:
    phi_a, phi_b = model.arm_phases()
    n = np.arange(max_total + 1)
    return np.exp(1j * phi_a * n)[:, None] * np.exp(1j * phi_b * n)[None, :]


def apply_phase(state, model: PhaseModel):
    """Multiply amplitudes by exp(i (phi_a n_a + phi_b n_b))."""
    if isinstance(state, NumberDiagonalEnsemble):
        return NumberDiagonalEnsemble(tuple(
            Branch(b.weight, b.label, apply_phase(b.state, model)) for b in state))
    factors = phase_factors(model, state.cutoff.max_total)
    return state.with_amplitudes(state.amplitudes * factors)
