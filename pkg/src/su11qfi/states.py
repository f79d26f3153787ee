"""Single-mode input preparation and two-mode products."""
from __future__ import annotations

from dataclasses import dataclass
from math import lgamma, log

import numpy as np
from scipy.linalg import expm

from .errors import ConvergenceError, CutoffError, PreconditionError, UnsupportedError
from .fock import (Branch, FockCutoff, NumberDiagonalEnsemble, TwoModePureState,
                   photon_grids)

KINDS = ("vacuum", "fock", "coherent", "squeezed_vacuum", "number_mixture")

# branches lighter than this fraction of tail_tol are folded into the deficit
PRUNE_FRACTION = 1e-8


@dataclass(frozen=True)
class ModeSpec:
    kind: str
    n: int = 0
    alpha: complex = 0j
    r: float = 0.0
    phase: float = 0.0
    probabilities: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown mode kind {self.kind!r}")
        if self.kind == "fock" and (int(self.n) != self.n or self.n < 0):
            raise ValueError(f"fock photon number must be a nonnegative integer, got {self.n!r}")
        if self.kind == "squeezed_vacuum" and self.r < 0:
            raise ValueError(f"squeezing strength must be >= 0, got {self.r!r}")
        if self.kind == "number_mixture":
            p = np.asarray(self.probabilities, dtype=float)
            if p.size == 0 or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
                raise ValueError("mixture probabilities must be nonnegative and sum to 1")
            object.__setattr__(self, "probabilities", tuple(float(x) for x in p))
        object.__setattr__(self, "alpha", complex(self.alpha))

    @classmethod
    def vacuum(cls):
        return cls("vacuum")

    @classmethod
    def fock(cls, n: int):
        return cls("fock", n=int(n))

    @classmethod
    def coherent(cls, alpha: complex):
        return cls("coherent", alpha=alpha)

    @classmethod
    def squeezed_vacuum(cls, r: float, phase: float = 0.0):
        return cls("squeezed_vacuum", r=float(r), phase=float(phase))

    @classmethod
    def number_mixture(cls, probabilities):
        return cls("number_mixture", probabilities=tuple(probabilities))

    @property
    def is_pure(self) -> bool:
        return self.kind != "number_mixture"

    @property
    def mean_photons(self) -> float:
        if self.kind == "fock":
            return float(self.n)
        if self.kind == "coherent":
            return abs(self.alpha) ** 2
        if self.kind == "squeezed_vacuum":
            return float(np.sinh(self.r) ** 2)
        if self.kind == "number_mixture":
            return float(np.dot(np.arange(len(self.probabilities)), self.probabilities))
        return 0.0

    def __str__(self):
        if self.kind == "vacuum":
            return "vacuum"
        if self.kind == "fock":
            return f"fock:{self.n}"
        if self.kind == "coherent":
            a = self.alpha
            return f"coherent:{a.real:g}" + (f",{a.imag:g}" if a.imag else "")
        if self.kind == "squeezed_vacuum":
            return f"sqvac:{self.r:g}" + (f",{self.phase:g}" if self.phase else "")
        return "mix:" + ",".join(f"{p:g}" for p in self.probabilities)


def _coherent_vector(alpha: complex, size: int) -> np.ndarray:
    vec = np.zeros(size, dtype=complex)
    if alpha == 0:
        vec[0] = 1.0
        return vec
    mod, arg = abs(alpha), np.angle(alpha)
    for n in range(size):
        logc = -mod ** 2 / 2 + n * log(mod) - lgamma(n + 1) / 2
        vec[n] = np.exp(logc + 1j * n * arg)
    return vec


def squeeze_generator(r: float, phase: float, size: int) -> np.ndarray:
    """(r/2)(e^{i phase} a^dag^2 - e^{-i phase} a^2) on ``size`` Fock levels."""
    a = np.diag(np.sqrt(np.arange(1, size, dtype=float)), 1)
    a2 = a @ a
    up = np.exp(1j * phase) * a2.T
    return 0.5 * r * (up - up.conj().T)


def _squeezed_vector(r: float, phase: float, cutoff: FockCutoff) -> np.ndarray:
    size = cutoff.dim
    if r == 0:
        return _coherent_vector(0, size)
    # guard counts pair levels; a^dag^2 steps two levels at a time
    work = size + 2 * cutoff.guard
    vac = np.zeros(work, dtype=complex)
    vac[0] = 1.0
    vec = (expm(squeeze_generator(r, phase, work)) @ vac)[:size]
    deficit = 1.0 - float(np.sum(np.abs(vec) ** 2))
    if deficit > cutoff.tail_tol:
        raise ConvergenceError(
            f"squeezed vacuum r={r} loses {deficit:.3e} beyond max_total={cutoff.max_total}; "
            f"try max_total={2 * cutoff.max_total}",
            norm_deficit=deficit, suggested_max_total=2 * cutoff.max_total)
    return vec


def prepare_pure(spec: ModeSpec, cutoff: FockCutoff) -> np.ndarray:
    """Single-mode amplitude vector of length ``max_total + 1``."""
    size = cutoff.dim
    if spec.kind == "vacuum":
        return _coherent_vector(0, size)
    if spec.kind == "fock":
        if spec.n > cutoff.max_total:
            raise CutoffError(f"fock:{spec.n} exceeds max_total={cutoff.max_total}")
        vec = np.zeros(size, dtype=complex)
        vec[spec.n] = 1.0
        return vec
    if spec.kind == "coherent":
        return _coherent_vector(spec.alpha, size)
    if spec.kind == "squeezed_vacuum":
        return _squeezed_vector(spec.r, spec.phase, cutoff)
    raise PreconditionError("number_mixture is not a pure state")


def photon_distribution(spec: ModeSpec, cutoff: FockCutoff) -> np.ndarray:
    if spec.kind == "number_mixture":
        p = np.zeros(cutoff.dim)
        probs = spec.probabilities[:cutoff.dim]
        p[:len(probs)] = probs
        return p
    return np.abs(prepare_pure(spec, cutoff)) ** 2


def photon_support(spec: ModeSpec, tail_tol: float = 1e-10) -> int:
    """Smallest N whose photon tail beyond N, weighted by (n+1)^2, is below ``tail_tol``."""
    if spec.kind == "vacuum":
        return 0
    if spec.kind == "fock":
        return spec.n
    if spec.kind == "number_mixture":
        return len(spec.probabilities) - 1
    size = max(16, int(4 * spec.mean_photons) + 16)
    while True:
        cut = FockCutoff(max_total=size, tail_tol=min(0.5, max(tail_tol, 1e-14)))
        try:
            p = photon_distribution(spec, cut)
        except ConvergenceError:
            size *= 2
            continue
        w = p * (np.arange(size + 1) + 1.0) ** 2
        tail = np.concatenate([np.cumsum(w[::-1])[::-1][1:], [0.0]])
        if w[-1] < tail_tol * 1e-3:
            return int(np.argmax(tail < tail_tol))
        size *= 2


def _mask(amps, max_total):
    _, _, mask = photon_grids(max_total)
    return np.where(mask, amps, 0)


def _check_deficit(deficit, cutoff, what):
    if deficit > cutoff.tail_tol:
        raise ConvergenceError(
            f"{what} loses {deficit:.3e} of its weight beyond max_total={cutoff.max_total}; "
            f"try max_total={2 * cutoff.max_total}",
            norm_deficit=deficit, suggested_max_total=2 * cutoff.max_total)


def product_state(a: ModeSpec, b: ModeSpec, cutoff: FockCutoff):
    """|a> (x) |b> on the triangle, or a number-labelled ensemble if one side is a mixture."""
    if not a.is_pure and not b.is_pure:
        raise UnsupportedError("at most one input mode may be a number mixture")
    if a.is_pure and b.is_pure:
        amps = _mask(np.outer(prepare_pure(a, cutoff), prepare_pure(b, cutoff)), cutoff.max_total)
        state = TwoModePureState(amps, cutoff)
        _check_deficit(state.norm_deficit, cutoff, f"input {a} (x) {b}")
        return state
    mixed_on_a = not a.is_pure
    mix, pure = (a, b) if mixed_on_a else (b, a)
    partner = prepare_pure(pure, cutoff)
    members = []
    for n, p in enumerate(mix.probabilities):
        if p == 0:
            continue
        if n > cutoff.max_total:
            raise CutoffError(f"mixture level {n} exceeds max_total={cutoff.max_total}")
        single = np.zeros(cutoff.dim, dtype=complex)
        single[n] = 1.0
        amps = np.outer(single, partner) if mixed_on_a else np.outer(partner, single)
        state = TwoModePureState(_mask(amps, cutoff.max_total), cutoff)
        members.append(Branch(float(p), n, state))
    ens = NumberDiagonalEnsemble(tuple(members))
    _check_deficit(ens.norm_deficit, cutoff, f"input {a} (x) {b}")
    return ens


def phase_average(state):
    """Average the common input phase of a state whose mode B is vacuum.

    Returns sum_n p_n |n><n| (x) |0><0| with p_n = |c_n0|^2; coherences between
    photon numbers are dropped.  Ensembles are averaged branchwise.
    """
    if isinstance(state, NumberDiagonalEnsemble):
        merged: dict[int, float] = {}
        cutoff = state.cutoff
        for branch in state:
            for sub in phase_average(branch.state):
                merged[sub.label] = merged.get(sub.label, 0.0) + branch.weight * sub.weight
        return _number_ensemble(merged, cutoff)

    amps = state.amplitudes
    if np.max(np.abs(amps[:, 1:]), initial=0.0) > 1e-14:
        raise PreconditionError("phase averaging requires mode B in vacuum before the OPA")
    weights = {n: float(p) for n, p in enumerate(np.abs(amps[:, 0]) ** 2)}
    return _number_ensemble(weights, state.cutoff)


def _number_ensemble(weights: dict, cutoff: FockCutoff) -> NumberDiagonalEnsemble:
    floor = cutoff.tail_tol * PRUNE_FRACTION
    members = []
    for n in sorted(weights):
        p = weights[n]
        if p <= floor:
            continue
        members.append(Branch(p, n, TwoModePureState.basis(n, 0, cutoff)))
    return NumberDiagonalEnsemble(tuple(members))
