"""Truncated two-mode Fock space: cutoffs, states, diagonal generators, moments.

States are stored as a dense ``(K+1, K+1)`` complex grid indexed by
``(n_a, n_b)``; only the triangle ``n_a + n_b <= K`` is populated, the rest is
held at exact zero.  Amplitudes are never renormalised after truncation, so
the weight lost to the cutoff stays visible as :attr:`TwoModePureState.norm_deficit`.
Moments divide by the retained norm instead.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Sequence, TypeVar

import numpy as np
from scipy import stats

from .errors import ConvergenceError, CutoffError, DimensionError

T = TypeVar("T")

GENERATOR_LABELS = ("u", "l", "s", "d", "number_a", "number_b")
MAX_ESCALATED_TOTAL = 2048


@dataclass(frozen=True)
class FockCutoff:
    """Truncation policy for the two-mode space.

    ``guard`` counts extra pair levels (one photon in each mode) appended to
    every block while a squeezer is exponentiated; whatever ends up there is
    discarded and shows up as norm deficit.
    """

    max_total: int = 60
    guard: int = 12
    tail_tol: float = 1e-10

    def __post_init__(self):
        if int(self.max_total) != self.max_total or self.max_total < 1:
            raise ValueError(f"max_total must be an integer >= 1, got {self.max_total!r}")
        if int(self.guard) != self.guard or self.guard < 0:
            raise ValueError(f"guard must be an integer >= 0, got {self.guard!r}")
        if not 0.0 < self.tail_tol < 1.0:
            raise ValueError(f"tail_tol must lie in (0, 1), got {self.tail_tol!r}")

    @property
    def dim(self) -> int:
        return self.max_total + 1

    def with_max_total(self, max_total: int) -> "FockCutoff":
        return replace(self, max_total=int(max_total))

    def doubled(self) -> "FockCutoff":
        return self.with_max_total(2 * self.max_total)

    @classmethod
    def for_opa(cls, gain: float, n_input: int = 0, tail_tol: float = 1e-10,
                guard: int = 12) -> "FockCutoff":
        """Cutoff that holds the OPA image of ``|n_input, 0>`` to within ``tail_tol``.

        The output of that branch is negative-binomial in the pair index k.  The
        tail is weighted by ``(n + 2k + 1)**2`` so that second moments, not only
        probabilities, are certified.
        """
        k_max = _negative_binomial_tail_index(gain, n_input, tail_tol)
        return cls(max_total=max(1, n_input + 2 * k_max), guard=guard, tail_tol=tail_tol)


def _negative_binomial_tail_index(gain, n, tail_tol):
    t = np.tanh(gain) ** 2
    if t == 0.0:
        return 0
    dist = stats.nbinom(n + 1, 1.0 - t)
    hi = 64
    while True:
        k = np.arange(hi + 1)
        w = np.exp(dist.logpmf(k)) * (n + 2 * k + 1.0) ** 2
        if w[-1] < 1e-6 * tail_tol and k[-1] > dist.mean():
            break
        hi *= 2
    # tail[j] = sum of w over k > j
    tail = np.concatenate([np.cumsum(w[::-1])[::-1][1:], [0.0]])
    return int(np.argmax(tail < tail_tol))


def escalate(build: Callable[[FockCutoff], T], cutoff: FockCutoff,
             limit: int = MAX_ESCALATED_TOTAL) -> T:
    """Call ``build(cutoff)``, doubling ``max_total`` on every ConvergenceError."""
    while True:
        try:
            return build(cutoff)
        except ConvergenceError as exc:
            bigger = max(cutoff.max_total * 2, exc.suggested_max_total or 0)
            if bigger > limit:
                raise
            cutoff = cutoff.with_max_total(bigger)


@functools.lru_cache(maxsize=64)
def photon_grids(max_total: int):
    """Read-only ``(n_a, n_b, mask)`` grids for a given cutoff."""
    na, nb = np.indices((max_total + 1, max_total + 1))
    mask = (na + nb) <= max_total
    for arr in (na, nb, mask):
        arr.setflags(write=False)
    return na, nb, mask


def _readonly(arr):
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TwoModePureState:
    amplitudes: np.ndarray
    cutoff: FockCutoff = field(default_factory=FockCutoff)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.cutoff.dim, self.cutoff.dim):
            raise DimensionError(
                f"amplitude grid {amps.shape} does not match cutoff {self.cutoff.max_total}")
        _, _, mask = photon_grids(self.cutoff.max_total)
        if np.any(amps[~mask] != 0):
            raise DimensionError("amplitudes outside the triangle n_a + n_b <= max_total")
        object.__setattr__(self, "amplitudes", _readonly(amps))

    @classmethod
    def basis(cls, n_a: int, n_b: int, cutoff: FockCutoff | None = None) -> "TwoModePureState":
        cutoff = cutoff or FockCutoff()
        if n_a < 0 or n_b < 0 or n_a + n_b > cutoff.max_total:
            raise CutoffError(f"|{n_a},{n_b}> lies outside max_total={cutoff.max_total}")
        amps = np.zeros((cutoff.dim, cutoff.dim), dtype=complex)
        amps[n_a, n_b] = 1.0
        return cls(amps, cutoff)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> float:
        return float(self.probabilities.sum())

    @property
    def norm_deficit(self) -> float:
        return max(0.0, 1.0 - self.norm)

    def diagonals(self) -> set[int]:
        """Set of ``n_a - n_b`` values carrying nonzero amplitude."""
        na, nb = np.nonzero(self.amplitudes)
        return set((na - nb).tolist())

    def with_amplitudes(self, amps) -> "TwoModePureState":
        return TwoModePureState(amps, self.cutoff)


@dataclass(frozen=True, eq=False)
class Branch:
    weight: float
    label: int
    state: TwoModePureState


@dataclass(frozen=True, eq=False)
class NumberDiagonalEnsemble:
    """Weighted mixture of pure two-mode states, labelled by photon number.

    Orthogonality of the members is not checked on construction; use
    :meth:`max_overlap`, or let the QFI routines that need it enforce it.
    """

    members: tuple[Branch, ...]

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ValueError("an ensemble needs at least one member")
        cut = members[0].state.cutoff
        for b in members:
            if b.weight < 0:
                raise ValueError(f"negative weight {b.weight} on branch {b.label}")
            if b.state.cutoff.max_total != cut.max_total:
                raise DimensionError("ensemble members must share a cutoff")
        total = sum(b.weight for b in members)
        if not (1.0 - cut.tail_tol <= total <= 1.0 + 1e-12):
            raise ConvergenceError(
                f"ensemble weights sum to {total!r}, outside [1 - {cut.tail_tol}, 1]",
                norm_deficit=1.0 - total)
        object.__setattr__(self, "members", members)

    def __iter__(self) -> Iterator[Branch]:
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    @property
    def cutoff(self) -> FockCutoff:
        return self.members[0].state.cutoff

    @property
    def weights(self) -> np.ndarray:
        return np.array([b.weight for b in self.members])

    @property
    def norm_deficit(self) -> float:
        kept = sum(b.weight * b.state.norm for b in self.members)
        return max(0.0, 1.0 - kept)

    def max_overlap(self) -> float:
        worst = 0.0
        for i, bi in enumerate(self.members):
            for bj in self.members[i + 1:]:
                ov = abs(inner_product(bi.state, bj.state))
                ov /= np.sqrt(bi.state.norm * bj.state.norm)
                worst = max(worst, ov)
        return worst

    def density_matrix(self) -> np.ndarray:
        """Dense density operator over the flattened grid (small cutoffs only)."""
        dim = self.cutoff.dim ** 2
        rho = np.zeros((dim, dim), dtype=complex)
        for b in self.members:
            v = b.state.amplitudes.ravel()
            rho += b.weight * np.outer(v, v.conj())
        return rho


@dataclass(frozen=True, eq=False)
class DiagonalGenerator:
    values: np.ndarray
    label: str

    def __post_init__(self):
        if self.label not in GENERATOR_LABELS:
            raise ValueError(f"unknown generator label {self.label!r}")
        object.__setattr__(self, "values", _readonly(np.asarray(self.values, dtype=float)))

    @property
    def max_total(self) -> int:
        return self.values.shape[0] - 1


def generator(label: str, cutoff: FockCutoff | int) -> DiagonalGenerator:
    """Diagonal phase generator on the post-OPA modes.

    ``u``/``number_a`` = n_a, ``l``/``number_b`` = n_b, ``s`` = (n_a+n_b)/2,
    ``d`` = (n_a-n_b)/2.
    """
    max_total = cutoff if isinstance(cutoff, (int, np.integer)) else cutoff.max_total
    na, nb, _ = photon_grids(int(max_total))
    na = na.astype(float)
    nb = nb.astype(float)
    table = {
        "u": na, "number_a": na,
        "l": nb, "number_b": nb,
        "s": (na + nb) / 2,
        "d": (na - nb) / 2,
    }
    if label not in table:
        raise ValueError(f"unknown generator label {label!r}; expected one of {GENERATOR_LABELS}")
    return DiagonalGenerator(table[label], label)


def _check_shapes(*arrays):
    shape = arrays[0].shape
    for a in arrays[1:]:
        if a.shape != shape:
            raise DimensionError(f"shape mismatch: {shape} vs {a.shape}")


def inner_product(x: TwoModePureState, y: TwoModePureState) -> complex:
    """<x|y> over the shared index set."""
    if x.cutoff.max_total != y.cutoff.max_total:
        raise DimensionError(
            f"cutoff mismatch: {x.cutoff.max_total} vs {y.cutoff.max_total}")
    return complex(np.vdot(x.amplitudes, y.amplitudes))


def _weights(state):
    p = state.probabilities
    return p / p.sum()


def expectation(state: TwoModePureState, gen: DiagonalGenerator) -> float:
    _check_shapes(state.amplitudes, gen.values)
    return float(np.sum(gen.values * _weights(state)))


def variance(state: TwoModePureState, gen: DiagonalGenerator) -> float:
    # centred two-pass sum, so the result is a sum of nonnegative terms
    return max(0.0, covariance(state, gen, gen))


def covariance(state: TwoModePureState, g1: DiagonalGenerator, g2: DiagonalGenerator) -> float:
    """<g1 g2> - <g1><g2> for commuting diagonal generators."""
    _check_shapes(state.amplitudes, g1.values, g2.values)
    p = _weights(state)
    d1 = g1.values - np.sum(g1.values * p)
    d2 = g2.values - np.sum(g2.values * p)
    return float(np.sum(d1 * d2 * p))


def ensure_same_cutoff(states: Sequence[TwoModePureState]) -> FockCutoff:
    cut = states[0].cutoff
    for s in states[1:]:
        if s.cutoff.max_total != cut.max_total:
            raise DimensionError("states carry different cutoffs")
    return cut
