"""Quantum Fisher information engines.

Several independent routes are provided so they can check each other:

* ``qfi_pure``: 4 Var(g) on a pure state,
* ``qfi_ensemble_convexity``: weighted branch sum for orthogonal mixtures,
* ``qfi_sld``: spectral formula on the assembled density operator,
* ``qfi_fidelity_fd``: finite-difference fidelity of a pure state family.

``qfim`` builds the 2x2 information matrix over (phase difference, phase sum),
and ``parity_cfi`` simulates parity detection after the inverting OPA.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import linalg

from .config import InterferometerConfig
from .errors import PreconditionError, ResourceError
from .fock import (Branch, DiagonalGenerator, FockCutoff, NumberDiagonalEnsemble,
                   TwoModePureState, covariance, escalate, generator, inner_product,
                   variance)
from .opa import PhaseModel, apply_opa, apply_phase, second_opa

SINGULAR_DET = 1e-14
OVERLAP_TOL = 1e-8
SLD_EIG_FLOOR = 1e-12
SLD_SUPPORT_FLOOR = 1e-18
SLD_MAX_DIM = 4000
PARITY_INDETERMINATE = 1e-10


@dataclass(frozen=True)
class QfiResult:
    value: float
    method: str
    cutoff_used: FockCutoff
    residual: float = 0.0
    warning: str | None = None

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class QFIMatrix:
    """Information matrix over (phi_d, phi_s) with the derived Cramer-Rao bounds.

    When the determinant vanishes but one parameter is completely decoupled
    (its row is zero), the other parameter's bound is the reciprocal of its
    own diagonal element; otherwise a singular matrix gives infinite bounds.
    """

    F_dd: float
    F_ds: float
    F_sd: float
    F_ss: float
    bound_phi_s: float
    bound_phi_d: float
    singular: bool
    cutoff_used: FockCutoff | None = None

    @classmethod
    def from_elements(cls, F_dd, F_ds, F_ss, cutoff=None, F_sd=None) -> "QFIMatrix":
        F_sd = F_ds if F_sd is None else F_sd
        det = F_dd * F_ss - F_ds * F_sd
        scale = max(abs(F_dd), abs(F_ss), 1.0)
        if det > SINGULAR_DET:
            return cls(F_dd, F_ds, F_sd, F_ss, F_dd / det, F_ss / det, False, cutoff)
        null = SINGULAR_DET * scale
        decoupled = abs(F_ds) <= null and abs(F_sd) <= null
        bound_s = 1.0 / F_ss if decoupled and F_dd <= null and F_ss > null else math.inf
        bound_d = 1.0 / F_dd if decoupled and F_ss <= null and F_dd > null else math.inf
        return cls(F_dd, F_ds, F_sd, F_ss, bound_s, bound_d, True, cutoff)

    def as_array(self) -> np.ndarray:
        return np.array([[self.F_dd, self.F_sd], [self.F_ds, self.F_ss]])

    @property
    def determinant(self) -> float:
        return self.F_dd * self.F_ss - self.F_ds * self.F_sd

    @property
    def info_phi_s(self) -> float:
        """Effective information on the phase sum, 1 / bound_phi_s."""
        return 0.0 if math.isinf(self.bound_phi_s) else 1.0 / self.bound_phi_s


def _as_ensemble(state) -> NumberDiagonalEnsemble:
    if isinstance(state, NumberDiagonalEnsemble):
        return state
    return NumberDiagonalEnsemble((Branch(1.0, 0, state),))


def qfi_pure(state: TwoModePureState, gen: DiagonalGenerator) -> QfiResult:
    """4 Var(gen); ``gen`` acts on the modes after the first OPA."""
    return QfiResult(4.0 * variance(state, gen), "variance", state.cutoff,
                     residual=state.norm_deficit)


def qfi_ensemble_convexity(ens: NumberDiagonalEnsemble, gen: DiagonalGenerator) -> QfiResult:
    """Sum of branch QFIs weighted by p_n.

    Exact only when the branches are orthogonal and sit on distinct n_a - n_b
    diagonals, so that a diagonal phase keeps them orthogonal; both are checked.
    """
    ens = _as_ensemble(ens)
    worst = ens.max_overlap()
    if worst > OVERLAP_TOL:
        raise PreconditionError(f"ensemble branches overlap by {worst:.3e}")
    seen: dict[int, int] = {}
    for b in ens:
        for d in b.state.diagonals():
            if d in seen and seen[d] != b.label:
                raise PreconditionError(
                    f"branches {seen[d]} and {b.label} share the n_a-n_b diagonal {d}")
            seen[d] = b.label
    weights = ens.weights
    values = np.array([4.0 * variance(b.state, gen) for b in ens])
    value = float(np.dot(weights, values) / weights.sum())
    return QfiResult(value, "convexity", ens.cutoff, residual=worst)


def qfi_sld(ens, gen: DiagonalGenerator, max_dim: int = SLD_MAX_DIM,
            eig_floor: float = SLD_EIG_FLOOR) -> QfiResult:
    """Mixed-state QFI from the eigendecomposition of rho.

    rho is restricted to basis states whose population exceeds
    ``SLD_SUPPORT_FLOOR``; with a diagonal generator the dropped rows bound the
    error by their population times max(g)^2.
    """
    ens = _as_ensemble(ens)
    cols = [np.sqrt(b.weight) * b.state.amplitudes.ravel() for b in ens]
    w = np.stack(cols, axis=1)
    pop = np.sum(np.abs(w) ** 2, axis=1)
    trace = pop.sum()
    keep = np.nonzero(pop > SLD_SUPPORT_FLOOR * trace)[0]
    if keep.size > max_dim:
        raise ResourceError(f"density operator of dimension {keep.size} exceeds {max_dim}")
    w = w[keep] / np.sqrt(trace)
    g = gen.values.ravel()[keep]
    rho = w @ w.conj().T
    if not np.any(rho.imag):
        rho = rho.real
    # d rho / d phi = i [rho, G]; the factor i drops out of |.|^2
    commutator = rho * (g[None, :] - g[:, None])
    lam, vec = linalg.eigh(rho, driver="evr")
    d = vec.conj().T @ commutator @ vec
    denom = lam[:, None] + lam[None, :]
    mask = denom > eig_floor
    value = float(np.sum(2.0 * np.abs(d[mask]) ** 2 / denom[mask]))
    dropped = 1.0 - float(pop[keep].sum() / trace)
    return QfiResult(value, "sld", ens.cutoff, residual=dropped)


def phase_family(state: TwoModePureState, label: str) -> Callable[[float], TwoModePureState]:
    """phi -> exp(i phi g) |state> for generator label u, l, s or d."""
    models = {
        "u": PhaseModel.upper,
        "l": PhaseModel.lower,
        "s": PhaseModel.split,
        "d": lambda phi: PhaseModel.two_phase(0.0, phi),
    }
    make = models[label]
    return lambda phi: apply_phase(state, make(phi))


def _fidelity_estimate(family, phi0, step):
    left, right = family(phi0 - step / 2), family(phi0 + step / 2)
    overlap = abs(inner_product(left, right)) / math.sqrt(left.norm * right.norm)
    return 8.0 * (1.0 - min(overlap, 1.0)) / step ** 2


def qfi_fidelity_fd(family: Callable[[float], TwoModePureState], phi0: float = 0.0,
                    dphi: float = 1e-4) -> QfiResult:
    """8 (1 - |<psi(phi0 - dphi/2)|psi(phi0 + dphi/2)>|) / dphi^2.

    ``residual`` is the change when the step is halved; a warning is raised
    when it exceeds 1e-4 of the value plus the rounding floor.
    """
    value = _fidelity_estimate(family, phi0, dphi)
    half = _fidelity_estimate(family, phi0, dphi / 2)
    residual = abs(value - half)
    # 1 - |overlap| carries an eps-sized rounding error, amplified by 1/dphi^2
    floor = 64 * np.finfo(float).eps / dphi ** 2
    warning = None
    if residual > 1e-4 * value + floor:
        warning = f"finite-difference QFI not converged (residual {residual:.3e})"
        warnings.warn(warning, RuntimeWarning, stacklevel=2)
    return QfiResult(value, "fidelity_fd", family(phi0).cutoff, residual=residual,
                     warning=warning)


def qfim(state: TwoModePureState) -> QFIMatrix:
    """QFIM of the commuting generators g_d, g_s: F_ij = 4 Cov(g_i, g_j)."""
    cut = state.cutoff
    gs, gd = generator("s", cut), generator("d", cut)
    F_dd = 4.0 * variance(state, gd)
    F_ss = 4.0 * variance(state, gs)
    F_ds = 4.0 * covariance(state, gd, gs)
    F_sd = 4.0 * covariance(state, gs, gd)
    return QFIMatrix.from_elements(F_dd, F_ds, F_ss, cutoff=cut, F_sd=F_sd)


@dataclass(frozen=True)
class ParityPoint:
    phi: float
    parity: float
    cfi: float
    indeterminate: bool


def parity_expectation(state: TwoModePureState) -> float:
    """<(-1)^{n_b}>, normalised by the retained norm."""
    sign = (-1.0) ** np.arange(state.cutoff.dim)
    return float(np.sum(state.probabilities * sign[None, :]) / state.norm)


def parity_cfi(config: InterferometerConfig, phis: Sequence[float],
               dphi: float = 1e-4) -> list[ParityPoint]:
    """Classical Fisher information of parity on mode B versus phase sum.

    Pipeline: OPA(g, theta) -> exp(i phi g_s) -> OPA(g, theta + pi) -> parity.
    CFI = (dP/dphi)^2 / (1 - P^2) with a central difference; points where
    1 - P^2 < 1e-10 are flagged indeterminate and carry nan.
    """
    if not (config.mode_a.is_pure and config.mode_b.is_pure) or config.averaging:
        raise PreconditionError("parity simulation needs pure, unaveraged product inputs")

    def scan(cut):
        mid = apply_opa(config.input_state(cut), config.opa)

        def parity_at(phi):
            shifted = apply_phase(mid, PhaseModel.split(phi))
            return parity_expectation(second_opa(shifted, config.opa, gain=config.second_gain))

        points = []
        for phi in phis:
            p = parity_at(phi)
            slope = (parity_at(phi + dphi) - parity_at(phi - dphi)) / (2 * dphi)
            spread = 1.0 - p * p
            if spread < PARITY_INDETERMINATE:
                points.append(ParityPoint(float(phi), p, math.nan, True))
            else:
                points.append(ParityPoint(float(phi), p, slope ** 2 / spread, False))
        return points

    if config.cutoff is not None:
        return scan(config.cutoff)
    # away from the dark fringe the squeezers add up, so the scan may escalate
    return escalate(scan, config.initial_cutoff())


def parity_maximum(points: Sequence[ParityPoint]) -> ParityPoint:
    valid = [pt for pt in points if not pt.indeterminate]
    if not valid:
        raise PreconditionError("every grid point is indeterminate")
    return max(valid, key=lambda pt: pt.cfi)


def default_phase_grid() -> np.ndarray:
    """Geometric points toward the dark fringe followed by a linear scan."""
    return np.concatenate([np.geomspace(1e-3, 0.1, 21), np.linspace(0.15, np.pi, 40)])
