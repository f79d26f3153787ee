"""Closed-form Fisher-information and Cramer-Rao expressions for SU(1,1) setups.

Conventions: n_kappa = 2 sinh^2 g, so n_kappa (n_kappa + 2) = sinh^2 2g; pump
phase theta = 0 wherever phases of the inputs enter.  sinh(4g) is always
taken from g itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def n_kappa(g: float) -> float:
    return 2.0 * math.sinh(g) ** 2


@dataclass(frozen=True)
class AnalyticParams:
    """Named physical inputs for the closed forms; unset fields stay None."""

    g: float
    alpha: complex | None = None
    beta: complex | None = None
    r: float | None = None
    n_chi_bar: float | None = None
    V_chi: float | None = None

    def __post_init__(self):
        if self.g < 0:
            raise ValueError("g must be >= 0")
        for name in ("r", "n_chi_bar", "V_chi"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def n_kappa(self) -> float:
        return n_kappa(self.g)

    @property
    def n_alpha(self) -> float | None:
        return None if self.alpha is None else abs(self.alpha) ** 2

    @property
    def n_beta(self) -> float | None:
        return None if self.beta is None else abs(self.beta) ** 2

    @property
    def n_in(self) -> float:
        return (self.n_alpha or 0.0) + (self.n_beta or 0.0)


def f_vacuum(g: float) -> float:
    """Both inputs vacuum; identical for every phase model."""
    nk = n_kappa(g)
    return nk * (nk + 2.0)


def f_gong(g: float, n_beta: float, model: str) -> float:
    """Unaveraged single-phase QFI for a coherent input with the other port vacuum.

    Labels follow the usual setup with the coherent light in the lower arm,
    so ``u`` puts the phase on the empty input's arm.  With the coherent
    state in the upper arm, ``u`` and ``l`` swap.
    """
    base = n_beta * math.cosh(4 * g) + math.sinh(2 * g) ** 2
    if model == "u":
        return base + n_beta * (1.0 - 2.0 * math.cosh(2 * g))
    if model == "l":
        return base + n_beta * (1.0 + 2.0 * math.cosh(2 * g))
    if model == "s":
        return base
    raise ValueError(f"model must be 'u', 'l' or 's', got {model!r}")


def f_averaged(g: float, n_chi_bar: float) -> float:
    """QFI after input phase averaging, one input vacuum: (n + 1) n_k (n_k + 2)."""
    return (n_chi_bar + 1.0) * f_vacuum(g)


def bound_phi_s_one_vacuum(g: float, n_chi_bar: float, V_chi: float | None = None) -> float:
    """Phase-sum QCRB with phi_d unknown and one vacuum input.

    ``V_chi`` is accepted for symmetry with the matrix elements and ignored:
    the photon-number variance cancels out of the bound.
    """
    info = f_averaged(g, n_chi_bar)
    return math.inf if info == 0 else 1.0 / info


def qfim_one_vacuum(g: float, n_chi_bar: float, V_chi: float) -> tuple[float, float, float]:
    """(F_dd, F_ds, F_ss) for |chi> (x) |0> through the OPA."""
    c2 = math.cosh(2 * g)
    return V_chi, V_chi * c2, V_chi * c2 ** 2 + (1.0 + n_chi_bar) * math.sinh(2 * g) ** 2


def f_two_coherent(g: float, alpha: complex, beta: complex) -> float:
    """Phase-sum information for |alpha> (x) |beta>, phi_d unknown."""
    na, nb = abs(alpha) ** 2, abs(beta) ** 2
    n_in = na + nb
    if n_in == 0:
        raise ValueError("both inputs are vacuum; use f_vacuum")
    nk = n_kappa(g)
    x = nk * (nk + 2.0)
    return ((n_in ** 2 * x + 4.0 * na * nb * (nk + 1.0) ** 2) / n_in
            + x + 2.0 * (complex(alpha) * complex(beta)).real * math.sinh(4 * g))


def f_two_coherent_max(g: float, n_in: float) -> float:
    """f_two_coherent at equal moduli and conjugate phases."""
    nk = n_kappa(g)
    return (n_in + 1.0) * nk * (nk + 2.0) + n_in * (nk + 1.0) ** 2 + n_in * math.sinh(4 * g)


def f_two_coherent_g0_limit(n_alpha: float, n_beta: float) -> float:
    """No-OPA limit: 4 |a|^2 |b|^2 / (|a|^2 + |b|^2)."""
    return 4.0 * n_alpha * n_beta / (n_alpha + n_beta)


def _parity_term(g, alpha_sq, r):
    return math.sinh(2 * g) ** 2 * (alpha_sq * math.exp(2 * r) + math.cosh(r) ** 2)


def f_coh_sq(g: float, alpha_sq: float, r: float) -> float:
    """Phase-sum QFIM bound for a real coherent state with squeezed vacuum."""
    s2 = math.sinh(2 * r) ** 2
    denom = 4.0 * alpha_sq + 2.0 * s2
    # both inputs vacuum: the second term vanishes in the limit
    extra = 0.0 if denom == 0 else 8.0 * alpha_sq * s2 / denom
    return _parity_term(g, alpha_sq, r) + math.cosh(2 * g) ** 2 * extra


def f_li(g: float, alpha_sq: float, r: float) -> float:
    """Single-parameter QFI for the same inputs (phase difference assumed known)."""
    return (_parity_term(g, alpha_sq, r)
            + math.cosh(2 * g) ** 2 * (alpha_sq + 0.5 * math.sinh(2 * r) ** 2))


def f_diff(g: float, alpha_sq: float, r: float) -> float:
    """f_coh_sq - f_li in closed form; never positive."""
    c = math.cosh(4 * r) - 1.0
    denom = 4.0 * (4.0 * alpha_sq + c)
    if denom == 0:
        return 0.0
    return -math.cosh(2 * g) ** 2 * (c - 4.0 * alpha_sq) ** 2 / denom


def f_parity_cl(g: float, alpha_sq: float, r: float) -> float:
    """Classical Fisher information of parity detection at the dark fringe."""
    return _parity_term(g, alpha_sq, r)


def bound_mzi_phi_d(F_dd: float, F_ss: float, F_ds: float) -> float:
    """Phase-difference bound F_ss / det with phi_s unknown."""
    det = F_dd * F_ss - F_ds ** 2
    return math.inf if det <= 0 else F_ss / det


def bound_phi_s(F_dd: float, F_ss: float, F_ds: float) -> float:
    det = F_dd * F_ss - F_ds ** 2
    return math.inf if det <= 0 else F_dd / det


def sinh4g_radical(nk: float) -> float:
    """4 sqrt(n (n + 1)) (2n + 1): equals sinh 4g only when n = sinh^2 g."""
    return 4.0 * math.sqrt(nk * (nk + 1.0)) * (2.0 * nk + 1.0)


def radical_identity_audit(gains) -> dict[str, float]:
    """Largest relative mismatch of the radical sinh(4g) form per convention."""
    gains = np.asarray(list(gains), dtype=float)
    exact = np.sinh(4 * gains)
    out = {}
    for name, nk in (("sinh2", np.sinh(gains) ** 2), ("2sinh2", 2 * np.sinh(gains) ** 2)):
        approx = np.array([sinh4g_radical(x) for x in nk])
        out[name] = float(np.max(np.abs(approx - exact) / exact))
    return out


FORMULAS = {
    "f_vacuum": f_vacuum,
    "f_gong": f_gong,
    "f_averaged": f_averaged,
    "bound_phi_s_one_vacuum": bound_phi_s_one_vacuum,
    "f_two_coherent": f_two_coherent,
    "f_two_coherent_max": f_two_coherent_max,
    "f_coh_sq": f_coh_sq,
    "f_li": f_li,
    "f_diff": f_diff,
    "f_parity_cl": f_parity_cl,
    "bound_mzi_phi_d": bound_mzi_phi_d,
}
