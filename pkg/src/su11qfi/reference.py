"""Match an interferometer configuration to the closed form that describes it.

Each lookup returns ``(formula_name, value)`` or None when no closed form
covers the configuration.  Input phases matter for the two-input formulas,
which hold at pump phase 0 only.
"""
from __future__ import annotations

import numpy as np

from . import analytic
from .config import InterferometerConfig
from .fock import FockCutoff
from .states import ModeSpec, photon_distribution, photon_support

# coherent light in mode A plays the role of the lower-arm input of f_gong
_SWAP = {"u": "l", "l": "u", "s": "s"}


def _vac(spec: ModeSpec) -> bool:
    return spec.kind == "vacuum" or (spec.kind == "coherent" and spec.alpha == 0)


def _coh(spec: ModeSpec) -> bool:
    return spec.kind == "coherent" and spec.alpha != 0


def _real_coherent(spec: ModeSpec) -> bool:
    return spec.kind == "coherent" and spec.alpha.imag == 0


def _sq(spec: ModeSpec) -> bool:
    return spec.kind == "squeezed_vacuum" and spec.phase == 0


def photon_variance(spec: ModeSpec, tail_tol: float = 1e-12) -> float:
    """Photon-number variance of a single-mode input."""
    cut = FockCutoff(max_total=max(photon_support(spec, tail_tol), 1))
    p = photon_distribution(spec, cut)
    n = np.arange(p.size)
    mean = np.dot(n, p)
    return float(np.dot((n - mean) ** 2, p))


def qfi_reference(config: InterferometerConfig):
    """Closed form for the single-phase QFI of ``config.model``."""
    a, b, g, model = config.mode_a, config.mode_b, config.g, config.model
    if model not in ("u", "l", "s"):
        return None
    if config.averaging:
        if _vac(b):
            return "f_averaged", analytic.f_averaged(g, a.mean_photons)
        return None
    if _vac(a) and _vac(b):
        return "f_vacuum", analytic.f_vacuum(g)
    if _coh(a) and _vac(b):
        return "f_gong", analytic.f_gong(g, a.mean_photons, _SWAP[model])
    if _vac(a) and _coh(b):
        return "f_gong", analytic.f_gong(g, b.mean_photons, model)
    return None


def phase_sum_reference(config: InterferometerConfig):
    """Closed form for 1 / bound_phi_s (phase difference unknown)."""
    a, b, g = config.mode_a, config.mode_b, config.g
    if not (a.is_pure and b.is_pure):
        return None
    if _vac(a) and _vac(b):
        return "f_vacuum", analytic.f_vacuum(g)
    if _vac(b) or _vac(a):
        other = a if _vac(b) else b
        return "f_averaged", analytic.f_averaged(g, other.mean_photons)
    if config.theta != 0:
        return None
    if _coh(a) and _coh(b):
        return "f_two_coherent", analytic.f_two_coherent(g, a.alpha, b.alpha)
    if _real_coherent(a) and _sq(b):
        return "f_coh_sq", analytic.f_coh_sq(g, a.mean_photons, b.r)
    return None


def parity_reference(config: InterferometerConfig):
    """Closed form for the best parity CFI over the phase sum."""
    a, b, g = config.mode_a, config.mode_b, config.g
    if config.second_gain not in (None, g):
        return None
    if _vac(a) and _vac(b):
        return "f_vacuum", analytic.f_vacuum(g)
    if _coh(a) and _vac(b):
        return "f_parity_cl", analytic.f_parity_cl(g, a.mean_photons, 0.0)
    if config.theta == 0 and _real_coherent(a) and _sq(b):
        return "f_parity_cl", analytic.f_parity_cl(g, a.mean_photons, b.r)
    return None


def _coh_sq_args(config):
    a, b = config.mode_a, config.mode_b
    if not _real_coherent(a) or not (_sq(b) or _vac(b)):
        raise ValueError("needs a real coherent mode A and squeezed vacuum (phase 0) in mode B")
    return config.g, a.mean_photons, (b.r if _sq(b) else 0.0)


def _one_input(config):
    a, b = config.mode_a, config.mode_b
    if _vac(b):
        return a
    if _vac(a):
        return b
    raise ValueError("needs one vacuum input")


def formula_value(name: str, config: InterferometerConfig) -> float:
    """Evaluate an analytic formula with arguments read off ``config``."""
    g, a, b = config.g, config.mode_a, config.mode_b
    if name == "f_vacuum":
        return analytic.f_vacuum(g)
    if name == "f_gong":
        chi = _one_input(config)
        if not (_coh(chi) or _vac(chi)):
            raise ValueError("f_gong needs a coherent input with the other mode vacuum")
        model = _SWAP[config.model] if chi is a and not _vac(a) else config.model
        return analytic.f_gong(g, chi.mean_photons, model)
    if name == "f_averaged":
        return analytic.f_averaged(g, _one_input(config).mean_photons)
    if name == "bound_phi_s_one_vacuum":
        chi = _one_input(config)
        return analytic.bound_phi_s_one_vacuum(g, chi.mean_photons, photon_variance(chi))
    if name in ("f_two_coherent", "f_two_coherent_max"):
        if not all(m.kind in ("coherent", "vacuum") for m in (a, b)):
            raise ValueError(f"{name} needs coherent or vacuum inputs")
        if name == "f_two_coherent_max":
            return analytic.f_two_coherent_max(g, a.mean_photons + b.mean_photons)
        return analytic.f_two_coherent(g, a.alpha, b.alpha)
    if name in ("f_coh_sq", "f_li", "f_diff", "f_parity_cl"):
        return getattr(analytic, name)(*_coh_sq_args(config))
    raise ValueError(f"formula {name!r} cannot be evaluated from a configuration")


CONFIG_FORMULAS = ("f_vacuum", "f_gong", "f_averaged", "bound_phi_s_one_vacuum",
                   "f_two_coherent", "f_two_coherent_max", "f_coh_sq", "f_li",
                   "f_diff", "f_parity_cl")
