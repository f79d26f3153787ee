"""Interferometer configuration shared by the metrology engines and the CLI."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .fock import FockCutoff, NumberDiagonalEnsemble, escalate
from .opa import OpaParams, apply_opa, apply_opa_ensemble
from .states import ModeSpec, phase_average, photon_support, product_state

MODELS = ("u", "l", "s", "d", "sd")


@dataclass(frozen=True)
class InterferometerConfig:
    """One SU(1,1) setup: inputs, first-OPA settings, phase model, truncation.

    ``model`` picks the phase generator: ``u`` (upper arm), ``l`` (lower
    arm), ``s`` (split equally), ``d`` (phase difference) or ``sd`` (phase
    sum and difference both unknown).  ``cutoff`` of None means it is chosen
    from the inputs and gain, then doubled until the truncation loss is below
    ``tail_tol``.
    """

    mode_a: ModeSpec
    mode_b: ModeSpec
    g: float
    theta: float = 0.0
    model: str = "s"
    averaging: bool = False
    cutoff: FockCutoff | None = None
    tail_tol: float = 1e-10
    guard: int = 12
    second_gain: float | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"phase model must be one of {MODELS}, got {self.model!r}")
        if self.g < 0:
            raise ValueError(f"gain must be >= 0, got {self.g!r}")

    @property
    def opa(self) -> OpaParams:
        return OpaParams(self.g, self.theta)

    def replace(self, **changes) -> "InterferometerConfig":
        return replace(self, **changes)

    def initial_cutoff(self) -> FockCutoff:
        """Starting cutoff: the OPA tail of a number state carrying the input's
        mean photon number, shifted by the inputs' own photon extent."""
        if self.cutoff is not None:
            return self.cutoff
        extent = photon_support(self.mode_a, self.tail_tol) + photon_support(self.mode_b, self.tail_tol)
        n_mean = math.ceil(self.mode_a.mean_photons + self.mode_b.mean_photons)
        base = FockCutoff.for_opa(self.g, n_mean, self.tail_tol, self.guard)
        return base.with_max_total(base.max_total + extent)

    def input_state(self, cutoff: FockCutoff):
        state = product_state(self.mode_a, self.mode_b, cutoff)
        if self.averaging:
            state = phase_average(state)
        return state

    def output_state(self, cutoff: FockCutoff | None = None):
        """State after the first OPA, escalating the cutoff if needed."""
        def build(cut):
            state = self.input_state(cut)
            if isinstance(state, NumberDiagonalEnsemble):
                return apply_opa_ensemble(state, self.opa)
            return apply_opa(state, self.opa)
        if cutoff is not None:
            return build(cutoff)
        return escalate(build, self.initial_cutoff())
