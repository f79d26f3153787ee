import math
import warnings

import numpy as np
import pytest

from su11qfi import analytic
from su11qfi.config import InterferometerConfig
from su11qfi.errors import PreconditionError, ResourceError
from su11qfi.fock import (Branch, FockCutoff, NumberDiagonalEnsemble, TwoModePureState,
                          generator)
from su11qfi.metrology import (QFIMatrix, default_phase_grid, parity_cfi, parity_expectation,
                               parity_maximum, phase_family, qfi_ensemble_convexity,
                               qfi_fidelity_fd, qfi_pure, qfi_sld, qfim)
from su11qfi.opa import OpaParams, apply_opa, apply_opa_ensemble
from su11qfi.states import ModeSpec, phase_average, product_state

# independently evaluated with mpmath at 30 digits
F_VACUUM_G1 = 13.154116418008243
F_U_COH1_G05 = 3.0571322669949596
F_L_COH1_G05 = 9.229454806255935
F_S_COH1_G05 = 5.143293536625447
F_AVERAGED_G05_N1 = 2.7621956910836315
BOUND_PHI_S_G05_N1 = 0.36203083048315523
F_COH_G05 = 16.159210043403116


def squeezed_vacuum_pair(g=1.0, k=120):
    return apply_opa(TwoModePureState.basis(0, 0, FockCutoff(k)), OpaParams(g))


def coherent_vacuum(g=0.5, alpha=1.0, k=80):
    cut = FockCutoff(k)
    return apply_opa(product_state(ModeSpec.coherent(alpha), ModeSpec.vacuum(), cut), OpaParams(g))


def averaged(spec, g=0.5, k=120):
    cut = FockCutoff(k)
    return apply_opa_ensemble(phase_average(product_state(spec, ModeSpec.vacuum(), cut)),
                              OpaParams(g))


@pytest.mark.parametrize("label", ["u", "l", "s"])
def test_vacuum_qfi_same_for_every_model(label):
    state = squeezed_vacuum_pair()
    assert qfi_pure(state, generator(label, state.cutoff)).value == pytest.approx(F_VACUUM_G1, rel=1e-10)


@pytest.mark.parametrize("label,expected", [
    # coherent light sits in mode A here, so u carries the populated arm
    ("u", F_L_COH1_G05),
    ("l", F_U_COH1_G05),
    ("s", F_S_COH1_G05),
])
def test_coherent_vacuum_per_arm(label, expected):
    state = coherent_vacuum()
    assert qfi_pure(state, generator(label, state.cutoff)).value == pytest.approx(expected, rel=1e-10)


def test_coherent_in_mode_b_matches_unswapped_labels():
    cut = FockCutoff(80)
    state = apply_opa(product_state(ModeSpec.vacuum(), ModeSpec.coherent(1.0), cut), OpaParams(0.5))
    assert qfi_pure(state, generator("u", cut)).value == pytest.approx(F_U_COH1_G05, rel=1e-10)


def test_qfi_pure_reports_truncation():
    state = squeezed_vacuum_pair()
    result = qfi_pure(state, generator("u", state.cutoff))
    assert result.method == "variance"
    assert result.residual == state.norm_deficit
    assert float(result) == result.value


def test_single_branch_convexity_equals_pure():
    state = coherent_vacuum()
    gen = generator("s", state.cutoff)
    ens = NumberDiagonalEnsemble((Branch(1.0, 0, state),))
    assert qfi_ensemble_convexity(ens, gen).value == pytest.approx(qfi_pure(state, gen).value, rel=1e-14)
    assert qfi_ensemble_convexity(state, gen).value == pytest.approx(qfi_pure(state, gen).value, rel=1e-14)


@pytest.mark.parametrize("label", ["u", "l", "s"])
def test_averaged_coherent_convexity(label):
    ens = averaged(ModeSpec.coherent(1.0))
    value = qfi_ensemble_convexity(ens, generator(label, ens.cutoff)).value
    assert value == pytest.approx(F_AVERAGED_G05_N1, rel=1e-9)


def test_averaged_coherent_matches_sld():
    ens = averaged(ModeSpec.coherent(1.0), k=60)
    gen = generator("u", ens.cutoff)
    conv = qfi_ensemble_convexity(ens, gen).value
    assert qfi_sld(ens, gen).value == pytest.approx(conv, rel=1e-8)


def test_two_branch_sld_matches_convexity():
    ens = averaged(ModeSpec.number_mixture([0.5, 0.5]), k=60)
    gen = generator("s", ens.cutoff)
    assert qfi_sld(ens, gen).value == pytest.approx(qfi_ensemble_convexity(ens, gen).value, rel=1e-8)


def test_convexity_rejects_overlapping_branches():
    cut = FockCutoff(6)
    psi = TwoModePureState.basis(1, 0, cut)
    ens = NumberDiagonalEnsemble((Branch(0.5, 0, psi), Branch(0.5, 1, psi)))
    with pytest.raises(PreconditionError, match="overlap"):
        qfi_ensemble_convexity(ens, generator("u", cut))


def test_convexity_rejects_shared_diagonal():
    cut = FockCutoff(6)
    first = TwoModePureState.basis(1, 0, cut)
    second = TwoModePureState.basis(2, 1, cut)
    ens = NumberDiagonalEnsemble((Branch(0.5, 0, first), Branch(0.5, 1, second)))
    with pytest.raises(PreconditionError, match="diagonal"):
        qfi_ensemble_convexity(ens, generator("u", cut))


def test_sld_pure_limit():
    state = coherent_vacuum(k=40)
    gen = generator("l", state.cutoff)
    assert qfi_sld(state, gen).value == pytest.approx(qfi_pure(state, gen).value, rel=1e-8)


def test_sld_maximally_mixed_is_zero():
    cut = FockCutoff(4)
    branches = tuple(Branch(0.25, n, TwoModePureState.basis(n, 0, cut)) for n in range(4))
    assert qfi_sld(NumberDiagonalEnsemble(branches), generator("u", cut)).value == 0.0


def test_sld_resource_limit():
    ens = averaged(ModeSpec.coherent(1.0), k=60)
    with pytest.raises(ResourceError):
        qfi_sld(ens, generator("u", ens.cutoff), max_dim=10)


def test_fidelity_vacuum_upper_arm():
    state = squeezed_vacuum_pair()
    result = qfi_fidelity_fd(phase_family(state, "u"))
    assert result.value == pytest.approx(F_VACUUM_G1, rel=1e-4)
    assert result.warning is None


def test_fidelity_coherent_vacuum():
    # the family puts the phase on mode A, where the coherent light is
    result = qfi_fidelity_fd(phase_family(coherent_vacuum(), "l"))
    assert result.value == pytest.approx(F_U_COH1_G05, rel=1e-4)


def test_fidelity_constant_family_is_zero():
    state = coherent_vacuum(k=40)
    result = qfi_fidelity_fd(lambda phi: state)
    # only the rounding of 1 - |overlap| survives, amplified by 1 / dphi^2
    floor = 64 * np.finfo(float).eps / 1e-8
    assert abs(result.value) <= floor
    assert result.warning is None


def test_fidelity_warns_on_coarse_step():
    with pytest.warns(RuntimeWarning, match="not converged"):
        result = qfi_fidelity_fd(phase_family(squeezed_vacuum_pair(), "u"), dphi=0.5)
    assert result.warning is not None


def test_fidelity_default_step_is_quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        qfi_fidelity_fd(phase_family(coherent_vacuum(), "s"), phi0=0.3)


def test_qfim_coherent_vacuum_elements():
    m = qfim(coherent_vacuum())
    assert m.F_dd == pytest.approx(1.0, rel=1e-10)
    assert m.F_ds == pytest.approx(math.cosh(1.0), rel=1e-10)
    assert m.F_ss == pytest.approx(math.cosh(1.0) ** 2 + 2 * math.sinh(1.0) ** 2, rel=1e-10)
    assert m.bound_phi_s == pytest.approx(BOUND_PHI_S_G05_N1, rel=1e-9)
    assert not m.singular


def test_qfim_vacuum_is_singular_but_phase_sum_informative():
    m = qfim(squeezed_vacuum_pair())
    assert m.singular
    assert abs(m.F_dd) < 1e-12
    assert m.F_ss == pytest.approx(math.sinh(2.0) ** 2, rel=1e-10)
    assert m.info_phi_s == pytest.approx(F_VACUUM_G1, rel=1e-10)
    assert math.isinf(m.bound_phi_d)


def test_qfim_two_coherent():
    cut = FockCutoff(80)
    state = apply_opa(product_state(ModeSpec.coherent(1.0), ModeSpec.coherent(1.0), cut),
                      OpaParams(0.5))
    assert qfim(state).info_phi_s == pytest.approx(F_COH_G05, rel=1e-9)


def test_qfim_matrix_rules():
    regular = QFIMatrix.from_elements(2.0, 1.0, 2.0)
    assert regular.bound_phi_s == pytest.approx(2 / 3)
    assert regular.bound_phi_d == pytest.approx(2 / 3)
    assert regular.determinant == 3.0
    np.testing.assert_array_equal(regular.as_array(), [[2.0, 1.0], [1.0, 2.0]])
    fully_correlated = QFIMatrix.from_elements(1.0, 2.0, 4.0)
    assert fully_correlated.singular and math.isinf(fully_correlated.bound_phi_s)
    only_d = QFIMatrix.from_elements(3.0, 0.0, 0.0)
    assert only_d.bound_phi_d == pytest.approx(1 / 3) and math.isinf(only_d.bound_phi_s)
    nothing = QFIMatrix.from_elements(0.0, 0.0, 0.0)
    assert nothing.info_phi_s == 0.0


def test_hierarchy_naive_phase_sum_qfi_dominates():
    for spec in (ModeSpec.coherent(1.0), ModeSpec.fock(2), ModeSpec.squeezed_vacuum(0.4)):
        cut = FockCutoff(100)
        state = apply_opa(product_state(spec, ModeSpec.vacuum(), cut), OpaParams(0.6))
        naive = qfi_pure(state, generator("s", cut)).value
        assert naive >= qfim(state).info_phi_s - 1e-9


@pytest.mark.parametrize("spec", [ModeSpec.coherent(1.0), ModeSpec.fock(1)])
def test_phase_averaging_equals_nuisance_bound(spec):
    cut = FockCutoff(120)
    pure = apply_opa(product_state(spec, ModeSpec.vacuum(), cut), OpaParams(0.5))
    ens = averaged(spec)
    conv = qfi_ensemble_convexity(ens, generator("u", cut)).value
    assert qfim(pure).info_phi_s == pytest.approx(conv, rel=1e-8)


def test_averaged_qfi_monotone():
    by_n = [qfi_ensemble_convexity(averaged(ModeSpec.fock(n)), generator("s", FockCutoff(120))).value
            for n in range(4)]
    assert np.all(np.diff(by_n) > 0)
    by_g = [qfi_ensemble_convexity(averaged(ModeSpec.coherent(1.0), g=g),
                                   generator("s", FockCutoff(120))).value
            for g in (0.2, 0.4, 0.6)]
    assert np.all(np.diff(by_g) > 0)


def test_parity_expectation_on_basis_states():
    cut = FockCutoff(4)
    assert parity_expectation(TwoModePureState.basis(2, 1, cut)) == -1.0
    assert parity_expectation(TwoModePureState.basis(1, 2, cut)) == 1.0


def test_parity_vacuum_dark_fringe():
    cfg = InterferometerConfig(ModeSpec.vacuum(), ModeSpec.vacuum(), 0.5)
    points = parity_cfi(cfg, [0.0, 1e-3])
    assert points[0].indeterminate and math.isnan(points[0].cfi)
    assert points[0].parity == pytest.approx(1.0, abs=1e-12)
    assert points[1].cfi == pytest.approx(analytic.f_vacuum(0.5), rel=1e-3)


def test_parity_coherent_squeezed_maximum():
    cfg = InterferometerConfig(ModeSpec.coherent(1.0), ModeSpec.squeezed_vacuum(0.5), 0.5)
    best = parity_maximum(parity_cfi(cfg, default_phase_grid()))
    assert best.cfi == pytest.approx(analytic.f_parity_cl(0.5, 1.0, 0.5), rel=1e-3)


def test_parity_rejects_mixed_inputs():
    cfg = InterferometerConfig(ModeSpec.number_mixture([0.5, 0.5]), ModeSpec.vacuum(), 0.5)
    with pytest.raises(PreconditionError):
        parity_cfi(cfg, [0.1])
    with pytest.raises(PreconditionError):
        parity_cfi(cfg.replace(mode_a=ModeSpec.coherent(1.0), averaging=True), [0.1])


def test_parity_maximum_needs_a_valid_point():
    cfg = InterferometerConfig(ModeSpec.vacuum(), ModeSpec.vacuum(), 0.5)
    with pytest.raises(PreconditionError):
        parity_maximum(parity_cfi(cfg, [0.0]))


def test_default_phase_grid_is_sorted():
    grid = default_phase_grid()
    assert np.all(np.diff(grid) > 0)
    assert grid[0] > 0 and grid[-1] == pytest.approx(np.pi)
