import math

import numpy as np
import pytest

from su11qfi.errors import ConvergenceError, CutoffError, DimensionError
from su11qfi.fock import (Branch, FockCutoff, NumberDiagonalEnsemble, TwoModePureState,
                          covariance, escalate, expectation, generator, inner_product,
                          photon_grids, variance)
from su11qfi.opa import OpaParams, apply_opa

SINH2_1 = 1.3810978455418157  # sinh(1)^2
COSH2_1 = 2.3810978455418157  # cosh(1)^2


def tmsv(g, max_total=120):
    return apply_opa(TwoModePureState.basis(0, 0, FockCutoff(max_total)), OpaParams(g))


@pytest.mark.parametrize("kwargs", [
    {"max_total": 0}, {"max_total": 2.5}, {"guard": -1},
    {"tail_tol": 0.0}, {"tail_tol": 1.0},
])
def test_cutoff_rejects_bad_fields(kwargs):
    with pytest.raises(ValueError):
        FockCutoff(**kwargs)


def test_cutoff_helpers():
    cut = FockCutoff(10, guard=3, tail_tol=1e-8)
    assert cut.dim == 11
    assert cut.doubled() == FockCutoff(20, guard=3, tail_tol=1e-8)
    assert cut.with_max_total(7).max_total == 7


@pytest.mark.parametrize("g", [0.25, 0.5, 1.0, 1.5])
def test_for_opa_covers_vacuum_thermal_tail(g):
    tol = 1e-10
    cut = FockCutoff.for_opa(g, tail_tol=tol)
    k = np.arange(cut.max_total // 2 + 1, cut.max_total // 2 + 4000)
    tail = np.sum(np.tanh(g) ** (2 * k)) / np.cosh(g) ** 2
    assert tail < tol


def test_for_opa_grows_with_gain_and_input():
    assert FockCutoff.for_opa(1.0).max_total > FockCutoff.for_opa(0.5).max_total
    assert FockCutoff.for_opa(0.5, 4).max_total > FockCutoff.for_opa(0.5, 0).max_total
    assert FockCutoff.for_opa(0.0).max_total == 1


def test_escalate_doubles_until_success():
    seen = []

    def build(cut):
        seen.append(cut.max_total)
        if cut.max_total < 50:
            raise ConvergenceError("too small", suggested_max_total=2 * cut.max_total)
        return cut.max_total

    assert escalate(build, FockCutoff(10)) == 80
    assert seen == [10, 20, 40, 80]


def test_escalate_gives_up_past_limit():
    def build(cut):
        raise ConvergenceError("never", suggested_max_total=2 * cut.max_total)

    with pytest.raises(ConvergenceError):
        escalate(build, FockCutoff(10), limit=100)


def test_photon_grids_are_read_only():
    na, nb, mask = photon_grids(4)
    assert mask[2, 2] and not mask[3, 2]
    with pytest.raises(ValueError):
        na[0, 0] = 5


def test_state_validation():
    cut = FockCutoff(3)
    with pytest.raises(DimensionError):
        TwoModePureState(np.zeros((3, 3)), cut)
    amps = np.zeros((4, 4), dtype=complex)
    amps[3, 1] = 1.0
    with pytest.raises(DimensionError):
        TwoModePureState(amps, cut)
    with pytest.raises(CutoffError):
        TwoModePureState.basis(2, 2, cut)


def test_state_is_immutable_copy():
    cut = FockCutoff(3)
    amps = np.zeros((4, 4), dtype=complex)
    amps[0, 0] = 1.0
    state = TwoModePureState(amps, cut)
    amps[0, 0] = 0.0
    assert state.amplitudes[0, 0] == 1.0
    with pytest.raises(ValueError):
        state.amplitudes[0, 0] = 2.0


def test_norm_deficit_reports_missing_weight():
    cut = FockCutoff(3)
    amps = np.zeros((4, 4), dtype=complex)
    amps[0, 0] = math.sqrt(0.75)
    state = TwoModePureState(amps, cut)
    assert state.norm_deficit == pytest.approx(0.25)
    assert state.diagonals() == {0}


def test_inner_product_examples():
    cut = FockCutoff(6)
    assert inner_product(TwoModePureState.basis(0, 0, cut), TwoModePureState.basis(0, 1, cut)) == 0
    psi = tmsv(0.7)
    assert abs(inner_product(psi, psi) - 1) < 1e-12


def test_inner_product_of_opa_branches_vanishes():
    cut = FockCutoff(60)
    b0 = apply_opa(TwoModePureState.basis(0, 0, cut), OpaParams(0.5))
    b1 = apply_opa(TwoModePureState.basis(1, 0, cut), OpaParams(0.5))
    direct = np.sum(b0.amplitudes.conj() * b1.amplitudes)
    assert abs(direct) < 1e-12
    assert abs(inner_product(b0, b1)) < 1e-12


def test_inner_product_cutoff_mismatch():
    with pytest.raises(DimensionError):
        inner_product(TwoModePureState.basis(0, 0, FockCutoff(3)),
                      TwoModePureState.basis(0, 0, FockCutoff(4)))


@pytest.mark.parametrize("label,expected", [
    ("u", lambda na, nb: na), ("l", lambda na, nb: nb),
    ("s", lambda na, nb: (na + nb) / 2), ("d", lambda na, nb: (na - nb) / 2),
    ("number_a", lambda na, nb: na), ("number_b", lambda na, nb: nb),
])
def test_generator_values(label, expected):
    gen = generator(label, 5)
    na, nb = np.indices((6, 6))
    np.testing.assert_array_equal(gen.values, expected(na, nb))
    assert gen.max_total == 5


def test_generator_rejects_unknown_label():
    with pytest.raises(ValueError):
        generator("x", 4)


def test_expectation_examples():
    cut = FockCutoff(120)
    assert expectation(TwoModePureState.basis(0, 0, cut), generator("u", cut)) == 0
    assert expectation(tmsv(1.0), generator("u", cut)) == pytest.approx(SINH2_1, rel=1e-10)
    branch = apply_opa(TwoModePureState.basis(1, 0, cut), OpaParams(1.0))
    assert expectation(branch, generator("u", cut)) == pytest.approx(COSH2_1 + SINH2_1, rel=1e-10)


def test_variance_examples():
    cut = FockCutoff(40)
    assert variance(TwoModePureState.basis(3, 2, cut), generator("s", cut)) == 0
    # sinh^2(1) cosh^2(1); the four-digit value quoted alongside it is 3.28880
    assert variance(tmsv(1.0), generator("u", 120)) == pytest.approx(SINH2_1 * COSH2_1, rel=1e-10)
    n = np.arange(41)
    coh = np.exp(-0.5 - 0.5 * np.array([math.lgamma(k + 1) for k in n]))
    amps = np.zeros((41, 41), dtype=complex)
    amps[:, 0] = coh
    assert variance(TwoModePureState(amps, cut), generator("u", cut)) == pytest.approx(1.0, abs=1e-10)


def test_covariance_examples():
    cut = FockCutoff(60)
    from su11qfi.config import InterferometerConfig
    from su11qfi.states import ModeSpec
    state = InterferometerConfig(ModeSpec.coherent(1), ModeSpec.vacuum(), 0.5).output_state(cut)
    gd, gs = generator("d", cut), generator("s", cut)
    assert covariance(state, gd, gs) == pytest.approx(math.cosh(1) / 4, rel=1e-9)
    assert covariance(state, gd, gd) == variance(state, gd)
    fock = TwoModePureState.basis(2, 1, cut)
    assert covariance(fock, gd, gs) == 0


def test_moments_divide_by_retained_norm():
    cut = FockCutoff(4)
    amps = np.zeros((5, 5), dtype=complex)
    amps[2, 0] = 0.5  # only a quarter of the weight retained
    state = TwoModePureState(amps, cut)
    assert expectation(state, generator("u", cut)) == 2.0


def test_moment_shape_mismatch():
    with pytest.raises(DimensionError):
        expectation(TwoModePureState.basis(0, 0, FockCutoff(3)), generator("u", 4))


def _two_branch(cut, w=(0.5, 0.5)):
    return NumberDiagonalEnsemble((Branch(w[0], 0, TwoModePureState.basis(0, 0, cut)),
                                   Branch(w[1], 1, TwoModePureState.basis(1, 0, cut))))


def test_ensemble_accessors():
    cut = FockCutoff(3)
    ens = _two_branch(cut)
    assert len(ens) == 2
    np.testing.assert_allclose(ens.weights, [0.5, 0.5])
    assert ens.max_overlap() == 0
    rho = ens.density_matrix()
    assert np.trace(rho).real == pytest.approx(1.0)
    assert ens.norm_deficit == 0


@pytest.mark.parametrize("weights,error", [
    ((0.7, 0.7), ConvergenceError), ((0.2, 0.2), ConvergenceError), ((1.5, -0.5), ValueError),
])
def test_ensemble_rejects_bad_weights(weights, error):
    with pytest.raises(error):
        _two_branch(FockCutoff(3), weights)


def test_ensemble_rejects_mixed_cutoffs():
    with pytest.raises(DimensionError):
        NumberDiagonalEnsemble((Branch(0.5, 0, TwoModePureState.basis(0, 0, FockCutoff(3))),
                                Branch(0.5, 1, TwoModePureState.basis(1, 0, FockCutoff(4)))))
    with pytest.raises(ValueError):
        NumberDiagonalEnsemble(())
