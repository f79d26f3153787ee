"""The ten acceptance criteria, each run through the same checks as ``su11qfi verify``.

One PASS/FAIL line per criterion is printed and repeated in the terminal summary.
"""
import pytest

from su11qfi import verify

# tolerance stated for every check, keyed by check name
STATED = {
    "vacuum_qfi": 1e-8,
    "coherent_vacuum_qfi": 1e-7,
    "averaged_closed_form": 1e-8,
    "averaged_universality": 1e-8,
    "two_parameter_phase_sum": 1e-8,
    "variance_cancellation": 1e-8,
    "oracle_fidelity": 1e-4,
    "oracle_sld": 1e-8,
    "two_coherent_qfim": 1e-6,
    "two_coherent_small_gain": 1e-3,
    "two_coherent_conjugate_max": 1e-10,
    "coherent_squeezed_qfim": 1e-6,
    "coherent_squeezed_difference": 1e-10,
    "coherent_squeezed_sign": 0.0,
    "coherent_squeezed_vs_parity": 0.0,
    "parity_maximum": 1e-3,
    "parity_vacuum_limit": 1e-3,
    "opa_diagonal_conservation": 0.0,
    "opa_unitarity": 1e-10,
    "qfim_symmetric_psd": 1e-10,
    "opa_round_trip": 1e-10,
    "radical_identity_sinh2": 1e-12,
    "radical_identity_2sinh2": 1e-3,
}

TITLES = {
    1: "vacuum QFI, all generators",
    2: "unaveraged coherent (x) vacuum QFIs",
    3: "phase-averaged universality",
    4: "two-parameter equivalence",
    5: "oracle triangle",
    6: "two-coherent bound",
    7: "coherent (x) squeezed bound",
    8: "parity pipeline",
    9: "structural invariants",
    10: "sinh(4g) convention audit",
}


def test_tolerances_match_the_criteria():
    assert {c.name: c.tolerance for c in verify.CHECKS} == STATED
    assert {c.criterion for c in verify.CHECKS} == set(TITLES)


@pytest.mark.parametrize("criterion", sorted(TITLES))
def test_criterion(criterion, acceptance_log):
    checks = [c for c in verify.CHECKS if c.criterion == criterion]
    results = [c.run() for c in checks]
    ok = all(r.passed for r in results)
    detail = "; ".join(f"{r.name} {r.value:.2e} {r.relation} {r.tolerance:.0e}" for r in results)
    line = f"criterion {criterion:2d} {'PASS' if ok else 'FAIL'}  {TITLES[criterion]}: {detail}"
    acceptance_log.append(line)
    print(line)
    failures = [r.line() + "".join(f"\n    {n}" for n in r.notes) for r in results if not r.passed]
    assert ok, "\n".join(failures)
