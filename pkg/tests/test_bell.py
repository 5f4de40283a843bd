import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqbell.bell import (
    SingularDecompositionError,
    bell_operator,
    bell_value,
    deterministic_value,
    local_bound,
    parity_oblivious_residual,
    pnc_bound,
    pnc_grid_bound,
    pnc_vertices,
    seesaw_max,
    sos_diagnose,
)
from seqbell.linalg import SZ
from seqbell.quantum import ObservableTriple, QuantumState, canonical_realization, random_dichotomic, random_state


def test_canonical_value_is_six():
    rho, alice, bob = canonical_realization()
    assert bell_value(rho, alice, bob) == pytest.approx(6.0, abs=1e-12)
    assert bell_value(rho, alice, bob, eta=2 / 3) == pytest.approx(4.0, abs=1e-12)


def test_identity_bob_gives_zero():
    rho, alice, _ = canonical_realization()
    eye = np.eye(2)
    assert bell_value(rho, alice, [eye, eye, eye]) == pytest.approx(0.0, abs=1e-15)


def test_bell_value_errors():
    rho, alice, bob = canonical_realization()
    for eta in (0.0, 1.5):
        with pytest.raises(ValueError):
            bell_value(rho, alice, bob, eta)
    with pytest.raises(ValueError):
        bell_value(QuantumState(np.eye(6) / 6, (2, 3)), alice, bob)


def test_local_bound_and_assignments():
    assert local_bound() == 5.0
    assert deterministic_value((1, 1, 1), (1, 1, 1)) == 3.0
    # oracle: enumerate with the functional written out term by term
    best = -np.inf
    for a1, a2, a3, b1, b2, b3 in itertools.product((1, -1), repeat=6):
        v = (a1 + a2 - a3) * b1 + (a1 - a2 + a3) * b2 + (-a1 + a2 + a3) * b3
        assert deterministic_value((a1, a2, a3), (b1, b2, b3)) == v
        assert deterministic_value((a1, a2, a3), (-b1, -b2, -b3)) == -v
        best = max(best, v)
    assert best == 5


def test_pnc_bound():
    assert pnc_bound() == 4.0
    assert len(pnc_vertices()) == 7
    assert deterministic_value((1, -1, 0), (1, 1, -1)) == 4.0
    assert deterministic_value((1, -1, 0), (-1, 1, -1)) == 4.0
    for b in itertools.product((1, -1), repeat=3):
        assert deterministic_value((0, 0, 0), b) == 0.0
    assert pnc_grid_bound(0.01) == pytest.approx(4.0, abs=1e-9)
    assert local_bound() >= pnc_bound()


def test_sos_canonical():
    rho, alice, bob = canonical_realization()
    sos = sos_diagnose(rho, alice, bob)
    assert np.allclose(sos.omega, (2, 2, 2), atol=1e-14)
    assert abs(sos.gamma_value) <= 1e-12
    assert np.allclose(sos.l_residuals, 0, atol=1e-12)
    assert sos.optimal


def test_sos_perturbed_alice():
    rho, alice, bob = canonical_realization()
    bad = ObservableTriple(alice[0], alice[1], SZ)
    sos = sos_diagnose(rho, bad, bob)
    assert sos.gamma_value > 1e-3
    assert not sos.optimal
    assert sos.gamma_value == pytest.approx(sum(sos.omega) - bell_value(rho, bad, bob), abs=1e-12)


def test_sos_singular():
    rho, alice, bob = canonical_realization()
    # A1 + A2 is itself dichotomic here, so A3 = A1 + A2 makes the first combination vanish
    degenerate = ObservableTriple(alice[0], alice[1], alice[0] + alice[1])
    with pytest.raises(SingularDecompositionError):
        sos_diagnose(rho, degenerate, bob)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0.01, 1.0))
def test_gamma_identity_and_psd(seed, eta):
    rng = np.random.default_rng(seed)
    rho = random_state((2, 2), rng)
    alice = [random_dichotomic(2, rng) for _ in range(3)]
    bob = [random_dichotomic(2, rng) for _ in range(3)]
    try:
        sos = sos_diagnose(rho, alice, bob)
    except SingularDecompositionError:
        return
    assert sos.gamma_value >= -1e-10
    assert sos.gamma_value == pytest.approx(sos.gap, abs=1e-12)
    # linearity in eta
    assert bell_value(rho, alice, bob, eta) == pytest.approx(eta * bell_value(rho, alice, bob), abs=1e-13)


def test_parity_residual():
    rho, alice, _ = canonical_realization()
    assert parity_oblivious_residual(rho, alice) <= 1e-15
    zero = QuantumState(np.diag([1.0, 0, 0, 0]).astype(complex), (2, 2))
    assert parity_oblivious_residual(zero, ObservableTriple(SZ, SZ, SZ)) == pytest.approx(1.0)
    mixed = QuantumState(np.eye(4, dtype=complex) / 4, (2, 2))
    assert parity_oblivious_residual(mixed, alice) <= 1e-15


def test_bell_operator_spectrum_bounded_by_six():
    _, alice, bob = canonical_realization()
    w = np.linalg.eigvalsh(bell_operator(alice, bob))
    assert w[-1] == pytest.approx(6.0, abs=1e-12)


def test_seesaw_reaches_optimum_in_qubits():
    assert seesaw_max(2, 10, seed=3) >= 6 - 1e-6


def test_seesaw_initial_point_and_determinism():
    v0 = seesaw_max(2, 0, seed=1)
    assert v0 <= 6 + 1e-9
    assert seesaw_max(3, 3, seed=7) == seesaw_max(3, 3, seed=7)


def test_seesaw_argument_checks():
    with pytest.raises(ValueError):
        seesaw_max(1, 1, 0)
    with pytest.raises(ValueError):
        seesaw_max(9, 1, 0)
    with pytest.raises(ValueError):
        seesaw_max(2, -1, 0)


def test_seesaw_warns_at_iteration_cap():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        seesaw_max(3, 2, seed=0, max_iter=1, tol=-1.0)
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)
