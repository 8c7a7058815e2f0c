"""Entropy utilities, optimizers, and structural verification checks."""

import math

import numpy as np
import pytest

from grasschan import capacity, channels, verify
from grasschan.errors import DomainError, PreconditionError


def test_entropy_pure_and_mixed():
    assert verify.von_neumann_entropy(np.diag([1.0, 0.0, 0.0]).astype(complex)) == 0.0
    for n in (2, 3, 5):
        assert abs(verify.von_neumann_entropy(np.eye(n) / n, base=2.0) - math.log2(n)) < 1e-12
    # direct evaluation oracle for a two-point spectrum
    expected = 2.0 - 0.75 * math.log2(3.0)
    got = verify.von_neumann_entropy(np.diag([0.75, 0.25]).astype(complex), base=2.0)
    assert abs(got - expected) < 1e-12
    assert abs(got - 0.8112781244591328) < 1e-12


def test_entropy_additive_on_products():
    rng = np.random.default_rng(21)
    for _ in range(5):
        rho = verify.random_density(3, rng)
        sigma = verify.random_density(4, rng)
        lhs = verify.von_neumann_entropy(np.kron(rho, sigma))
        rhs = verify.von_neumann_entropy(rho) + verify.von_neumann_entropy(sigma)
        assert abs(lhs - rhs) < 1e-10


def test_random_su_properties():
    rng = np.random.default_rng(1)
    for d in (2, 3, 5):
        u = verify.random_su(d, rng)
        assert np.linalg.norm(u.conj().T @ u - np.eye(d)) < 1e-12
        assert abs(np.linalg.det(u) - 1.0) < 1e-12


def test_coherent_information_identity_limit():
    rng = np.random.default_rng(2)
    for d in (2, 3):
        rho = verify.random_density(d, rng)
        expected = verify.von_neumann_entropy(rho, base=float(d) if d > 1 else 2.0)
        assert abs(verify.coherent_information(d, 0.0, rho) - expected) < 1e-10


def test_coherent_information_vanishes_at_pi4():
    rng = np.random.default_rng(3)
    for d in (2, 3):
        for _ in range(5):
            rho = verify.random_density(d, rng)
            assert abs(verify.coherent_information(d, math.pi / 4, rho)) < 1e-10


@pytest.mark.parametrize("d", [2, 3, 4])
def test_coherent_information_maximally_mixed_equals_closed_form(d):
    for r in (0.2, 0.5, 0.7):
        got = verify.coherent_information(d, r, np.eye(d) / d)
        assert abs(got - capacity.quantum_capacity_grassmann_unclamped(d, r)) < 1e-9


@pytest.mark.parametrize("d", [2, 3])
def test_coherent_information_purification_oracle(d):
    # independent route: extend the isometry over a purifying register and
    # take entropies of the dense reduced states
    from grasschan import fock

    rng = np.random.default_rng(31)
    r = 0.6
    rho = verify.random_density(d, rng)
    evals, vecs = np.linalg.eigh(rho)
    dim_ac = 1 << (2 * d)
    tau = np.zeros((dim_ac, d), dtype=complex)  # columns indexed by the register
    for i in range(d):
        if evals[i] < 1e-14:
            continue
        tau[:, i] = math.sqrt(evals[i]) * fock.isometry_apply(d, r, vecs[:, i]).dense()
    full = tau.reshape(1 << d, 1 << d, d)  # (A, C, R)
    rho_a = np.einsum("acr,bcr->ab", full, full.conj())
    rho_c = np.einsum("acr,adr->cd", full, full.conj())
    base = float(d)
    expected = verify.von_neumann_entropy(rho_a, base) - verify.von_neumann_entropy(rho_c, base)
    assert abs(verify.coherent_information(d, r, rho) - expected) < 1e-10


def test_coherent_information_shape_check():
    with pytest.raises(PreconditionError):
        verify.coherent_information(3, 0.5, np.eye(2) / 2)


def test_capacity_upper_bound_check():
    rep = verify.check_capacity_upper_bound(2, 0.5, samples=100)
    assert rep.passed and rep.worst_residual <= 1e-9
    rep = verify.check_capacity_upper_bound(3, 0.3, samples=50)
    assert rep.passed
    with pytest.raises(DomainError):
        verify.check_capacity_upper_bound(2, 1.0)


def test_optimize_coherent_information_qubit():
    value, rho = verify.optimize_coherent_information(2, 0.3, restarts=3, seed=7)
    expected = 1.0 - 2.0 * math.sin(0.3) ** 2
    assert abs(value - expected) < 1e-6
    assert np.linalg.norm(rho.mat - np.eye(2) / 2) < 1e-3


def test_optimize_coherent_information_zero_point():
    value, _ = verify.optimize_coherent_information(3, math.pi / 4, restarts=2, seed=7)
    assert abs(value) < 1e-6


def test_holevo_quantity_examples():
    rng = np.random.default_rng(4)
    rho = verify.random_density(2, rng)
    assert abs(verify.holevo_quantity(2, 0.4, [(1.0, rho)])) < 1e-12
    for d in (2, 3):
        rails = [(1.0 / d, np.diag(np.eye(d)[i]).astype(complex)) for i in range(d)]
        assert abs(verify.holevo_quantity(d, 0.0, rails, base="2") - math.log2(d)) < 1e-10
    for r in (0.3, 0.8):
        rails = [(0.5, np.diag([1.0, 0.0]).astype(complex)), (0.5, np.diag([0.0, 1.0]).astype(complex))]
        assert abs(verify.holevo_quantity(2, r, rails, base="2") - (1 - math.sin(r) ** 2)) < 1e-10
    with pytest.raises(PreconditionError):
        verify.holevo_quantity(2, 0.4, [(0.7, rho)])


def test_optimize_holevo_qubit():
    value, ensemble = verify.optimize_holevo(2, 0.5, ensemble_size=4, restarts=3, seed=11, base="2")
    closed = capacity.classical_capacity_grassmann(2, 0.5, base="2")
    assert value <= closed + 1e-6
    assert abs(value - closed) < 1e-4
    probs = [p for p, _ in ensemble]
    assert abs(sum(probs) - 1.0) < 1e-12


def test_optimize_holevo_monotone_in_r():
    values = [
        verify.optimize_holevo(2, r, ensemble_size=3, restarts=2, seed=11, base="2")[0]
        for r in (0.0, 0.5, 1.0, 1.3)
    ]
    assert all(a >= b - 1e-6 for a, b in zip(values, values[1:]))
    assert abs(values[0] - 1.0) < 1e-6


def test_optimize_domain_caps():
    with pytest.raises(DomainError):
        verify.optimize_holevo(5, 0.3)
    with pytest.raises(PreconditionError):
        verify.optimize_holevo(3, 0.3, ensemble_size=2)


def test_check_degradable_inside_boundary():
    rep = verify.check_degradable(2, 0.3)
    detail = rep.trials[0]
    assert rep.passed
    assert detail["solve_residual"] < 1e-9
    assert detail["choi_min_eig"] >= -1e-9
    assert detail["q_gap"] < 1e-10


def test_check_degradable_self_complementary_point():
    rep = verify.check_degradable(3, math.pi / 4)
    detail = rep.trials[0]
    assert rep.passed
    assert abs(detail["q_solved"][0] - 1.0) < 1e-10
    assert max(abs(q) for q in detail["q_solved"][1:]) < 1e-10


def test_check_degradable_fails_beyond_boundary():
    rep = verify.check_degradable(2, 1.0)
    detail = rep.trials[0]
    assert rep.passed  # expected failure observed
    assert not detail["cp_ok"]
    assert not detail["weights_valid"]
    assert detail["choi_min_eig"] < -1e-6
    assert detail["solve_residual"] < 1e-9


def test_check_covariance_random_and_diagonal():
    for d in (2, 3, 4):
        rep = verify.check_covariance(d, 0.5, trials=20, seed=5)
        assert rep.passed and rep.worst_residual < 1e-9


def test_covariance_identity_rotation_exact():
    d, r = 3, 0.7
    fwd = channels.grassmann_channel(d, r)
    rng = np.random.default_rng(12)
    v = verify.random_pure_state(d, rng)
    psi = np.outer(v, v.conj())
    out = channels.apply_kraus(fwd.kraus, psi)
    assert np.linalg.norm(channels.apply_kraus(fwd.kraus, np.eye(d) @ psi) - out) == 0.0


@pytest.mark.parametrize("d", [2, 3])
def test_degradability_boundary_sweep(d):
    for r in (0.1, 0.3, 0.5, 0.7, math.pi / 4):
        rep = verify.check_degradable(d, r)
        detail = rep.trials[0]
        assert rep.passed and detail["cp_ok"] and detail["weights_valid"]
    for r in (0.9, 1.2):
        rep = verify.check_degradable(d, r)
        detail = rep.trials[0]
        assert rep.passed and not detail["cp_ok"] and not detail["weights_valid"]


def test_check_covariance_diagonal_phases_exact():
    # diagonal special unitaries act through minors with no mixing
    d, r = 3, 0.5
    fwd = channels.grassmann_channel(d, r)
    phases = np.exp(2j * np.pi * np.array([0.1, 0.3, -0.4]))
    u = np.diag(phases / np.linalg.det(np.diag(phases)) ** (1 / 3))
    rng = np.random.default_rng(6)
    v = verify.random_pure_state(d, rng)
    psi = np.outer(v, v.conj())
    from grasschan import fock

    rep_blocks = [fock.exterior_power(u, k).entries for k in range(1, d + 1)]
    rep = np.zeros((7, 7), dtype=complex)
    pos = 0
    for lam in rep_blocks:
        n = lam.shape[0]
        rep[pos : pos + n, pos : pos + n] = lam
        pos += n
    lhs = channels.apply_kraus(fwd.kraus, u @ psi @ u.conj().T)
    rhs = rep @ channels.apply_kraus(fwd.kraus, psi) @ rep.conj().T
    assert np.linalg.norm(lhs - rhs) < 1e-12


def test_check_wolf_eisert_examples():
    assert verify.check_wolf_eisert_form(3, 2, trials=20).passed
    assert verify.check_wolf_eisert_form(4, 2, trials=20).passed
    assert verify.check_wolf_eisert_form(5, 3, trials=10).passed
    assert verify.check_wolf_eisert_form(4, 1, trials=5).passed
    assert verify.check_wolf_eisert_form(4, 4, trials=5).passed
    # spot values: d=4, k=2 flat level is 1/3 with multiplicity 3
    block = channels.grassmann_block(4, 2)
    out = channels.apply_kraus(block.kraus, np.diag([1.0, 0, 0, 0]).astype(complex))
    evals = np.sort(np.linalg.eigvalsh(out))[::-1]
    assert np.abs(evals[:3] - 1 / 3).max() < 1e-12
    assert np.abs(evals[3:]).max() < 1e-12


def test_check_complementary_spectra():
    assert verify.check_complementary_spectra(3, 0.6, trials=10).passed
    assert verify.check_complementary_spectra(2, 0.4, trials=10).passed
    assert verify.check_complementary_spectra(4, 1.1, trials=5).passed
    # at the self-complementary point the full outputs are globally isospectral
    rng = np.random.default_rng(8)
    fwd, comp = verify._grassmann_pair(3, math.pi / 4)
    v = verify.random_pure_state(3, rng)
    psi = np.outer(v, v.conj())
    ev_a = np.sort(np.linalg.eigvalsh(channels.apply_kraus(fwd.kraus, psi)))
    ev_c = np.sort(np.linalg.eigvalsh(channels.apply_kraus(comp.kraus, psi)))
    assert np.abs(ev_a - ev_c).max() < 1e-12


@pytest.mark.parametrize("d", [3, 4, 5])
def test_check_werner_holevo(d):
    rep = verify.check_werner_holevo(d)
    assert rep.passed
    assert rep.worst_residual < 1e-10
    assert rep.trials[0]["partial_transpose_min_eig"] < -1e-6


def test_check_factorization():
    assert verify.check_factorization(0.0).worst_residual < 1e-14
    assert verify.check_factorization(0.7).passed
    rep = verify.check_factorization(math.pi / 4)
    assert rep.passed
    sv = __import__("grasschan.fock", fromlist=["fock"]).squeezed_vacuum(1, math.pi / 4)
    amp = math.sqrt(2) / 2
    assert abs(sv.amplitude((0, 0)) - amp) < 1e-12
    assert abs(sv.amplitude((1, 1)) - amp) < 1e-12


def test_check_ppt():
    # completely depolarizing point is separable: PT stays PSD
    sep = channels.transpose_depolarizing(3, 0.0).choi
    assert verify.check_ppt(sep, 3) >= -1e-12
    wh = channels.choi_matrix(channels.werner_holevo(3))
    assert verify.check_ppt(wh, 3) < -1e-6
    threshold = -1.0 / (3 * 3 - 1)
    assert verify.check_ppt(channels.transpose_depolarizing(3, threshold - 1e-4).choi, 3) < 0
    assert verify.check_ppt(channels.transpose_depolarizing(3, threshold + 1e-4).choi, 3) > 0
    with pytest.raises(PreconditionError):
        verify.check_ppt(np.eye(6), 4)


def test_check_approximation_rate_qubit():
    rep = verify.check_approximation_rate(2)
    assert rep.passed
    assert 1.8 <= rep.trials[0]["slope"] <= 2.2


def test_report_json_shape():
    rep = verify.check_factorization(0.3)
    doc = rep.to_json_dict()
    assert list(doc) == ["check", "params", "pass", "worst_residual", "trials"]
    assert isinstance(doc["pass"], bool)
