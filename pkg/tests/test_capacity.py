"""Closed-form capacities, weights, series, and reparametrizations."""

import math

import numpy as np
import pytest

from grasschan import capacity
from grasschan.capacity import (
    block_weights,
    capacity_ratio,
    classical_capacity_grassmann,
    degrading_weights,
    quantum_capacity_grassmann,
    quantum_capacity_grassmann_unclamped,
    quantum_capacity_grassmann_w,
    quantum_capacity_unruh,
    unruh_capacity_approx,
)
from grasschan.errors import ConvergenceError, DomainError


@pytest.mark.parametrize("r", np.linspace(0.0, 1.5, 20))
def test_qubit_closed_forms(r):
    # the d=2 member reduces to the known erasure-channel capacities
    r = float(r)
    p = math.sin(r) ** 2
    assert abs(quantum_capacity_grassmann(2, r, "2") - max(0.0, 1.0 - 2 * p)) < 1e-12
    assert abs(classical_capacity_grassmann(2, r, "2") - (1.0 - p)) < 1e-12


@pytest.mark.parametrize("d", range(2, 21))
def test_unclamped_zero_at_self_complementary_point(d):
    assert abs(quantum_capacity_grassmann_unclamped(d, math.pi / 4)) < 1e-13
    assert quantum_capacity_grassmann(d, math.pi / 4) >= 0.0


@pytest.mark.parametrize("d", [2, 5, 11, 20])
def test_unclamped_antisymmetric_about_pi4(d):
    for r in (0.2, 0.5, 0.7):
        left = quantum_capacity_grassmann_unclamped(d, r)
        right = quantum_capacity_grassmann_unclamped(d, math.pi / 2 - r)
        assert abs(left + right) < 1e-12
        assert left > 0 > right


@pytest.mark.parametrize("d", [2, 3, 7, 15])
def test_base_conversion_factor(d):
    factor = math.log(d) / math.log(2)
    for r in (0.1, 0.6, 1.0):
        assert abs(
            quantum_capacity_grassmann(d, r, "2") - quantum_capacity_grassmann(d, r, "d") * factor
        ) < 1e-12
        assert abs(
            classical_capacity_grassmann(d, r, "2")
            - classical_capacity_grassmann(d, r, "d") * factor
        ) < 1e-12
    z = 0.4
    assert abs(
        quantum_capacity_unruh(d, z, tol=1e-14, base="2").value
        - quantum_capacity_unruh(d, z, tol=1e-14, base="d").value * factor
    ) < 1e-12
    assert abs(unruh_capacity_approx(d, z, "2") - unruh_capacity_approx(d, z, "d") * factor) < 1e-12


def test_three_algebraic_forms_agree():
    rng = np.random.default_rng(17)
    for d in range(2, 21):
        for r in rng.uniform(0.0, 1.5, size=50):
            r = float(r)
            w = math.tan(r) ** 2
            if w > 1.0:
                w = 1.0 / w
                r = math.atan(math.sqrt(w))
            via_r = quantum_capacity_grassmann(d, r)
            via_w = quantum_capacity_grassmann_w(d, w)  # itself checks two forms at 1e-12
            assert abs(via_r - via_w) < 1e-11, (d, r)


def test_w_parametrization_edges():
    for d in (2, 3, 10):
        assert quantum_capacity_grassmann_w(d, 1.0) == 0.0
        assert abs(quantum_capacity_grassmann_w(d, 0.0) - 1.0) < 1e-14
    with pytest.raises(DomainError):
        quantum_capacity_grassmann_w(3, 1.5)


def test_classical_capacity_limits():
    for d in (2, 3, 8, 20):
        assert abs(classical_capacity_grassmann(d, 0.0, "2") - math.log2(d)) < 1e-12
        assert abs(classical_capacity_grassmann(d, 0.0, "d") - 1.0) < 1e-12
        assert classical_capacity_grassmann(d, 1.55, "d") < 5e-3
        grid = np.linspace(0.0, 1.55, 40)
        values = [classical_capacity_grassmann(d, float(r), "d") for r in grid]
        assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))


def test_block_weights_sum_and_reversal():
    for d in (1, 2, 3, 6, 12):
        for r in (0.0, 0.3, 0.9, 1.4):
            w = block_weights(d, r)
            assert abs(w.p.sum() - 1.0) < 1e-12
            assert abs(w.p_tilde.sum() - 1.0) < 1e-12
            assert np.abs(w.p_tilde - w.p[::-1]).max() < 1e-15
    w0 = block_weights(4, 0.0)
    assert np.allclose(w0.p, [1, 0, 0, 0])
    assert np.allclose(w0.p_tilde, [0, 0, 0, 1])


def test_degrading_weights_against_linear_solve():
    # oracle: q_1 p_k + q_k = p~_k solved directly from the weight vectors
    for d in (2, 3, 4, 6):
        for r in (0.1, 0.4, 0.7, 1.0, 1.3):
            w = block_weights(d, r)
            q1 = w.p_tilde[0] / w.p[0]
            expected = np.concatenate([[q1], w.p_tilde[1:] - q1 * w.p[1:]])
            got = degrading_weights(d, r)
            scale = max(1.0, float(np.abs(expected).max()))
            assert np.abs(got.q - expected).max() < 1e-12 * scale
            assert abs(got.q.sum() - 1.0) < 1e-12 * scale
            assert abs(got.q[0] - math.tan(r) ** (2 * (d - 1))) < 1e-12 * scale


def test_degrading_weights_boundary_behavior():
    for d in (2, 3, 4):
        at_pi4 = degrading_weights(d, math.pi / 4)
        assert abs(at_pi4.q[0] - 1.0) < 1e-12
        assert np.abs(at_pi4.q[1:]).max() < 1e-12
        assert at_pi4.valid
        at_zero = degrading_weights(d, 0.0)
        assert abs(at_zero.q[-1] - 1.0) < 1e-15
        assert at_zero.valid
        for r in (0.9, 1.1, 1.3):
            assert not degrading_weights(d, r).valid


def test_unruh_z0_single_term():
    for d in (2, 3, 7):
        res = quantum_capacity_unruh(d, 0.0)
        assert abs(res.value - 1.0) < 1e-14  # log_d d
        assert res.terms == 1
        assert abs(quantum_capacity_unruh(d, 0.0, base="2").value - math.log2(d)) < 1e-13


def test_unruh_series_vs_naive_long_sum():
    d, z = 2, 0.5
    res = quantum_capacity_unruh(d, z, tol=1e-12)
    k = np.arange(1, 1_000_001, dtype=float)
    with np.errstate(under="ignore"):
        terms = k * (k + 1) * (np.log(k + 1) - np.log(k)) / math.log(d) * z ** (k - 1)
    naive = (1 - z) ** (d + 1) / d * terms.sum()
    assert abs(res.value - naive) < 1e-12


def test_unruh_remainder_bound_is_honest():
    for d, z in ((2, 0.5), (3, 0.8), (5, 0.9)):
        res = quantum_capacity_unruh(d, z, tol=1e-10)
        k = np.arange(1, 2 * res.terms + 1, dtype=float)
        with np.errstate(under="ignore"):
            terms = (
                k
                * np.array([math.comb(d + int(kk) - 1, int(kk)) for kk in k])
                * (np.log(d + k - 1) - np.log(k))
                / math.log(d)
                * z ** (k - 1)
            )
        doubled = (1 - z) ** (d + 1) / d * terms.sum()
        assert abs(doubled - res.value) <= res.remainder


def test_unruh_convergence_cap(monkeypatch):
    monkeypatch.setattr(capacity, "UNRUH_MAX_TERMS", 10)
    with pytest.raises(ConvergenceError) as err:
        quantum_capacity_unruh(3, 0.9, tol=1e-12)
    assert err.value.partial > 0.0


def test_unruh_approx_hand_value():
    expected = 0.75 / (2 * math.log(2))
    assert abs(unruh_capacity_approx(2, 0.5) - expected) < 1e-15
    assert unruh_capacity_approx(3, 1.0) == 0.0


def test_capacity_ratio_values():
    assert abs(capacity_ratio(2) - math.log(2)) < 1e-12
    ratios = [capacity_ratio(d) for d in range(2, 51)]
    assert all(a < b for a, b in zip(ratios, ratios[1:]))
    r100 = capacity_ratio(100)
    assert ratios[-1] < r100 < 1.0
    with pytest.raises(DomainError):
        capacity_ratio(1)


def test_domain_errors():
    with pytest.raises(DomainError):
        quantum_capacity_grassmann(3, math.pi / 2)
    with pytest.raises(DomainError):
        quantum_capacity_grassmann(0, 0.3)
    with pytest.raises(DomainError):
        quantum_capacity_unruh(3, 1.0)
    with pytest.raises(DomainError):
        quantum_capacity_unruh(3, 0.5, tol=-1.0)
    with pytest.raises(DomainError):
        capacity.log_base_value("1", 3)


def test_capacity_curve_invariants():
    capacity.CapacityCurve("grassmann-q", 2, "r", "d", [(0.0, 1.0), (0.5, 0.8)])
    with pytest.raises(DomainError):
        capacity.CapacityCurve("grassmann-q", 2, "r", "d", [(0.5, 1.0), (0.1, 0.8)])
    with pytest.raises(DomainError):
        capacity.CapacityCurve("grassmann-q", 2, "r", "d", [(0.0, math.inf)])
