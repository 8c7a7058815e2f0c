"""Closed-form channel capacities and their reparametrized forms.

All capacity formulas default to the base-d logarithm (``base="d"``), which
normalizes a noiseless qudit channel to capacity 1; pass ``base="2"`` for
bits.  Quantum-capacity values are clamped at zero for reporting; the raw
(possibly negative) expression is available separately for diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConsistencyError, ConvergenceError, DomainError

__all__ = [
    "log_base_value",
    "BlockWeights",
    "DegradingWeights",
    "CapacityCurve",
    "UnruhCapacity",
    "block_weights",
    "degrading_weights",
    "quantum_capacity_grassmann",
    "quantum_capacity_grassmann_unclamped",
    "quantum_capacity_grassmann_w",
    "classical_capacity_grassmann",
    "quantum_capacity_unruh",
    "unruh_capacity_approx",
    "capacity_ratio",
]

UNRUH_MAX_TERMS = 10_000_000


def log_base_value(base, d: int) -> float:
    """Resolve a log-base label ("2" | "d" | numeric) to a numeric base."""
    if base in (2, "2", "two", 2.0):
        return 2.0
    if base in ("d", "d-adaptive"):
        if d < 2:
            return 2.0  # log base 1 is degenerate; d=1 capacities are all 0
        return float(d)
    value = float(base)
    if value <= 1.0:
        raise DomainError(f"log base must exceed 1, got {base}")
    return value


def _logk(k: int, base_val: float) -> float:
    # k = 1 contributes exactly zero (removable 0*log0-style edge at sector 1)
    return 0.0 if k == 1 else math.log(k) / math.log(base_val)


def _check_r(r: float):
    if not 0.0 <= r < math.pi / 2:
        raise DomainError(f"squeezing parameter r={r} outside [0, pi/2)")


@dataclass(frozen=True)
class BlockWeights:
    """Forward and complementary sector weights of the d-dimensional channel."""

    d: int
    r: float
    p: np.ndarray
    p_tilde: np.ndarray


def block_weights(d: int, r: float) -> BlockWeights:
    """Sector weights p_k and complementary weights p~_k, k = 1..d.

    p_k = C(d-1,k-1) cos^(2(d-1))r tan^(2(k-1))r, and p~_k has the tangent
    exponent 2(d-k).  Both are evaluated in the tan-free form
    cos^(2a) sin^(2b) to stay finite on the whole open interval.
    """
    if d < 1:
        raise DomainError(f"need d >= 1, got d={d}")
    _check_r(r)
    c2, s2 = math.cos(r) ** 2, math.sin(r) ** 2
    p = np.array([math.comb(d - 1, k - 1) * c2 ** (d - k) * s2 ** (k - 1) for k in range(1, d + 1)])
    pt = np.array([math.comb(d - 1, k - 1) * c2 ** (k - 1) * s2 ** (d - k) for k in range(1, d + 1)])
    assert abs(p.sum() - 1.0) < 1e-12 and abs(pt.sum() - 1.0) < 1e-12
    return BlockWeights(d, r, p, pt)


@dataclass(frozen=True)
class DegradingWeights:
    """Convex weights of the degrading map, valid iff all are nonnegative."""

    d: int
    r: float
    q: np.ndarray
    valid: bool


def degrading_weights(d: int, r: float) -> DegradingWeights:
    """Weights q_k of the degrading map; q_1 = tan^(2(d-1))r.

    The weights always sum to 1; they are all nonnegative exactly on
    r in [0, pi/4], which the ``valid`` flag reports.
    """
    if d < 1:
        raise DomainError(f"need d >= 1, got d={d}")
    _check_r(r)
    t2 = math.tan(r) ** 2
    c2 = math.cos(r) ** 2
    q = np.zeros(d)
    q[0] = t2 ** (d - 1)
    for k in range(2, d + 1):
        q[k - 1] = math.comb(d - 1, k - 1) * c2 ** (d - 1) * (t2 ** (d - k) - t2 ** (d + k - 2))
    valid = bool(np.all(q >= -1e-12) and abs(q.sum() - 1.0) <= 1e-12)
    return DegradingWeights(d, r, q, valid)


def quantum_capacity_grassmann_unclamped(d: int, r: float, base="d") -> float:
    """Raw quantum-capacity expression; negative beyond r = pi/4."""
    w = block_weights(d, r)
    base_val = log_base_value(base, d)
    # (1/d) sum_k k C(d,k) log k (cos^(2(d-1)) tan^(2(d-k)) - ... tan^(2(k-1)))
    # collapses to sum_k (p~_k - p_k) log k via k C(d,k) = d C(d-1,k-1)
    return float(sum((w.p_tilde[k - 1] - w.p[k - 1]) * _logk(k, base_val) for k in range(1, d + 1)))


def quantum_capacity_grassmann(d: int, r: float, base="d") -> float:
    """Quantum capacity of the d-dimensional channel, clamped at zero."""
    return max(0.0, quantum_capacity_grassmann_unclamped(d, r, base))


def _q_w_form_a(d: int, w: float, base_val: float) -> float:
    # (1/d) (1+w)^-(d-1) sum_k k C(d,k) log k (w^(d-k) - w^(k-1))
    s = sum(
        k * math.comb(d, k) * _logk(k, base_val) * (w ** (d - k) - w ** (k - 1))
        for k in range(1, d + 1)
    )
    return s / (d * (1.0 + w) ** (d - 1))


def _q_w_form_b(d: int, w: float, base_val: float) -> float:
    # (1+w)^-(d-1) sum_{k=0}^{d-1} w^k C(d-1,k) log((d-k)/(k+1))
    lb = math.log(base_val)
    s = sum(
        w**k * math.comb(d - 1, k) * (math.log(d - k) - math.log(k + 1)) / lb
        for k in range(d)
    )
    return s / (1.0 + w) ** (d - 1)


def quantum_capacity_grassmann_w(d: int, w: float, base="d") -> float:
    """Quantum capacity as a function of w = tan^2 r, covering w = 1 exactly.

    Evaluates two independent algebraic forms of the rewritten capacity and
    raises ConsistencyError if they disagree beyond 1e-12.
    """
    if d < 1:
        raise DomainError(f"need d >= 1, got d={d}")
    if not 0.0 <= w <= 1.0:
        raise DomainError(f"w={w} outside [0, 1]")
    base_val = log_base_value(base, d)
    a = _q_w_form_a(d, w, base_val)
    b = _q_w_form_b(d, w, base_val)
    if abs(a - b) > 1e-12:
        raise ConsistencyError(
            f"w-parametrized capacity forms disagree at d={d}, w={w}: {a!r} vs {b!r}"
        )
    return max(0.0, b)


def classical_capacity_grassmann(d: int, r: float, base="d") -> float:
    """Classical capacity: log d - sum_k p_k log k.

    Cross-checks the closed form against the three-term expression
    H({p_k}) + sum_k p_k log C(d,k) - H(pure-input output), where the output
    entropy uses the flat sector spectra (eigenvalue 1/C(d-1,k-1) with
    multiplicity C(d-1,k-1) inside sector k).
    """
    w = block_weights(d, r)
    base_val = log_base_value(base, d)
    lb = math.log(base_val)
    closed = math.log(d) / lb - sum(w.p[k - 1] * _logk(k, base_val) for k in range(1, d + 1))

    def _h(probs) -> float:
        return -sum(p * math.log(p) for p in probs if p > 0.0) / lb

    h_weights = _h(w.p)
    sector_term = sum(w.p[k - 1] * math.log(math.comb(d, k)) for k in range(1, d + 1)) / lb
    h_output = h_weights + sum(
        w.p[k - 1] * math.log(math.comb(d - 1, k - 1)) for k in range(1, d + 1)
    ) / lb
    three_term = h_weights + sector_term - h_output
    if abs(closed - three_term) > 1e-10:
        raise ConsistencyError(
            f"classical-capacity forms disagree at d={d}, r={r}: {closed!r} vs {three_term!r}"
        )
    return float(max(0.0, closed))


class UnruhCapacity(NamedTuple):
    value: float
    remainder: float
    terms: int


def quantum_capacity_unruh(d: int, z: float, tol: float = 1e-12, base="d") -> UnruhCapacity:
    """Quantum capacity of the d-dimensional bosonic squeezing channel.

    Sums (1/d)(1-z)^(d+1) sum_{k>=1} k C(d+k-1,k) log((d+k-1)/k) z^(k-1)
    until a geometric tail bound certifies the remainder below ``tol``:
    consecutive term ratios are bounded by z (1 + d/k), so once that bound
    drops below one the tail is at most term * q / (1 - q).
    """
    if d < 1:
        raise DomainError(f"need d >= 1, got d={d}")
    if not 0.0 <= z < 1.0:
        raise DomainError(f"z={z} outside [0, 1)")
    if tol <= 0.0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    base_val = log_base_value(base, d)
    lb = math.log(base_val)
    prefac = (1.0 - z) ** (d + 1) / d

    total = 0.0
    comp = 0.0  # Neumaier compensation
    k = 1
    binom_z = float(d)  # C(d+k-1,k) z^(k-1) at k=1: C(d,1) = d, z^0 = 1
    while True:
        term = prefac * k * binom_z * (math.log(d + k - 1) - math.log(k)) / lb
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        q = z * (1.0 + d / k)
        if q < 1.0:
            tail = abs(term) * q / (1.0 - q)
            if tail < tol:
                return UnruhCapacity(total + comp, tail, k)
        if k >= UNRUH_MAX_TERMS:
            raise ConvergenceError(
                f"Unruh series did not certify tol={tol} within {UNRUH_MAX_TERMS} terms",
                partial=total + comp,
            )
        binom_z *= z * (d + k) / (k + 1)
        k += 1


def unruh_capacity_approx(d: int, z: float, base="d") -> float:
    """Closed-form large-acceleration approximation of the Unruh capacity."""
    if d < 1:
        raise DomainError(f"need d >= 1, got d={d}")
    if not 0.0 < z <= 1.0:
        raise DomainError(f"z={z} outside (0, 1]")
    base_val = log_base_value(base, d)
    value = (d - 1) / (d * math.log(d)) * (1.0 - z) / z * (1.0 - (1.0 - z) ** d)
    # the formula is native to base d; rescale log factors for other bases
    return value * math.log(d) / math.log(base_val)


def capacity_ratio(d: int) -> float:
    """Infinite-acceleration ratio r_d of the fermionic to bosonic capacity."""
    if d < 2:
        raise DomainError(f"ratio needs d >= 2, got d={d}")
    ld = math.log(d)
    s = sum(
        (d - 1 - 2 * k) * math.comb(d - 1, k) * (math.log(d - k) - math.log(k + 1)) / ld
        for k in range((d - 1) // 2 + 1)
    )
    return d * ld / (d - 1) / 2 ** (d - 1) * s


@dataclass
class CapacityCurve:
    """A sampled capacity series suitable for CSV export."""

    family: str
    d: int
    param_name: str
    base: str
    samples: list[tuple[float, float]] = field(default_factory=list)

    def __post_init__(self):
        params = [p for p, _ in self.samples]
        if any(b >= a for a, b in zip(params[1:], params)):
            raise DomainError("curve samples must be strictly increasing in the parameter")
        if any(not math.isfinite(v) for _, v in self.samples):
            raise DomainError("curve values must be finite")
