"""Fermionic Fock-space arithmetic on occupation bit-strings.

Occupation states of ``m`` modes are packed into integers with mode 0 in the
most significant bit, so ascending integer order enumerates occupation
bit-vectors (n_0, ..., n_{m-1}) lexicographically.  Bipartite states over two
registers A and C of d modes each use 2d modes ordered A_0 ... A_{d-1}
C_0 ... C_{d-1}.

Ladder operators carry the Jordan-Wigner phase (-1)^(number of occupied modes
with smaller index); every signed state produced here comes from sequential
ladder applications, never from hand-written sign formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.linalg import expm

from .errors import DomainError, PreconditionError

__all__ = [
    "OccupationState",
    "StateVector",
    "RepresentationMatrix",
    "basis_states",
    "sector_codes",
    "sector_rank",
    "vacuum",
    "basis_state_vector",
    "apply_creation",
    "apply_annihilation",
    "squeezed_vacuum",
    "isometry_apply",
    "exterior_power",
    "ladder_matrix",
    "pair_generator",
    "squeezing_unitary",
    "factored_squeezing_unitary",
]

DENSE_ORACLE_MAX_MODES = 4


@dataclass(frozen=True)
class OccupationState:
    """Occupation numbers of d fermionic modes, each 0 or 1."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise DomainError(f"occupation numbers must be 0 or 1, got {self.bits}")

    @property
    def count(self) -> int:
        """Fermion number (popcount of the bit-vector)."""
        return sum(self.bits)

    @property
    def code(self) -> int:
        """Integer packing with mode 0 in the most significant bit."""
        return bits_to_code(self.bits)

    @property
    def rank(self) -> int:
        """Lexicographic index among all states with the same fermion count."""
        return sector_rank(len(self.bits), self.code)

    def __str__(self) -> str:
        return "|" + "".join(str(b) for b in self.bits) + ">"


def bits_to_code(bits) -> int:
    code = 0
    for b in bits:
        code = (code << 1) | int(b)
    return code


def code_to_bits(code: int, num_modes: int) -> tuple[int, ...]:
    return tuple((code >> (num_modes - 1 - j)) & 1 for j in range(num_modes))


def sector_codes(d: int, k: int) -> list[int]:
    """Integer codes of all C(d, k) states with k fermions, ascending.

    Ascending codes are lexicographically ordered bit-vectors; this ordering
    is the basis contract for every sector block downstream.
    """
    if d < 1:
        raise DomainError(f"need at least one mode, got d={d}")
    if not 0 <= k <= d:
        raise DomainError(f"fermion count k={k} outside [0, {d}]")
    return [c for c in range(1 << d) if c.bit_count() == k]


def basis_states(d: int, k: int) -> list[OccupationState]:
    """All k-fermion occupation states of d modes in lexicographic order."""
    return [OccupationState(code_to_bits(c, d)) for c in sector_codes(d, k)]


def sector_rank(d: int, code: int) -> int:
    """Position of ``code`` within ``sector_codes(d, code.bit_count())``."""
    remaining = code.bit_count()
    rank = 0
    for j in range(d):
        if (code >> (d - 1 - j)) & 1:
            rank += math.comb(d - 1 - j, remaining)
            remaining -= 1
    return rank


@dataclass
class StateVector:
    """Sparse complex amplitude map over occupation codes.

    Treated as immutable after construction; operations return new values.
    """

    num_modes: int
    amplitudes: dict[int, complex]

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def is_normalized(self, atol: float = 1e-12) -> bool:
        return abs(self.norm() - 1.0) <= atol

    def amplitude(self, bits) -> complex:
        """Amplitude of the basis state given as a bit sequence or code."""
        code = bits if isinstance(bits, int) else bits_to_code(bits)
        return self.amplitudes.get(code, 0.0 + 0.0j)

    def cleaned(self, eps: float = 0.0) -> "StateVector":
        amps = {c: a for c, a in self.amplitudes.items() if abs(a) > eps}
        return StateVector(self.num_modes, amps)

    def dense(self) -> np.ndarray:
        vec = np.zeros(1 << self.num_modes, dtype=complex)
        for code, amp in self.amplitudes.items():
            vec[code] = amp
        return vec


def vacuum(num_modes: int) -> StateVector:
    return StateVector(num_modes, {0: 1.0 + 0.0j})


def basis_state_vector(bits) -> StateVector:
    bits = tuple(int(b) for b in bits)
    return StateVector(len(bits), {bits_to_code(bits): 1.0 + 0.0j})


def _jw_sign(code: int, num_modes: int, mode: int) -> int:
    # (-1)^(occupied modes with index < mode); lower-index modes sit in
    # higher-significance bits.
    prefix = code >> (num_modes - mode)
    return -1 if prefix.bit_count() & 1 else 1


def apply_creation(state: StateVector, mode: int) -> StateVector:
    """Apply the creation operator for ``mode`` (0-based) with JW sign."""
    m = state.num_modes
    if not 0 <= mode < m:
        raise DomainError(f"mode {mode} outside [0, {m})")
    bit = 1 << (m - 1 - mode)
    out: dict[int, complex] = {}
    for code, amp in state.amplitudes.items():
        if code & bit:
            continue  # already occupied
        new = code | bit
        out[new] = out.get(new, 0.0) + _jw_sign(code, m, mode) * amp
    return StateVector(m, out)


def apply_annihilation(state: StateVector, mode: int) -> StateVector:
    """Apply the annihilation operator for ``mode`` (0-based) with JW sign."""
    m = state.num_modes
    if not 0 <= mode < m:
        raise DomainError(f"mode {mode} outside [0, {m})")
    bit = 1 << (m - 1 - mode)
    out: dict[int, complex] = {}
    for code, amp in state.amplitudes.items():
        if not code & bit:
            continue  # empty mode annihilates the component
        new = code & ~bit
        out[new] = out.get(new, 0.0) + _jw_sign(code, m, mode) * amp
    return StateVector(m, out)


def _check_r(r: float):
    if not 0.0 <= r < math.pi / 2:
        raise DomainError(f"squeezing parameter r={r} outside [0, pi/2)")


def _pair_creation_sum(state: StateVector, d: int) -> StateVector:
    """Apply sum_i a_i^dag c_i^dag on a bipartite (2d-mode) state."""
    out: dict[int, complex] = {}
    for i in range(d):
        term = apply_creation(apply_creation(state, d + i), i)
        for code, amp in term.amplitudes.items():
            out[code] = out.get(code, 0.0) + amp
    return StateVector(2 * d, out)


def _exp_pair_vacuum(d: int, t: float) -> StateVector:
    """exp(t * sum_i a_i^dag c_i^dag)|vac> by sequential application.

    The exponent is nilpotent of order d+1, so the series is exact.
    """
    total: dict[int, complex] = {0: 1.0 + 0.0j}
    power = vacuum(2 * d)
    for k in range(1, d + 1):
        power = _pair_creation_sum(power, d)
        coeff = t**k / math.factorial(k)
        for code, amp in power.amplitudes.items():
            total[code] = total.get(code, 0.0) + coeff * amp
    return StateVector(2 * d, total)


def squeezed_vacuum(d: int, r: float) -> StateVector:
    """Two-mode-squeezed vacuum of d A/C mode pairs (a 2d-mode state)."""
    if d < 1:
        raise DomainError(f"need at least one mode pair, got d={d}")
    _check_r(r)
    state = _exp_pair_vacuum(d, math.tan(r))
    c = math.cos(r) ** d
    out = StateVector(2 * d, {code: c * amp for code, amp in state.amplitudes.items()})
    assert out.is_normalized(1e-12), "squeezed vacuum lost normalization"
    return out


def isometry_apply(d: int, r: float, beta) -> StateVector:
    """Image of the multi-rail qudit ``beta`` under the channel isometry.

    Computes cos^(d-1)(r) * (sum_i beta_i a_i^dag) exp(tan r * sum_j
    a_j^dag c_j^dag)|vac> by sequential ladder application.
    """
    if d < 1:
        raise DomainError(f"need at least one mode, got d={d}")
    _check_r(r)
    beta = np.asarray(beta, dtype=complex)
    if beta.shape != (d,):
        raise PreconditionError(f"beta must be a length-{d} vector, got shape {beta.shape}")
    if abs(np.linalg.norm(beta) - 1.0) > 1e-12:
        raise PreconditionError(f"beta must be unit norm, got {np.linalg.norm(beta)!r}")

    core = _exp_pair_vacuum(d, math.tan(r))
    out: dict[int, complex] = {}
    for i in range(d):
        if beta[i] == 0:
            continue
        term = apply_creation(core, i)
        for code, amp in term.amplitudes.items():
            out[code] = out.get(code, 0.0) + beta[i] * amp
    c = math.cos(r) ** (d - 1)
    result = StateVector(2 * d, {code: c * amp for code, amp in out.items() if amp != 0})
    assert result.is_normalized(1e-12), "isometry image lost normalization"
    return result


@dataclass(frozen=True)
class RepresentationMatrix:
    """Matrix of a unitary on the k-fermion sector (all k-by-k minors)."""

    d: int
    k: int
    entries: np.ndarray


def exterior_power(u: np.ndarray, k: int) -> RepresentationMatrix:
    """Compound matrix of k-by-k minors of a unitary, in sector basis order."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise PreconditionError(f"expected a square matrix, got shape {u.shape}")
    d = u.shape[0]
    if not 1 <= k <= d:
        raise DomainError(f"sector k={k} outside [1, {d}]")
    if np.linalg.norm(u.conj().T @ u - np.eye(d)) > 1e-10:
        raise PreconditionError("input matrix is not unitary within 1e-10")
    subsets = [
        [j for j in range(d) if (code >> (d - 1 - j)) & 1] for code in sector_codes(d, k)
    ]
    n = len(subsets)
    entries = np.empty((n, n), dtype=complex)
    for a, rows in enumerate(subsets):
        for b, cols in enumerate(subsets):
            entries[a, b] = np.linalg.det(u[np.ix_(rows, cols)])
    return RepresentationMatrix(d, k, entries)


# ---------------------------------------------------------------------------
# Dense Jordan-Wigner matrices; oracle plumbing for small mode counts.
# ---------------------------------------------------------------------------

_SIGMA_RAISE = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |0> -> |1>
_PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_ID2 = np.eye(2, dtype=complex)


def ladder_matrix(num_modes: int, mode: int, dagger: bool = True) -> np.ndarray:
    """Dense 2^m x 2^m ladder operator via the Jordan-Wigner construction."""
    if not 0 <= mode < num_modes:
        raise DomainError(f"mode {mode} outside [0, {num_modes})")
    factors = [_PAULI_Z] * mode + [_SIGMA_RAISE] + [_ID2] * (num_modes - mode - 1)
    mat = reduce(np.kron, factors)
    return mat if dagger else mat.conj().T


def pair_generator(d: int, r: float) -> np.ndarray:
    """Dense generator r * sum_i (a_i^dag c_i^dag - c_i a_i) on 2d modes."""
    if d > DENSE_ORACLE_MAX_MODES:
        raise DomainError(f"dense oracle is capped at d={DENSE_ORACLE_MAX_MODES}")
    dim = 1 << (2 * d)
    gen = np.zeros((dim, dim), dtype=complex)
    for i in range(d):
        a_dag = ladder_matrix(2 * d, i, dagger=True)
        c_dag = ladder_matrix(2 * d, d + i, dagger=True)
        gen += a_dag @ c_dag - (a_dag @ c_dag).conj().T
    return r * gen


def squeezing_unitary(d: int, r: float) -> np.ndarray:
    """Dense exponential of the pair generator (Pade scaling-and-squaring)."""
    return expm(pair_generator(d, r))


def factored_squeezing_unitary(d: int, r: float) -> np.ndarray:
    """Three-factor product form of the squeezing unitary on 2d modes.

    cos^d(r) * exp(tan r * sum a^dag c^dag) * exp(-ln cos r * sum N)
    * exp(-tan r * sum c a), assembled from dense ladder matrices.
    """
    if d > DENSE_ORACLE_MAX_MODES:
        raise DomainError(f"dense oracle is capped at d={DENSE_ORACLE_MAX_MODES}")
    dim = 1 << (2 * d)
    t = math.tan(r)
    raise_sum = np.zeros((dim, dim), dtype=complex)
    lower_sum = np.zeros((dim, dim), dtype=complex)
    for i in range(d):
        a_dag = ladder_matrix(2 * d, i, dagger=True)
        c_dag = ladder_matrix(2 * d, d + i, dagger=True)
        a_op = a_dag.conj().T
        c_op = c_dag.conj().T
        raise_sum += a_dag @ c_dag
        lower_sum += c_op @ a_op
    # exp(-ln cos r * total number operator) is diagonal in occupation codes
    number_diag = np.array([code.bit_count() for code in range(dim)], dtype=float)
    middle = np.diag(math.cos(r) ** (-number_diag)).astype(complex)
    return math.cos(r) ** d * (expm(t * raise_sum) @ middle @ expm(-t * lower_sum))
