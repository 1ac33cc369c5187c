"""Coin-plus-walker quantum walks on the finite lattice.

The joint step operator is V = sum_m kron(P_m U, S_m) with a 2-level coin.
Tracing the coin after every action of V gives the classical walk; tracing
once after n actions gives the coherent (ballistically spreading) walk;
tracing after every second action gives the two-hop walk whose site
distribution is propagated by a fixed bistochastic matrix whenever the
walker matrix stays real.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass

import numpy as np

from .classical import StochKind, StochMatrix, WalkLattice, shift_operators
from .errors import (
    DimensionBudgetError,
    DimensionMismatchError,
    NonUnitaryInputError,
)
from .linalg import DensityMatrix, dagger, frozen, kron, kron_all, partial_trace_first, symmetrize

UNITARY_TOL = 1e-9
DEFAULT_DIM_CAP = 2048


class Scheme(enum.Enum):
    CRW = "crw"
    QRW1 = "qrw1"
    QRW2 = "qrw2"


@dataclass(frozen=True)
class CoinSpec:
    """2x2 coin unitary plus the coin state amplitudes (a, b)."""

    u: np.ndarray
    psi: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=np.complex128)
        psi = np.asarray(self.psi, dtype=np.complex128).ravel()
        if u.shape != (2, 2) or psi.shape != (2,):
            raise DimensionMismatchError("coin needs a 2x2 unitary and a 2-vector state")
        if np.max(np.abs(u @ dagger(u) - np.eye(2))) > 1e-12:
            raise NonUnitaryInputError("coin matrix is not unitary within 1e-12")
        if abs(np.vdot(psi, psi).real - 1.0) > 1e-12:
            raise ValueError("coin amplitudes must satisfy |a|^2 + |b|^2 = 1")
        object.__setattr__(self, "u", frozen(u))
        object.__setattr__(self, "psi", frozen(psi))

    @property
    def rho_c(self) -> np.ndarray:
        return np.outer(self.psi, self.psi.conj())


HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)

#: Coin state making the Hadamard walk left-right symmetric (zero mean).
SYMMETRIC_PSI = np.array([1.0, 1.0j], dtype=np.complex128) / np.sqrt(2.0)


def hadamard_coin(psi=None) -> CoinSpec:
    """Hadamard coin; defaults to the symmetric initial state (1, i)/sqrt(2)."""
    return CoinSpec(HADAMARD, SYMMETRIC_PSI if psi is None else np.asarray(psi))


def pq_coin(p: float, psi=(1.0, 0.0)) -> CoinSpec:
    """Real coin [[sqrt(p), sqrt(1-p)], [sqrt(1-p), -sqrt(p)]] with state psi."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    sp, sq = np.sqrt(p), np.sqrt(1.0 - p)
    return CoinSpec(np.array([[sp, sq], [sq, -sp]], dtype=np.complex128), np.asarray(psi))


@dataclass(frozen=True)
class KrausSet:
    """Operators K_m with sum K_m^dag K_m = 1 within 1e-11."""

    ops: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=np.complex128) for k in self.ops)
        if not ops:
            raise ValueError("a Kraus set needs at least one operator")
        d = ops[0].shape[0]
        if any(k.shape != (d, d) for k in ops):
            raise DimensionMismatchError("Kraus operators must share one square shape")
        total = sum(dagger(k) @ k for k in ops)
        defect = np.max(np.abs(total - np.eye(d)))
        if defect > 1e-11:
            raise ValueError(f"completeness defect {defect:.3e} exceeds 1e-11")
        object.__setattr__(self, "ops", tuple(frozen(k) for k in ops))

    @property
    def dim(self) -> int:
        return self.ops[0].shape[0]


@dataclass(frozen=True)
class WalkState:
    rho_w: DensityMatrix
    step_count: int
    scheme: Scheme


def coin_probabilities(coin: CoinSpec) -> tuple[float, float]:
    """Branch probabilities p_m = Tr(P_m U rho_c U^dag P_m)."""
    amp = coin.u @ coin.psi
    p_plus = float(np.abs(amp[0]) ** 2)
    p_minus = float(np.abs(amp[1]) ** 2)
    return p_plus, p_minus


def build_step_unitary(coin: CoinSpec, s_plus, s_minus) -> np.ndarray:
    """Joint one-step unitary V = kron(P_+ U, S_+) + kron(P_- U, S_-)."""
    s_plus = np.asarray(s_plus, dtype=np.complex128)
    s_minus = np.asarray(s_minus, dtype=np.complex128)
    d = s_plus.shape[0]
    for name, s in (("s_plus", s_plus), ("s_minus", s_minus)):
        if s.shape != (d, d):
            raise DimensionMismatchError(f"{name} must be square of dimension {d}")
        if np.max(np.abs(s @ dagger(s) - np.eye(d))) > UNITARY_TOL:
            raise NonUnitaryInputError(f"{name} is not unitary within {UNITARY_TOL:.0e}")
    proj_plus = np.zeros((2, 2), dtype=np.complex128)
    proj_plus[0, 0] = 1.0
    proj_minus = np.zeros((2, 2), dtype=np.complex128)
    proj_minus[1, 1] = 1.0
    return kron(proj_plus @ coin.u, s_plus) + kron(proj_minus @ coin.u, s_minus)


def kraus_from_unitary(v, coin_psi) -> KrausSet:
    """Coin-basis blocks <m|V|psi> of a joint unitary, one per coin outcome."""
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] % 2:
        raise DimensionMismatchError("expected a square matrix of even dimension")
    if np.max(np.abs(v @ dagger(v) - np.eye(v.shape[0]))) > UNITARY_TOL:
        raise NonUnitaryInputError(f"joint operator is not unitary within {UNITARY_TOL:.0e}")
    psi = np.asarray(coin_psi, dtype=np.complex128).ravel()
    d = v.shape[0] // 2
    blocks = v.reshape(2, d, 2, d)
    ops = tuple(sum(psi[n] * blocks[m, :, n, :] for n in range(2)) for m in range(2))
    return KrausSet(ops)


def cptp_apply(k: KrausSet, rho: DensityMatrix) -> DensityMatrix:
    """Apply the channel sum_m K_m rho K_m^dag."""
    if rho.dim != k.dim:
        raise DimensionMismatchError(f"state dimension {rho.dim} != channel dimension {k.dim}")
    out = sum(op @ rho.mat @ dagger(op) for op in k.ops)
    return DensityMatrix(symmetrize(out))


def _purify(rho: DensityMatrix):
    """State vector of a numerically pure density matrix, else None."""
    purity = float(np.real(np.trace(rho.mat @ rho.mat)))
    if abs(purity - 1.0) > 1e-12:
        return None
    vals, vecs = np.linalg.eigh(rho.mat)
    return vecs[:, -1]


def walk_densities(
    scheme: Scheme, coin: CoinSpec, lat: WalkLattice, rho0: DensityMatrix, n: int
) -> list[DensityMatrix]:
    """Walker density matrices after 0..n steps of the chosen tracing scheme.

    CRW applies the one-action Kraus pair each step.  QRW2 applies the
    two-action Kraus pair each step.  QRW1's state after k steps is the
    coin trace of V^k acting on the initial joint state; for a pure
    initial walker the joint evolution runs on the state vector.
    """
    if n < 0:
        raise ValueError("step count must be nonnegative")
    if rho0.dim != lat.size:
        raise DimensionMismatchError(f"walker dimension {rho0.dim} != lattice size {lat.size}")
    e_plus, e_minus, _ = shift_operators(lat)
    v = build_step_unitary(coin, e_plus, e_minus)
    out = [rho0]
    if scheme is Scheme.CRW:
        ks = kraus_from_unitary(v, coin.psi)
        for _ in range(n):
            out.append(cptp_apply(ks, out[-1]))
        return out
    if scheme is Scheme.QRW2:
        ks = kraus_from_unitary(v @ v, coin.psi)
        for _ in range(n):
            out.append(cptp_apply(ks, out[-1]))
        return out
    if scheme is not Scheme.QRW1:
        raise ValueError(f"unknown scheme {scheme!r}")
    vec0 = _purify(rho0)
    if vec0 is not None:
        joint = np.kron(coin.psi, vec0)
        for _ in range(n):
            joint = v @ joint
            joint = joint / np.linalg.norm(joint)  # curb rounding drift of unitary steps
            out.append(DensityMatrix(partial_trace_first(np.outer(joint, joint.conj()), 2, lat.size)))
        return out
    joint0 = kron(coin.rho_c, rho0.mat)
    power = np.eye(2 * lat.size, dtype=np.complex128)
    for _ in range(n):
        power = v @ power
        red = partial_trace_first(power @ joint0 @ dagger(power), 2, lat.size)
        red = symmetrize(red)
        out.append(DensityMatrix(red / np.real(np.trace(red))))
    return out


def evolve(
    scheme: Scheme, coin: CoinSpec, lat: WalkLattice, rho0: DensityMatrix, n: int
) -> WalkState:
    """Final walker state after n steps of the chosen scheme."""
    if scheme is Scheme.QRW1 and n > 1:
        if rho0.dim != lat.size:
            raise DimensionMismatchError(
                f"walker dimension {rho0.dim} != lattice size {lat.size}"
            )
        e_plus, e_minus, _ = shift_operators(lat)
        v = build_step_unitary(coin, e_plus, e_minus)
        vec0 = _purify(rho0)
        if vec0 is not None:
            joint = np.kron(coin.psi, vec0)
            for _ in range(n):
                joint = v @ joint
                joint = joint / np.linalg.norm(joint)
            red = partial_trace_first(np.outer(joint, joint.conj()), 2, lat.size)
            return WalkState(DensityMatrix(red), n, scheme)
    return WalkState(walk_densities(scheme, coin, lat, rho0, n)[-1], n, scheme)


def position_pd(state: WalkState) -> np.ndarray:
    """Site-occupancy probabilities: the clamped diagonal of the walker matrix."""
    pd = state.rho_w.diagonal()
    if abs(pd.sum() - 1.0) > 1e-10:
        raise ValueError(f"diagonal sums to {pd.sum()!r}, not 1")
    return pd


def distance_moment(state: WalkState, l_op, order: int) -> float:
    """Moment Tr(rho L^order) of a diagonal integer-label operator."""
    l_op = np.asarray(l_op, dtype=np.complex128)
    val = complex(np.trace(state.rho_w.mat @ np.linalg.matrix_power(l_op, order)))
    if abs(val.imag) > 1e-10:
        raise ValueError(f"moment has imaginary residue {val.imag:.3e}")
    return float(val.real)


def sigma(state: WalkState, l_op) -> float:
    """Standard deviation sqrt(<L^2> - <L>^2) of the site distribution."""
    m1 = distance_moment(state, l_op, 1)
    m2 = distance_moment(state, l_op, 2)
    return float(np.sqrt(max(m2 - m1 * m1, 0.0)))


def kraus_pd_matrix(k: KrausSet) -> StochMatrix:
    """Entrywise-square matrix sum_m K_m o conj(K_m) that maps diagonals to diagonals.

    Always column-stochastic by completeness; flagged bistochastic when the
    row sums also close.
    """
    mat = sum(np.abs(np.asarray(op)) ** 2 for op in k.ops)
    kind = (
        StochKind.BISTOCHASTIC
        if np.abs(mat.sum(axis=1) - 1.0).max() <= 1e-10
        else StochKind.COLUMN_STOCHASTIC
    )
    return StochMatrix(mat, kind)


def delta_q_matrix(coin: CoinSpec, lat: WalkLattice) -> StochMatrix:
    """One-step bistochastic matrix of the two-hop walk, built from the
    two-action Kraus blocks by entrywise squaring."""
    if lat.boundary.value != "cyclic":
        raise ValueError("the two-hop propagation matrix needs a cyclic lattice")
    e_plus, e_minus, _ = shift_operators(lat)
    v = build_step_unitary(coin, e_plus, e_minus)
    dq = kraus_pd_matrix(kraus_from_unitary(v @ v, coin.psi))
    if dq.kind is not StochKind.BISTOCHASTIC:
        raise ValueError("two-hop propagation matrix failed the bistochasticity check")
    return dq


def delta_q_coefficients(coin: CoinSpec) -> dict:
    """Shift-block coefficients of the two-hop propagation matrix.

    Returns the constructed weights of the +2 shift, -2 shift, and stay
    blocks together with the closed-form candidates |pa + sqrt(p(1-p))b|^2,
    |sqrt(p(1-p))a - pb|^2, |(1-p)a - sqrt(p(1-p))b|^2 and
    |(1-p)b + sqrt(p(1-p))a|^2.  The constructed values are authoritative;
    the candidates are reported for comparison only.
    """
    lat = WalkLattice(9)
    dq = delta_q_matrix(coin, lat).mat
    c = lat.center
    p_plus, _ = coin_probabilities(coin)
    a, b = coin.psi
    p = p_plus
    root = np.sqrt(max(p * (1.0 - p), 0.0))
    return {
        "up2": float(dq[c + 2, c]),
        "down2": float(dq[c - 2, c]),
        "stay": float(dq[c, c]),
        "up2_candidate": float(np.abs(p * a + root * b) ** 2),
        "down2_candidate": float(np.abs(root * a - p * b) ** 2),
        "stay_candidates": (
            float(np.abs((1.0 - p) * a - root * b) ** 2),
            float(np.abs((1.0 - p) * b + root * a) ** 2),
        ),
    }


def delayed_trace_pd_report(coin: CoinSpec, lat: WalkLattice, n: int, p0) -> dict:
    """Check that the n-action Kraus blocks propagate a diagonal start directly.

    Builds D_n = sum_m |<m|V^n|psi>|^2 entrywise and compares D_n p0
    against the diagonal of the delayed-trace walk at step n.
    """
    e_plus, e_minus, _ = shift_operators(lat)
    v = build_step_unitary(coin, e_plus, e_minus)
    dn = kraus_pd_matrix(kraus_from_unitary(np.linalg.matrix_power(v, n), coin.psi))
    rho0 = DensityMatrix(np.diag(np.asarray(p0, dtype=np.complex128)))
    direct = position_pd(evolve(Scheme.QRW1, coin, lat, rho0, n))
    via_matrix = dn.mat @ np.asarray(p0, dtype=float)
    return {
        "bistochastic": dn.kind is StochKind.BISTOCHASTIC,
        "pd_deviation": float(np.max(np.abs(direct - via_matrix))),
    }


def unitarize_k(coin: CoinSpec, s_plus, s_minus, k: int, dim_cap: int | None = None):
    """Joint unitary on k coins + walker implementing k channel actions at once.

    Returns (v_k, w_chain): v_k = sum over sign strings of
    kron(P_m1 U, ..., P_mk U, S_m1 ... S_mk), and the chain of one-coin
    couplers W_1 .. W_k whose ordered product equals v_k.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    s_plus = np.asarray(s_plus, dtype=np.complex128)
    s_minus = np.asarray(s_minus, dtype=np.complex128)
    d = s_plus.shape[0]
    cap = dim_cap if dim_cap is not None else int(os.environ.get("QWALK_DIM_CAP", DEFAULT_DIM_CAP))
    if (2**k) * d > cap:
        raise DimensionBudgetError(f"joint dimension {(2 ** k) * d} exceeds cap {cap}")
    projs = (
        np.array([[1, 0], [0, 0]], dtype=np.complex128),
        np.array([[0, 0], [0, 1]], dtype=np.complex128),
    )
    shifts = (s_plus, s_minus)
    total = np.zeros(((2**k) * d, (2**k) * d), dtype=np.complex128)
    for signs in np.ndindex(*([2] * k)):
        coin_factors = [projs[m] @ coin.u for m in signs]
        walker = np.eye(d, dtype=np.complex128)
        for m in signs:
            walker = walker @ shifts[m]
        total += kron_all(coin_factors + [walker])
    chain = []
    eye2 = np.eye(2, dtype=np.complex128)
    for slot in range(k):
        w = np.zeros_like(total)
        for m in range(2):
            factors = [eye2] * k + [shifts[m]]
            factors[slot] = projs[m] @ coin.u
            w += kron_all(factors)
        chain.append(frozen(w))
    return frozen(total), chain


def dft_matrix(n: int) -> np.ndarray:
    """Unitary discrete Fourier matrix F[j, k] = exp(-2 pi i j k / n) / sqrt(n)."""
    idx = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / n) / np.sqrt(n)


def fourier_conjugate_walk(lat: WalkLattice):
    """Step operators of the dual walk, diagonal in the shift eigenbasis.

    Conjugating the cyclic shifts by the discrete Fourier matrix gives the
    diagonal phase operators (g_plus, g_minus) that step the conjugate
    (angle) eigenstates.
    """
    if lat.boundary.value != "cyclic":
        raise ValueError("the Fourier-conjugate walk needs a cyclic lattice")
    e_plus, e_minus, _ = shift_operators(lat)
    f = dft_matrix(lat.size)
    g_plus = f @ e_plus @ dagger(f)
    g_minus = f @ e_minus @ dagger(f)
    return frozen(g_plus), frozen(g_minus)


def point_mass_density(size: int, index: int) -> DensityMatrix:
    m = np.zeros((size, size), dtype=np.complex128)
    m[index, index] = 1.0
    return DensityMatrix(m)
