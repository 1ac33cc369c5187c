"""Truncated Fock space: coherent states, displacement channels, the
ladder-operator transition action, and the continuous-time diffusion limit.

The two-displacement channel rho -> p D(b) rho D(b)^dag + (1-p) D(-b) rho D(-b)^dag,
run n times with b = sqrt(2 t g / n) and p = 1/2 + t c / (2 n b), converges
to the master equation

    d rho/dt = [c a^dag - conj(c) a, rho]
               + g (a^dag^2 rho + rho a^dag^2 - 2 a^dag rho a^dag)
               + conj(g) (a^2 rho + rho a^2 - 2 a rho a)
               - |g| ((a^dag a + a a^dag) rho + rho (...) - 2 a^dag rho a - 2 a rho a^dag)

whose dissipator is written with the truncated operators themselves so the
right-hand side is exactly traceless on the finite matrix space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    OverflowGuardError,
    ScalingInvalidError,
    StabilityBoundError,
    TruncationInadequateError,
)
from .linalg import DensityMatrix, dagger, expm, frozen, partial_trace_first, symmetrize

OVERFLOW_GUARD = 1e6


@dataclass(frozen=True)
class FockSpace:
    """Truncation dimension m with materialized ladder and number operators."""

    m: int
    a: np.ndarray = None
    a_dag: np.ndarray = None
    num: np.ndarray = None

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"truncation dimension must be >= 2, got {self.m}")
        a = np.zeros((self.m, self.m), dtype=np.complex128)
        for n in range(1, self.m):
            a[n - 1, n] = np.sqrt(n)
        object.__setattr__(self, "a", frozen(a))
        object.__setattr__(self, "a_dag", frozen(a.conj().T))
        object.__setattr__(self, "num", frozen(a.conj().T @ a))

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.m, dtype=np.complex128)


@dataclass(frozen=True)
class MasterEqParams:
    """Drift and diffusion coefficients of the master equation."""

    c: complex
    gamma: complex


def _check_amplitude(alpha: complex, f: FockSpace):
    if abs(alpha) ** 2 > f.m / 4.0:
        raise TruncationInadequateError(
            f"|alpha|^2 = {abs(alpha) ** 2:.3g} exceeds m/4 = {f.m / 4.0:.3g}"
        )


def coherent_state(alpha: complex, f: FockSpace) -> np.ndarray:
    """Truncated expansion of the coherent state, renormalized to unit norm.

    Raises TruncationInadequateError when the mass dropped by the cutoff
    exceeds 1e-8.
    """
    _check_amplitude(alpha, f)
    n = np.arange(f.m)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, f.m)))))
    coeff = np.exp(-0.5 * abs(alpha) ** 2) * alpha**n / np.exp(0.5 * log_fact)
    kept = float(np.vdot(coeff, coeff).real)
    if 1.0 - kept > 1e-8:
        raise TruncationInadequateError(f"dropped mass {1.0 - kept:.3e} exceeds 1e-8")
    return coeff / np.sqrt(kept)


def displacement(alpha: complex, f: FockSpace) -> np.ndarray:
    """Unitary exp(alpha a^dag - conj(alpha) a) in the truncated space."""
    _check_amplitude(alpha, f)
    return expm(alpha * f.a_dag - np.conj(alpha) * f.a)


def hw_transition_monomial(m_exp: int, n_exp: int, p: float, alpha: complex, f: FockSpace) -> np.ndarray:
    """One-step transition image of the ordered monomial a^dag^m a^n:

    p (a^dag + conj(alpha))^m (a + alpha)^n + (1-p) (a^dag - conj(alpha))^m (a - alpha)^n.
    """
    if m_exp < 0 or n_exp < 0:
        raise ValueError("exponents must be nonnegative")
    eye = f.identity
    plus = np.linalg.matrix_power(f.a_dag + np.conj(alpha) * eye, m_exp) @ np.linalg.matrix_power(
        f.a + alpha * eye, n_exp
    )
    minus = np.linalg.matrix_power(f.a_dag - np.conj(alpha) * eye, m_exp) @ np.linalg.matrix_power(
        f.a - alpha * eye, n_exp
    )
    out = p * plus + (1.0 - p) * minus
    peak = float(np.max(np.abs(out)))
    if peak > OVERFLOW_GUARD:
        raise OverflowGuardError(f"operator entries reached {peak:.3e} in truncation")
    return out


def hw_functional(m_exp: int, n_exp: int, p: float, alpha: complex) -> complex:
    """Expectation of the ordered monomial in the two-point coherent mixture:
    p conj(alpha)^m alpha^n + (1-p) (-conj(alpha))^m (-alpha)^n."""
    ac = np.conj(alpha)
    return complex(p * ac**m_exp * alpha**n_exp + (1.0 - p) * (-ac) ** m_exp * (-alpha) ** n_exp)


_DEGREE2_BASIS = ((0, 0), (0, 1), (1, 0), (0, 2), (2, 0), (1, 1))


def _fit_degree2(f_mat: np.ndarray, f: FockSpace):
    """Least-squares coefficients of f_mat in the ordered monomial basis of degree <= 2."""
    basis = [
        np.linalg.matrix_power(f.a_dag, m) @ np.linalg.matrix_power(f.a, n)
        for m, n in _DEGREE2_BASIS
    ]
    design = np.stack([b.ravel() for b in basis], axis=1)
    coeffs, *_ = np.linalg.lstsq(design, f_mat.ravel(), rcond=None)
    residual = float(np.max(np.abs(design @ coeffs - f_mat.ravel())))
    return coeffs, residual


@dataclass(frozen=True)
class AdjointActionReport:
    max_block_deviation: float
    fit_residual: float
    coefficients: tuple[complex, ...]


def adjoint_action_check(f_mat, p: float, alpha: complex, f: FockSpace, block: int = 16) -> AdjointActionReport:
    """Compare the displacement-conjugation form of the transition action
    against the monomial form, for a degree <= 2 ordered polynomial.

    The first path is p D(-alpha) f D(-alpha)^dag + (1-p) D(alpha) f D(alpha)^dag;
    the second resolves f into ordered monomials and maps each through
    hw_transition_monomial.  Deviation is reported on the leading
    block x block corner, away from truncation artifacts.
    """
    f_mat = np.asarray(f_mat, dtype=np.complex128)
    if f_mat.shape != (f.m, f.m):
        raise DimensionMismatchError(f"observable shape {f_mat.shape} != ({f.m}, {f.m})")
    d_plus = displacement(alpha, f)
    d_minus = displacement(-alpha, f)
    via_adjoint = p * (d_minus @ f_mat @ dagger(d_minus)) + (1.0 - p) * (d_plus @ f_mat @ dagger(d_plus))
    coeffs, residual = _fit_degree2(f_mat, f)
    via_monomials = sum(
        c * hw_transition_monomial(m, n, p, alpha, f)
        for c, (m, n) in zip(coeffs, _DEGREE2_BASIS)
    )
    dev = float(np.max(np.abs(via_adjoint[:block, :block] - via_monomials[:block, :block])))
    return AdjointActionReport(dev, residual, tuple(complex(c) for c in coeffs))


def _top_population(rho: DensityMatrix, f: FockSpace) -> float:
    edge = max(int(0.9 * f.m), f.m - max(f.m // 10, 1))
    return float(np.sum(rho.diagonal()[edge:]))


def cs_qrw_step(rho: DensityMatrix, p: float, beta: complex, f: FockSpace) -> DensityMatrix:
    """Two-displacement channel p D(b) rho D(b)^dag + (1-p) D(-b) rho D(-b)^dag."""
    if rho.dim != f.m:
        raise DimensionMismatchError(f"state dimension {rho.dim} != truncation {f.m}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    top = _top_population(rho, f)
    if top > 1e-8:
        raise TruncationInadequateError(f"top-level population {top:.3e} exceeds 1e-8")
    d_plus = displacement(beta, f)
    d_minus = displacement(-beta, f)
    out = p * (d_plus @ rho.mat @ dagger(d_plus)) + (1.0 - p) * (d_minus @ rho.mat @ dagger(d_minus))
    return DensityMatrix(symmetrize(out))


def cs_step_unitary(p: float, beta: complex, f: FockSpace) -> np.ndarray:
    """Joint coin+oscillator unitary whose coin trace is cs_qrw_step."""
    sp, sq = np.sqrt(p), np.sqrt(1.0 - p)
    d_plus = displacement(beta, f)
    d_minus = displacement(-beta, f)
    top = np.hstack([sp * d_plus, sq * d_plus])
    bottom = np.hstack([sq * d_minus, -sp * d_minus])
    return np.vstack([top, bottom])


def master_eq_rhs(rho: DensityMatrix, params: MasterEqParams, f: FockSpace) -> np.ndarray:
    """Right-hand side of the drift-diffusion master equation.

    The thermal-like dissipator is written with a^dag a + a a^dag (equal to
    2N + 1 on the untruncated algebra) so the result is exactly traceless
    and Hermitian on the truncated space.
    """
    if rho.dim != f.m:
        raise DimensionMismatchError(f"state dimension {rho.dim} != truncation {f.m}")
    return _rhs_raw(rho.mat, params, f)


def _rhs_raw(rho: np.ndarray, params: MasterEqParams, f: FockSpace) -> np.ndarray:
    a, ad = f.a, f.a_dag
    c, g = complex(params.c), complex(params.gamma)
    drift = c * ad - np.conj(c) * a
    out = drift @ rho - rho @ drift
    if g != 0:
        ad2 = ad @ ad
        a2 = a @ a
        out = out + g * (ad2 @ rho + rho @ ad2 - 2.0 * (ad @ rho @ ad))
        out = out + np.conj(g) * (a2 @ rho + rho @ a2 - 2.0 * (a @ rho @ a))
        k = ad @ a + a @ ad
        out = out - abs(g) * (k @ rho + rho @ k - 2.0 * (ad @ rho @ a) - 2.0 * (a @ rho @ ad))
    return out


def integrate_master_eq(
    rho0: DensityMatrix, params: MasterEqParams, t: float, dt: float, f: FockSpace
) -> DensityMatrix:
    """Fixed-step fourth-order integration of the master equation.

    The state is re-Hermitized after every step; t is rounded to a whole
    number of steps.  Raises StabilityBoundError when
    dt * (|c| + |gamma| * m) >= 0.05.
    """
    if dt <= 0 or t < 0:
        raise ValueError("need dt > 0 and t >= 0")
    if dt * (abs(params.c) + abs(params.gamma) * f.m) >= 0.05:
        raise StabilityBoundError("step size violates dt * (|c| + |gamma| m) < 0.05")
    steps = int(round(t / dt))
    rho = np.array(rho0.mat)
    for _ in range(steps):
        k1 = _rhs_raw(rho, params, f)
        k2 = _rhs_raw(rho + 0.5 * dt * k1, params, f)
        k3 = _rhs_raw(rho + 0.5 * dt * k2, params, f)
        k4 = _rhs_raw(rho + dt * k3, params, f)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = symmetrize(rho)
    return DensityMatrix(rho)


def _rhs_dual(obs: np.ndarray, params: MasterEqParams, f: FockSpace) -> np.ndarray:
    # Heisenberg-picture generator: trace-dual of _rhs_raw term by term
    a, ad = f.a, f.a_dag
    c, g = complex(params.c), complex(params.gamma)
    drift = c * ad - np.conj(c) * a
    out = obs @ drift - drift @ obs
    if g != 0:
        ad2 = ad @ ad
        a2 = a @ a
        out = out + g * (obs @ ad2 + ad2 @ obs - 2.0 * (ad @ obs @ ad))
        out = out + np.conj(g) * (obs @ a2 + a2 @ obs - 2.0 * (a @ obs @ a))
        k = ad @ a + a @ ad
        out = out - abs(g) * (obs @ k + k @ obs - 2.0 * (a @ obs @ ad) - 2.0 * (ad @ obs @ a))
    return out


def integrate_dual(obs0, params: MasterEqParams, t: float, dt: float, f: FockSpace) -> np.ndarray:
    """Heisenberg-picture companion of integrate_master_eq."""
    if dt <= 0 or t < 0:
        raise ValueError("need dt > 0 and t >= 0")
    steps = int(round(t / dt))
    obs = np.asarray(obs0, dtype=np.complex128).copy()
    for _ in range(steps):
        k1 = _rhs_dual(obs, params, f)
        k2 = _rhs_dual(obs + 0.5 * dt * k1, params, f)
        k3 = _rhs_dual(obs + 0.5 * dt * k2, params, f)
        k4 = _rhs_dual(obs + dt * k3, params, f)
        obs = obs + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return obs


def trace_norm(m: np.ndarray) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(symmetrize(m)))))


@dataclass(frozen=True)
class DiffusionLimitEntry:
    n: int
    alpha: float
    p: float
    deviation: float


@dataclass(frozen=True)
class DiffusionLimitReport:
    entries: tuple[DiffusionLimitEntry, ...]
    reference_trace_drift: float

    @property
    def deviations(self) -> tuple[float, ...]:
        return tuple(e.deviation for e in self.entries)

    @property
    def strictly_decreasing(self) -> bool:
        d = self.deviations
        return all(b < a for a, b in zip(d, d[1:]))


def diffusion_limit_check(
    c: float,
    gamma: float,
    t: float,
    n_list,
    f: FockSpace,
    rho0: DensityMatrix | None = None,
    dt: float = 1e-3,
) -> DiffusionLimitReport:
    """Compare n-fold displacement-channel evolution against the master equation.

    For each n the step amplitude is alpha = sqrt(2 t gamma / n) and the
    branch probability p = 1/2 + t c / (2 n alpha); deviations are measured
    in trace norm and should shrink as n grows.
    """
    if gamma <= 0:
        raise ScalingInvalidError("the diffusion coefficient must be positive")
    schedule = []
    for n in n_list:
        n = int(n)
        if n < 1:
            raise ScalingInvalidError("step counts must be positive")
        alpha = float(np.sqrt(2.0 * t * gamma / n))
        p = 0.5 + t * c / (2.0 * n * alpha)
        if not 0.0 <= p <= 1.0:
            raise ScalingInvalidError(f"branch probability {p:.3g} outside [0, 1] at n = {n}")
        schedule.append((n, alpha, p))
    if rho0 is None:
        vac = np.zeros((f.m, f.m), dtype=np.complex128)
        vac[0, 0] = 1.0
        rho0 = DensityMatrix(vac)
    params = MasterEqParams(c=complex(c), gamma=complex(gamma))
    reference = integrate_master_eq(rho0, params, t, dt, f)
    drift = abs(float(np.real(np.trace(reference.mat))) - 1.0)
    entries = []
    for n, alpha, p in schedule:
        rho = rho0
        for _ in range(n):
            rho = cs_qrw_step(rho, p, alpha, f)
        entries.append(
            DiffusionLimitEntry(n, alpha, p, trace_norm(rho.mat - reference.mat))
        )
    return DiffusionLimitReport(tuple(entries), drift)


def coin_trace_channel(v: np.ndarray, rho: DensityMatrix, f: FockSpace) -> np.ndarray:
    """Coin trace of a joint block unitary acting on |0><0| (x) rho."""
    coin = np.zeros((2, 2), dtype=np.complex128)
    coin[0, 0] = 1.0
    joint = np.kron(coin, rho.mat)
    return partial_trace_first(v @ joint @ dagger(v), 2, f.m)
