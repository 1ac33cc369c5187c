"""Classical lattice random walks driven by stochastic delta matrices.

A walk lives on a finite window of the integer line (cyclic or truncated
boundary) or on the cyclic group of N points.  The one-step transition
matrix ("delta matrix") of a translation-invariant walk is the circulant
D[i, j] = p[(i - j) mod N] built from the step distribution p; the named
families (Polya, Gillis, exponential-step, entangled 2-D Gillis) are
provided explicitly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NormalizationLostError
from .linalg import frozen

PD_SUM_TOL = 1e-10
COLSUM_TOL = 1e-10
ENTRY_TOL = 1e-14


class Boundary(enum.Enum):
    CYCLIC = "cyclic"
    TRUNCATED = "truncated"


class StochKind(enum.Enum):
    BISTOCHASTIC = "bistochastic"
    COLUMN_STOCHASTIC = "column-stochastic"
    GENERAL = "general"


@dataclass(frozen=True)
class WalkLattice:
    """Finite window of sites with integer labels centered at zero."""

    size: int
    boundary: Boundary = Boundary.CYCLIC

    def __post_init__(self):
        if self.size < 2:
            raise ValueError(f"lattice size must be >= 2, got {self.size}")

    @property
    def labels(self) -> np.ndarray:
        """Site labels -floor(size/2) .. ceil(size/2)-1; 0 sits at index size//2."""
        return np.arange(self.size) - self.size // 2

    @property
    def center(self) -> int:
        return self.size // 2


@dataclass(frozen=True)
class StochMatrix:
    """Real nonnegative square matrix with stochasticity metadata.

    Column sums must be 1 (within COLSUM_TOL) unless kind is GENERAL; row
    sums as well for BISTOCHASTIC.
    """

    mat: np.ndarray
    kind: StochKind = StochKind.GENERAL

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"stochastic matrix must be square, got {m.shape}")
        if m.min(initial=0.0) < -ENTRY_TOL:
            raise ValueError(f"negative entry {m.min():.3e} below -{ENTRY_TOL:.0e}")
        if self.kind is not StochKind.GENERAL:
            cols = np.abs(m.sum(axis=0) - 1.0).max()
            if cols > COLSUM_TOL:
                raise ValueError(f"column sums deviate from 1 by {cols:.3e}")
        if self.kind is StochKind.BISTOCHASTIC:
            rows = np.abs(m.sum(axis=1) - 1.0).max()
            if rows > COLSUM_TOL:
                raise ValueError(f"row sums deviate from 1 by {rows:.3e}")
        object.__setattr__(self, "mat", frozen(m))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


def check_pd(p, tol: float = PD_SUM_TOL) -> np.ndarray:
    """Validate and return a probability vector as a float64 array."""
    v = np.asarray(p, dtype=np.float64).ravel()
    if v.min(initial=0.0) < -1e-12 or v.max(initial=0.0) > 1.0 + 1e-12:
        raise ValueError("probability entries must lie in [0, 1]")
    if abs(v.sum() - 1.0) > tol:
        raise ValueError(f"probability vector sums to {v.sum()!r}, not 1")
    return v


def point_mass(n: int, index: int) -> np.ndarray:
    p = np.zeros(n)
    p[index] = 1.0
    return p


def uniform_pd(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def random_pd(rng: np.random.Generator, n: int) -> np.ndarray:
    x = rng.random(n) + 1e-12
    return x / x.sum()


def shift_operators(lat: WalkLattice):
    """Raising/lowering shift matrices and the diagonal site-label operator.

    Returns (e_plus, e_minus, l_op).  e_plus maps basis vector m to m+1
    (wrapping on cyclic lattices, dropping the edge on truncated ones),
    e_minus is its transpose, and l_op = diag(labels).
    """
    n = lat.size
    e_plus = np.zeros((n, n), dtype=np.complex128)
    if lat.boundary is Boundary.CYCLIC:
        for j in range(n):
            e_plus[(j + 1) % n, j] = 1.0
    else:
        for j in range(n - 1):
            e_plus[j + 1, j] = 1.0
    e_minus = e_plus.T.copy()
    l_op = np.diag(lat.labels.astype(np.complex128))
    return frozen(e_plus), frozen(e_minus), frozen(l_op)


def _signed_offset(k: int, n: int) -> int:
    # index k of a step distribution read as the centered jump it encodes
    return k if k <= (n - 1) // 2 else k - n


def delta_matrix(p, lat: WalkLattice) -> StochMatrix:
    """Transition matrix D[i, j] = p[(i - j) mod N] of a translation-invariant walk.

    Cyclic lattices give a circulant bistochastic matrix.  Truncated
    lattices keep only jumps that stay inside the window (signed offsets,
    no renormalization), so mass leaks at the edges and the result is
    marked GENERAL.
    """
    p = check_pd(p)
    n = lat.size
    if p.size != n:
        raise DimensionMismatchError(f"pd dimension {p.size} != lattice size {n}")
    d = np.zeros((n, n))
    if lat.boundary is Boundary.CYCLIC:
        for k in range(n):
            if p[k] == 0.0:
                continue
            for j in range(n):
                d[(j + k) % n, j] = p[k]
        return StochMatrix(d, StochKind.BISTOCHASTIC)
    for k in range(n):
        if p[k] == 0.0:
            continue
        off = _signed_offset(k, n)
        for j in range(n):
            i = j + off
            if 0 <= i < n:
                d[i, j] = p[k]
    return StochMatrix(d, StochKind.GENERAL)


def step(d: StochMatrix, p) -> np.ndarray:
    """Advance a probability vector by one application of the delta matrix."""
    p = check_pd(p)
    if p.size != d.dim:
        raise DimensionMismatchError(f"pd dimension {p.size} != matrix dimension {d.dim}")
    out = d.mat @ p
    if d.kind is not StochKind.GENERAL:
        drift = abs(out.sum() - 1.0)
        if drift > 1e-9:
            raise NormalizationLostError(f"walker mass drifted by {drift:.3e}")
        if drift > 1e-12:
            out = out / out.sum()
    return out


def evolve_pd(d: StochMatrix, p0, n: int) -> np.ndarray:
    """Trajectory of pd's under n steps; row k is the pd after k steps."""
    out = np.empty((n + 1, d.dim))
    out[0] = check_pd(p0)
    for k in range(n):
        out[k + 1] = step(d, out[k])
    return out


def polya(lat: WalkLattice) -> StochMatrix:
    """Symmetric nearest-neighbor walk, weight 1/2 to each neighbor."""
    e_plus, e_minus, _ = shift_operators(lat)
    d = 0.5 * (e_minus + e_plus).real
    kind = StochKind.BISTOCHASTIC if lat.boundary is Boundary.CYCLIC else StochKind.GENERAL
    return StochMatrix(d, kind)


def gillis_general(lat: WalkLattice, eps: float, m: int = 0, a: int = 1) -> StochMatrix:
    """Nearest-neighbor walk biased toward the site labeled ``m``.

    Column l' != m sends weight (1 + eps/(l'-m)^a)/2 one site down and
    (1 - eps/(l'-m)^a)/2 one site up; column l' = m splits evenly.
    """
    if not -1.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (-1, 1), got {eps}")
    if a < 1 or int(a) != a:
        raise ValueError(f"decay exponent must be a positive integer, got {a}")
    labels = lat.labels
    if m not in labels:
        raise ValueError(f"bias site {m} is not a lattice label")
    n = lat.size
    d = np.zeros((n, n))
    cyclic = lat.boundary is Boundary.CYCLIC
    for j in range(n):
        lp = labels[j]
        if lp == m:
            w_down = w_up = 0.5
        else:
            bias = eps / float(lp - m) ** a
            w_down = 0.5 * (1.0 + bias)
            w_up = 0.5 * (1.0 - bias)
        down, up = j - 1, j + 1
        if cyclic:
            d[down % n, j] += w_down
            d[up % n, j] += w_up
        else:
            if down >= 0:
                d[down, j] += w_down
            if up < n:
                d[up, j] += w_up
    kind = StochKind.COLUMN_STOCHASTIC if cyclic else StochKind.GENERAL
    return StochMatrix(d, kind)


def gillis(lat: WalkLattice, eps: float) -> StochMatrix:
    """Centrally biased nearest-neighbor walk (bias site 0, inverse-law decay)."""
    return gillis_general(lat, eps, m=0, a=1)


def ls_walk(lat: WalkLattice, eps: float) -> StochMatrix:
    """Symmetric walk with exponentially distributed step lengths.

    Off-diagonal weights exp(-|l - l'| eps) (cyclic distance on cyclic
    lattices), zero diagonal, columns renormalized to restore exact
    stochasticity on the finite window.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    n = lat.size
    d = np.zeros((n, n))
    for j in range(n):
        for i in range(n):
            if i == j:
                continue
            if lat.boundary is Boundary.CYCLIC:
                dist = min((i - j) % n, (j - i) % n)
            else:
                dist = abs(i - j)
            d[i, j] = np.exp(-dist * eps)
    d /= d.sum(axis=0, keepdims=True)
    kind = StochKind.BISTOCHASTIC if lat.boundary is Boundary.CYCLIC else StochKind.COLUMN_STOCHASTIC
    return StochMatrix(d, kind)


def gillis2d(
    lat: WalkLattice,
    eps1: float,
    m1: int,
    a1: int,
    eps2: float,
    m2: int,
    a2: int,
    q: float,
) -> StochMatrix:
    """Convex mix of the two tensor orderings of a pair of 1-D biased walks.

    q * D(eps1,m1,a1) (x) D(eps2,m2,a2) + (1-q) * D(eps2,m2,a2) (x) D(eps1,m1,a1)
    on the size**2 product lattice.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    d1 = gillis_general(lat, eps1, m1, a1).mat
    d2 = gillis_general(lat, eps2, m2, a2).mat
    mix = q * np.kron(d1, d2) + (1.0 - q) * np.kron(d2, d1)
    kind = StochKind.COLUMN_STOCHASTIC if lat.boundary is Boundary.CYCLIC else StochKind.GENERAL
    return StochMatrix(mix, kind)


def cyclic_convolve(p, q) -> np.ndarray:
    """Cyclic convolution of two step distributions on Z_N."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.size != q.size:
        raise DimensionMismatchError("convolution operands must have equal size")
    n = p.size
    out = np.zeros(n)
    for k in range(n):
        out[k] = sum(p[i] * q[(k - i) % n] for i in range(n))
    return out
