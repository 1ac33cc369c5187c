"""Chinese-remainder decomposition of cyclic-group walks.

For N with pairwise coprime factors, the remainder map x -> (x mod N_1,
x mod N_2, ...) is a ring bijection.  Realized on C^N it becomes a
permutation isometry that carries a factorizable probability vector onto
the tensor product of its marginals, and conjugates the circulant delta
matrix into the tensor product of the factor walks, step by step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .classical import Boundary, StochMatrix, WalkLattice, check_pd, delta_matrix
from .errors import DimensionMismatchError, NotFactorizableError
from .linalg import frozen


@dataclass(frozen=True)
class CrtSplit:
    """A modulus n with pairwise coprime factors and the remainder table."""

    n: int
    factors: tuple[int, ...]
    delta_table: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "delta_table", frozen(self.delta_table))


def crt_split(n: int, factors) -> CrtSplit:
    """Build a CrtSplit, validating coprimality and the factor product."""
    factors = tuple(int(f) for f in factors)
    if any(f < 2 for f in factors):
        raise ValueError(f"factors must all be >= 2, got {factors}")
    if math.prod(factors) != n:
        raise ValueError(f"product of factors {factors} is not {n}")
    for i in range(len(factors)):
        for j in range(i + 1, len(factors)):
            if math.gcd(factors[i], factors[j]) != 1:
                raise ValueError(f"factors {factors[i]} and {factors[j]} are not coprime")
    table = np.array([[x % f for f in factors] for x in range(n)], dtype=np.int64)
    # CRT guarantees bijectivity; the cardinality check guards table bugs
    if len({tuple(row) for row in table}) != n:
        raise ValueError("remainder table is not a bijection")
    return CrtSplit(n=n, factors=factors, delta_table=table)


def crt_delta(split: CrtSplit, x: int) -> tuple[int, ...]:
    """Remainders of x modulo each factor."""
    if not 0 <= x < split.n:
        raise ValueError(f"x must lie in [0, {split.n}), got {x}")
    return tuple(int(r) for r in split.delta_table[x])


def crt_mu(split: CrtSplit, remainders) -> int:
    """Reconstruct x from its remainders by modular inverses."""
    remainders = tuple(int(r) for r in remainders)
    if len(remainders) != len(split.factors):
        raise DimensionMismatchError(
            f"expected {len(split.factors)} remainders, got {len(remainders)}"
        )
    for r, f in zip(remainders, split.factors):
        if not 0 <= r < f:
            raise ValueError(f"remainder {r} out of range for modulus {f}")
    x = 0
    for r, f in zip(remainders, split.factors):
        m = split.n // f
        x += r * m * pow(m, -1, f)
    return x % split.n


def v_delta(split: CrtSplit) -> np.ndarray:
    """Permutation isometry sending e_i to e_{i mod N1} (x) e_{i mod N2}.

    Defined for two-factor splits; compose for finer splits.  Row-major
    tensor layout: pair (i1, i2) sits at index i1*N2 + i2.
    """
    if len(split.factors) != 2:
        raise ValueError("v_delta takes a two-factor split; compose for more factors")
    n1, n2 = split.factors
    v = np.zeros((split.n, split.n), dtype=np.complex128)
    for i in range(split.n):
        i1, i2 = split.delta_table[i]
        v[i1 * n2 + i2, i] = 1.0
    return frozen(v)


def factorize_pd(p, split: CrtSplit, tol: float = 1e-10):
    """Marginals (P1, P2) of the remainder-permuted vector, or None.

    Returns the pair only when the product of the marginals reproduces the
    permuted vector within ``tol``.
    """
    if len(split.factors) != 2:
        raise ValueError("factorize_pd takes a two-factor split")
    p = check_pd(p)
    if p.size != split.n:
        raise DimensionMismatchError(f"pd dimension {p.size} != modulus {split.n}")
    n1, n2 = split.factors
    grid = (v_delta(split).real @ p).reshape(n1, n2)
    p1 = grid.sum(axis=1)
    p2 = grid.sum(axis=0)
    if np.max(np.abs(np.outer(p1, p2) - grid)) > tol:
        return None
    return p1, p2


def compose_pd(split: CrtSplit, marginals) -> np.ndarray:
    """Inverse of factorize_pd: scramble a product of factor pd's onto Z_N."""
    marginals = [check_pd(m) for m in marginals]
    if tuple(m.size for m in marginals) != split.factors:
        raise DimensionMismatchError("marginal dimensions must match the split factors")
    p = np.empty(split.n)
    for x in range(split.n):
        p[x] = math.prod(m[r] for m, r in zip(marginals, split.delta_table[x]))
    return p


@dataclass(frozen=True)
class FactorizationReport:
    matrix_deviation: float
    step_deviations: tuple[float, ...]

    @property
    def max_step_deviation(self) -> float:
        return max(self.step_deviations) if self.step_deviations else 0.0


def _cyclic_delta(p) -> StochMatrix:
    return delta_matrix(p, WalkLattice(len(p), Boundary.CYCLIC))


def factorization_check(p, split: CrtSplit, n_steps: int) -> FactorizationReport:
    """Verify that a factorizable Z_N walk splits into its factor walks.

    Checks (a) conjugating the N-point delta matrix by the remainder
    permutation gives the tensor product of the factor delta matrices, and
    (b) the evolved pd factorizes identically for every step up to
    ``n_steps``.  Raises NotFactorizableError when p has no product form.
    """
    pair = factorize_pd(p, split)
    if pair is None:
        raise NotFactorizableError("pd does not factor over the requested split")
    p1, p2 = pair
    v = v_delta(split).real
    d = _cyclic_delta(p).mat
    d1 = _cyclic_delta(p1).mat
    d2 = _cyclic_delta(p2).mat
    matrix_dev = float(np.max(np.abs(v @ d @ v.T - np.kron(d1, d2))))
    devs = []
    cur, cur1, cur2 = np.asarray(p, dtype=float), p1, p2
    for _ in range(n_steps):
        cur = d @ cur
        cur1 = d1 @ cur1
        cur2 = d2 @ cur2
        devs.append(float(np.max(np.abs(v @ cur - np.kron(cur1, cur2)))))
    return FactorizationReport(matrix_dev, tuple(devs))


@dataclass(frozen=True)
class CoassocReport:
    permutations_equal: bool
    step_deviations: tuple[float, ...]

    @property
    def max_step_deviation(self) -> float:
        return max(self.step_deviations) if self.step_deviations else 0.0


def coassoc_check(p, split: CrtSplit, n_steps: int) -> CoassocReport:
    """Verify the two ways of refining a three-factor split agree.

    The composite permutations (V_[N1,N2] (x) I) V_[N1*N2,N3] and
    (I (x) V_[N2,N3]) V_[N1,N2*N3] must coincide exactly, and the three
    bracketings of the evolved pd must agree at every step.
    """
    if len(split.factors) != 3:
        raise ValueError("coassoc_check takes a three-factor split")
    n1, n2, n3 = split.factors
    n = split.n
    p = check_pd(p)

    left_outer = v_delta(crt_split(n, (n1 * n2, n3))).real
    left_inner = np.kron(v_delta(crt_split(n1 * n2, (n1, n2))).real, np.eye(n3))
    w_left = left_inner @ left_outer
    right_outer = v_delta(crt_split(n, (n1, n2 * n3))).real
    right_inner = np.kron(np.eye(n1), v_delta(crt_split(n2 * n3, (n2, n3))).real)
    w_right = right_inner @ right_outer
    perms_equal = bool(np.array_equal(w_left, w_right))

    pair_12_3 = factorize_pd(p, crt_split(n, (n1 * n2, n3)))
    pair_1_23 = factorize_pd(p, crt_split(n, (n1, n2 * n3)))
    if pair_12_3 is None or pair_1_23 is None:
        raise NotFactorizableError("pd does not factor over the three-factor split")
    p12, p3 = pair_12_3
    p1, p23 = pair_1_23
    fine_12 = factorize_pd(p12, crt_split(n1 * n2, (n1, n2)))
    if fine_12 is None:
        raise NotFactorizableError("intermediate pd does not factor further")
    f1, f2 = fine_12

    d = _cyclic_delta(p).mat
    d12, d3 = _cyclic_delta(p12).mat, _cyclic_delta(p3).mat
    d1, d23 = _cyclic_delta(p1).mat, _cyclic_delta(p23).mat
    df1, df2 = _cyclic_delta(f1).mat, _cyclic_delta(f2).mat

    devs = []
    cur = np.asarray(p, dtype=float)
    c12, c3, c1, c23, cf1, cf2 = p12, p3, p1, p23, f1, f2
    for _ in range(n_steps):
        cur = d @ cur
        c12, c3 = d12 @ c12, d3 @ c3
        c1, c23 = d1 @ c1, d23 @ c23
        cf1, cf2 = df1 @ cf1, df2 @ cf2
        fine_direct = w_left @ cur
        fine_12_3 = left_inner @ np.kron(c12, c3)
        fine_1_23 = right_inner @ np.kron(c1, c23)
        fine_product = np.kron(cf1, np.kron(cf2, c3))
        stack = np.stack([fine_direct, fine_12_3, fine_1_23, fine_product])
        devs.append(float(np.max(stack.max(axis=0) - stack.min(axis=0))))
    return CoassocReport(perms_equal, tuple(devs))
