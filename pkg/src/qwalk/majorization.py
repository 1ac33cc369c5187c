"""Majorization order, Schur-convex functionals, and the constructive
bistochastic connection between comparable probability vectors.

``x`` majorizes ``y`` when every prefix sum of the descending-sorted x
dominates the corresponding prefix sum of y.  Bistochastic matrices move
probability vectors down this order, i.e. toward the uniform vector.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .classical import StochKind, StochMatrix, check_pd
from .errors import NotMajorizedError

PREFIX_TOL = 1e-10
EQUAL_TOL = 1e-12


class Relation(enum.Enum):
    X_MAJORIZES_Y = "x-majorizes-y"
    Y_MAJORIZES_X = "y-majorizes-x"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class MajorizationVerdict:
    relation: Relation
    max_partial_sum_gap: float


def _padded_sorted(x: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n)
    out[: x.size] = x
    # stable descending sort, ties broken by original index
    order = np.lexsort((np.arange(out.size), -out))
    return out[order]


def majorizes(x, y) -> MajorizationVerdict:
    """Compare two probability vectors in the majorization order.

    Vectors of unequal length are zero-padded.  Prefix-sum comparisons use
    an absolute tolerance of PREFIX_TOL; vectors whose sorted forms agree
    within EQUAL_TOL are reported EQUAL.
    """
    xv = check_pd(x)
    yv = check_pd(y)
    n = max(xv.size, yv.size)
    xs = _padded_sorted(xv, n)
    ys = _padded_sorted(yv, n)
    sx = np.cumsum(xs)
    sy = np.cumsum(ys)
    gap = float(np.max(np.abs(sx - sy)))
    if np.max(np.abs(xs - ys)) <= EQUAL_TOL:
        return MajorizationVerdict(Relation.EQUAL, gap)
    x_dominates = bool(np.all(sx >= sy - PREFIX_TOL))
    y_dominates = bool(np.all(sy >= sx - PREFIX_TOL))
    if x_dominates and not y_dominates:
        return MajorizationVerdict(Relation.X_MAJORIZES_Y, gap)
    if y_dominates and not x_dominates:
        return MajorizationVerdict(Relation.Y_MAJORIZES_X, gap)
    if x_dominates and y_dominates:
        # dominance both ways within tolerance but not entrywise equal
        return MajorizationVerdict(Relation.X_MAJORIZES_Y, gap)
    return MajorizationVerdict(Relation.INCOMPARABLE, gap)


def shannon_entropy(p) -> float:
    """Natural-log Shannon entropy with the 0 log 0 = 0 convention."""
    v = check_pd(p)
    nz = v[v > 0.0]
    return float(-np.sum(nz * np.log(nz)))


def schur_functional(p, k: float) -> float:
    """Power-sum functional sum_i p_i**k, defined for k <= 1.

    For k < 0 every entry must be strictly positive.
    """
    if k > 1.0:
        raise ValueError(f"power functional requires k <= 1, got {k}")
    v = check_pd(p)
    if k < 0.0 and np.any(v == 0.0):
        raise ValueError("negative powers need strictly positive entries")
    if k == 0.0:
        return float(v.size)
    return float(np.sum(v[v > 0.0] ** k)) if k > 0 else float(np.sum(v**k))


def product_functional(p) -> float:
    """The Schur-concave companion functional -prod_i p_i."""
    return float(-np.prod(check_pd(p)))


def is_bistochastic(d, tol: float = 1e-10) -> bool:
    """True when all entries are >= -tol and all row/column sums are 1 within tol."""
    m = np.asarray(getattr(d, "mat", d), dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    if m.min(initial=0.0) < -tol:
        return False
    rows = np.abs(m.sum(axis=1) - 1.0).max()
    cols = np.abs(m.sum(axis=0) - 1.0).max()
    return bool(rows <= tol and cols <= tol)


def _transfer_steps(source: np.ndarray, target: np.ndarray, tol: float):
    """Elementary transfer steps carrying a sorted source onto a sorted target.

    Each step is a pair-index transfer (j, k, lam) meaning the matrix
    lam*I + (1-lam)*Q_jk, Q the transposition of j and k.  At most n-1
    steps are produced; every step pins at least one more coordinate.
    """
    cur = source.copy()
    steps = []
    for _ in range(cur.size - 1):
        diff = cur - target
        if np.max(np.abs(diff)) <= tol:
            break
        j = int(np.argmax(np.abs(diff) > tol))
        if diff[j] <= tol:
            raise NotMajorizedError("prefix-sum domination failed during construction")
        ks = np.nonzero(diff[j + 1 :] < -tol)[0]
        if ks.size == 0:
            raise NotMajorizedError("no deficit coordinate available for transfer")
        k = j + 1 + int(ks[0])
        delta = min(cur[j] - target[j], target[k] - cur[k])
        lam = 1.0 - delta / (cur[j] - cur[k])
        steps.append((j, k, float(lam)))
        moved = (1.0 - lam) * (cur[j] - cur[k])
        cur[j] -= moved
        cur[k] += moved
    if np.max(np.abs(cur - target)) > 10 * tol:
        raise NotMajorizedError("transfer chain failed to reach the target vector")
    return steps


def t_transform_sequence(q, p, tol: float = 1e-12) -> list[np.ndarray]:
    """Individual T-transform matrices (in descending-sorted coordinates)
    whose product carries sorted(q) onto sorted(p).  Length is at most dim-1.
    """
    qv = check_pd(q)
    pv = check_pd(p)
    n = max(qv.size, pv.size)
    qs = _padded_sorted(qv, n)
    ps = _padded_sorted(pv, n)
    verdict = majorizes(qv, pv)
    if verdict.relation not in (Relation.X_MAJORIZES_Y, Relation.EQUAL):
        raise NotMajorizedError(f"source does not majorize target ({verdict.relation.value})")
    mats = []
    for j, k, lam in _transfer_steps(qs, ps, tol):
        t = np.eye(n) * lam
        qmat = np.eye(n)
        qmat[[j, k]] = qmat[[k, j]]
        mats.append(t + (1.0 - lam) * qmat)
    return mats


def t_transform_chain(q, p, tol: float = 1e-12) -> StochMatrix:
    """Bistochastic matrix A with A q = p, built from at most dim-1 T-transforms.

    Requires q to majorize p; raises NotMajorizedError otherwise.  The
    chain is assembled in sorted coordinates and conjugated back with the
    two sorting permutations, which are themselves bistochastic.
    """
    qv = check_pd(q)
    pv = check_pd(p)
    n = max(qv.size, pv.size)
    qpad = np.zeros(n)
    qpad[: qv.size] = qv
    ppad = np.zeros(n)
    ppad[: pv.size] = pv
    perm_q = np.lexsort((np.arange(n), -qpad))
    perm_p = np.lexsort((np.arange(n), -ppad))
    pi_q = np.zeros((n, n))
    pi_q[np.arange(n), perm_q] = 1.0  # pi_q @ q = sorted q
    pi_p = np.zeros((n, n))
    pi_p[np.arange(n), perm_p] = 1.0
    chain = np.eye(n)
    for t in t_transform_sequence(qpad, ppad, tol):
        chain = t @ chain
    a = pi_p.T @ chain @ pi_q
    a = np.clip(a, 0.0, None)
    return StochMatrix(a, StochKind.BISTOCHASTIC)
