"""Dense linear algebra for finite Markov chains.

Transition matrices and probability vectors are plain float64 numpy arrays.
:func:`validate_stochastic` is the single entry point that checks and freezes
a matrix; the other functions assume their inputs went through it.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    LengthMismatchError,
    MethodDisagreementError,
    NegativeEntryError,
    NoConvergenceError,
    NonSquareError,
    NotMixedWithinCapError,
    NotRegularError,
    NotSymmetricError,
    RowSumOutOfToleranceError,
    TooLargeError,
    ZeroStationaryEntryError,
)

MAX_DENSE_STATES = 5000
ROW_SUM_TOL = 1e-9
STATIONARY_TOL = 1e-13
STATIONARY_MAX_ITER = 1_000_000
AGREEMENT_TOL = 1e-6


@dataclass(frozen=True)
class RegularityReport:
    irreducible: bool
    period: int

    @property
    def regular(self) -> bool:
        return self.irreducible and self.period == 1


@dataclass(frozen=True)
class SpectralReport:
    lam: float
    reversible: bool
    mixing_time: int
    delta: float

    @property
    def gap(self) -> float:
        return 1.0 - self.lam


def validate_stochastic(raw, allow_large: bool = False) -> np.ndarray:
    """Check a square row-stochastic matrix and return a read-only copy.

    Rows within 1e-9 of summing to one are renormalized; anything further
    off is rejected. Matrices above 5000 states are refused unless
    ``allow_large`` is set (a dense n x n float64 array costs 8 n^2 bytes).
    """
    P = np.array(raw, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise NonSquareError(f"expected a square matrix, got shape {P.shape}")
    n = P.shape[0]
    if n < 2:
        raise NonSquareError("a chain needs at least 2 states")
    if n > MAX_DENSE_STATES and not allow_large:
        raise TooLargeError(
            f"{n} states exceeds the dense limit of {MAX_DENSE_STATES}; "
            f"pass allow_large=True to accept ~{8 * n * n / 2**30:.1f} GiB per matrix"
        )
    if not np.all(np.isfinite(P)):
        raise NegativeEntryError("matrix has non-finite entries")
    if np.any(P < 0):
        i, j = np.argwhere(P < 0)[0]
        raise NegativeEntryError(f"entry ({i}, {j}) = {P[i, j]} is negative")
    sums = P.sum(axis=1)
    bad = np.abs(sums - 1.0) > ROW_SUM_TOL
    if np.any(bad):
        i = int(np.argmax(bad))
        raise RowSumOutOfToleranceError(f"row {i} sums to {sums[i]!r}")
    P /= sums[:, None]
    if np.any(P > 1.0):
        np.minimum(P, 1.0, out=P)
    P.flags.writeable = False
    return P


def as_prob_vector(x, n: int | None = None) -> np.ndarray:
    """Validate a probability vector (nonnegative, sums to one within 1e-9)."""
    v = np.array(x, dtype=np.float64).reshape(-1)
    if n is not None and v.shape[0] != n:
        raise LengthMismatchError(f"vector has length {v.shape[0]}, expected {n}")
    if np.any(v < 0) or not np.all(np.isfinite(v)):
        raise NegativeEntryError("probability vector has negative or non-finite entries")
    s = v.sum()
    if abs(s - 1.0) > ROW_SUM_TOL:
        raise RowSumOutOfToleranceError(f"probability vector sums to {s!r}")
    v /= s
    v.flags.writeable = False
    return v


def _adjacency(P: np.ndarray) -> list[np.ndarray]:
    return [np.flatnonzero(row > 0) for row in P]


def _bfs_levels(adj: list[np.ndarray], source: int) -> np.ndarray:
    level = np.full(len(adj), -1, dtype=np.int64)
    level[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(v)
    return level


def regularity_check(P: np.ndarray) -> RegularityReport:
    """Irreducibility and period from the positive-entry digraph.

    The period is the gcd of ``level[u] + 1 - level[v]`` over all edges
    u -> v, with BFS levels measured from state 0.
    """
    n = P.shape[0]
    adj = _adjacency(P)
    level = _bfs_levels(adj, 0)
    radj = _adjacency(P.T)
    back = _bfs_levels(radj, 0)
    irreducible = bool(np.all(level >= 0) and np.all(back >= 0))
    if not irreducible:
        return RegularityReport(irreducible=False, period=0)
    g = 0
    for u in range(n):
        for v in adj[u]:
            g = math.gcd(g, int(level[u] + 1 - level[v]))
            if g == 1:
                return RegularityReport(irreducible=True, period=1)
    return RegularityReport(irreducible=True, period=g)


def _require_regular(P: np.ndarray) -> None:
    rep = regularity_check(P)
    if not rep.regular:
        raise NotRegularError(
            f"chain is not regular (irreducible={rep.irreducible}, period={rep.period})"
        )


def stationary_distribution(P: np.ndarray, check: bool = True) -> np.ndarray:
    """Stationary distribution by power iteration on the transpose.

    The iteration applies successive squarings P, P^2, P^4, ... so slowly
    mixing chains (barbells with long paths) converge in a few dozen matrix
    products; a final run of plain ``x <- x P`` steps polishes the fixed point.
    """
    if check:
        _require_regular(P)
    n = P.shape[0]
    x = np.full(n, 1.0 / n)
    M = np.array(P)
    for _ in range(64):
        y = x @ M
        y /= y.sum()
        done = np.max(np.abs(y - x)) <= STATIONARY_TOL
        x = y
        if done:
            break
        M = M @ M
        M /= M.sum(axis=1, keepdims=True)
    for _ in range(STATIONARY_MAX_ITER):
        y = x @ P
        y /= y.sum()
        if np.max(np.abs(y - x)) <= STATIONARY_TOL:
            x = y
            break
        x = y
    else:
        raise NoConvergenceError("power iteration hit its iteration cap")
    residual = np.max(np.abs(x @ P - x))
    if residual > 1e-10 or np.any(x <= 0):
        raise NoConvergenceError(f"stationary residual {residual:.3e} too large")
    x.flags.writeable = False
    return x


def pi_norm(x, pi) -> float:
    """sqrt(sum_i x_i^2 / pi_i)."""
    x = np.asarray(x, dtype=np.float64)
    pi = np.asarray(pi, dtype=np.float64)
    if x.shape != pi.shape:
        raise LengthMismatchError(f"lengths differ: {x.shape} vs {pi.shape}")
    if np.any(pi <= 0):
        raise ZeroStationaryEntryError("pi-norm needs a strictly positive pi")
    return float(np.sqrt(np.sum(x * x / pi)))


def total_variation(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise LengthMismatchError(f"lengths differ: {x.shape} vs {y.shape}")
    return 0.5 * float(np.abs(x - y).sum())


def _worst_tv(M: np.ndarray, pi: np.ndarray) -> float:
    return 0.5 * float(np.max(np.abs(M - pi[None, :]).sum(axis=1)))


def mixing_profile(P, pi, delta: float = 0.125, t_max: int = 100_000,
                   linear_steps: int = 1024):
    """Return ``(tau, P**tau, tv_history)`` for the delta-mixing time.

    Only point-mass starts are examined: the TV distance of x^T P^t from pi
    is convex in x, so its maximum over the simplex sits at a vertex.

    Steps 1..``linear_steps`` are scanned one at a time. Beyond that the
    search doubles t by squaring and then bisects, which is valid because
    the worst-case distance is non-increasing in t. ``P`` may be a dense
    array or a scipy sparse matrix (products are then ``dense @ sparse``).
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    n = P.shape[0]
    dense = np.asarray(P.todense()) if hasattr(P, "todense") else np.asarray(P)
    M = np.eye(n)
    history = []
    prev = 1.0 + 1e-12
    for t in range(1, min(linear_steps, t_max) + 1):
        M = np.asarray(M @ P)
        tv = _worst_tv(M, pi)
        if tv > prev + 1e-12:
            raise AssertionError(f"worst-case TV increased at t={t}: {prev} -> {tv}")
        history.append(tv)
        prev = tv
        if tv <= delta:
            return t, M, history
    if t_max <= linear_steps:
        raise NotMixedWithinCapError(f"not mixed within {t_max} steps (TV={prev:.3g})")
    # doubling: powers[k] = P^(linear_steps * 2^k)
    base_t = linear_steps
    powers = [(base_t, M)]
    while True:
        t, A = powers[-1]
        if t >= t_max:
            raise NotMixedWithinCapError(f"not mixed within {t_max} steps")
        A2 = A @ A
        A2 /= A2.sum(axis=1, keepdims=True)
        tv = _worst_tv(A2, pi)
        powers.append((2 * t, A2))
        if tv <= delta:
            break
    # bisect on (lo, hi] with lo known unmixed
    lo_t, lo_M = powers[-2]
    hi_t, hi_M = powers[-1]
    for step_t, step_M in reversed(powers[:-2]):
        mid_M = lo_M @ step_M
        if _worst_tv(mid_M, pi) <= delta:
            hi_t, hi_M = lo_t + step_t, mid_M
        else:
            lo_t, lo_M = lo_t + step_t, mid_M
    # final linear refinement below linear_steps resolution
    while hi_t - lo_t > 1:
        lo_M = lo_M @ dense
        lo_t += 1
        if _worst_tv(lo_M, pi) <= delta:
            hi_t, hi_M = lo_t, lo_M
            break
    if hi_t > t_max:
        raise NotMixedWithinCapError(f"not mixed within {t_max} steps")
    return hi_t, hi_M, history


def mixing_time(P: np.ndarray, delta: float = 0.125, t_max: int = 100_000,
                pi: np.ndarray | None = None) -> int:
    """Smallest t with max_i TV(e_i^T P^t, pi) <= delta."""
    if pi is None:
        pi = stationary_distribution(P)
    else:
        _require_regular(P)
    return mixing_profile(P, pi, delta, t_max)[0]


def _lambda_two_ways(P: np.ndarray, pi: np.ndarray) -> tuple[float, float]:
    s = np.sqrt(pi)
    B = (s[:, None] * P) / s[None, :]
    deflated = B - np.outer(s, s)
    via_svd = float(np.linalg.svd(deflated, compute_uv=False)[0])
    eig = np.linalg.eigvalsh(B @ B.T)
    second = eig[-2] if eig.shape[0] >= 2 else 0.0
    via_eig = math.sqrt(max(float(second), 0.0))
    return via_svd, via_eig


def spectral_expansion(P: np.ndarray, pi: np.ndarray | None = None,
                       check: bool = True) -> float:
    """lambda(P): norm of P acting on the pi-orthogonal complement of pi.

    With B = D^{1/2} P D^{-1/2} (D = diag(pi)), sqrt(pi) is a fixed vector of
    both B and B^T, so its orthogonal complement is invariant and lambda is
    the top singular value of B - sqrt(pi) sqrt(pi)^T. The same value is
    recomputed as the square root of the second eigenvalue of B B^T (the
    multiplicative reversiblization) and the two must agree.
    """
    if check:
        _require_regular(P)
    if pi is None:
        pi = stationary_distribution(P, check=False)
    via_svd, via_eig = _lambda_two_ways(P, pi)
    if abs(via_svd - via_eig) > AGREEMENT_TOL:
        raise MethodDisagreementError(
            f"lambda estimates disagree: svd={via_svd!r}, eig={via_eig!r}"
        )
    return via_svd


def is_reversible(P: np.ndarray, pi: np.ndarray, tol: float = 1e-12) -> bool:
    F = pi[:, None] * P
    return bool(np.max(np.abs(F - F.T)) <= tol)


def spectral_report(P: np.ndarray, delta: float = 0.125,
                    t_max: int = 100_000) -> SpectralReport:
    pi = stationary_distribution(P)
    return SpectralReport(
        lam=spectral_expansion(P, pi, check=False),
        reversible=is_reversible(P, pi),
        mixing_time=mixing_profile(P, pi, delta, t_max)[0],
        delta=delta,
    )


def spectral_norm(A) -> float:
    """Largest absolute eigenvalue of a symmetric matrix."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSymmetricError(f"expected a square matrix, got shape {A.shape}")
    if A.size and np.max(np.abs(A - A.T)) > 1e-10:
        raise NotSymmetricError("matrix is not symmetric within 1e-10")
    if A.size == 0:
        return 0.0
    w = np.linalg.eigvalsh(A)
    return float(max(abs(w[0]), abs(w[-1])))


def read_matrix(path) -> np.ndarray:
    """Parse the text format: a line with n, then n rows of n decimals."""
    with open(path) as fh:
        lines = [ln.split() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    n = int(lines[0][0])
    rows = [[float(v) for v in ln] for ln in lines[1 : n + 1]]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise NonSquareError(f"{path}: expected {n} rows of {n} values")
    return np.array(rows)


def format_matrix(P: np.ndarray) -> str:
    n = P.shape[0]
    out = [str(n)]
    out += [" ".join(repr(float(v)) for v in row) for row in P]
    return "\n".join(out) + "\n"


def format_vector(x: np.ndarray) -> str:
    return " ".join(repr(float(v)) for v in x) + "\n"
