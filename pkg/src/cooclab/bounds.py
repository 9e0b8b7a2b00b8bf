"""Closed-form tail bounds and Monte-Carlo checks of the matrix Chernoff bound.

All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .errors import ArgOutOfRangeError, DegenerateAllZeroError, InputError, WindowTooLargeError
from .rng import mix_seed, uniform_block
from .walks import WalkSampler

WILSON_Z = NormalDist().inv_cdf(0.975)


@dataclass
class MatrixFunction:
    """Symmetric d x d matrices f(v), one per state, centered under pi."""

    mats: np.ndarray  # (N, d, d)
    pi: np.ndarray

    def __post_init__(self):
        self.mats = np.asarray(self.mats, dtype=np.float64)
        N, d, d2 = self.mats.shape
        if d != d2 or N != len(self.pi):
            raise InputError("mats must be (N, d, d) with N = len(pi)")
        if np.max(np.abs(self.mats - self.mats.transpose(0, 2, 1)), initial=0.0) > 0:
            raise InputError("every f(v) must be symmetric")
        norms = self.norms()
        if norms.max(initial=0.0) > 1.0 + 1e-12:
            raise InputError(f"max ||f(v)||_2 = {norms.max()} exceeds 1")
        if np.max(np.abs(self.mean()), initial=0.0) > 1e-10:
            raise InputError("sum_v pi_v f(v) must vanish")

    @property
    def d(self) -> int:
        return self.mats.shape[1]

    def norms(self) -> np.ndarray:
        w = np.linalg.eigvalsh(self.mats)
        return np.maximum(np.abs(w[:, 0]), np.abs(w[:, -1]))

    def mean(self) -> np.ndarray:
        return np.tensordot(self.pi, self.mats, axes=1)


@dataclass(frozen=True)
class TailEstimate:
    p_hat: float
    trials: int
    wilson_halfwidth: float


def wilson_halfwidth(successes: int, trials: int, z: float = WILSON_Z) -> float:
    p = successes / trials
    return z / (1 + z * z / trials) * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))


def matrix_chernoff_bound(k: int, d: int, eps: float, lam: float, phi_norm: float,
                          complex_case: bool = False) -> float:
    """c * ||phi||_pi * d^2 * exp(-eps^2 (1 - lam) k / 72), c = 4 (Hermitian) or 1 (real)."""
    if k < 1 or d < 1 or not 0 < eps < 1 or not 0 <= lam <= 1 or phi_norm < 1 - 1e-12:
        raise ArgOutOfRangeError(f"bad arguments k={k} d={d} eps={eps} lam={lam} phi_norm={phi_norm}")
    pre = 4.0 if complex_case else 1.0
    return pre * phi_norm * d * d * math.exp(-eps * eps * (1.0 - lam) * k / 72.0)


def cooc_bound(n: int, T: int, tau: int, L: int, eps: float, phi_norm: float) -> float:
    """2 (tau + T) ||phi||_pi n^2 exp(-eps^2 (L - T) / (576 (tau + T)))."""
    if L <= T:
        raise WindowTooLargeError(f"L={L} must exceed T={T}")
    if not 0 < eps < 1:
        raise ArgOutOfRangeError("eps must lie in (0, 1)")
    m = tau + T
    return 2.0 * m * phi_norm * n * n * math.exp(-eps * eps * (L - T) / (576.0 * m))


def recommended_length(n: int, T: int, tau: int, eps: float) -> int:
    """ceil(576 (tau + T)(3 ln n + ln(tau + T)) / eps^2 + T)."""
    if not 0 < eps < 1 or n < 1 or T < 1 or tau < 1:
        raise ArgOutOfRangeError(f"bad arguments n={n} T={T} tau={tau} eps={eps}")
    m = tau + T
    return math.ceil(576.0 * m * (3.0 * math.log(n) + math.log(m)) / (eps * eps) + T)


def subchain_expansion_bound(delta: float) -> float:
    if not 0 < delta < 1:
        raise ArgOutOfRangeError("delta must lie in (0, 1)")
    return math.sqrt(2.0 * delta)


def _symmetric_uniform(seed: int, N: int, d: int) -> np.ndarray:
    iu, ju = np.triu_indices(d)
    u = uniform_block(seed, N * iu.shape[0]).reshape(N, -1) * 2.0 - 1.0
    g = np.zeros((N, d, d))
    g[:, iu, ju] = u
    g[:, ju, iu] = u
    return g


def make_centered_function(P: np.ndarray, pi: np.ndarray, d: int, seed: int,
                           max_attempts: int = 100) -> MatrixFunction:
    """Random symmetric f with sum_v pi_v f(v) = 0 and max_v ||f(v)||_2 = 1.

    Upper-triangle entries (diagonal included, row-major) of each g(v) are
    uniform on (-1, 1) from the SplitMix64 stream; g is centered under pi
    and divided by the largest resulting spectral norm. A single-state
    chain gives f = 0.
    """
    if d < 1:
        raise InputError("d must be >= 1")
    pi = np.asarray(pi, dtype=np.float64)
    N = pi.shape[0]
    if N == 1:
        return MatrixFunction(np.zeros((1, d, d)), pi)
    for attempt in range(max_attempts):
        g = _symmetric_uniform(seed + attempt, N, d)
        f = g - np.tensordot(pi, g, axes=1)[None]
        w = np.linalg.eigvalsh(f)
        scale = np.max(np.maximum(np.abs(w[:, 0]), np.abs(w[:, -1])))
        if scale > 0:
            f = f / scale
            f = 0.5 * (f + f.transpose(0, 2, 1))
            return MatrixFunction(f, pi)
    raise DegenerateAllZeroError(f"all {max_attempts} draws centered to zero")


def max_eig_of_means(states: np.ndarray, f: MatrixFunction) -> np.ndarray:
    """lambda_max of (1/k) sum_j f(v_j) for each row of ``states``."""
    N = f.mats.shape[0]
    k = states.shape[1]
    counts = np.stack([np.bincount(row, minlength=N) for row in states]).astype(np.float64)
    means = np.tensordot(counts / k, f.mats, axes=1)
    return np.linalg.eigvalsh(means)[:, -1]


def trial_seeds(seed: int, trials: int, *tags: int) -> list[int]:
    return [mix_seed(seed, *tags, t) for t in range(trials)]


def empirical_tail(P: np.ndarray, phi, f: MatrixFunction, k: int, eps: float,
                   trials: int, seed: int) -> TailEstimate:
    """Fraction of k-step walks from phi whose sample mean has lambda_max >= eps.

    Trial t walks with seed ``mix_seed(seed, k, t)``.
    """
    if trials < 100:
        raise InputError("need at least 100 trials")
    top = _tail_top_eigs(P, phi, f, k, trials, seed)
    hits = int(np.count_nonzero(top >= eps))
    return TailEstimate(hits / trials, trials, wilson_halfwidth(hits, trials))


def _tail_top_eigs(P, phi, f, k, trials, seed, chunk: int = 256) -> np.ndarray:
    sampler = WalkSampler(P, phi)
    seeds = trial_seeds(seed, trials, k)
    tops = []
    for start in range(0, trials, chunk):
        walks = sampler.sample_many(k, seeds[start : start + chunk])
        tops.append(max_eig_of_means(walks, f))
    return np.concatenate(tops)


def chernoff_grid(P, phi, f: MatrixFunction, ks, epss, trials: int, seed: int,
                  lam: float, phi_norm: float) -> list[dict]:
    """Empirical tail vs. the real-case bound over a (k, eps) grid.

    Walks are shared across eps at a given k.
    """
    rows = []
    for k in ks:
        top = _tail_top_eigs(P, phi, f, k, trials, seed)
        for eps in epss:
            hits = int(np.count_nonzero(top >= eps))
            rows.append(dict(
                k=k, eps=eps, p_hat=hits / trials,
                ci_halfwidth=wilson_halfwidth(hits, trials),
                bound=matrix_chernoff_bound(k, f.d, eps, lam, phi_norm),
            ))
    return rows
