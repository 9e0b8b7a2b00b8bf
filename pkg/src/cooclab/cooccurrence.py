"""Sliding-window co-occurrence estimation and its limiting expectation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import (
    InputError,
    NegativeWeightsError,
    NonSurjectiveError,
    ShapeMismatchError,
    WindowTooLargeError,
)
from .markov import spectral_norm
from .walks import Trajectory

DENSE_LIMIT = 2048


@dataclass(frozen=True)
class StepWeights:
    """Per-offset weights alpha_1..alpha_T with sum |alpha_r| = 1."""

    alpha: tuple[float, ...]

    def __post_init__(self):
        a = tuple(float(x) for x in self.alpha)
        if len(a) < 1:
            raise InputError("need at least one step weight")
        if abs(sum(abs(x) for x in a) - 1.0) > 1e-12:
            raise InputError(f"sum of |alpha| must be 1, got {sum(abs(x) for x in a)!r}")
        object.__setattr__(self, "alpha", a)

    @classmethod
    def uniform(cls, T: int) -> "StepWeights":
        if T < 1:
            raise InputError("window size must be >= 1")
        return cls(tuple([1.0 / T] * T))

    @property
    def T(self) -> int:
        return len(self.alpha)

    @property
    def nonnegative(self) -> bool:
        return all(a >= 0 for a in self.alpha)

    def label(self) -> str:
        return ",".join(repr(a) for a in self.alpha)


@dataclass
class CoocMatrix:
    """Estimated co-occurrence matrix plus the metadata that produced it.

    ``matrix`` is a dense array for n <= 2048 and a CSR matrix above that.
    """

    matrix: np.ndarray | sp.csr_matrix
    weights: StepWeights
    L: int
    seed: int | None = None
    chain_id: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        if sp.issparse(self.matrix):
            return self.matrix.toarray()
        return self.matrix


def _pair_counts(a: np.ndarray, b: np.ndarray, n: int, dense: bool):
    keys = a * n + b
    if dense:
        return np.bincount(keys, minlength=n * n).reshape(n, n).astype(np.float64)
    uniq, cnt = np.unique(keys, return_counts=True)
    return sp.csr_matrix((cnt.astype(np.float64), (uniq // n, uniq % n)), shape=(n, n))


def estimate_cooc(traj: Trajectory | np.ndarray, w: StepWeights, n: int | None = None) -> CoocMatrix:
    """C = 1/(L-T) sum_i sum_r (alpha_r / 2)(E[v_i, v_{i+r}] + E[v_{i+r}, v_i]).

    Pair counts are accumulated as integers per offset and scaled once at
    the end. With uniform weights this is the classic window count with
    1/T increments normalized by 2(L-T).
    """
    if isinstance(traj, Trajectory):
        states, n, seed, chain_id = traj.states, traj.n, traj.seed, traj.chain_id
    else:
        states = np.asarray(traj, dtype=np.int64)
        if n is None:
            n = int(states.max()) + 1
        seed, chain_id = None, ""
    L = states.shape[0]
    T = w.T
    if L <= T:
        raise WindowTooLargeError(f"trajectory length {L} must exceed window {T}")
    m = L - T
    dense = n <= DENSE_LIMIT
    a = states[:m]
    acc = np.zeros((n, n)) if dense else sp.csr_matrix((n, n))
    for r, alpha in enumerate(w.alpha, start=1):
        N = _pair_counts(a, states[r : r + m], n, dense)
        acc = acc + (alpha / 2.0) * (N + N.T)
    C = acc / m
    if not dense:
        C = sp.csr_matrix(C)
    return CoocMatrix(matrix=C, weights=w, L=L, seed=seed, chain_id=chain_id)


def _step_terms(P: np.ndarray, rowdist: np.ndarray, w: StepWeights) -> np.ndarray:
    out = np.zeros_like(P)
    Pr = np.eye(P.shape[0])
    for alpha in w.alpha:
        Pr = Pr @ P
        F = rowdist[:, None] * Pr
        out += (alpha / 2.0) * (F + F.T)
    return out


def asymptotic_expectation(P: np.ndarray, pi: np.ndarray, w: StepWeights) -> np.ndarray:
    """sum_r (alpha_r / 2)(Pi P^r + (Pi P^r)^T) with Pi = diag(pi)."""
    return _step_terms(np.asarray(P), np.asarray(pi), w)


def window_expectation(P: np.ndarray, phi: np.ndarray, w: StepWeights, i: int) -> np.ndarray:
    """Exact E[C_i] for the window starting at step i (1-based) from phi."""
    dist = np.asarray(phi, dtype=np.float64)
    for _ in range(i - 1):
        dist = dist @ P
    return _step_terms(np.asarray(P), dist, w)


def expected_cooc(P: np.ndarray, phi: np.ndarray, w: StepWeights, L: int) -> np.ndarray:
    """Exact finite-L expectation of :func:`estimate_cooc` for a walk from phi."""
    if L <= w.T:
        raise WindowTooLargeError(f"L={L} must exceed T={w.T}")
    P = np.asarray(P)
    S = np.zeros_like(P, dtype=np.float64)
    dist = np.asarray(phi, dtype=np.float64)
    for _ in range(L - w.T):
        S += _step_terms(P, dist, w)
        dist = dist @ P
    return S / (L - w.T)


def error_2norm(C, AE) -> float:
    """Spectral norm of C - AE."""
    Cm = C.dense() if isinstance(C, CoocMatrix) else np.asarray(C)
    AE = np.asarray(AE)
    if Cm.shape != AE.shape:
        raise ShapeMismatchError(f"shapes differ: {Cm.shape} vs {AE.shape}")
    return spectral_norm(Cm - AE)


def project_states(M, f) -> np.ndarray:
    """Merge states of a matrix through a surjective map f: [n] -> [m]."""
    M = np.asarray(M, dtype=np.float64)
    f = np.asarray(f, dtype=np.int64)
    if f.shape[0] != M.shape[0] or M.shape[0] != M.shape[1]:
        raise ShapeMismatchError("map length must equal the matrix dimension")
    if f.min() < 0:
        raise NonSurjectiveError("map has negative targets")
    m = int(f.max()) + 1
    if np.unique(f).shape[0] != m:
        raise NonSurjectiveError(f"map does not hit every target in 0..{m - 1}")
    rows = np.zeros((m, M.shape[1]))
    np.add.at(rows, f, M)
    out = np.zeros((m, m))
    np.add.at(out.T, f, rows.T)
    return out


def pmi_transform(C, b: float = 1.0) -> np.ndarray:
    """Truncated PMI: ln(max(C[w, c] / (b m_w m_c), 1)), m = row sums.

    Rows with zero mass map to zero rows.
    """
    if isinstance(C, CoocMatrix):
        if not C.weights.nonnegative:
            raise NegativeWeightsError("PMI needs nonnegative step weights")
        Cm = C.dense()
    else:
        Cm = np.asarray(C, dtype=np.float64)
        if np.any(Cm < 0):
            raise NegativeWeightsError("PMI needs a nonnegative co-occurrence matrix")
    if not b > 0:
        raise InputError("b must be positive")
    m = Cm.sum(axis=1)
    denom = b * np.outer(m, m)
    ratio = np.zeros_like(Cm)
    np.divide(Cm, denom, out=ratio, where=denom > 0)
    return np.log(np.maximum(ratio, 1.0))


def format_coordinates(M, header: dict) -> str:
    """``i j value`` lines for nonzero entries after a ``# key=value`` header."""
    head = "# " + " ".join(f"{k}={v}" for k, v in header.items())
    if sp.issparse(M):
        coo = sp.coo_matrix(M)
        order = np.lexsort((coo.col, coo.row))
        triples = zip(coo.row[order], coo.col[order], coo.data[order])
    else:
        M = np.asarray(M)
        idx = np.argwhere(M != 0)
        triples = ((i, j, M[i, j]) for i, j in idx)
    lines = [head] + [f"{int(i)} {int(j)} {float(v)!r}" for i, j, v in triples]
    return "\n".join(lines) + "\n"


def read_coordinates(path) -> tuple[np.ndarray, dict]:
    meta = {}
    entries = []
    with open(path) as fh:
        for line in fh:
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                for tok in s[1:].split():
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        meta[k] = v
                continue
            i, j, v = s.split()
            entries.append((int(i), int(j), float(v)))
    n = int(meta["n"]) if "n" in meta else 1 + max(max(i, j) for i, j, _ in entries)
    M = np.zeros((n, n))
    for i, j, v in entries:
        M[i, j] = v
    return M, meta
