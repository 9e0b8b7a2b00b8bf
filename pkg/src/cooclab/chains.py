"""Chain constructors: barbell, winning streak, G(n, p), edge lists, HMMs."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadIndexError,
    CliqueTooSmallError,
    GenerationFailedError,
    InputError,
    IsolatedVertexError,
    IsolatedVertexUnresolvableError,
)
from .markov import read_matrix, regularity_check, validate_stochastic
from .rng import uniform_block

log = logging.getLogger(__name__)


@dataclass
class EdgeList:
    """Undirected weighted graph on vertices 0..n-1.

    Edges are canonicalized to ``u <= v`` and duplicates are merged by summing
    their weights.
    """

    n: int
    edges: list[tuple[int, int, float]] = field(default_factory=list)

    def __post_init__(self):
        merged: dict[tuple[int, int], float] = {}
        for u, v, *rest in self.edges:
            u, v = int(u), int(v)
            w = float(rest[0]) if rest else 1.0
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise BadIndexError(f"edge ({u}, {v}) out of range for n={self.n}")
            if not w > 0:
                raise InputError(f"edge ({u}, {v}) has non-positive weight {w}")
            key = (u, v) if u <= v else (v, u)
            merged[key] = merged.get(key, 0.0) + w
        self.edges = [(u, v, w) for (u, v), w in sorted(merged.items())]

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        for u, v, w in self.edges:
            A[u, v] += w
            if u != v:
                A[v, u] += w
        return A


@dataclass
class HmmSpec:
    hidden_transition: np.ndarray
    emission: np.ndarray

    def __post_init__(self):
        self.hidden_transition = np.asarray(self.hidden_transition, dtype=np.float64)
        self.emission = np.asarray(self.emission, dtype=np.float64)
        if self.hidden_transition.shape[0] >= 2:
            self.hidden_transition = validate_stochastic(self.hidden_transition)
        E = self.emission
        if E.ndim != 2 or E.shape[0] != self.hidden_transition.shape[0]:
            raise InputError("emission must have one row per hidden state")
        if np.any(E < 0) or np.any(np.abs(E.sum(axis=1) - 1.0) > 1e-12):
            raise InputError("emission rows must be probability vectors")


def walk_matrix(A: np.ndarray, allow_large: bool = False) -> np.ndarray:
    """Random walk D^{-1} A of a weighted adjacency matrix."""
    d = A.sum(axis=1)
    if np.any(d <= 0):
        raise IsolatedVertexError(f"vertex {int(np.argmin(d))} has no edges")
    return validate_stochastic(A / d[:, None], allow_large=allow_large)


def barbell_adjacency(clique_size: int, path_len: int) -> np.ndarray:
    if clique_size < 3:
        raise CliqueTooSmallError(f"clique_size must be >= 3, got {clique_size}")
    if path_len < 0:
        raise InputError("path_len must be >= 0")
    k = clique_size
    n = 2 * k + path_len
    A = np.zeros((n, n))
    A[:k, :k] = 1.0
    A[k + path_len :, k + path_len :] = 1.0
    np.fill_diagonal(A, 0.0)
    # path k-1 -> k -> ... -> k+path_len
    for u in range(k - 1, k + path_len):
        A[u, u + 1] = A[u + 1, u] = 1.0
    return A


def barbell(clique_size: int, path_len: int) -> np.ndarray:
    """Two K_k cliques joined by ``path_len`` intermediate path vertices.

    The path starts at the last vertex of the left clique (k-1) and ends at
    the first vertex of the right clique (k+path_len).
    """
    return walk_matrix(barbell_adjacency(clique_size, path_len))


def winning_streak(n: int) -> np.ndarray:
    """Streak-length chain; states 0..n-1 stand for streaks 1..n.

    Each state resets to the first state or advances with probability 1/2;
    the last state holds instead of advancing.
    """
    if n < 2:
        raise InputError("winning_streak needs n >= 2")
    P = np.zeros((n, n))
    P[:, 0] += 0.5
    for i in range(n - 1):
        P[i, i + 1] += 0.5
    P[n - 1, n - 1] += 0.5
    return validate_stochastic(P)


def _gnp_adjacency(n: int, p: float, seed: int) -> np.ndarray:
    iu, ju = np.triu_indices(n, k=1)
    u = uniform_block(seed, iu.shape[0])
    keep = u < p
    A = np.zeros((n, n))
    A[iu[keep], ju[keep]] = 1.0
    A[ju[keep], iu[keep]] = 1.0
    return A


def erdos_renyi_walk(n: int, p: float, seed: int, max_attempts: int = 100,
                     return_attempts: bool = False):
    """Simple random walk on a G(n, p) draw, resampled until regular.

    Pair (i, j), i < j, in row-major upper-triangle order consumes draw
    number ``idx + 1`` of the SplitMix64 stream for the attempt's seed, and
    the edge is present when that uniform is below p. Attempt a uses
    ``seed + a``.
    """
    if n < 2:
        raise InputError("erdos_renyi_walk needs n >= 2")
    if not 0.0 < p < 1.0:
        raise InputError("p must lie in (0, 1)")
    isolated = False
    for attempt in range(max_attempts):
        A = _gnp_adjacency(n, p, seed + attempt)
        if np.any(A.sum(axis=1) == 0):
            isolated = True
            continue
        isolated = False
        P = walk_matrix(A)
        if regularity_check(P).regular:
            if attempt:
                log.info("G(%d, %g): regular draw after %d attempts", n, p, attempt + 1)
            return (P, attempt + 1) if return_attempts else P
    if isolated:
        raise IsolatedVertexUnresolvableError(
            f"G({n}, {p}) kept producing isolated vertices over {max_attempts} attempts"
        )
    raise GenerationFailedError(f"no regular G({n}, {p}) walk in {max_attempts} attempts")


def from_edge_list(e: EdgeList, allow_large: bool = False) -> np.ndarray:
    """Weighted random walk P(u, v) = w(u, v) / d(u)."""
    return walk_matrix(e.adjacency(), allow_large=allow_large)


def read_edge_list(path) -> EdgeList:
    """Parse ``u v [w]`` lines with an optional ``# n=<int>`` header."""
    n = None
    edges = []
    with open(path) as fh:
        for line in fh:
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                body = s[1:].strip()
                if body.startswith("n="):
                    n = int(body[2:])
                continue
            parts = s.split()
            if len(parts) not in (2, 3):
                raise InputError(f"{path}: bad edge line {s!r}")
            u, v = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
            edges.append((u, v, w))
    if n is None:
        n = 1 + max(max(u, v) for u, v, _ in edges)
    return EdgeList(n=n, edges=edges)


def stationary_from_degrees(A: np.ndarray) -> np.ndarray:
    d = A.sum(axis=1)
    return d / d.sum()


def hmm_joint_chain(h: HmmSpec) -> tuple[np.ndarray, np.ndarray]:
    """Joint chain on (y, x) pairs, flattened as ``y * |X| + x``.

    P((y, x) -> (y', x')) = hidden(x, x') * emission(x', y').
    Returns the transition matrix and the map joint index -> y.
    """
    H = h.hidden_transition
    E = h.emission
    nx, ny = E.shape
    # J[y, x, y2, x2] = H[x, x2] * E[x2, y2], independent of y
    core = H[:, None, :] * E.T[None, :, :]  # [x, y2, x2]
    J = np.broadcast_to(core[None, :, :, :], (ny, nx, ny, nx))
    P = J.reshape(ny * nx, ny * nx)
    obs = np.repeat(np.arange(ny), nx)
    return validate_stochastic(P), obs


def read_hmm(path) -> HmmSpec:
    """Two matrix blocks separated by a blank line: hidden first, emission second.

    The emission block is ``|X|`` rows of ``|Y|`` values (header line gives
    the row count).
    """
    with open(path) as fh:
        text = fh.read()
    blocks = [b for b in text.strip().split("\n\n") if b.strip()]
    if len(blocks) != 2:
        raise InputError(f"{path}: expected two blank-line separated blocks")

    def parse(block):
        rows = [ln.split() for ln in block.splitlines() if ln.strip()]
        k = int(rows[0][0])
        return np.array([[float(v) for v in r] for r in rows[1 : k + 1]])

    return HmmSpec(hidden_transition=parse(blocks[0]), emission=parse(blocks[1]))


def load_matrix_or_edges(path, allow_large: bool = False) -> np.ndarray:
    """A transition-matrix file (lone integer first line) or an edge list."""
    with open(path) as fh:
        for line in fh:
            s = line.strip()
            if s and not s.startswith("#"):
                first = s.split()
                break
        else:
            raise InputError(f"{path}: empty file")
    if len(first) == 1:
        return validate_stochastic(read_matrix(path), allow_large=allow_large)
    return from_edge_list(read_edge_list(path), allow_large=allow_large)
