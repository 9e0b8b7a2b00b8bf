"""Seeded random-walk sampling.

A walk of length L consumes draws 1..L of the SplitMix64 stream for its seed
(see :mod:`cooclab.rng`): draw 1 picks the start state from phi, draw t+1
picks the successor of state v_t. Each pick is an inverse-CDF lookup: the
chosen index is the first j with ``u < cum[j]``. The cumulative row is
pinned to exactly 1.0 from its last positive entry onward, so that entry
absorbs rounding residue and zero-probability states are never selected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import LengthMismatchError, LengthZeroError
from .rng import GAMMA, MASK64, MUL1, MUL2, content_hash

_GAMMA = np.uint64(GAMMA)
_MUL1 = np.uint64(MUL1)
_MUL2 = np.uint64(MUL2)
_S11 = np.uint64(11)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)
_INV53 = 1.0 / 9007199254740992.0


@dataclass(frozen=True)
class Trajectory:
    states: np.ndarray
    chain_id: str
    seed: int
    n: int

    @property
    def L(self) -> int:
        return int(self.states.shape[0])


def cumulative_rows(P: np.ndarray) -> np.ndarray:
    cum = np.cumsum(np.atleast_2d(P), axis=1)
    for row, prow in zip(cum, np.atleast_2d(P)):
        last = np.flatnonzero(prow > 0)[-1]
        row[last:] = 1.0
    return cum


@numba.njit(cache=True, nogil=True)
def _pick(cum_row, u):
    lo = 0
    hi = cum_row.shape[0] - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if u < cum_row[mid]:
            hi = mid
        else:
            lo = mid + 1
    return lo


@numba.njit(cache=True, nogil=True)
def _next_uniform(state):
    state = state + _GAMMA
    z = state
    z = (z ^ (z >> _S30)) * _MUL1
    z = (z ^ (z >> _S27)) * _MUL2
    z = z ^ (z >> _S31)
    return state, np.float64(z >> _S11) * _INV53


@numba.njit(cache=True, nogil=True)
def _walk_kernel(cum, cum_phi, length, seed, out):
    state = seed
    state, u = _next_uniform(state)
    v = _pick(cum_phi, u)
    out[0] = v
    for t in range(1, length):
        state, u = _next_uniform(state)
        v = _pick(cum[v], u)
        out[t] = v


@numba.njit(cache=True, nogil=True)
def _walk_batch_kernel(cum, cum_phi, length, seeds, out):
    for k in range(seeds.shape[0]):
        _walk_kernel(cum, cum_phi, length, seeds[k], out[k])


def _prepare(P, phi):
    P = np.asarray(P, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64).reshape(-1)
    if phi.shape[0] != P.shape[0]:
        raise LengthMismatchError(f"phi has length {phi.shape[0]}, chain has {P.shape[0]} states")
    cum = cumulative_rows(P)
    cum_phi = cumulative_rows(phi[None, :])[0]
    return cum, cum_phi


class WalkSampler:
    """Precomputes cumulative rows of a chain once for repeated sampling."""

    def __init__(self, P: np.ndarray, phi: np.ndarray, chain_id: str | None = None):
        self.n = P.shape[0]
        self.cum, self.cum_phi = _prepare(P, phi)
        self.chain_id = chain_id if chain_id is not None else content_hash(P)

    def sample(self, L: int, seed: int) -> Trajectory:
        if L < 1:
            raise LengthZeroError("walk length must be >= 1")
        out = np.empty(L, dtype=np.int64)
        _walk_kernel(self.cum, self.cum_phi, L, np.uint64(int(seed) & MASK64), out)
        out.flags.writeable = False
        return Trajectory(states=out, chain_id=self.chain_id, seed=int(seed), n=self.n)

    def sample_many(self, L: int, seeds) -> np.ndarray:
        """One walk per seed, stacked as a (len(seeds), L) int64 array."""
        if L < 1:
            raise LengthZeroError("walk length must be >= 1")
        seeds = np.array([int(s) & MASK64 for s in seeds], dtype=np.uint64)
        out = np.empty((seeds.shape[0], L), dtype=np.int64)
        _walk_batch_kernel(self.cum, self.cum_phi, L, seeds, out)
        return out


def sample_walk(P: np.ndarray, phi: np.ndarray, L: int, seed: int) -> Trajectory:
    return WalkSampler(P, phi).sample(L, seed)


def format_trajectory(traj: Trajectory) -> str:
    head = f"# seed={traj.seed} chain={traj.chain_id} n={traj.n} L={traj.L}\n"
    return head + "\n".join(str(int(v)) for v in traj.states) + "\n"


def read_trajectory(path) -> Trajectory:
    meta = {}
    states = []
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
            states.append(int(s))
    arr = np.array(states, dtype=np.int64)
    n = int(meta["n"]) if "n" in meta else int(arr.max()) + 1
    return Trajectory(states=arr, chain_id=meta.get("chain", ""),
                      seed=int(meta.get("seed", 0)), n=n)
