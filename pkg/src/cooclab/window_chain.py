"""The sliding-window chain over (T+1)-tuples and checks of its properties.

A walk v_1, v_2, ... on P induces windows X_i = (v_i, ..., v_{i+T}), and the
windows themselves form a walk on a chain Q whose states are the T-step
walks of P with positive probability. The co-occurrence error C - AE[C] is
exactly 2/(L-T) times the sum of a centered matrix function f over those
windows, which is what lets a matrix Chernoff bound for Q control C.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .cooccurrence import StepWeights, asymptotic_expectation, estimate_cooc
from .errors import (
    NotRegularError,
    ShapeMismatchError,
    StateSpaceTooLargeError,
    UnknownWindowError,
)
from .markov import (
    mixing_profile,
    pi_norm,
    regularity_check,
    spectral_expansion,
    spectral_norm,
    stationary_distribution,
)
from .walks import sample_walk

MAX_WINDOW_STATES = 1_000_000


@dataclass
class WindowChain:
    T: int
    base_n: int
    P: np.ndarray
    pi: np.ndarray
    states: list[tuple[int, ...]]
    Q: sp.csr_matrix
    sigma: np.ndarray
    index: dict[tuple[int, ...], int]

    @property
    def size(self) -> int:
        return len(self.states)

    def Q_dense(self) -> np.ndarray:
        return self.Q.toarray()


def _enumerate_walks(P: np.ndarray, T: int) -> list[tuple[int, ...]]:
    succ = [np.flatnonzero(row > 0).tolist() for row in P]
    out = []

    def extend(prefix):
        if len(prefix) == T + 1:
            out.append(tuple(prefix))
            return
        for w in succ[prefix[-1]]:
            prefix.append(w)
            extend(prefix)
            prefix.pop()

    for u in range(P.shape[0]):
        extend([u])
    return out


def _path_weights(P: np.ndarray, start: np.ndarray, states) -> np.ndarray:
    S = np.array(states, dtype=np.int64)
    w = start[S[:, 0]].copy()
    for j in range(S.shape[1] - 1):
        w *= P[S[:, j], S[:, j + 1]]
    return w


def build_window_chain(P: np.ndarray, pi: np.ndarray | None = None, T: int = 1) -> WindowChain:
    """Enumerate positive-probability T-step walks and build Q and sigma.

    States are ordered lexicographically. Q maps (u_0..u_T) to
    (u_1..u_T, w) with probability P(u_T, w); sigma(u_0..u_T) is
    pi(u_0) P(u_0, u_1) ... P(u_{T-1}, u_T).
    """
    n = P.shape[0]
    if T < 1:
        raise ValueError("T must be >= 1")
    if n ** (T + 1) > MAX_WINDOW_STATES:
        raise StateSpaceTooLargeError(
            f"{n}^{T + 1} candidate windows exceeds the cap of {MAX_WINDOW_STATES}"
        )
    if not regularity_check(P).regular:
        raise NotRegularError("window chains are only built for regular P")
    if pi is None:
        pi = stationary_distribution(P, check=False)
    states = _enumerate_walks(P, T)
    index = {s: k for k, s in enumerate(states)}
    rows, cols, vals = [], [], []
    for k, s in enumerate(states):
        tail = s[1:]
        last = s[-1]
        for w in np.flatnonzero(P[last] > 0):
            rows.append(k)
            cols.append(index[tail + (int(w),)])
            vals.append(P[last, w])
    m = len(states)
    Q = sp.csr_matrix((vals, (rows, cols)), shape=(m, m))
    sigma = _path_weights(P, np.asarray(pi), states)
    residual = np.max(np.abs(Q.T @ sigma - sigma))
    if residual > 1e-10 or abs(sigma.sum() - 1.0) > 1e-10:
        raise AssertionError(f"sigma is not stationary for Q (residual {residual:.3e})")
    return WindowChain(T=T, base_n=n, P=P, pi=np.asarray(pi), states=states,
                       Q=Q, sigma=sigma, index=index)


def window_initial_distribution(wc: WindowChain, phi) -> np.ndarray:
    """rho(u_0..u_T) = phi(u_0) P(u_0, u_1) ... P(u_{T-1}, u_T)."""
    phi = np.asarray(phi, dtype=np.float64)
    if phi.shape != (wc.base_n,):
        raise ShapeMismatchError(f"phi must have length {wc.base_n}")
    return _path_weights(wc.P, phi, wc.states)


def _indicator_part(X, w: StepWeights, n: int) -> np.ndarray:
    M = np.zeros((n, n))
    u0 = X[0]
    for r, alpha in enumerate(w.alpha, start=1):
        M[u0, X[r]] += alpha / 2.0
        M[X[r], u0] += alpha / 2.0
    return M


def window_matrix_function(wc: WindowChain, w: StepWeights, X, AE: np.ndarray | None = None) -> np.ndarray:
    """f(X) = 1/2 (sum_r (alpha_r/2)(E[u_0, u_r] + E[u_r, u_0]) - AE[C])."""
    X = tuple(int(x) for x in X)
    if w.T != wc.T:
        raise ShapeMismatchError(f"weights have T={w.T}, window chain has T={wc.T}")
    if X not in wc.index:
        raise UnknownWindowError(f"{X} is not a positive-probability window")
    if AE is None:
        AE = asymptotic_expectation(wc.P, wc.pi, w)
    return 0.5 * (_indicator_part(X, w, wc.base_n) - AE)


def all_window_functions(wc: WindowChain, w: StepWeights) -> np.ndarray:
    """Stack of f(X) for every window, shape (|S|, n, n)."""
    AE = asymptotic_expectation(wc.P, wc.pi, w)
    return np.stack([window_matrix_function(wc, w, X, AE) for X in wc.states])


def decomposition_residual(states: np.ndarray, wc: WindowChain, w: StepWeights) -> float:
    """max |(C - AE) - 2/(L-T) sum_i f(X_i)| over entries, for one trajectory."""
    states = np.asarray(states)
    L, T = states.shape[0], w.T
    C = estimate_cooc(states, w, n=wc.base_n).dense()
    AE = asymptotic_expectation(wc.P, wc.pi, w)
    F = all_window_functions(wc, w)
    idx = np.array([wc.index[tuple(int(v) for v in states[i : i + T + 1])]
                    for i in range(L - T)])
    counts = np.bincount(idx, minlength=wc.size).astype(np.float64)
    total = np.tensordot(counts, F, axes=1)
    return float(np.max(np.abs((C - AE) - (2.0 / (L - T)) * total)))


@dataclass
class ClaimCheck:
    name: str
    passed: bool
    value: float
    tolerance: float


@dataclass
class ClaimReport:
    checks: list[ClaimCheck] = field(default_factory=list)
    info: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, value: float, tolerance: float) -> None:
        self.checks.append(ClaimCheck(name, bool(passed), float(value), float(tolerance)))

    def __getitem__(self, name: str) -> ClaimCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def format_text(self) -> str:
        width = max(len(c.name) for c in self.checks)
        lines = [
            f"{c.name:<{width}}  {'PASS' if c.passed else 'FAIL'}  "
            f"value={c.value:.6g}  tol={c.tolerance:.3g}"
            for c in self.checks
        ]
        lines += [f"{k:<{width}}  info  {v:.10g}" for k, v in self.info.items()]
        return "\n".join(lines)

    def format_kv(self) -> str:
        lines = []
        for c in self.checks:
            lines.append(f"{c.name}.passed={str(c.passed).lower()}")
            lines.append(f"{c.name}.value={c.value!r}")
            lines.append(f"{c.name}.tolerance={c.tolerance!r}")
        lines += [f"info.{k}={v!r}" for k, v in self.info.items()]
        lines.append(f"all_passed={str(self.passed).lower()}")
        return "\n".join(lines)


def verify_claims(P: np.ndarray, phi, T: int, w: StepWeights | None = None,
                  delta: float = 0.125, walk_len: int = 200, seed: int = 0) -> ClaimReport:
    """Numerically check the window-chain properties for one (P, phi, T).

    Checks: Q regular with sigma stationary; rho and its sigma-norm; the
    mixing-time relations tau(Q) <= tau(P) + T - 1 and tau(Q) <= tau(P) + T
    (a point-mass window needs T steps to forget its fixed entries, so the
    first is expected to fail with tau(Q) = tau(P) + T); f centered under sigma
    and bounded in 2-norm; lambda(Q^tau(Q)) <= sqrt(2 delta); and the exact
    decomposition of C - AE over the windows of one sampled walk.
    """
    if w is None:
        w = StepWeights.uniform(T)
    phi = np.asarray(phi, dtype=np.float64)
    pi = stationary_distribution(P)
    wc = build_window_chain(P, pi, T)
    rep = ClaimReport()
    Qd = wc.Q_dense()

    rep.add("q_regular", regularity_check(Qd).regular, float(regularity_check(Qd).period), 1)
    stat_res = float(np.max(np.abs(Qd.T @ wc.sigma - wc.sigma)))
    rep.add("sigma_stationary", stat_res <= 1e-10, stat_res, 1e-10)
    sig_err = abs(wc.sigma.sum() - 1.0)
    rep.add("sigma_sums_to_one", sig_err <= 1e-10, sig_err, 1e-10)

    rho = window_initial_distribution(wc, phi)
    rho_err = abs(rho.sum() - 1.0)
    rep.add("rho_sums_to_one", rho_err <= 1e-10, rho_err, 1e-10)
    norm_err = abs(pi_norm(rho, wc.sigma) - pi_norm(phi, pi))
    rep.add("rho_norm_identity", norm_err <= 1e-10, norm_err, 1e-10)

    tau_p = mixing_profile(P, pi, delta)[0]
    tau_q, Q_tau, _ = mixing_profile(wc.Q, wc.sigma, delta)
    rep.add("tau_q_le_tau_p_plus_T_minus_1", tau_q <= tau_p + T - 1,
            tau_q - (tau_p + T - 1), 0)
    rep.add("tau_q_le_tau_p_plus_T", tau_q <= tau_p + T, tau_q - (tau_p + T), 0)

    F = all_window_functions(wc, w)
    mean = np.tensordot(wc.sigma, F, axes=1)
    mean_err = float(np.max(np.abs(mean)))
    rep.add("f_zero_mean", mean_err <= 1e-10, mean_err, 1e-10)
    fmax = max(spectral_norm(f) for f in F)
    rep.add("f_norm_le_1", fmax <= 1.0 + 1e-12, fmax, 1.0)

    bound = math.sqrt(2.0 * delta)
    lam_sub = spectral_expansion(Q_tau, wc.sigma)
    rep.add("subchain_expansion", lam_sub <= bound + 1e-8, lam_sub, bound)

    traj = sample_walk(P, phi, walk_len, seed)
    dres = decomposition_residual(traj.states, wc, w)
    rep.add("decomposition_identity", dres <= 1e-12, dres, 1e-12)

    rep.info.update(
        window_states=float(wc.size),
        lambda_p=spectral_expansion(P, pi, check=False),
        lambda_q=spectral_expansion(Qd, wc.sigma, check=False),
        tau_p=float(tau_p),
        tau_q=float(tau_q),
    )
    return rep
