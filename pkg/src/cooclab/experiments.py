"""Convergence experiments: many seeded walks per length, error summaries."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import chains
from .cooccurrence import (
    StepWeights,
    asymptotic_expectation,
    error_2norm,
    estimate_cooc,
    project_states,
)
from .errors import DegenerateInputError, EmptyInputError, InputError
from .markov import as_prob_vector, stationary_distribution
from .rng import content_hash, hash_word, mix_seed
from .walks import WalkSampler

CSV_COLUMNS = ("chain", "n", "T", "L", "trial", "seed", "error_2norm")
DEFAULT_GRID = tuple(10**e for e in range(1, 7))


@dataclass
class Chain:
    """A transition matrix with a label and an optional observable projection."""

    label: str
    P: np.ndarray
    observable_map: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.P.shape[0]

    @property
    def n_observed(self) -> int:
        return self.n if self.observable_map is None else int(self.observable_map.max()) + 1

    @property
    def hash(self) -> str:
        return content_hash(self.P)


def parse_chain(spec: str, allow_large: bool = False) -> Chain:
    """Build a chain from ``barbell:k,path``, ``streak:n``, ``gnp:n,p,seed``,
    ``file:path`` or ``hmm:path``."""
    kind, _, arg = spec.partition(":")
    args = arg.split(",") if arg else []
    if kind == "barbell" and len(args) == 2:
        P = chains.barbell(int(args[0]), int(args[1]))
    elif kind == "streak" and len(args) == 1:
        P = chains.winning_streak(int(args[0]))
    elif kind == "gnp" and len(args) == 3:
        P = chains.erdos_renyi_walk(int(args[0]), float(args[1]), int(args[2]))
    elif kind == "file" and arg:
        P = chains.load_matrix_or_edges(arg, allow_large=allow_large)
    elif kind == "hmm" and arg:
        P, obs = chains.hmm_joint_chain(chains.read_hmm(arg))
        return Chain(spec, P, obs)
    else:
        raise InputError(f"cannot parse chain spec {spec!r}")
    return Chain(spec, P)


def parse_phi(spec: str, P: np.ndarray, pi: np.ndarray | None = None) -> np.ndarray:
    n = P.shape[0]
    if spec == "stationary":
        return pi if pi is not None else stationary_distribution(P)
    if spec == "uniform":
        return as_prob_vector(np.full(n, 1.0 / n))
    if spec.startswith("point:"):
        i = int(spec.split(":", 1)[1])
        if not 0 <= i < n:
            raise InputError(f"point mass index {i} out of range")
        e = np.zeros(n)
        e[i] = 1.0
        return as_prob_vector(e)
    raise InputError(f"unknown initial distribution {spec!r}")


@dataclass
class ExperimentSpec:
    chain: str
    weights: StepWeights = field(default_factory=lambda: StepWeights.uniform(2))
    L_grid: tuple[int, ...] = DEFAULT_GRID
    trials: int = 64
    base_seed: int = 0
    phi: str = "stationary"

    def __post_init__(self):
        grid = tuple(int(L) for L in self.L_grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise InputError("L_grid must be strictly increasing")
        if not grid or grid[0] <= self.weights.T:
            raise InputError("every L must exceed T")
        if self.trials < 1:
            raise InputError("trials must be >= 1")
        self.L_grid = grid


@dataclass(frozen=True)
class ExperimentRecord:
    chain: str
    n: int
    T: int
    L: int
    trial: int
    seed: int
    error: float

    def row(self) -> tuple:
        return (self.chain, self.n, self.T, self.L, self.trial, self.seed, repr(self.error))


def derive_seed(base_seed: int, chain_hash: str, L: int, trial: int) -> int:
    return mix_seed(base_seed, hash_word(chain_hash), L, trial)


class _Runner:
    def __init__(self, spec: ExperimentSpec, chain: Chain):
        self.spec = spec
        self.chain = chain
        pi = stationary_distribution(chain.P)
        self.phi = parse_phi(spec.phi, chain.P, pi)
        self.sampler = WalkSampler(chain.P, self.phi, chain_id=chain.hash)
        AE = asymptotic_expectation(chain.P, pi, spec.weights)
        if chain.observable_map is not None:
            AE = project_states(AE, chain.observable_map)
        self.AE = AE
        self.hash_word = chain.hash

    def error_for(self, L: int, seed: int) -> float:
        traj = self.sampler.sample(L, seed)
        C = estimate_cooc(traj, self.spec.weights)
        Cm = C.dense()
        if self.chain.observable_map is not None:
            Cm = project_states(Cm, self.chain.observable_map)
        return error_2norm(Cm, self.AE)

    def task(self, L: int, trial: int) -> ExperimentRecord:
        seed = derive_seed(self.spec.base_seed, self.hash_word, L, trial)
        return ExperimentRecord(
            chain=self.chain.label, n=self.chain.n_observed, T=self.spec.weights.T,
            L=L, trial=trial, seed=seed, error=self.error_for(L, seed),
        )


def run_convergence(spec: ExperimentSpec, workers: int = 1,
                    chain: Chain | None = None) -> list[ExperimentRecord]:
    """Sample ``trials`` walks at every L and record ||C - AE[C]||_2.

    Trial seeds depend only on (base_seed, chain content, L, trial), so the
    records do not depend on ``workers``.
    """
    if chain is None:
        chain = parse_chain(spec.chain)
    runner = _Runner(spec, chain)
    jobs = [(L, t) for L in spec.L_grid for t in range(spec.trials)]
    if workers <= 1:
        records = [runner.task(L, t) for L, t in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda job: runner.task(*job), jobs))
    records.sort(key=lambda r: (r.chain, r.L, r.trial))
    return records


def recompute_error(record: ExperimentRecord, spec: ExperimentSpec,
                    chain: Chain | None = None) -> float:
    if chain is None:
        chain = parse_chain(record.chain)
    return _Runner(spec, chain).error_for(record.L, record.seed)


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def records_from_csv(text: str) -> list[ExperimentRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    return [
        ExperimentRecord(c, int(n), int(T), int(L), int(t), int(s), float(e))
        for c, n, T, L, t, s, e in rows[1:]
    ]


@dataclass(frozen=True)
class SummaryRow:
    chain: str
    n: int
    T: int
    L: int
    trials: int
    median: float
    q25: float
    q75: float


def summarize(records) -> list[SummaryRow]:
    """Median and quartiles (linear interpolation) of the error per (chain, L)."""
    records = list(records)
    if not records:
        raise EmptyInputError("no records to summarize")
    groups: dict[tuple[str, int], list[ExperimentRecord]] = {}
    for r in records:
        groups.setdefault((r.chain, r.L), []).append(r)
    out = []
    for (chain, L) in sorted(groups):
        g = groups[(chain, L)]
        e = np.array([r.error for r in g])
        q25, med, q75 = np.percentile(e, [25, 50, 75])
        out.append(SummaryRow(chain, g[0].n, g[0].T, L, len(g), float(med), float(q25), float(q75)))
    return out


def summary_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("chain", "n", "T", "L", "trials", "median", "quartile_25", "quartile_75"))
    for r in rows:
        w.writerow((r.chain, r.n, r.T, r.L, r.trials, repr(r.median), repr(r.q25), repr(r.q75)))
    return buf.getvalue()


def fit_loglog_slope(rows) -> float:
    """Least-squares slope of ln(median error) against ln(L)."""
    pts = {(r.L, r.median) for r in rows if r.median > 0}
    Ls = sorted({L for L, _ in pts})
    if len(Ls) < 3 or len(pts) != len(Ls):
        raise DegenerateInputError("need >= 3 distinct L with one positive median each")
    x = np.log(np.array([L for L, _ in sorted(pts)], dtype=np.float64))
    y = np.log(np.array([m for _, m in sorted(pts)]))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def summary_svg(rows, width: int = 640, height: int = 420) -> str:
    """Log-log plot of medians with quartile bars, one polyline per chain."""
    rows = [r for r in rows if r.median > 0 and r.q25 > 0]
    if not rows:
        raise EmptyInputError("nothing to plot")
    lx = [math.log10(r.L) for r in rows]
    ly = [math.log10(v) for r in rows for v in (r.q25, r.q75)]
    x0, x1 = min(lx), max(lx) + 1e-9
    y0, y1 = min(ly), max(ly) + 1e-9
    pad = 50

    def X(L):
        return pad + (math.log10(L) - x0) / (x1 - x0) * (width - 2 * pad)

    def Y(v):
        return height - pad - (math.log10(v) - y0) / (y1 - y0) * (height - 2 * pad)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<text x="{pad}" y="20" font-size="12">median error, quartile bars (log-log)</text>']
    for c, chain in enumerate(sorted({r.chain for r in rows})):
        col = colors[c % len(colors)]
        pts = [r for r in rows if r.chain == chain]
        line = " ".join(f"{X(r.L):.1f},{Y(r.median):.1f}" for r in pts)
        parts.append(f'<polyline fill="none" stroke="{col}" points="{line}"/>')
        for r in pts:
            parts.append(f'<line x1="{X(r.L):.1f}" x2="{X(r.L):.1f}" y1="{Y(r.q25):.1f}" '
                         f'y2="{Y(r.q75):.1f}" stroke="{col}"/>')
        parts.append(f'<text x="{width - 200}" y="{40 + 15 * c}" fill="{col}" font-size="12">{chain}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
