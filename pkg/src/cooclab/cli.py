"""Command-line interface.

Chains are named with a small spec language: ``barbell:k,path``,
``streak:n``, ``gnp:n,p,seed``, ``file:path`` (transition matrix or edge
list) and ``hmm:path``.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import time

import numpy as np

from . import bounds
from .cooccurrence import (
    StepWeights,
    asymptotic_expectation,
    estimate_cooc,
    format_coordinates,
    pmi_transform,
    read_coordinates,
)
from .errors import CoocLabError
from .experiments import (
    ExperimentSpec,
    fit_loglog_slope,
    parse_chain,
    parse_phi,
    records_to_csv,
    run_convergence,
    summarize,
    summary_svg,
    summary_to_csv,
)
from .markov import (
    format_vector,
    is_reversible,
    mixing_profile,
    pi_norm,
    regularity_check,
    spectral_expansion,
    stationary_distribution,
)
from .walks import WalkSampler, format_trajectory, read_trajectory
from .window_chain import verify_claims


def _weights(args) -> StepWeights:
    if args.alpha:
        return StepWeights(tuple(float(a) for a in args.alpha.split(",")))
    return StepWeights.uniform(args.T)


def _grid(text: str) -> tuple[int, ...]:
    return tuple(int(float(x)) for x in text.split(","))


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def cmd_analyze(args) -> int:
    chain = parse_chain(args.chain, allow_large=args.allow_large)
    P = chain.P
    reg = regularity_check(P)
    print(f"chain: {chain.label}")
    print(f"n: {chain.n}")
    print(f"irreducible: {reg.irreducible}")
    print(f"period: {reg.period}")
    print(f"regular: {reg.regular}")
    if not reg.regular:
        return 0
    pi = stationary_distribution(P, check=False)
    print(f"pi: min={pi.min():.6g} max={pi.max():.6g}")
    if args.pi_out:
        _emit(format_vector(pi), args.pi_out)
    lam = spectral_expansion(P, pi, check=False)
    print(f"reversible: {is_reversible(P, pi)}")
    print(f"lambda: {lam!r}")
    print(f"gap: {1.0 - lam!r}")
    tau = mixing_profile(P, pi, args.delta, args.t_max)[0]
    print(f"tau(delta={args.delta}): {tau}")
    return 0


def cmd_sample(args) -> int:
    chain = parse_chain(args.chain, allow_large=args.allow_large)
    phi = parse_phi(args.phi, chain.P)
    traj = WalkSampler(chain.P, phi, chain_id=chain.hash).sample(args.len, args.seed)
    _emit(format_trajectory(traj), args.out)
    return 0


def cmd_estimate(args) -> int:
    w = _weights(args)
    if os.path.isfile(args.source):
        traj = read_trajectory(args.source)
    else:
        chain = parse_chain(args.source, allow_large=args.allow_large)
        phi = parse_phi(args.phi, chain.P)
        traj = WalkSampler(chain.P, phi, chain_id=chain.hash).sample(args.len, args.seed)
    C = estimate_cooc(traj, w)
    header = dict(n=C.n, T=w.T, alpha=w.label(), seed=traj.seed, L=traj.L)
    _emit(format_coordinates(C.matrix, header), args.out)
    if args.ae_out:
        chain = parse_chain(args.source) if not os.path.isfile(args.source) else None
        if chain is None:
            raise CoocLabError("--ae-out needs a chain spec, not a trajectory file")
        AE = asymptotic_expectation(chain.P, stationary_distribution(chain.P), w)
        _emit(format_coordinates(AE, dict(n=chain.n, T=w.T, alpha=w.label())), args.ae_out)
    return 0


def cmd_converge(args) -> int:
    spec = ExperimentSpec(
        chain=args.chain, weights=_weights(args), L_grid=_grid(args.grid),
        trials=args.trials, base_seed=args.seed, phi=args.phi,
    )
    t0 = time.perf_counter()
    records = run_convergence(spec, workers=args.workers)
    _emit(records_to_csv(records), args.out)
    rows = summarize(records)
    if args.summary:
        _emit(summary_to_csv(rows), args.summary)
    if args.svg:
        _emit(summary_svg(rows), args.svg)
    if len(rows) >= 3:
        print(f"log-log slope: {fit_loglog_slope(rows):.4f}", file=sys.stderr)
    print(f"{len(records)} records in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return 0


def cmd_bound(args) -> int:
    if args.kind == "chernoff":
        v = bounds.matrix_chernoff_bound(args.k, args.d, args.eps, args.lam,
                                         args.phi_norm, complex_case=args.complex)
    else:
        v = bounds.cooc_bound(args.n, args.T, args.tau, args.L, args.eps, args.phi_norm)
    print(f"bound: {v!r}")
    print(f"clamped: {min(v, 1.0)!r}")
    return 0


def cmd_advise(args) -> int:
    L = bounds.recommended_length(args.n, args.T, args.tau, args.eps)
    print(f"recommended_length: {L}")
    return 0


def cmd_verify(args) -> int:
    chain = parse_chain(args.chain)
    phi = parse_phi(args.phi, chain.P)
    rep = verify_claims(chain.P, phi, args.T, _weights(args), delta=args.delta, seed=args.seed)
    print(rep.format_text())
    print()
    print(rep.format_kv())
    return 0 if rep.passed else 1


def cmd_chernoff_mc(args) -> int:
    chain = parse_chain(args.chain)
    P = chain.P
    pi = stationary_distribution(P)
    phi = parse_phi(args.phi, P, pi)
    lam = spectral_expansion(P, pi, check=False)
    f = bounds.make_centered_function(P, pi, args.d, args.seed)
    rows = bounds.chernoff_grid(P, phi, f, _grid(args.k), [float(e) for e in args.eps.split(",")],
                                args.trials, args.seed, lam, pi_norm(phi, pi))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("k", "eps", "p_hat", "ci_halfwidth", "bound"))
    for r in rows:
        w.writerow((r["k"], repr(r["eps"]), repr(r["p_hat"]), repr(r["ci_halfwidth"]), repr(r["bound"])))
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_pmi(args) -> int:
    C, meta = read_coordinates(args.cooc)
    M = pmi_transform(C, args.b)
    header = dict(meta)
    header["b"] = repr(args.b)
    _emit(format_coordinates(M, header), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cooclab", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def chain_args(sp, walk=False):
        sp.add_argument("chain", help="chain spec, e.g. streak:50 or barbell:50,0")
        sp.add_argument("--allow-large", action="store_true",
                        help="permit dense chains above 5000 states")
        if walk:
            sp.add_argument("--phi", default="stationary", help="stationary | uniform | point:i")

    def weight_args(sp, default_T=2):
        sp.add_argument("--T", type=int, default=default_T, help="window size (uniform weights)")
        sp.add_argument("--alpha", help="comma-separated step weights; overrides --T")

    sp = sub.add_parser("analyze", help="regularity, pi, lambda, mixing time")
    chain_args(sp)
    sp.add_argument("--delta", type=float, default=0.125)
    sp.add_argument("--t-max", type=int, default=100_000)
    sp.add_argument("--pi-out", help="write pi in the vector text format")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("sample", help="write one seeded trajectory")
    chain_args(sp, walk=True)
    sp.add_argument("--len", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("estimate", help="co-occurrence matrix from a chain or trajectory file")
    sp.add_argument("source", help="trajectory file or chain spec")
    sp.add_argument("--allow-large", action="store_true")
    sp.add_argument("--phi", default="stationary")
    sp.add_argument("--len", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    weight_args(sp)
    sp.add_argument("--out")
    sp.add_argument("--ae-out", help="also write the asymptotic expectation")
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("converge", help="error vs. trajectory length, records CSV")
    chain_args(sp, walk=True)
    weight_args(sp)
    sp.add_argument("--grid", default="10,100,1000,10000,100000,1000000")
    sp.add_argument("--trials", type=int, default=64)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out")
    sp.add_argument("--summary", help="write per-L median/quartile CSV")
    sp.add_argument("--svg", help="write a log-log plot of the summary")
    sp.set_defaults(func=cmd_converge)

    sp = sub.add_parser("bound", help="evaluate a tail bound")
    sp.add_argument("kind", choices=("chernoff", "cooc"))
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--lam", type=float, default=0.0)
    sp.add_argument("--complex", action="store_true", help="Hermitian prefactor 4")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--T", type=int, default=1)
    sp.add_argument("--tau", type=int, default=1)
    sp.add_argument("--L", type=int, default=2)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--phi-norm", type=float, default=1.0)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("advise", help="recommended trajectory length")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--T", type=int, required=True)
    sp.add_argument("--tau", type=int, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.set_defaults(func=cmd_advise)

    sp = sub.add_parser("verify", help="check window-chain properties")
    chain_args(sp, walk=True)
    weight_args(sp, default_T=1)
    sp.add_argument("--delta", type=float, default=0.125)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("chernoff-mc", help="empirical tail vs. matrix Chernoff bound")
    chain_args(sp, walk=True)
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--k", default="100,1000,10000")
    sp.add_argument("--eps", default="0.1,0.2,0.4")
    sp.add_argument("--trials", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_chernoff_mc)

    sp = sub.add_parser("pmi", help="truncated PMI of a co-occurrence coordinate file")
    sp.add_argument("cooc")
    sp.add_argument("--b", type=float, default=1.0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_pmi)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CoocLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
