"""Command-line interface: ``macdonald-chain <subcommand> [options]``.

Exit status: 0 success, 1 a verification check failed, 2 invalid
arguments, 3 configuration too large for the requested mode.
"""

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import convergence as conv
from .exact_chain import (
    DENSE_EXACT_MAX_K,
    DENSE_FLOAT_MAX_K,
    aux_kernel,
    aux_matrix,
    aux_matrix_via_operator,
    check_reversibility,
    hanlon_ell_matrix,
    hanlon_matrix,
    metropolis_matrix,
)
from .measures import as_exact, pi_ewens, pi_qt_table
from .partitions import Partition
from .samplers import RngStream, run_chain
from .spectral import SPECTRAL_MAX_K, eigen_table
from .verify import corrupt_matrix, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2, 3
TABLE_MAX_K = 30
EMPIRICAL_FULL_BIN_MAX = 10**4


class UsageError(Exception):
    pass


class Infeasible(Exception):
    pass


def _scalar(text, backend, name):
    if text is None:
        return None
    try:
        if backend == "exact":
            return as_exact(text)
        return float(Fraction(text)) if "/" in text else float(text)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"--{name}: {exc}") from None


def _qt(args):
    q = _scalar(args.q, args.backend, "q")
    t = _scalar(args.t, args.backend, "t")
    if not (q > 1 and t > 1):
        raise UsageError("--q and --t must both exceed 1")
    return q, t


def _alpha(args):
    a = _scalar(args.alpha, args.backend, "alpha")
    if a is None or a < 1:
        raise UsageError("--alpha must be at least 1")
    return a


def _k(args, minimum=1):
    if args.k is None or args.k < minimum:
        raise UsageError(f"--k must be an integer >= {minimum}")
    return args.k


def _start(args, k, default):
    if args.start is None:
        return Partition(default)
    try:
        lam = Partition.parse(args.start)
    except ValueError as exc:
        raise UsageError(f"--start: {exc}") from None
    if sum(lam) != k:
        raise UsageError(f"--start {args.start} is not a partition of {k}")
    return lam


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _dump(obj):
    return json.dumps(obj, indent=1, default=str) + "\n"


def cmd_table(args):
    k = _k(args)
    q, t = _qt(args)
    if args.backend == "exact" and k > TABLE_MAX_K:
        raise Infeasible(f"exact table capped at k={TABLE_MAX_K}; use --backend float")
    m = pi_qt_table(k, q, t, args.backend)
    _emit(m.to_json() + "\n" if args.format == "json" else m.to_csv(), args.out)


def _largest_part_rows(states, k, q, t):
    counts = np.zeros(k + 1)
    for s in states:
        counts[s[0]] += 1
    n = max(len(states), 1)
    exact = conv.binned_pi_qt(k, q, t).sum(axis=1) if q is not None else None
    rows = []
    for i in range(1, k + 1):
        rows.append([i, int(counts[i]), f"{counts[i] / n:.6f}", "" if exact is None else f"{exact[i]:.6f}"])
    return rows


def cmd_sample(args):
    k = _k(args)
    steps = args.steps if args.steps is not None else 100
    if steps < 0:
        raise UsageError("--steps must be non-negative")
    if args.stepper == "hanlon":
        params = {"alpha": _alpha(args)}
        if k < 2:
            raise UsageError("hanlon needs k >= 2")
        q = t = None
    else:
        q, t = _qt(args)
        params = {"q": q, "t": t}
        if args.stepper == "metropolis" and k < 2:
            raise UsageError("metropolis needs k >= 2")
    start = _start(args, k, (k,))
    rng = RngStream(args.seed, 0)
    trace = run_chain(start, steps, args.stepper, params, rng)
    _emit(trace.to_json() + "\n" if args.format == "json" else trace.to_csv(), args.out)
    occ = trace.occupancy()
    summary = {
        "k": k,
        "stepper": args.stepper,
        "params": {n: str(v) for n, v in params.items()},
        "seed": args.seed,
        "steps": steps,
        "start": str(start),
        "occupancy": {str(lam): c for lam, c in sorted(occ.items(), key=lambda kv: (-kv[1], kv[0]))},
    }
    exact_law = None
    if k <= 60:
        if args.stepper == "hanlon":
            exact_law = pi_ewens(k, params["alpha"], "float")
        else:
            exact_law = pi_qt_table(k, q, t, "float")
    if exact_law is not None and len(exact_law) <= EMPIRICAL_FULL_BIN_MAX:
        freq = np.zeros(len(exact_law))
        for lam, c in occ.items():
            freq[exact_law.index.index(lam)] = c
        freq /= freq.sum()
        summary["empirical_tv"] = conv.tv_distance(freq, exact_law.probs)
        summary["tv_method"] = "full partition histogram"
    elif q is not None:
        binned = conv.binned_pi_qt(k, q, t)
        emp = np.zeros_like(binned)
        for lam, c in occ.items():
            emp[lam[0], len(lam)] += c
        emp /= emp.sum()
        summary["empirical_tv"] = conv.tv_distance(emp.ravel(), binned.ravel())
        summary["tv_method"] = "binned by (largest part, number of parts); lower bound on true TV"
    if q is not None:
        rows = _largest_part_rows(trace.states, k, q, t)
        summary["largest_part"] = [
            {"part": r[0], "count": r[1], "empirical": float(r[2]), "exact": float(r[3])} for r in rows
        ]
        if args.hist:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["largest_part", "count", "empirical", "exact"])
            w.writerows(rows)
            _emit(buf.getvalue(), args.hist)
    if args.summary:
        _emit(_dump(summary), args.summary)
    elif args.out not in (None, "-"):
        _emit(_dump(summary), args.out + ".summary.json")


def _matrix_for(args, k):
    chain = args.chain
    if chain in ("hanlon", "hanlon-ell"):
        if args.backend != "exact":
            raise UsageError("hanlon matrices are exact only")
        alpha = _alpha(args)
        if k < 2:
            raise UsageError("hanlon needs k >= 2")
        if k > DENSE_EXACT_MAX_K:
            raise Infeasible(f"exact matrix capped at k={DENSE_EXACT_MAX_K}")
        if chain == "hanlon":
            return hanlon_matrix(k, alpha)
        return hanlon_ell_matrix(k, alpha, args.n or k)
    q, t = _qt(args)
    cap = DENSE_EXACT_MAX_K if args.backend == "exact" else DENSE_FLOAT_MAX_K
    if k > cap:
        raise Infeasible(f"{args.backend} matrix capped at k={cap}")
    if chain == "aux":
        return aux_matrix(k, q, t, args.backend)
    if chain == "aux-operator":
        if args.backend != "exact":
            raise UsageError("the operator construction is exact only")
        if k > 10:
            raise Infeasible("operator construction capped at k=10")
        return aux_matrix_via_operator(k, q, t, args.n or k)
    if k < 2:
        raise UsageError("metropolis needs k >= 2")
    return metropolis_matrix(k, q, t, args.backend)


def cmd_exact(args):
    k = _k(args)
    M = _matrix_for(args, k)
    _emit(M.to_json() + "\n" if args.format == "json" else M.to_csv(), args.out)


def cmd_spectrum(args):
    k = _k(args)
    if args.backend != "exact":
        raise UsageError("spectrum is exact only")
    q, t = _qt(args)
    if k > SPECTRAL_MAX_K:
        raise Infeasible(f"exact spectrum capped at k={SPECTRAL_MAX_K}")
    T = eigen_table(k, q, t)
    if args.format == "json":
        _emit(T.to_json() + "\n", args.out)
        return
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["partition", "eigenvalue", "decimal", "norm", "anchor"])
    for lam, b, nrm, a in zip(T.index, T.beta, T.norms, T.anchors):
        w.writerow([str(lam), str(b), f"{float(b):.10g}", str(nrm), a])
    _emit(buf.getvalue(), args.out)


def cmd_mix(args):
    k = _k(args, 2 if args.chain == "metropolis" else 1)
    q, t = _qt(args)
    start = _start(args, k, (k,))
    eps = args.eps
    if not 0 < eps < 1:
        raise UsageError("--eps must lie in (0, 1)")
    max_steps = args.steps if args.steps is not None else 200
    result = {"k": k, "q": str(q), "t": str(t), "chain": args.chain, "start": str(start), "eps": eps, "seed": args.seed}
    exact_ok = k <= (DENSE_EXACT_MAX_K if args.backend == "exact" else DENSE_FLOAT_MAX_K)
    if args.chain == "aux" and not exact_ok and k <= 60 and start == Partition((k,)):
        # one-step law from (k) is a single row; later steps need more rows
        exact_ok = True
    if exact_ok:
        if args.chain == "aux":
            M = aux_matrix(k, q, t, args.backend) if k <= DENSE_FLOAT_MAX_K else aux_kernel(k, q, t, args.backend)
        else:
            M = metropolis_matrix(k, q, t, args.backend)
        pi = pi_qt_table(k, q, t, args.backend)
        profile = []
        for ell in range(max_steps + 1):
            d = conv.power_dist(M, start, ell)
            tv = conv.tv_distance(d, pi, "float")
            profile.append({"ell": ell, "tv": float(tv)})
            if tv < eps:
                break
        else:
            raise Infeasible(f"TV still >= {eps} after {max_steps} steps")
        result.update(method="exact-matrix", mixing_time=profile[-1]["ell"], profile=profile)
    else:
        if k > 60:
            raise Infeasible("empirical mixing needs the target table; capped at k=60")
        chains = args.chains or 2000
        pi = pi_qt_table(k, q, t, "float")
        ell, err = conv.mixing_time(args.chain, start, eps, pi, max_steps, {"q": q, "t": t}, chains, args.seed)
        result.update(method="empirical", chains=chains, mixing_time=ell, mc_error=err)
    _emit(_dump(result), args.out)


def cmd_bound(args):
    k = _k(args)
    q, t = _qt(args)
    ell = args.ell if args.ell is not None else 2
    rep = conv.bound_report(k, q, t, ell)
    d = json.loads(rep.to_json())
    d["seed"] = args.seed
    if k <= 12 and args.backend == "exact":
        M = aux_matrix(k, q, t)
        pi = pi_qt_table(k, q, t)
        tv = conv.tv_distance(conv.power_dist(M, (k,), ell), pi)
        d["exact_4tv2_from_k"] = float(4 * tv**2)
        chi = conv.chi2_distance(conv.power_dist(M, (1,) * k, ell), pi)
        d["exact_chi2_from_1k"] = float(chi)
    _emit(_dump(d), args.out)


def cmd_hanlon(args):
    r = _k(args, 2)
    if args.backend != "exact":
        raise UsageError("hanlon is exact only")
    alpha = _alpha(args)
    if r > DENSE_EXACT_MAX_K:
        raise Infeasible(f"exact matrix capped at k={DENSE_EXACT_MAX_K}")
    H = hanlon_matrix(r, alpha)
    L = hanlon_ell_matrix(r, alpha, args.n or r)
    diff = max(abs(H.rows[i].get(j, 0) - L.rows[i].get(j, 0)) for i in range(len(H)) for j in range(len(H)))
    res = check_reversibility(H, pi_ewens(r, alpha))
    if args.format == "csv":
        _emit(H.to_csv(), args.out)
    else:
        _emit(
            _dump(
                {
                    "r": r,
                    "alpha": str(alpha),
                    "reversibility_residual": str(res),
                    "operator_matrix_difference": str(diff),
                    "matrix": json.loads(H.to_json()),
                }
            ),
            args.out,
        )


def cmd_verify(args):
    k = args.k if args.k is not None else 6
    if k > DENSE_EXACT_MAX_K:
        raise Infeasible(f"verification capped at k={DENSE_EXACT_MAX_K}")
    if args.backend != "exact":
        raise UsageError("verify is exact only")
    params = [(_scalar(args.q or "4", "exact", "q"), _scalar(args.t or "2", "exact", "t"))]
    if not all(q > 1 and t > 1 for q, t in params):
        raise UsageError("--q and --t must both exceed 1")
    alphas = [_alpha(args)] if args.alpha else [1, 2, Fraction(7, 2)]
    corrupt = corrupt_matrix if args.corrupt else None
    results = run_suite(k, params, alphas, corrupt, k_min=args.k_min)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "k", "params", "residual", "passed"])
        for r in results:
            w.writerow([r.check, r.k, r.params, r.residual, "pass" if r.passed else "FAIL"])
        _emit(buf.getvalue(), args.out)
    else:
        _emit(_dump({"passed": all(r.passed for r in results), "results": [r.to_dict() for r in results]}), args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


COMMANDS = {
    "table": cmd_table,
    "sample": cmd_sample,
    "exact": cmd_exact,
    "spectrum": cmd_spectrum,
    "mix": cmd_mix,
    "bound": cmd_bound,
    "hanlon": cmd_hanlon,
    "verify": cmd_verify,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, help="size of the partitions")
    common.add_argument("--q", default="4", help="rational q > 1, e.g. 4 or 7/2 (default 4)")
    common.add_argument("--t", default="2", help="rational t > 1 (default 2)")
    common.add_argument("--alpha", help="Ewens/Jack parameter alpha >= 1")
    common.add_argument("--start", help='start partition, e.g. "5,3,1,1"')
    common.add_argument("--steps", type=int, help="chain steps (sample) or step cap (mix)")
    common.add_argument("--chains", type=int, help="independent chains for Monte Carlo estimates")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--backend", choices=["exact", "float"], default="exact")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")

    parser = _Parser(prog="macdonald-chain", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("table", parents=[common], help="stationary probabilities of all partitions of k")
    p = sub.add_parser("sample", parents=[common], help="simulate a chain and summarize the trace")
    p.add_argument("--stepper", choices=["aux", "metropolis", "hanlon"], default="aux")
    p.add_argument("--summary", help="path for the JSON summary")
    p.add_argument("--hist", help="path for the largest-part histogram CSV")
    p = sub.add_parser("exact", parents=[common], help="write an exact transition matrix")
    p.add_argument("--chain", choices=["aux", "aux-operator", "metropolis", "hanlon", "hanlon-ell"], default="aux")
    p.add_argument("--n", type=int, help="number of variables for operator constructions")
    sub.add_parser("spectrum", parents=[common], help="eigenvalues and eigenvectors of the auxiliary chain")
    p = sub.add_parser("mix", parents=[common], help="distance profile and mixing time")
    p.add_argument("--chain", choices=["aux", "metropolis"], default="aux")
    p.add_argument("--eps", type=float, default=0.1)
    p = sub.add_parser("bound", parents=[common], help="upper and lower convergence bounds")
    p.add_argument("--ell", type=int, help="number of steps (default 2)")
    p = sub.add_parser("hanlon", parents=[common], help="Hanlon's chain and its operator form")
    p.add_argument("--n", type=int)
    p = sub.add_parser("verify", parents=[common], help="run the exact identity checks")
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return code or EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
