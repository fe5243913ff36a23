"""Command-line front end.

Every subcommand writes rows as CSV or JSON lines.  Options may also come
from a flat ``key = value`` file given with ``--config``; flags on the
command line win.  Keys are option names with dashes or underscores.

Exit codes: 0 success, 2 usage error, 3 failed verification,
4 a sum or estimate that could not be certified.

The environment variable ``QDEFORM_THREADS`` sets the worker count for
the commands that can split work across processes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import fock, khintchine, orthopoly, partitions, qconv, qexact, verify
from .cumulants import FAMILIES, STATISTICS, positivity_scan
from .errors import DomainError, NonConvergenceError, PoleError, VerificationError
from .jackson import q_moment_disc

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_CONVERGENCE = 0, 2, 3, 4
THREADS_ENV = "QDEFORM_THREADS"


class UsageError(Exception):
    pass


def parse_q(text: str):
    """``symbolic`` -> ``None``; ``a/b`` or an integer -> exact; otherwise float."""
    text = text.strip()
    if text.lower() in ("symbolic", "none", ""):
        return None
    try:
        if "/" in text or text.lstrip("-").isdigit():
            return Fraction(text)
        return float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number or 'symbolic': {text!r}") from exc


def parse_list(text: str) -> list:
    return [parse_q(t) for t in text.split(",") if t.strip()]


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _need_numeric(q, what):
    if q is None:
        raise UsageError(f"{what} needs a numeric q; symbolic mode is not supported")
    return float(q)


def _plain(v):
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        return v
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    return str(v)


# ---------------------------------------------------------------------------
# commands; each returns (rows, exit status)
# ---------------------------------------------------------------------------

_QEXACT_OPS = ("qint", "qfact", "binom", "poch", "exp-duality")


def cmd_qexact(a):
    if a.op == "qint":
        val = qexact.q_integer(a.n)
    elif a.op == "qfact":
        val = qexact.q_factorial(a.n)
    elif a.op == "binom":
        val = qexact.gauss_binomial(a.n, a.k)
    elif a.op == "poch":
        val = qexact.q_pochhammer(a.n)
    else:
        prod = qexact.e_q_series(a.n) * qexact.E_q_series(a.n).negate_argument()
        ok = prod == 1
        return [{"op": a.op, "order": a.n, "product_is_one": ok}], EXIT_OK if ok else EXIT_VERIFY
    row = {"op": a.op, "n": a.n, "k": a.k, "value": val}
    if a.q is not None:
        row["q"] = a.q
        row["at_q"] = qexact.eval_at_q(val, a.q)
    return [row], EXIT_OK


def cmd_partitions(a):
    if a.stats == "rows":
        return list(partitions.partition_stats_rows(2 * a.n)), EXIT_OK
    if a.stats == "histogram":
        hist = partitions.pair_stat_histogram(a.n)
        return [{"cr": cr, "nest": ne, "count": c} for (cr, ne), c in sorted(hist.items())], EXIT_OK
    return [{"n": a.n, "stat": st, "polynomial": partitions.generating_polynomial(a.n, st)}
            for st in ("cr", "nest", "e0", "ip_half")], EXIT_OK


def cmd_cumulants(a):
    recs = positivity_scan((a.family1, a.params1), (a.family2, a.params2), a.q_grid, a.depth,
                           statistic=a.statistic, workers=_threads())
    return [json.loads(r.to_json()) for r in recs], EXIT_OK


_ORTHO = {
    "continuous": orthopoly.continuous_q_hermite,
    "discrete_I": orthopoly.discrete_q_hermite_I,
    "discrete_II": orthopoly.discrete_q_hermite_II,
    "standard_I": orthopoly.standard_q_hermite_I,
    "standard_II": orthopoly.standard_q_hermite_II,
}


def cmd_ortho(a):
    if a.moments:
        jac = orthopoly.jacobi_data(a.family, max(a.n, 1))
        rows = []
        for k in range(0, 2 * a.n + 1, 2):
            m = orthopoly.moments_from_jacobi(jac, k)
            rows.append({"family": a.family, "moment": k,
                         "value": m if a.q is None else qexact.eval_at_q(m, a.q)})
        return rows, EXIT_OK
    poly = _ORTHO[a.family](a.n)
    coeffs = poly.coeffs if a.q is None else poly.at_q(a.q)
    return [{"family": a.family, "n": a.n, "power": k, "coefficient": c} for k, c in enumerate(coeffs)], EXIT_OK


def cmd_jackson(a):
    qv = _need_numeric(a.q, "jackson")
    weight = orthopoly.weight_type_I if a.weight == "I" else orthopoly.weight_type_II
    return [{"weight": a.weight, "q": qv, "n": k, "moment": q_moment_disc(lambda x: weight(x, qv), k, qv)}
            for k in range(a.n + 1)], EXIT_OK


def cmd_conv(a):
    if len(a.a) != len(a.b):
        raise UsageError("--a and --b need the same length")
    out = qconv.ck_convolve_moments(a.a, a.b, a.q)
    return [{"n": k, "value": v} for k, v in enumerate(out.values)], EXIT_OK


def _build(a, dim_h=1, cutoff=None):
    backend = "float" if isinstance(a.q, float) or isinstance(a.s, float) else "exact"
    return fock.build_fock(dim_h, a.cutoff if cutoff is None else cutoff, a.q, a.s, a.flavor, backend)


def cmd_fock(a):
    if a.action == "wick":
        rep = _build(a, 1, max(a.n, a.cutoff or 0))
        val = fock.vacuum_wick(rep, [[1]] * (2 * a.n))
        row = {"flavor": a.flavor, "n": a.n, "q": a.q if a.q is not None else "symbolic", "moment": val}
        if a.flavor == "qdisc":
            target = orthopoly.mu_qI_moment(a.n)
            row["product"] = "".join(f"[{2 * k - 1}]" for k in range(1, a.n + 1))
            if a.q is None:
                ok = val.as_qpoly() == target
            else:
                ok = abs(float(val) - float(qexact.eval_at_q(target, a.q))) < 1e-9 * max(1.0, abs(float(val)))
            row["matches_product"] = ok
            return [row], EXIT_OK if ok else EXIT_VERIFY
        return [row], EXIT_OK
    if a.action == "residual":
        rep = _build(a, a.dim, a.cutoff or 5)
        vecs = [[int(i == j) for j in range(a.dim)] for i in range(a.dim)]
        if rep.backend == "float":
            vecs = [[float(x) for x in v] for v in vecs]
        worst = max(fock.commutation_residual(rep, f, g) for f in vecs for g in vecs)
        ok = worst == 0 if rep.backend == "exact" else worst < a.tol
        return [{"flavor": a.flavor, "q": a.q, "dim_h": a.dim, "cutoff": rep.cutoff, "backend": rep.backend,
                 "residual": worst, "passed": ok}], EXIT_OK if ok else EXIT_VERIFY
    if a.action == "norm":
        qv = _need_numeric(a.q, "fock norm")
        s = None if a.s is None else float(a.s)
        rep = fock.build_fock(1, a.cutoff or 30, qv, s, a.flavor, "float")
        est = fock.gaussian_norm_estimate(rep, [1.0])
        return [dict(est.to_json(), flavor=a.flavor, q=qv)], EXIT_OK
    # bm
    return [{"t": a.t, "moment": 2 * a.n, "q": a.q if a.q is not None else "symbolic",
             "value": fock.bm_moment(a.t, 2 * a.n, a.q)}], EXIT_OK


def cmd_khintchine(a):
    q = None if a.flavor in ("boolean", "free") else _need_numeric(a.q, f"flavor {a.flavor}")
    rep = khintchine.ratio_experiment(a.flavor, a.N, a.size, a.cutoff, q, a.trials, a.seed)
    row = json.loads(rep.to_json())
    if not a.per_trial:
        row.pop("per_trial")
    status = EXIT_OK
    if a.flavor == "boolean" and any(abs(r - 1) > 1e-9 for r in rep.per_trial):
        status = EXIT_VERIFY
    return [row], status


_VERIFY_ARGS = {
    "partitions": {"n": "n"},
    "wick": {"n": "max_two_n", "dim": "max_dim"},
    "moments": {"n": "n"},
    "commutation": {"cutoff": "cutoff", "dim": "dim"},
    "exponential": {"n": "order"},
    "discrete": {"n": "n"},
    "continuous": {"n": "n"},
    "conv": {"n": "degree"},
    "khintchine": {"trials": "trials", "seed": "seed"},
    "limits": {"n": "max_n", "cutoff": "norm_cutoff"},
    "positivity": {"n": "depth"},
}


def _check_rows(res):
    return [dict(target=res.target, **r) for r in res.rows]


def cmd_verify(a):
    kw = {dst: getattr(a, src) for src, dst in _VERIFY_ARGS[a.target].items() if getattr(a, src) is not None}
    res = verify.CHECKS[a.target](**kw)
    return _check_rows(res), EXIT_OK if res.passed else EXIT_VERIFY


def cmd_verify_all(a):
    rows, ok = [], True
    for name, fn in verify.CHECKS.items():
        res = fn()
        ok &= res.passed
        rows.append({"target": name, "passed": res.passed, "summary": res.summary,
                     "checks": len(res.rows), "failed": sum(not r["passed"] for r in res.rows)})
    return rows, EXIT_OK if ok else EXIT_VERIFY


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="flat key = value file; command-line flags override it")
    p.add_argument("--format", choices=("csv", "jsonl"), help="output format (default depends on command)")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")
    return p


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    common = _common()
    parser = argparse.ArgumentParser(prog="qdeform", description="q-deformed probability toolkit",
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    def add(name, fn, fmt, **kw):
        p = sub.add_parser(name, parents=[common], formatter_class=argparse.ArgumentDefaultsHelpFormatter, **kw)
        p.set_defaults(func=fn, default_format=fmt)
        subs[name] = p
        return p

    p = add("qexact", cmd_qexact, "jsonl", help="q-integers, factorials, binomials, Pochhammer, exponentials")
    p.add_argument("--op", choices=_QEXACT_OPS, default="qint")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--q", type=parse_q, default=None, help="evaluate at this q (default: symbolic)")

    p = add("partitions", cmd_partitions, "csv", help="pair-partition statistics")
    p.add_argument("--n", type=int, default=3, help="number of pairs")
    p.add_argument("--stats", choices=("rows", "histogram", "generating"), default="rows")

    p = add("cumulants", cmd_cumulants, "jsonl", help="Hankel positivity scan of q-cumulant convolutions")
    p.add_argument("--family1", choices=sorted(FAMILIES), default="bernoulli")
    p.add_argument("--params1", type=parse_list, default=[Fraction(1)])
    p.add_argument("--family2", choices=sorted(FAMILIES), default="gaussian")
    p.add_argument("--params2", type=parse_list, default=[Fraction(1)])
    p.add_argument("--q-grid", type=parse_list, default=[Fraction(0), Fraction(1, 2), Fraction(1)])
    p.add_argument("--depth", type=int, default=5)
    p.add_argument("--statistic", choices=STATISTICS, default="biane_cr")

    p = add("ortho", cmd_ortho, "csv", help="q-Hermite coefficients and moments")
    p.add_argument("--family", choices=sorted(_ORTHO), default="continuous")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--q", type=parse_q, default=None)
    p.add_argument("--moments", action="store_true", help="list moments 0, 2, .., 2n instead")

    p = add("jackson", cmd_jackson, "csv", help="Jackson-integral moments of the discrete weights")
    p.add_argument("--weight", choices=("I", "II"), default="I")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--q", type=parse_q, default=0.5)

    p = add("conv", cmd_conv, "csv", help="moment sequence of a q-convolution")
    p.add_argument("--a", type=parse_list, required=True, help="comma-separated moments m_0, m_1, ..")
    p.add_argument("--b", type=parse_list, required=True)
    p.add_argument("--q", type=parse_q, default=None)

    p = add("fock", cmd_fock, "jsonl", help="truncated Fock-space computations")
    p.add_argument("action", choices=("wick", "residual", "norm", "bm"))
    p.add_argument("--flavor", choices=fock.FLAVORS, default="qdisc")
    p.add_argument("--n", type=int, default=2, help="half the number of Gaussians")
    p.add_argument("--q", type=parse_q, default=None)
    p.add_argument("--s", type=parse_q, default=None, help="generic flavor only")
    p.add_argument("--dim", type=int, default=3, help="one-particle dimension (residual)")
    p.add_argument("--cutoff", type=int, default=None)
    p.add_argument("--t", type=parse_q, default=Fraction(1), help="time (bm)")
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("khintchine", cmd_khintchine, "jsonl", help="matrix Khintchine ratio experiment")
    p.add_argument("--flavor", choices=khintchine.FLAVORS, default="boolean")
    p.add_argument("--N", type=int, default=4)
    p.add_argument("--size", type=int, default=3, help="coefficient matrix size")
    p.add_argument("--cutoff", type=int, default=4)
    p.add_argument("--q", type=parse_q, default=None)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--per-trial", action="store_true", help="include every ratio")

    p = add("verify", cmd_verify, "csv", help="run one cross-validation target")
    p.add_argument("target", choices=sorted(verify.CHECKS))
    p.add_argument("--n", type=int, default=None, help="size parameter of the target")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--cutoff", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)

    add("verify-all", cmd_verify_all, "csv", help="run every cross-validation target")
    return parser, subs


def read_config(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            k, v = line.split("=", 1)
            out[k.strip().replace("-", "_")] = v.strip()
    return out


def _apply_config(sub: argparse.ArgumentParser, cfg: dict):
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in cfg.items():
        act = actions.get(key)
        if act is None or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r} for this command")
        if isinstance(act, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            val = raw.lower() in ("1", "true", "yes", "on")
        else:
            val = act.type(raw) if act.type else raw
            if act.choices is not None and val not in act.choices:
                raise UsageError(f"config {key}={raw!r} not in {list(act.choices)}")
        defaults[key] = val
    sub.set_defaults(**defaults)


def _write(rows, fmt, out):
    rows = [_plain(r) for r in rows]
    if fmt == "jsonl":
        for r in rows:
            out.write(json.dumps(r, sort_keys=True) + "\n")
        return
    fields = []
    for r in rows:
        fields.extend(k for k in r if k not in fields)
    w = csv.DictWriter(out, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})


def main(argv=None) -> int:
    parser, subs = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        if args.config:
            _apply_config(subs[args.command], read_config(args.config))
            args = parser.parse_args(argv)
        rows, status = args.func(args)
        buf = io.StringIO()
        _write(rows, args.format or args.default_format, buf)
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(buf.getvalue())
        else:
            sys.stdout.write(buf.getvalue())
        return status
    except (UsageError, DomainError, PoleError, OSError) as exc:
        print(f"qdeform: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationError as exc:
        print(f"qdeform: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except NonConvergenceError as exc:
        print(f"qdeform: not certified: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
