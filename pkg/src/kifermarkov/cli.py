"""Command-line front end.

Every command writes a table (CSV by default, JSON with ``--format json``)
preceded by metadata: package version, seed, the full configuration and the
RNG algorithm.  Wall time goes to a ``<out>.meta.json`` sidecar (or stderr),
so the table itself is byte-identical across runs with the same seed.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from . import __version__
from . import lyapunov as lyap
from . import modulus as mod
from . import quasimodes as qm
from . import spectra, walks
from ._rng import RNG_ALGORITHM


class UsageError(Exception):
    pass


def _require(cond, name, msg):
    if not cond:
        raise UsageError(f"invalid --{name}: {msg}")


# ----------------------------------------------------------------- commands

def cmd_tables(args):
    _require(args.pascal is not None or args.narayana is not None, "pascal",
             "give --pascal N or --narayana N")
    if args.pascal is not None:
        _require(args.pascal >= 1, "pascal", "must be >= 1")
        t = walks.pascal_table(args.pascal)
        cols = ["n", "i", "a", "a_plus", "a_minus"]
        rows = [[n, i, t.a(n, i), t.a_plus(n, i), t.a_minus(n, i)]
                for n in range(1, t.n + 1) for i in range(-(n - 1), n + 1)]
        return cols, rows
    _require(args.narayana >= 0, "narayana", "must be >= 0")
    c = walks.narayana_counts(args.narayana)
    cols = ["n", "a", "b", "a_over_b"]
    rows = [[n, c.a(n), c.b(n), repr(c.a(n) / c.b(n))] for n in range(args.narayana + 1)]
    return cols, rows


def cmd_walk(args):
    cols = ["event", "parameter", "value", "stderr", "mode", "exact"]
    rows = []
    if args.n is not None:
        _require(args.n >= 1, "n", "must be >= 1")
        if args.n <= 3000:
            p = walks.event_probability_En(args.n)
            rows.append(["E_n", args.n, repr(float(p)), "0.0", "exact", str(p)])
        else:
            rows.append(["E_n", args.n, repr(walks.event_probability_En_float(args.n)), "0.0",
                         "float", ""])
    for l in args.l or []:
        _require(l >= 1, "l", "must be >= 1")
        for name, fn in (("B_l", walks.event_Bl), ("C_l", walks.event_Cl)):
            mode = args.mode
            if mode == "montecarlo":
                est = fn(l, "montecarlo", rng=np.random.Generator(np.random.Philox(args.seed)),
                         samples=args.samples)
            else:
                est = fn(l, mode)
            exact = "" if est.exact is None else str(est.exact)
            rows.append([name, l, repr(est.value), repr(est.stderr), est.mode, exact])
    _require(rows, "n", "give --n and/or --l")
    return cols, rows


def _spec_for(args, E):
    if args.family == "kifer":
        return lyap.CocycleSpec.kifer(args.p)
    if args.family == "free":
        return lyap.CocycleSpec.free(E)
    if args.family == "conjugate":
        return lyap.CocycleSpec.conjugate(E)
    return lyap.CocycleSpec.schrodinger(E)


def cmd_le(args):
    n = args.n or 10**5
    _require(n >= 1000, "n", "must be >= 1000")
    _require(args.replicas >= 1, "replicas", "must be >= 1")
    energies = args.E or [0.0]
    base = ["spec_hash", "E", "n", "replicas", "value", "std_error"]
    rows = []
    if args.mode == "estimate":
        for E in energies:
            spec = _spec_for(args, E)
            est = lyap.le_estimate(spec, n, args.replicas, args.seed, args.threads)
            r = est.record(spec)
            rows.append([r[k] for k in base])
        return base, rows
    if args.mode == "kifer":
        est = lyap.le_exact_kifer(n, args.replicas, args.seed, args.p, args.threads)
        spec = lyap.CocycleSpec.kifer(args.p)
        r = est.record(spec)
        return base, [[r[k] for k in base]]
    if args.mode == "induced":
        cols = ["E", "n", "replicas", "L_induced", "L_induced_se", "L_base", "L_base_se",
                "ratio", "ratio_se", "mean_return_time", "return_time_se"]
        for E in energies:
            res = lyap.induced_le(E, n, args.replicas, args.seed, args.threads)
            rows.append([E, n, args.replicas, res.L_induced.value, res.L_induced.std_error,
                         res.L_base.value, res.L_base.std_error, res.ratio, res.ratio_stderr,
                         res.mean_return_time, res.return_time_stderr])
        return cols, rows
    if args.mode == "lipschitz":
        rep = lyap.lipschitz_check(seed=args.seed, trials=args.trials, threads=args.threads)
        cols = ["epsilon", "trials", "max_ratio", "mean_ratio", "violations", "constant",
                "bounded"]
        return cols, [[r.epsilon, r.trials, r.max_ratio, r.mean_ratio, r.violations,
                       rep.constant, rep.bounded] for r in rep.rows]
    # growth
    cols = ["E", "n", "replicas", "mean_log_norm_over_n", "std_error"]
    for E in energies:
        for cp, est in lyap.norm_growth(_spec_for(args, E), [10**3, 10**4, 10**5],
                                        args.replicas, args.seed, args.threads):
            rows.append([E, cp, args.replicas, est.value, est.std_error])
    return cols, rows


def cmd_ids(args):
    dim = args.dim or 1000
    _require(dim >= 100, "dim", "must be >= 100")
    _require(args.replicas >= 1, "replicas", "must be >= 1")
    energies = args.E or list(np.round(np.linspace(-5, 3, 33), 10))
    potential = mod.FREE_POTENTIAL if args.family == "free" else None
    ests = spectra.ids_estimate(None, dim, args.replicas, args.seed, potential=potential,
                                threads=args.threads, energies=energies)
    cols = ["E", "N", "stderr", "dim", "replicas"]
    return cols, [[e.energy, e.value, e.stderr, e.dim, e.replicas] for e in ests]


def cmd_gap(args):
    ls = args.l or [300, 1200, 2700]
    rows = []
    for l in ls:
        _require(l >= 27, "l", f"{l} is below 27")
        m = args.m if args.m is not None else (5 * 10**6) // (2 * l + 3)
        _require(m >= 1, "m", "must be >= 1")
        _require(m * (2 * l + 3) <= 10**7, "m", f"L = m(2l+3) = {m * (2 * l + 3)} exceeds 10^7")
        rec = qm.gap_experiment(l, m, args.replicas, [args.seed, l], args.threads)
        rows.append([rec.row()[k] for k in qm.GapRecord.CSV_FIELDS] + [rec.violations])
    return list(qm.GapRecord.CSV_FIELDS) + ["violations"], rows


def _read_gap_csv(path):
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    recs = list(csv.DictReader(lines))
    return [(int(r["l"]), float(r["epsilon"]), float(r["lower_bound"])) for r in recs]


def cmd_fit(args):
    if args.family == "holder":
        fam = mod.ModulusFamily.holder(args.alpha)
    elif args.family == "weak_holder":
        fam = mod.ModulusFamily.weak_holder(args.alpha, args.theta)
    elif args.family == "log_holder":
        fam = mod.ModulusFamily.log_holder()
    else:
        _require(args.gamma >= 1, "gamma", "must be >= 1")
        _require(args.beta >= 1, "beta", "must be >= 1")
        fam = mod.ModulusFamily.gamma_beta(args.gamma, args.beta)
    if args.input:
        measured = _read_gap_csv(args.input)
        ls = {l for l, _, _ in measured} | {300 * K**2 for K in mod.DEFAULT_EXTENSION_K}
        series = mod.GapSeries.from_triples([qm.lower_bound_record(l) for l in sorted(ls)],
                                            True, "lower_bound")
    else:
        series = mod.lower_bound_series()
    try:
        rep = mod.fit_breakdown(series, fam, args.factor)
    except ValueError as exc:
        raise UsageError(f"invalid --input: {exc}") from None
    return rep.table()


def cmd_verify(args):
    from .verification import run_checks

    results = run_checks(args.seed)
    rows = [[name, "pass" if ok else "FAIL", detail] for name, ok, detail in results]
    return ["check", "status", "detail"], rows


COMMANDS = {
    "tables": cmd_tables, "walk": cmd_walk, "le": cmd_le, "ids": cmd_ids,
    "gap": cmd_gap, "fit": cmd_fit, "verify": cmd_verify,
}


# ------------------------------------------------------------------- output

def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def _json_value(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def render(command, config, cols, rows, fmt):
    meta = {"version": __version__, "command": command, "seed": config.get("seed"),
            "config": config, "rng": RNG_ALGORITHM}
    if fmt == "json":
        body = {"meta": meta,
                "rows": [{c: _json_value(v) for c, v in zip(cols, r)} for r in rows]}
        return json.dumps(body, indent=1, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# kifermarkov {__version__}\n")
    buf.write(f"# command: {command}\n")
    buf.write(f"# seed: {config.get('seed')}\n")
    buf.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
    buf.write(f"# rng: {RNG_ALGORITHM}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def build_parser():
    p = argparse.ArgumentParser(prog="kifermarkov", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    sub = p.add_subparsers(dest="command", metavar="command")
    sub.required = True

    s = sub.add_parser("tables", parents=[common], help="Pascal table or admissible-word counts")
    s.add_argument("--pascal", type=int)
    s.add_argument("--narayana", type=int)

    s = sub.add_parser("walk", parents=[common], help="event probabilities E_n, B_l, C_l")
    s.add_argument("--n", type=int)
    s.add_argument("--l", type=int, nargs="+")
    s.add_argument("--mode", choices=("exact", "float", "montecarlo"), default="exact")
    s.add_argument("--samples", type=int, default=200_000)

    s = sub.add_parser("le", parents=[common], help="Lyapunov exponent estimates")
    s.add_argument("--mode", choices=("estimate", "kifer", "induced", "lipschitz", "growth"),
                   default="estimate")
    s.add_argument("--family", choices=("schrodinger", "kifer", "free", "conjugate"),
                   default="schrodinger")
    s.add_argument("--E", type=float, nargs="+")
    s.add_argument("--n", type=int)
    s.add_argument("--replicas", type=int, default=8)
    s.add_argument("--p", type=float, default=0.5)
    s.add_argument("--trials", type=int, default=50)

    s = sub.add_parser("ids", parents=[common], help="integrated density of states curve")
    s.add_argument("--E", type=float, nargs="+")
    s.add_argument("--dim", type=int)
    s.add_argument("--replicas", type=int, default=8)
    s.add_argument("--family", choices=("model", "free"), default="model")

    s = sub.add_parser("gap", parents=[common], help="eigenvalue count near 0 vs good blocks")
    s.add_argument("--l", type=int, nargs="+")
    s.add_argument("--m", type=int)
    s.add_argument("--replicas", type=int, default=16)

    s = sub.add_parser("fit", parents=[common], help="required modulus constant per scale")
    s.add_argument("--family", choices=("gamma_beta", "holder", "weak_holder", "log_holder"),
                   default="gamma_beta")
    s.add_argument("--gamma", type=float, default=1.0)
    s.add_argument("--beta", type=float, default=2.5)
    s.add_argument("--alpha", type=float, default=0.5)
    s.add_argument("--theta", type=float, default=0.5)
    s.add_argument("--factor", type=float, default=5.0)
    s.add_argument("--input", help="gap CSV; its scales join the lower-bound series")

    sub.add_parser("verify", parents=[common], help="quick invariant suite")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    config = {k: v for k, v in vars(args).items() if k not in ("out", "format", "command")}
    try:
        _require(args.threads >= 1, "threads", "must be >= 1")
        _require(args.seed >= 0, "seed", "must be a nonnegative integer")
        t0 = time.perf_counter()
        cols, rows = COMMANDS[args.command](args)
        wall = time.perf_counter() - t0
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"kifermarkov {args.command}: {exc}", file=sys.stderr)
        return 2
    text = render(args.command, config, cols, rows, args.format)
    side = {"version": __version__, "command": args.command, "seed": args.seed,
            "wall_time_s": round(wall, 3)}
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
        with open(args.out + ".meta.json", "w") as fh:
            json.dump(side, fh)
            fh.write("\n")
    else:
        sys.stdout.write(text)
        print(f"# wall time: {wall:.3f} s", file=sys.stderr)
    if args.command == "verify":
        return 0 if all(r[1] == "pass" for r in rows) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
