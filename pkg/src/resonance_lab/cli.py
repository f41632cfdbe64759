"""Command-line front end: ``resonance-lab <subcommand> [options]``.

Exit status: 0 on success, 1 on domain errors, 2 on usage errors.
Reports go to stdout, diagnostics to stderr.  JSON output is emitted with
sorted keys so identical inputs give byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import confstruct, lyapsim, resonance, rootsys
from .exactlin import as_pairs, fmt
from .rootsys import RootSystemType

SCHEMA_VERSION = 1
EXCEPTIONAL_TYPES = ("E6", "E7", "E8", "F4", "G2")


class DomainError(Exception):
    pass


def thread_cap() -> int:
    raw = os.environ.get("RESONANCE_LAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise DomainError(f"RESONANCE_LAB_THREADS must be an integer, got {raw!r}")


def fan_out(fn, items):
    """Map ``fn`` over ``items`` with at most RESONANCE_LAB_THREADS workers;
    results come back in input order."""
    items = list(items)
    cap = thread_cap()
    if cap == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=cap) as ex:
        return list(ex.map(fn, items))


def emit(doc, out):
    out.write(json.dumps(doc, sort_keys=True) + "\n")


def _type(args) -> RootSystemType:
    if args.type is None:
        raise DomainError("--type is required")
    return RootSystemType.parse(args.type, args.rank)


# --------------------------------------------------------------------------
# subcommands


def cmd_roots(args, out):
    rs = rootsys.build(_type(args))
    if args.json:
        doc = rs.to_json()
        doc["positive_count"] = len(rootsys.positive_roots(rs))
        emit(doc, out)
        return
    out.write(f"type {rs.type}  ambient_dim {rs.ambient_dim}  roots {len(rs.roots)}"
              f"  positive {len(rootsys.positive_roots(rs))}\n")
    for j, a in enumerate(rs.simple, 1):
        out.write(f"alpha_{j} = {fmt(a)}\n")
    for r, c in zip(rs.roots, rs.coefficients):
        out.write(f"{fmt(r)}  coeffs {list(c)}\n")


def cmd_codim(args, out):
    t = _type(args)
    cod = rootsys.codimensions(t)
    if args.j0 is not None:
        if args.j0 not in cod:
            raise DomainError(f"--j0 must lie in 1..{t.rank}")
        cod = {args.j0: cod[args.j0]}
    m = rootsys.minimal_resonant_codim(t)
    mins = list(rootsys.minimizing_j0(t))
    if args.json:
        emit({"schema_version": SCHEMA_VERSION, "type": str(t),
              "codim": {str(j): c for j, c in cod.items()},
              "minimum": m, "minimizing_j0": mins}, out)
        return
    out.write(f"{'j0':>4} {'codim':>6}\n")
    for j, c in cod.items():
        mark = " *" if j in mins else ""
        out.write(f"{j:>4} {c:>6}{mark}\n")
    out.write(f"r({t}) = {m} at j0 in {{{', '.join(map(str, mins))}}}\n")


def cmd_limit_case(args, out):
    t = _type(args)
    if t.family == "BC":
        raise DomainError("BC is non-reduced; the limit-case engine needs a reduced system")
    doc = resonance.report_json(t)
    if args.json:
        emit(doc, out)
        return
    out.write(f"type {doc['type']}  r(g) = {doc['r_g']}  verdict {doc['verdict']}"
              f"  k >= {doc['k_bound']}\n")
    rep = resonance.limit_case_report(t)
    for c in rep.j0_cases:
        out.write(f"j0 = {c.j0}: complement {c.complement_size}, status {c.status}\n")
        for u in c.centers:
            out.write(f"  center {fmt(u)}\n")
        if c.configuration is not None:
            conf = c.configuration
            for i, f in enumerate(conf.functionals, 1):
                out.write(f"  chi_{i} = {fmt(f)}\n")
            out.write(f"  span dimension {resonance.span_dimension(conf)}\n")
        if c.uniform_direction is not None:
            u = "unique" if c.unique_direction else "not unique"
            out.write(f"  uniform direction {fmt(c.uniform_direction)} ({u})\n")


def _bound_types(args):
    if not args.all:
        return [_type(args)]
    types = [RootSystemType.parse(x) for x in EXCEPTIONAL_TYPES]
    for fam in ("A", "B", "C", "BC", "D"):
        lo = 4 if fam == "D" else 2
        types += [RootSystemType(fam, l) for l in range(lo, args.max_rank + 1)]
    return types


def cmd_bounds(args, out):
    if not args.all and args.type is None:
        raise DomainError("give --type or --all")
    records = fan_out(resonance.optimal_index_bound, _bound_types(args))
    if args.json:
        emit({"schema_version": SCHEMA_VERSION,
              "bounds": [r.to_json() for r in records]}, out)
        return
    out.write(f"{'type':<6}{'r(g)':>6}{'rank':>6}{'reson':>7}  {'limit case':<28}{'k >=':>5}\n")
    for r in records:
        lc = r.limit_case + (" (flat)" if r.conformally_flat else "")
        out.write(f"{str(r.type):<6}{r.r_g:>6}{r.rank_bound:>6}{r.resonance_bound:>7}"
                  f"  {lc:<28}{r.k_bound:>5}\n")


def cmd_validate_spectrum(args, out):
    try:
        doc = json.loads(Path(args.file).read_text())
        spec = confstruct.ConformalSpectrum.from_json(doc)
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"cannot read spectrum {args.file}: {exc}")
    vs = confstruct.validate(spec)
    if args.json:
        emit([v.to_json() for v in vs], out)
    else:
        if not vs:
            out.write("no violations\n")
        for v in vs:
            idx = f" {list(v.indices)}" if v.indices else ""
            out.write(f"{v.rule}{idx}: {v.detail}\n")


def _model(args, seed=None) -> tuple[lyapsim.CocycleModel, int]:
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise DomainError(f"cannot read config {args.config}: {exc}")
    for key in ("p", "q", "boost_scale", "rotation_scale", "conformal_log_mean",
                "conformal_log_spread", "seed", "steps"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    steps = int(cfg.pop("steps", 100_000))
    if "p" not in cfg or "q" not in cfg:
        raise DomainError("--p and --q (or a config file) are required")
    if seed is not None:
        cfg["seed"] = seed
    return lyapsim.CocycleModel(**cfg), steps


def cmd_simulate(args, out):
    base, steps = _model(args)
    seeds = [base.seed + k for k in range(args.seeds)]

    def one(seed):
        m, _ = _model(args, seed)
        est = lyapsim.estimate_exponents(m, steps, interval=args.interval, tol=args.tol)
        return m, est, lyapsim.check_pairing(est, args.tol)

    runs = fan_out(one, seeds)
    if args.json:
        emit({"schema_version": SCHEMA_VERSION, "runs": [
            {"model": m.__dict__, "steps": steps, "estimate": e.to_json(),
             "pairing": rep.to_json()} for m, e, rep in runs]}, out)
        return
    for m, e, rep in runs:
        out.write(f"CO({m.p},{m.q}) seed {m.seed} steps {steps}\n")
        out.write("  exponents " + " ".join(f"{x:.6f}" for x in e.exponents) + "\n")
        out.write(f"  chi_hat {e.chi_hat:.6f}  blocks r = {rep.r}\n")
        out.write(f"  max pairing residual {rep.max_pair_residual:.3e}"
                  f"  determinant residual {rep.det_residual:.3e}\n")
        out.write("  " + "  ".join(f"{k}:{'ok' if v else 'FAIL'}" for k, v in rep.rules.items())
                  + "\n")


def _demo_sequence(family: str, n: int, kmax: int, seed: int, bound: float):
    times = list(range(1, kmax + 1))
    rng = np.random.default_rng(seed)

    def bounded():
        s = np.exp(rng.uniform(-np.log(bound), np.log(bound), n))
        q1, _ = np.linalg.qr(rng.standard_normal((n, n)))
        q2, _ = np.linalg.qr(rng.standard_normal((n, n)))
        return q1 @ np.diag(s) @ q2

    if family == "scalar":
        mats = [np.exp(-k) * np.eye(n) for k in times]
    elif family == "diag":
        mats = [np.diag(np.exp(-k * np.arange(1, n + 1, dtype=float))) for k in times]
    else:
        mats = [bounded() @ (np.exp(-k) * np.eye(n)) @ bounded() for k in times]
    return lyapsim.MatrixSequence(mats, times)


def cmd_classify_seq(args, out):
    if args.file:
        try:
            doc = json.loads(Path(args.file).read_text())
            seq = lyapsim.MatrixSequence([np.asarray(m, dtype=float) for m in doc["mats"]],
                                         [float(t) for t in doc["times"]])
        except (OSError, KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"cannot read sequence {args.file}: {exc}")
    elif args.family:
        seq = _demo_sequence(args.family, args.n, args.steps or 200,
                             args.seed if args.seed is not None else 0, args.bound)
    else:
        raise DomainError("give a sequence file or --family")
    v = lyapsim.classify_uniform_regularity(seq, args.tol)
    if args.json:
        emit({"schema_version": SCHEMA_VERSION, **v.to_json()}, out)
    else:
        expo = "" if v.exponent is None else f"({v.exponent:.6f})"
        out.write(f"{v.kind}{expo}  det rate {v.det_rate:.6f}  norm rate {v.norm_rate:.6f}\n")


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="resonance-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--json", action="store_true", help="emit JSON instead of text")
        p.set_defaults(func=func)
        return p

    def type_opts(p):
        p.add_argument("--type", help="root system type, e.g. F4, E7, BC3, or a family letter")
        p.add_argument("--rank", type=int, help="rank when --type is a bare family")

    type_opts(add("roots", cmd_roots, "list the roots of a root system"))
    p = add("codim", cmd_codim, "codimension of every maximal parabolic")
    type_opts(p)
    p.add_argument("--j0", type=int, help="restrict to one simple root index")
    type_opts(add("limit-case", cmd_limit_case, "limit-case configuration analysis"))
    p = add("bounds", cmd_bounds, "optimal-index lower bounds")
    type_opts(p)
    p.add_argument("--all", action="store_true", help="exceptional types plus classical families")
    p.add_argument("--max-rank", type=int, default=8, help="largest classical rank for --all")

    p = add("validate-spectrum", cmd_validate_spectrum, "check a declared Lyapunov spectrum")
    p.add_argument("file", help="spectrum JSON document")

    p = add("simulate", cmd_simulate, "estimate exponents of a random CO(p,q) cocycle")
    p.add_argument("--config", help="JSON model config; flags override its fields")
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--boost-scale", dest="boost_scale", type=float)
    p.add_argument("--rotation-scale", dest="rotation_scale", type=float)
    p.add_argument("--conformal-log-mean", dest="conformal_log_mean", type=float)
    p.add_argument("--conformal-log-spread", dest="conformal_log_spread", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--seeds", type=int, default=1, help="run this many consecutive seeds")
    p.add_argument("--steps", type=int)
    p.add_argument("--interval", type=int, default=1, help="steps between QR re-orthonormalizations")
    p.add_argument("--tol", type=float, default=5e-2)

    p = add("classify-seq", cmd_classify_seq, "uniform Lyapunov regularity of a matrix sequence")
    p.add_argument("file", nargs="?", help='JSON {"mats": [...], "times": [...]}')
    p.add_argument("--family", choices=("scalar", "diag", "perturbed"),
                   help="built-in demo sequence with T_k = k")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--steps", type=int, help="sequence length for --family (default 200)")
    p.add_argument("--seed", type=int)
    p.add_argument("--bound", type=float, default=10.0, help="multiplier bound B for 'perturbed'")
    p.add_argument("--tol", type=float, default=1e-2)
    return parser


DOMAIN_ERRORS = (
    DomainError, rootsys.InvalidType, rootsys.IndexOutOfRange, resonance.NotExceptional,
    resonance.RankTooLow, confstruct.NoSeparatingWitness, lyapsim.NumericalOverflow,
    lyapsim.SingularMatrix, ValueError,
)


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, out)
    except DOMAIN_ERRORS as exc:
        err.write(f"resonance-lab {args.command}: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
