"""Command-line entry point.

Subcommands: ``rho-curves``, ``collision``, ``verify``, ``benchmark`` and
``replay``.  Every run that writes ``--out FILE`` also writes
``FILE.manifest.json`` holding the resolved arguments; ``replay`` re-executes
a manifest.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .benchmark import DEFAULT_PARAMS, emit_pr_csv, run_retrieval
from .collision import analytic_collision, monte_carlo_collision
from .core import L2_ALSH, SCHEMES, SIGN_ALSH, ThresholdPair
from .factorization import ingest_ratings, pure_svd, synthetic_factorization
from .hashers import RNG_ALGORITHM
from .rho import DEFAULT_S_VALUES, GridSpec, emit_rho_curves
from .theory import LEMMAS, build_witness, direct_margin, monte_carlo_check
from .transforms import L2AlshParams, SignAlshParams

log = logging.getLogger("mipslsh")


class UsageError(Exception):
    pass


def parse_range(text: str, cast=float) -> list:
    """``start:stop:step`` (inclusive) or a comma list."""
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            n = int(round((stop - start) / step)) + 1
            return [cast(round(start + i * step, 10)) for i in range(n)]
        return [cast(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; use start:stop:step or a comma list") from None


def parse_vector(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad vector {text!r}; use comma-separated numbers") from None


def scheme_params(scheme: str, m=None, U=None, r=None):
    if scheme == L2_ALSH:
        d = DEFAULT_PARAMS[L2_ALSH]
        return L2AlshParams(m or d.m, U or d.U, r or d.r)
    if scheme == SIGN_ALSH:
        d = DEFAULT_PARAMS[SIGN_ALSH]
        return SignAlshParams(m or d.m, U or d.U)
    return None


def _params_dict(p):
    return None if p is None else dict(vars(p))


def _write(out, text: str):
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def write_manifest(args: argparse.Namespace, argv: list[str]):
    if getattr(args, "out", None) is None:
        return
    record = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "threads", "verbose")}
    manifest = {"tool": "mipslsh", "version": __version__, "rng": RNG_ALGORITHM,
                "argv": strip_run_flags(argv), "args": record}
    with open(f"{args.out}.manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_rho_curves(args) -> int:
    grid = GridSpec(tuple(int(m) for m in args.m_grid), tuple(args.U_grid), tuple(args.r_grid))
    for S in args.S:
        if not 0 < S < 1:
            raise UsageError(f"--S values must lie in (0, 1), got {S}")
    for c in args.c_grid:
        if not 0 < c < 1:
            raise UsageError(f"--c-grid values must lie in (0, 1), got {c}")
    emit_rho_curves(args.S, args.c_grid, grid, args.out or sys.stdout)
    return 0


def cmd_collision(args) -> int:
    params = scheme_params(args.scheme, args.m, args.U, args.r)
    x, q = np.array(args.x), np.array(args.q)
    if x.shape != q.shape:
        raise UsageError(f"--x and --q must have the same dimension ({x.size} vs {q.size})")
    record = {
        "scheme": args.scheme,
        "params": _params_dict(params),
        "x": args.x,
        "q": args.q,
        "inner_product": float(x @ q),
        "analytic": analytic_collision(args.scheme, params, x, q),
    }
    if args.n > 0:
        p, se = monte_carlo_collision(args.scheme, params, x, q, args.n, args.seed)
        record.update(monte_carlo=p, stderr=se, n=args.n, seed=args.seed)
    _write(args.out, json.dumps(record, sort_keys=True) + "\n")
    return 0


def _verify_one(lemma, args):
    t = ThresholdPair(args.S, args.c)
    w = build_witness(lemma, t, m=args.m, U=args.U, r=args.r, dim=args.dim)
    rec = {
        "lemma": lemma,
        "scheme": w.scheme,
        "params": _params_dict(w.params),
        "S": args.S,
        "c": args.c,
        "margin": w.margin,
        "direct_margin": direct_margin(w),
        "zero_margin": w.zero_margin,
        "branch": w.branch,
    }
    ok = w.margin >= 0
    if args.n > 0:
        mc = monte_carlo_check(w, args.n, args.seed)
        rec.update(p_near=mc.p_near, se_near=mc.se_near, p_far=mc.p_far, se_far=mc.se_far,
                   mc_pass=mc.passed, n=args.n, seed=args.seed)
        ok = ok and mc.passed
    rec["pass"] = bool(ok)
    return rec


def cmd_verify(args) -> int:
    lemmas = LEMMAS if args.lemma == "all" else (args.lemma,)
    lines = []
    all_ok = True
    for lemma in lemmas:
        try:
            rec = _verify_one(lemma, args)
        except ValueError as exc:
            if args.lemma != "all":
                raise UsageError(str(exc)) from None
            rec = {"lemma": lemma, "S": args.S, "c": args.c, "skipped": str(exc), "pass": None}
        if rec["pass"] is False:
            all_ok = False
        lines.append(json.dumps(rec, sort_keys=True))
    _write(args.out, "\n".join(lines) + "\n")
    return 0 if all_ok else 1


def cmd_benchmark(args) -> int:
    if args.ratings:
        if not Path(args.ratings).is_file():
            raise UsageError(f"ratings file not found: {args.ratings}")
        delim = None if args.delimiter == "whitespace" else args.delimiter
        fact = pure_svd(ingest_ratings(args.ratings, delim), args.f, seed=args.seed)
    else:
        fact = synthetic_factorization(args.n_users, args.n_items, args.f, seed=args.seed)
    schemes = SCHEMES if "all" in args.scheme else tuple(dict.fromkeys(args.scheme))
    curves = []
    for scheme in schemes:
        if scheme == SIGN_ALSH:
            params = SignAlshParams(args.sign_m, args.sign_U)
        else:
            params = scheme_params(scheme, args.m, args.U, args.r)
        curves += run_retrieval(scheme, params, fact, args.T, args.K, args.n_queries, args.seed,
                                threads=args.threads)
    emit_pr_csv(curves, args.out or sys.stdout)
    return 0


def cmd_replay(args) -> int:
    with open(args.manifest, encoding="utf-8") as fh:
        manifest = json.load(fh)
    argv = list(manifest["argv"]) + ["--out", args.out, "--threads", str(args.threads)]
    return main(argv)


def strip_run_flags(argv: list[str]) -> list[str]:
    """Drop ``--out``, ``--threads`` and ``--verbose``; they do not affect results."""
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok in ("--out", "--threads"):
            skip = True
        elif tok.startswith(("--out=", "--threads=")) or tok in ("-v", "--verbose"):
            continue
        else:
            out.append(tok)
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mipslsh", description="Symmetric and asymmetric LSH for inner product search.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        sp.add_argument("--out", help="output file, manifest written beside it (default: stdout)")
        sp.add_argument("-v", "--verbose", action="store_true")

    sp = sub.add_parser("rho-curves", help="tabulate optimal hashing quality for each hash")
    sp.add_argument("--S", type=float, nargs="+", default=list(DEFAULT_S_VALUES))
    sp.add_argument("--c-grid", type=parse_range, default=parse_range("0.1:0.9:0.1"))
    sp.add_argument("--m-grid", type=parse_range, default=parse_range("1:6:1"))
    sp.add_argument("--U-grid", type=parse_range, default=parse_range("0.01:0.99:0.01"))
    sp.add_argument("--r-grid", type=parse_range, default=parse_range("0.1:5.0:0.1"))
    common(sp)
    sp.set_defaults(func=cmd_rho_curves)

    sp = sub.add_parser("collision", help="analytic and Monte-Carlo collision probability of one pair")
    sp.add_argument("--scheme", choices=SCHEMES, required=True)
    sp.add_argument("--x", type=parse_vector, required=True, help="data point, comma-separated")
    sp.add_argument("--q", type=parse_vector, required=True, help="query point, comma-separated")
    sp.add_argument("--m", type=int)
    sp.add_argument("--U", type=float)
    sp.add_argument("--r", type=float)
    sp.add_argument("--n", type=int, default=100_000, help="Monte-Carlo draws (0 to skip)")
    common(sp)
    sp.set_defaults(func=cmd_collision)

    sp = sub.add_parser("verify", help="construct witnesses for the negative results")
    sp.add_argument("--lemma", choices=LEMMAS + ("all",), required=True)
    sp.add_argument("--S", type=float, required=True)
    sp.add_argument("--c", type=float, required=True)
    sp.add_argument("--m", type=int, default=3)
    sp.add_argument("--U", type=float, default=0.83)
    sp.add_argument("--r", type=float, default=2.5)
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--n", type=int, default=100_000, help="Monte-Carlo draws (0 to skip)")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("benchmark", help="Hamming-ranking precision-recall benchmark")
    sp.add_argument("--scheme", choices=SCHEMES + ("all",), nargs="+", default=["all"])
    sp.add_argument("--K", type=int, nargs="+", default=[64, 128, 256, 512])
    sp.add_argument("--T", type=int, nargs="+", default=[1, 5, 10])
    src = sp.add_mutually_exclusive_group()
    src.add_argument("--synthetic", action="store_true", help="synthetic low-rank ratings (default)")
    src.add_argument("--ratings", help="user<TAB>item<TAB>rating file")
    sp.add_argument("--delimiter", default="\t", help="field delimiter, or 'whitespace'")
    sp.add_argument("--f", type=int, default=50, help="factorization rank")
    sp.add_argument("--n-users", type=int, default=500)
    sp.add_argument("--n-items", type=int, default=1000)
    sp.add_argument("--n-queries", type=int, default=500)
    sp.add_argument("--m", type=int, default=3)
    sp.add_argument("--U", type=float, default=0.83)
    sp.add_argument("--r", type=float, default=2.5)
    sp.add_argument("--sign-m", type=int, default=2)
    sp.add_argument("--sign-U", type=float, default=0.75)
    common(sp)
    sp.set_defaults(func=cmd_benchmark)

    sp = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    sp.add_argument("manifest")
    sp.add_argument("--out", required=True)
    sp.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    sp.set_defaults(func=cmd_replay)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        code = args.func(args)
        if args.command != "replay":
            write_manifest(args, argv)
        return code
    except (UsageError, ValueError, OSError) as exc:
        print(f"mipslsh {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
