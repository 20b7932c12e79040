"""``nlroth`` command line.

Every subcommand prints one JSON object (``"schema": 1``) on stdout.  Exit
status: 0 success, 1 labeled analytic failure (no increment, no witness),
2 usage error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import _accel
from .core import (BoundedFunction, IntegerSet, Progression, balanced_part, indicator, read_function,
                   read_set, write_function, write_set)
from .counting import CountingParams, configuration_counts, count_configurations, count_operator, find_configuration
from .cutnorm import cut_norm_exact_small, cut_norm_lower, EXACT_MAX_N
from .factors import write_factor
from .fourier import (grid_spectrum, major_arc_witness, quadratic_weyl_sum, rational_approximation,
                      sixth_moment_squares, weyl_frequency_finder, write_spectrum)
from .increment import (ConfigurationFound, build_section1_example, find_density_increment, greedy_extremal_search,
                        growth_curve, run_increment_iteration)
from .regularity import weak_regularize

SCHEMA = 1


class UsageError(Exception):
    pass


@dataclasses.dataclass
class ExperimentConfig:
    """Defaults for a run, loadable from a JSON file; unknown keys are rejected."""

    N: int | None = None
    q: int = 1
    delta: float = 0.1
    c: float = 0.01
    seeds: list = dataclasses.field(default_factory=lambda: [0])
    max_dimension: int = 16
    modulus_cap: int = 2**32
    restarts: int = 8
    iterations: int = 50
    threads: int = 1
    format: str = "json"
    out: str | None = None

    def __post_init__(self):
        if self.N is not None and self.N < 1:
            raise ValueError("N must be positive")
        if self.q < 1:
            raise ValueError("q must be positive")
        if not 0 < self.delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        if not 0 < self.c <= 1:
            raise ValueError("c must lie in (0, 1]")
        if min(self.max_dimension, self.modulus_cap, self.restarts, self.iterations, self.threads) < 1:
            raise ValueError("caps, restarts, iterations and threads must be positive")
        if self.format not in ("json", "csv"):
            raise ValueError("format must be json or csv")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        extra = sorted(set(d) - known)
        if extra:
            raise ValueError(f"unknown config keys: {extra}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# argument helpers


def _set_arg(spec: str, N: int | None) -> IntegerSet:
    named = {"full", "odd", "even", "empty", "greedy"}
    if spec in named:
        if N is None:
            raise UsageError(f"--set {spec} needs --N")
        x = np.arange(1, N + 1)
        if spec == "greedy":
            return greedy_extremal_search(N)
        mask = {"full": x > 0, "odd": x % 2 == 1, "even": x % 2 == 0, "empty": x < 0}[spec]
        return IntegerSet(N, mask)
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"--set: no such file {spec!r} (or use full, odd, even, empty, greedy)")
    A = read_set(path)
    if N is not None and N != A.N:
        raise UsageError(f"--N {N} disagrees with N={A.N} in {spec}")
    return A


def _function_arg(args) -> BoundedFunction:
    if getattr(args, "function", None):
        return read_function(args.function)
    if getattr(args, "set", None):
        A = _set_arg(args.set, args.N)
        return balanced_part(A) if args.balanced else indicator(A)
    raise UsageError("give --function FILE or --set SPEC")


def _frac(s: str):
    try:
        return Fraction(s) if "/" in s else float(s)
    except ValueError as e:
        raise UsageError(f"bad number {s!r}") from e


def _emit(obj, args) -> None:
    obj = {"schema": SCHEMA, **obj}
    text = json.dumps(obj, sort_keys=True, indent=1, default=_jsonable)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
    print(text)


def _jsonable(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, Fraction):
        return f"{o.numerator}/{o.denominator}"
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"cannot serialise {type(o).__name__}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_count(args):
    A = _set_arg(args.set, args.N)
    p = CountingParams(args.q, A.N)
    pairs = count_configurations(A, p)
    lam = count_operator(p, indicator(A), indicator(A), indicator(A))
    _emit({"N": A.N, "q": args.q, "M": p.M, "pairs": pairs, "lambda": lam.real}, args)
    return 0


def cmd_free_check(args):
    A = _set_arg(args.set, args.N)
    w = find_configuration(A, args.q, args.signs)
    counts = configuration_counts(A, args.q)
    out = {"N": A.N, "q": args.q, "signs": args.signs, "free": w is None, "counts": counts,
           "witness": None if w is None else f"x={w[0]} y={w[1]}"}
    _emit(out, args)
    return 0


def cmd_cutnorm(args):
    f = _function_arg(args)
    p = CountingParams(args.q, f.N)
    est = cut_norm_lower(p, f, args.slots, args.restarts, args.iterations, args.seed)
    out = {"N": f.N, "q": args.q, "slots": args.slots, "lower": est.lower, "upper": est.upper,
           "slot": est.slot, "exact": False, "witness_files": None}
    if f.N <= EXACT_MAX_N and f.is_real:
        out["exact_value"] = cut_norm_exact_small(p, f, args.slots)
        out["exact"] = True
    if args.out_dir and est.slot is not None:
        d = Path(args.out_dir)
        d.mkdir(parents=True, exist_ok=True)
        write_function(est.g_a, d / "witness_a.csv")
        write_function(est.g_b, d / "witness_b.csv")
        out["witness_files"] = [str(d / "witness_a.csv"), str(d / "witness_b.csv")]
    _emit(out, args)
    return 0


def cmd_regularize(args):
    f = _function_arg(args)
    p = CountingParams(args.q, f.N)
    res = weak_regularize(p, f, args.delta, args.max_dimension, relax=args.relax, seed=args.seed,
                          restarts=args.restarts, iterations=args.iterations)
    out = res.summary()
    if args.out_dir:
        d = Path(args.out_dir)
        d.mkdir(parents=True, exist_ok=True)
        write_factor(res.factor, d / "factor.csv", d / "factor.json")
        write_function(res.structured, d / "structured.csv")
        out["factor_files"] = [str(d / "factor.csv"), str(d / "factor.json")]
    _emit(out, args)
    return 0 if res.status == "regular" else 1


def cmd_increment(args):
    A = _set_arg(args.set, args.N)
    try:
        res, diag = find_density_increment(A, args.q, c=args.c, seed=args.seed)
    except ConfigurationFound as e:
        _emit({"status": "configuration_found", "witness": f"x={e.witness[0]} y={e.witness[1]}"}, args)
        return 1
    _emit({"status": diag["reason"], "diagnostics": diag, "increment": res.to_dict() if res else None}, args)
    return 0 if res else 1


def cmd_iterate(args):
    A = _set_arg(args.set, args.N)
    trace = run_increment_iteration(A, args.c, max_stages=args.max_stages, modulus_cap=args.modulus_cap,
                                    seed=args.seed)
    text = trace.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def cmd_search_extremal(args):
    if len(args.N) > 1 or args.format == "csv":
        rows = growth_curve(args.N, args.q, args.strategy, args.seed)
        text = "N,card,density,ratio\n" + "".join(f"{n},{k},{d!r},{r!r}\n" for n, k, d, r in rows)
        if args.out:
            Path(args.out).write_text(text)
        sys.stdout.write(text)
        return 0
    A = greedy_extremal_search(args.N[0], args.q, args.strategy, args.seed, args.budget)
    if args.set_out:
        write_set(A, args.set_out)
    _emit({"N": A.N, "q": args.q, "strategy": args.strategy, "seed": args.seed,
           "card": A.cardinality, "density": A.density, "free": True}, args)
    return 0


def cmd_example1(args):
    K = math.isqrt(args.N)
    if K * K != args.N:
        raise UsageError("--N must be a perfect square")
    _, stats = build_section1_example(args.N, args.max_step)
    _emit(stats, args)
    return 0


def cmd_spectrum(args):
    f = _function_arg(args)
    alphas, coeffs = grid_spectrum(f, args.L)
    if args.csv:
        write_spectrum(alphas, coeffs, args.csv)
    k = int(np.argmax(np.abs(coeffs)))
    _emit({"N": f.N, "L": len(alphas), "peak_alpha": float(alphas[k]), "peak_modulus": float(abs(coeffs[k])),
           "csv": args.csv}, args)
    return 0


def cmd_weyl(args):
    alpha = _frac(args.alpha)
    P = Progression(args.a, args.step, args.length or math.isqrt(args.N))
    S = quadratic_weyl_sum(P, args.N, alpha)
    res = weyl_frequency_finder(P, args.N, alpha, args.delta, args.C)
    qa, dist = rational_approximation(alpha, args.Q)
    _emit({"N": args.N, "alpha": str(alpha), "S": [S.real, S.imag], "modulus": abs(S),
           "weyl": dataclasses.asdict(res), "rational": {"Q": args.Q, "q": qa, "distance": dist}}, args)
    return 0 if res.q_prime is not None or not res.hypothesis_holds else 1


def cmd_moment6(args):
    n6 = sixth_moment_squares(args.N)
    _emit({"N": args.N, "count": n6, "ratio": n6 / args.N**4}, args)
    return 0


def cmd_majorarc(args):
    N = args.N
    one = BoundedFunction.constant(N)
    x = np.arange(1, N + 1)
    if args.h == "parity":
        h = BoundedFunction((x % 2 == 0).astype(float) + 0j)
    elif args.h == "random":
        h = BoundedFunction(np.random.default_rng(args.seed).choice([-1.0, 1.0], N) + 0j)
    else:
        h = read_function(args.h)
    w, diag = major_arc_witness(CountingParams(1, N), one, one, h, args.delta)
    out = {"N": N, "delta": args.delta, "diagnostics": diag, "witness": None}
    if w is not None:
        out["witness"] = {"alpha": str(w.alpha.value), "q": w.q, "qalpha_distance": w.qalpha_distance,
                          "coefficient_modulus": w.coefficient_modulus, "threshold": w.threshold}
    _emit(out, args)
    return 0 if w else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nlroth", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out", help="also write the output to this file")
    common.add_argument("--config", help="JSON ExperimentConfig supplying defaults")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn, subparser=sp)
        return sp

    def fn_args(sp, balanced=True):
        sp.add_argument("--N", type=int)
        sp.add_argument("--q", type=int, default=1)
        sp.add_argument("--set")
        sp.add_argument("--function")
        if balanced:
            sp.add_argument("--balanced", action="store_true", help="use 1_A - |A|/N instead of 1_A")

    sp = add("count", cmd_count, "configuration count and counting operator of a set")
    sp.add_argument("--N", type=int)
    sp.add_argument("--q", type=int, default=1)
    sp.add_argument("--set", required=True)

    sp = add("free-check", cmd_free_check, "is a set configuration-free?")
    sp.add_argument("--N", type=int)
    sp.add_argument("--q", type=int, default=1)
    sp.add_argument("--set", required=True)
    sp.add_argument("--signs", choices=["both", "positive"], default="both")

    sp = add("cutnorm", cmd_cutnorm, "cut-norm lower bound with witnesses")
    fn_args(sp)
    sp.add_argument("--slots", choices=["partial", "full"], default="full")
    sp.add_argument("--restarts", type=int, default=8)
    sp.add_argument("--iterations", type=int, default=50)
    sp.add_argument("--out-dir")

    sp = add("regularize", cmd_regularize, "weak regularity decomposition")
    fn_args(sp)
    sp.add_argument("--delta", type=float, default=0.1)
    sp.add_argument("--max-dimension", type=int, default=16)
    sp.add_argument("--relax", action="store_true", help="accept any 1-bounded function")
    sp.add_argument("--restarts", type=int, default=8)
    sp.add_argument("--iterations", type=int, default=50)
    sp.add_argument("--out-dir")

    sp = add("increment", cmd_increment, "one density increment")
    sp.add_argument("--N", type=int)
    sp.add_argument("--q", type=int, default=1)
    sp.add_argument("--set", required=True)
    sp.add_argument("--c", type=float, default=0.01)

    sp = add("iterate", cmd_iterate, "iterate density increments")
    sp.add_argument("--N", type=int)
    sp.add_argument("--set", required=True)
    sp.add_argument("--c", type=float, default=0.01)
    sp.add_argument("--max-stages", type=int, default=64)
    sp.add_argument("--modulus-cap", type=int, default=2**32)

    sp = add("search-extremal", cmd_search_extremal, "large configuration-free sets")
    sp.add_argument("--N", type=int, nargs="+", required=True)
    sp.add_argument("--q", type=int, default=1)
    sp.add_argument("--strategy", choices=["greedy", "random_greedy", "local_search"], default="greedy")
    sp.add_argument("--budget", type=int, default=200)
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp.add_argument("--set-out", help="write the set file here")

    sp = add("example1", cmd_example1, "block example statistics")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--max-step", type=int, default=64)

    sp = add("spectrum", cmd_spectrum, "Fourier coefficients on the grid k/L")
    fn_args(sp)
    sp.add_argument("--L", type=int)
    sp.add_argument("--csv", help="write alpha,re,im,modulus rows here")

    sp = add("weyl", cmd_weyl, "quadratic Weyl sum and frequency finder")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--alpha", required=True, help="a/b or a decimal")
    sp.add_argument("--delta", type=float, default=0.1)
    sp.add_argument("--C", type=float, default=3.0)
    sp.add_argument("--a", type=int, default=0)
    sp.add_argument("--step", type=int, default=1)
    sp.add_argument("--length", type=int)
    sp.add_argument("--Q", type=int, default=100)

    sp = add("moment6", cmd_moment6, "sixth moment of the squares")
    sp.add_argument("--N", type=int, required=True)

    sp = add("majorarc", cmd_majorarc, "major-arc witness for Lambda(1, 1, h)")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--h", default="parity", help="parity, random or a function file")
    sp.add_argument("--delta", type=float, default=0.25)
    return ap


def _apply_config(args):
    if not getattr(args, "config", None):
        return
    cfg = ExperimentConfig.load(args.config)
    defaults = {"N": cfg.N, "q": cfg.q, "delta": cfg.delta, "c": cfg.c, "seed": cfg.seeds[0],
                "max_dimension": cfg.max_dimension, "modulus_cap": cfg.modulus_cap,
                "restarts": cfg.restarts, "iterations": cfg.iterations, "threads": cfg.threads,
                "format": cfg.format, "out": cfg.out}
    # explicit flags win over the file
    for k, v in defaults.items():
        if hasattr(args, k) and getattr(args, k) == args.subparser.get_default(k) and v is not None:
            setattr(args, k, [v] if k == "N" and isinstance(getattr(args, k), list) else v)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        _apply_config(args)
        _accel.set_threads(args.threads)
        return args.fn(args)
    except (UsageError, ValueError, FileNotFoundError) as e:
        print(f"nlroth {args.command}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
