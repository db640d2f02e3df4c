"""Command-line front end.

Every subcommand writes one table (CSV or JSON) to ``--out`` or standard
output and a one-line summary. Exit status: 0 on success, 1 when a check
fails or two routes disagree, 2 for an unusable configuration, 3 when a size
cap is exceeded.

A ``--config`` file holds ``key = value`` lines named after the long flags;
flags given on the command line win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import analysis, circle, groupring, padic
from .ntheory import SIEVE_CAP, CapExceededError, is_prime, omega
from .psi import PsiSpecError, parse_psi

log = logging.getLogger("padicds")

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_CAP = 0, 1, 2, 3
SEED_MAX = 2**64

# keys that describe how a run is executed rather than what it computes
_RUNTIME_KEYS = {"out", "config", "threads", "verbose", "func", "format"}


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- parsing helpers


def _prime_list(text: str) -> list[int]:
    try:
        ps = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}") from None
    for p in ps:
        if not is_prime(p):
            raise argparse.ArgumentTypeError(f"{p} is not prime")
    return ps


def _range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        a, b = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must look like A..B, got {text!r}") from None
    if not sep or a < 1 or b < a:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return a, b


def _seed(text: str) -> int:
    try:
        s = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be a decimal integer, got {text!r}") from None
    if not 0 <= s < SEED_MAX:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return s


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _params(items: list[str]) -> dict[str, str]:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"parameter {item!r} is not key=value")
        out[key.strip()] = value.strip()
    return out


def read_config(path: str | Path) -> list[tuple[str, str]]:
    """Parse a flat ``key = value`` file; '#' starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    items = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        items.append((key.strip().replace("_", "-"), value.strip()))
    return items


def _config_argv(items, parser: argparse.ArgumentParser) -> list[str]:
    # translate config entries into flags placed before the real ones
    flags = {}
    for action in parser._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                flags[opt[2:]] = action
    argv = []
    for key, value in items:
        action = flags.get(key)
        if action is None:
            raise ConfigError(f"unknown config key {key!r}")
        if action.nargs == 0:
            if value.lower() in ("1", "true", "yes", "on"):
                argv.append("--" + key)
            elif value.lower() not in ("0", "false", "no", "off"):
                raise ConfigError(f"{key} expects a boolean, got {value!r}")
        elif action.nargs in ("*", "+"):
            argv += ["--" + key, *value.split()]
        else:
            argv.append(f"--{key}={value}")
    return argv


# ---------------------------------------------------------------- output


def render(value):
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, float):
        return float(repr(value))
    if isinstance(value, dict):
        return {k: render(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [render(v) for v in value]
    return value


def _csv_cell(value) -> str:
    value = render(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return " ".join(str(v) for v in value)
    return str(value)


def encode(fmt: str, config: dict, rows: list[dict], summary: dict) -> str:
    if fmt == "json":
        doc = {"config": render(config), "rows": [render(r) for r in rows], "summary": render(summary)}
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    columns = list(rows[0]) if rows else []
    w.writerow(columns)
    for r in rows:
        w.writerow([_csv_cell(r[c]) for c in columns])
    return buf.getvalue()


def _summary_line(command: str, summary: dict) -> str:
    return command + ": " + ", ".join(f"{k}={_csv_cell(v)}" for k, v in summary.items())


# ---------------------------------------------------------------- commands


def _space(args) -> analysis.Space:
    text = args.space
    if ":" in text:
        return analysis.Space.parse(text)
    if text == "padic":
        if args.p is None:
            raise ConfigError("--space padic needs --p")
        return analysis.Space("padic", p=args.p)
    if text == "product":
        return analysis.Space("product", ell=args.ell, primes=tuple(args.primes or ()))
    return analysis.Space.parse(text)


def cmd_verify_group_ring(args):
    rows, failures = [], 0
    for m in range(1, args.max + 1):
        for n in range(1, args.max + 1):
            dec = groupring.decompose_product(m, n)
            ok = groupring.expand(dec) == groupring.F(m) * groupring.F(n)
            failures += not ok
            terms = " + ".join(f"{c}*F{k}" for c, k in dec.terms if c)
            rows.append({"m": m, "n": n, "d": dec.d, "d_prime": dec.d_prime,
                         "decomposition": terms, "holds": ok})
    return rows, {"pairs": len(rows), "failures": failures}, failures == 0


def cmd_verify_overlaps(args):
    rows, failures = [], 0
    for p in args.primes:
        for m in range(1, args.max + 1):
            for n in range(1, args.max + 1):
                if m % p == 0 or n % p == 0:
                    continue
                if args.precision == "common":
                    M_m = M_n = analysis.minimal_precision(p, 4 * max(m, n))
                else:
                    M_m, M_n = analysis.minimal_precision(p, 4 * m), analysis.minimal_precision(p, 4 * n)
                sw = analysis.sandwich_check(m, n, p, M_m, M_n)
                pb = analysis.product_bound_check(m, n, p, M_m, M_n)
                failures += (not sw.holds) + (not pb.holds)
                rows.append({"p": p, "m": m, "n": n, "diagonal": m == n, "M_m": M_m, "M_n": M_n,
                             "lower": sw.detail["lower"], "padic_overlap": sw.lhs,
                             "upper": sw.rhs, "product_rhs": pb.rhs,
                             "sandwich_holds": sw.holds, "product_holds": pb.holds})
    return rows, {"checks": 2 * len(rows), "failures": failures}, failures == 0


def cmd_verify_counting(args):
    rows, failures = [], 0
    for n in range(1, args.max + 1):
        formula = analysis.class_counts_range(n, 1, 4 * n, "formula")
        brute = analysis.class_counts_range(n, 1, 4 * n, "brute")
        mismatched = sum(not np.array_equal(formula[q], brute[q]) for q in range(1, 4 * n + 1))
        surj = surj_fail = 0
        for p in args.primes:
            if n % p == 0:
                continue
            M = 0
            while Fraction(1, p**M) > Fraction(4 ** omega(n), n):
                surj += 1
                surj_fail += not analysis.surjectivity_check(n, p, M).holds
                M += 1
        failures += mismatched + surj_fail
        rows.append({"n": n, "moduli": 4 * n, "mismatched_moduli": mismatched,
                     "surjectivity_checks": surj, "surjectivity_failures": surj_fail,
                     "holds": mismatched == 0 and surj_fail == 0})
    return rows, {"n_max": args.max, "failures": failures}, failures == 0


def cmd_verify_zero_one(args):
    rows, failures = [], 0
    for p in args.primes:
        for k in range(1, args.multiples + 1):
            chk = analysis.zero_one_example_check(p, k * p)
            failures += not chk.holds
            rows.append({"p": p, "n": k * p, "measure": chk.lhs, "expected": chk.rhs, "holds": chk.holds})
    return rows, {"checks": len(rows), "failures": failures}, failures == 0


def cmd_measure(args):
    psi = parse_psi(args.psi)
    space = _space(args)
    lo, hi = args.range
    rows = []
    total = Fraction(0)
    for n in range(lo, hi + 1):
        r = psi(n)
        row = {"n": n, "psi": r}
        if space.kind == "real":
            val = circle.measure(circle.build_A(n, r))
        elif space.kind == "padic":
            M = padic.radius_exponent(r, space.p)
            row["M"] = "" if M is None else M
            s = padic.PadicSet.empty(space.p) if M is None else padic.build_E(
                n, space.p, M, args.variant, args.modulus_cap)
            val = padic.measure(s)
        else:
            val = analysis.product_space_measure(space.ell, space.primes, n, psi)
        row["measure"] = val
        total += val
        rows.append(row)
    return rows, {"space": space.render(), "rows": len(rows), "sum": total}, True


def cmd_qia(args):
    psi = parse_psi(args.psi)
    space = _space(args)
    if args.N > args.max_n:
        raise CapExceededError(f"N = {args.N} exceeds cap {args.max_n}")
    methods = ["oracle", "fast"] if args.method == "both" else [args.method]
    reports = {m: analysis.qia_ratio(space, psi, args.N, m, args.threads, keep_series=True)
               for m in methods}
    base = reports[methods[0]]
    rows, mismatches, best = [], 0, Fraction(0)
    for i, (N, S, P, ratio) in enumerate(base.series):
        best = max(best, ratio)
        row = {"N": N, "sum_measures": S, "sum_pair_measures": P, "ratio": ratio,
               "running_max": best, "flagged": P == 0}
        if len(methods) == 2:
            other = reports["fast"].series[i]
            agree = other[1:] == (S, P, ratio)
            mismatches += not agree
            row["ratio_fast"] = other[3]
            row["agree"] = agree
        rows.append(row)
    summary = {"space": space.render(), "N": args.N, "method": args.method, "ratio": base.ratio,
               "running_max": base.running_max, "flagged": base.flagged}
    if len(methods) == 2:
        summary["mismatches"] = mismatches
    return rows, summary, mismatches == 0


def cmd_simulate_hits(args):
    psi = parse_psi(args.psi)
    if args.N > args.max_n:
        raise CapExceededError(f"N = {args.N} exceeds cap {args.max_n}")
    stats = analysis.hit_statistics(psi, args.p, args.N, args.samples, args.seed)
    rows = [{"sample": i, "M": c} for i, c in enumerate(stats.counts)]
    summary = {"p": args.p, "N": args.N, "seed": args.seed, "samples": args.samples,
               "expected": stats.expected, "mean": stats.mean, "tolerance": stats.tolerance,
               "within_tolerance": stats.within_tolerance, "statistical": True}
    return rows, summary, True


def cmd_sums(args):
    params = _params(args.params or [])
    try:
        N = int(params.pop("N"))
    except KeyError:
        raise ConfigError("sums needs N=... in --params") from None
    if N > args.max_n:
        raise CapExceededError(f"N = {N} exceeds cap {args.max_n}")
    if args.which == "phi-asymptotic":
        p = int(params.pop("p", 2))
        r = analysis.phi_sum_asymptotic(p, N)
        row = {"p": p, "N": N, "sum": r.total, "main_term": r.main_term,
               "abs_error": r.abs_error, "rel_error": r.rel_error}
        return [row], {"p": p, "N": N, "rel_error": r.rel_error}, True
    f = analysis.DimensionFunction.parse(params.pop("f", "power:1"))
    dim = int(params.pop("dim", 1))
    if args.psi is None:
        raise ConfigError("sums --which hausdorff needs --psi")
    rep = analysis.hausdorff_partial_sums(f, parse_psi(args.psi), dim, N)
    checkpoints = sorted({2**k for k in range(N.bit_length()) if 2**k <= N} | {N // 2, N})
    rows = [{"n": n, "partial_sum": rep.partial_sums[n - 1]} for n in checkpoints if n >= 1]
    summary = {"f": f.render(), "dim": dim, "N": N, "doubling_ratio": rep.doubling_ratio,
               "classification": rep.classification, "heuristic": True,
               "exact_terms": rep.exact_terms}
    return rows, summary, True


# ---------------------------------------------------------------- parser


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--format", choices=("csv", "json"), help="default: from --out suffix, else csv")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--threads", type=_positive,
                   default=None, help="worker threads (default: $PADICDS_THREADS or 1)")
    p.add_argument("--max-n", type=_positive, default=SIEVE_CAP, help="cap on horizons N")
    p.add_argument("--modulus-cap", type=_positive, default=padic.MODULUS_CAP)
    p.add_argument("-v", "--verbose", action="store_true")


def _space_args(p: argparse.ArgumentParser):
    p.add_argument("--space", default="real", help="real | padic | product, or padic:P, product:ELL:P1,P2")
    p.add_argument("--p", type=int)
    p.add_argument("--ell", type=int, default=0)
    p.add_argument("--primes", type=_prime_list)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padicds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="exhaustive identity and inequality checks")
    vsub = verify.add_subparsers(dest="target", required=True)
    v = vsub.add_parser("group-ring")
    v.add_argument("--max", type=_positive, default=10)
    v.set_defaults(func=cmd_verify_group_ring)
    v = vsub.add_parser("overlaps")
    v.add_argument("--max", type=_positive, default=10)
    v.add_argument("--primes", type=_prime_list, default=[2, 3, 5])
    v.add_argument("--precision", choices=("common", "individual"), default="common")
    v.set_defaults(func=cmd_verify_overlaps)
    v = vsub.add_parser("counting")
    v.add_argument("--max", type=_positive, default=50)
    v.add_argument("--primes", type=_prime_list, default=[2, 3, 5, 7])
    v.set_defaults(func=cmd_verify_counting)
    v = vsub.add_parser("zero-one")
    v.add_argument("--primes", type=_prime_list, default=[2, 3, 5])
    v.add_argument("--multiples", type=_positive, default=10)
    v.set_defaults(func=cmd_verify_zero_one)
    for v in vsub.choices.values():
        _common(v)

    m = sub.add_parser("measure", help="per-n measures of the approximation sets")
    _space_args(m)
    m.add_argument("--psi", required=True)
    m.add_argument("--range", type=_range, required=True)
    m.add_argument("--variant", choices=[v.value for v in padic.Variant], default="standard")
    _common(m)
    m.set_defaults(func=cmd_measure)

    q = sub.add_parser("qia", help="finite-N quasi-independence ratio series")
    _space_args(q)
    q.add_argument("--psi", required=True)
    q.add_argument("--N", type=_positive, required=True)
    q.add_argument("--method", choices=("oracle", "fast", "both"), default="oracle")
    _common(q)
    q.set_defaults(func=cmd_qia)

    s = sub.add_parser("simulate", help="Monte-Carlo experiments")
    ssub = s.add_subparsers(dest="target", required=True)
    h = ssub.add_parser("hits")
    h.add_argument("--p", type=int, required=True)
    h.add_argument("--psi", required=True)
    h.add_argument("--N", type=_positive, required=True)
    h.add_argument("--samples", type=_positive, default=100)
    _common(h)
    h.set_defaults(func=cmd_simulate_hits)

    u = sub.add_parser("sums", help="phi-sum asymptotic and Hausdorff partial sums")
    u.add_argument("--which", choices=("phi-asymptotic", "hausdorff"), required=True)
    u.add_argument("--params", nargs="*", help="key=value items, e.g. p=2 N=100000 or f=power:1 dim=1 N=1000")
    u.add_argument("--psi")
    _common(u)
    u.set_defaults(func=cmd_sums)
    return parser


def _leaf(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.ArgumentParser:
    # the subparser selected by the positional words of argv
    node = parser
    for word in argv:
        if word.startswith("-"):
            break
        sp = next((a for a in node._actions if isinstance(a, argparse._SubParsersAction)), None)
        if sp is None or word not in sp.choices:
            break
        node = sp.choices[word]
    return node


def parse_args(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        leaf = _leaf(parser, argv)
        words = []
        for w in argv:
            if w.startswith("-"):
                break
            words.append(w)
        argv = words + _config_argv(read_config(known.config), leaf) + argv[len(words):]
    args = parser.parse_args(argv)
    if args.threads is None:
        env = os.environ.get("PADICDS_THREADS", "1")
        try:
            args.threads = _positive(env)
        except argparse.ArgumentTypeError:
            raise ConfigError(f"PADICDS_THREADS must be a positive integer, got {env!r}") from None
    return args


def _run_config(args) -> dict:
    cfg = {"command": " ".join(filter(None, [args.command, getattr(args, "target", None)]))}
    for key, value in sorted(vars(args).items()):
        if key in _RUNTIME_KEYS or key in ("command", "target"):
            continue
        if key == "range" and value:
            value = f"{value[0]}..{value[1]}"
        cfg[key] = value
    return cfg


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
    except ConfigError as exc:
        print(f"padicds: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # argparse reports bad flags with exit 2
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        rows, summary, ok = args.func(args)
    except CapExceededError as exc:
        print(f"padicds: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ConfigError, PsiSpecError, ValueError, OSError) as exc:
        print(f"padicds: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    fmt = args.format or ("json" if args.out and args.out.endswith(".json") else "csv")
    payload = encode(fmt, _run_config(args), rows, summary)
    line = _summary_line(_run_config(args)["command"], summary)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
        print(line)
    else:
        sys.stdout.write(payload)
        print(line, file=sys.stderr)
    log.info("done: %s", "ok" if ok else "failed")
    return EXIT_OK if ok else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
