"""Command-line front end.

Every subcommand prints deterministic CSV (header row first) or JSON tagged
``"schema": "achieveset/1"``.  Exit codes: 0 success, 1 input error,
2 refusal (an uncertified hypothesis or an Unknown verdict).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import achieve, rearrange
from .ideals import FIN, IN, NOT_IN, UNKNOWN, NotRepresentable, SummableIdeal, generated, parse_ideal
from .numeric import DomainError, Interval, Q, Refusal, decimal_str, fmt
from .series import (ConstructionError, Duplicated, make_block_harmonic, make_cantor_plus_point,
                     make_dyadic, make_geometric, make_interleaved_conditional,
                     make_missing_singleton, make_open_ai, make_signed_harmonic, make_supset,
                     parse_series)
from .sets import EVEN, ODD, ParseError, Progression, UndecidableShape, parse_set

SCHEMA = "achieveset/1"


class _Out:
    def __init__(self, args):
        self.digits: Optional[int] = getattr(args, "decimal", None)
        self.format: str = getattr(args, "format", "csv")
        self.stream = sys.stdout

    def num(self, x) -> str:
        x = Fraction(x)
        return fmt(x) if self.digits is None else decimal_str(x, self.digits)

    def interval(self, iv: Interval) -> str:
        return self.num(iv.lo) if iv.is_point else f"{self.num(iv.lo)}:{self.num(iv.hi)}"

    def csv(self, header: Sequence[str], rows) -> None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row)
        self.stream.write(buf.getvalue())

    def json(self, command: str, payload: dict) -> None:
        obj = {"schema": SCHEMA, "command": command}
        obj.update(payload)
        self.stream.write(json.dumps(obj, indent=2) + "\n")

    def line(self, text: str) -> None:
        self.stream.write(text + "\n")


def _witness(indices) -> str:
    return "{" + ";".join(map(str, indices)) + "}"


def _generators(args) -> list:
    return [parse_set(g) for g in (args.gen or [])]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_sums(args, out: _Out) -> int:
    rows = achieve.subset_sums(parse_series(args.series), args.depth)
    if out.format == "json":
        out.json("sums", {"k": args.depth, "rows": [
            {"value": out.num(r.value), "count": r.count, "witness": list(r.witness)} for r in rows]})
    else:
        out.csv(["value", "count", "witness"],
                ([out.num(r.value), r.count, _witness(r.witness)] for r in rows))
    return 0


def cmd_hull(args, out: _Out) -> int:
    rep = achieve.hull(parse_series(args.series), args.depth)
    if out.format == "json":
        out.json("hull", {"k": rep.k, "pieces": [[out.num(p.lo), out.num(p.hi)] for p in rep.pieces],
                          "gap": out.num(rep.gap), "length": out.num(rep.total_length)})
    else:
        out.csv(["lo", "hi"], ([out.num(p.lo), out.num(p.hi)] for p in rep.pieces))
    return 0


def cmd_classify(args, out: _Out) -> int:
    v = achieve.kakeya_classify(parse_series(args.series), args.horizon)
    if out.format == "json":
        out.json("classify", v.to_json())
    else:
        out.csv(["class", "start", "certified", "strict_failures"],
                [[v.cls, v.start or "", str(v.certified).lower(), ";".join(map(str, v.failures))]])
    return 0 if v.cls != "Unknown" else 2


def cmd_measure(args, out: _Out) -> int:
    rep = achieve.measure_estimate(parse_series(args.series), args.depth)
    lim = rep.limit
    lim_s = "unknown" if lim is None else ("inf" if lim == float("inf") else out.num(lim))
    if out.format == "json":
        out.json("measure", {"values": [[k, out.num(v)] for k, v in rep.values], "limit": lim_s})
    else:
        out.csv(["k", "value"], [*([k, out.num(v)] for k, v in rep.values), ["limit", lim_s]])
    return 0


def _ideal_samples(args):
    s = parse_series(args.series)
    ideal = parse_ideal(args.ideal)
    return s, ideal, achieve.ideal_sums(s, ideal, args.depth, _generators(args))


def cmd_ideal_sums(args, out: _Out) -> int:
    _, ideal, samples = _ideal_samples(args)
    if out.format == "json":
        out.json("ideal-sums", {"ideal": ideal.to_expr(), "k": args.depth, "samples": [
            {"value": out.interval(smp.value), "witness": smp.witness_str(),
             "in_ideal": str(smp.in_ideal)} for smp in samples]})
    else:
        out.csv(["value", "count", "witness"],
                ([out.interval(smp.value), 1, smp.witness_str()] for smp in samples))
    return 0


def cmd_symmetrize(args, out: _Out) -> int:
    s, ideal, samples = _ideal_samples(args)
    rep = achieve.symmetrize(s, ideal, samples)
    if out.format == "json":
        out.json("symmetrize", {"total": out.interval(rep.total),
                                "intersection": [out.num(x) for x in rep.intersection],
                                "symmetric": rep.symmetric, "reflection_ok": rep.reflection_ok,
                                "pairs": [[out.interval(a.value), out.interval(b)]
                                          for a, b in zip(samples, rep.filter_samples)]})
    else:
        out.csv(["sample", "reflected"],
                ([out.interval(a.value), out.interval(b)] for a, b in zip(samples, rep.filter_samples)))
    return 0


def cmd_extremes(args, out: _Out) -> int:
    mx, mn = achieve.extreme_point_membership(parse_series(args.series), parse_ideal(args.ideal))
    if out.format == "json":
        out.json("extremes", {"max": str(mx), "min": str(mn)})
    else:
        out.csv(["max", "min"], [[str(mx), str(mn)]])
    return 2 if UNKNOWN in (mx, mn) else 0


def cmd_injectivity(args, out: _Out) -> int:
    level, cert = achieve.injectivity_check(parse_series(args.series), args.depth)
    if out.format == "json":
        out.json("injectivity", {"k": args.depth, "level_injective": level, "certificate": str(cert)})
    else:
        out.csv(["level_injective", "certificate"], [[str(level).lower(), str(cert)]])
    return 0


def cmd_cap_law(args, out: _Out) -> int:
    s = parse_series(args.series)
    rep = achieve.intersection_law_check(s, parse_ideal(args.ideal), parse_ideal(args.ideal2),
                                         args.depth, _generators(args),
                                         [parse_set(g) for g in (args.gen2 or [])])
    if out.format == "json":
        out.json("cap-law", rep.to_json())
    else:
        out.csv(["k", "certificate", "shared", "cap_samples", "discrepancies"],
                [[rep.k, str(rep.certificate), rep.shared, rep.cap_samples, len(rep.discrepancies)]])
    return 0


def _stream_rows(out: _Out, n_max: int, sigma: Callable[[int], int],
                 value: Callable[[int], Interval]):
    """Rows n, sigma_n, partial_sum, error_bound on the 2**-64 grid.

    The value lies in [partial_sum, partial_sum + error_bound].
    """
    for n in range(1, n_max + 1):
        iv = value(n)
        lo = Fraction(iv.lo.numerator * 2**64 // iv.lo.denominator, 2**64)
        w = iv.hi - lo
        err = Fraction(-(-w.numerator * 2**64 // w.denominator), 2**64)
        yield [n, sigma(n), out.num(lo), out.num(err)]


def cmd_rearrange(args, out: _Out) -> int:
    s = parse_series(args.series)
    stream = rearrange.rearrange_difference_to(s, args.target)
    eng = stream.engine
    n_max = args.steps
    if args.tol is not None:
        tol = Q(args.tol)
        for N in range(1, args.steps + 1):
            eng.run(N)
            if eng.distance_upper(N) <= tol:
                n_max = N
                break
        else:
            out.line(f"tolerance {fmt(tol)} not reached within {args.steps} steps")
            return 2
    eng.run(n_max)
    if out.format == "json":
        out.json("rearrange", {"target": out.num(Q(args.target)), "steps": n_max,
                               "difference": out.interval(eng.difference(n_max)),
                               "envelope": out.num(eng.envelope(n_max) or 0),
                               "crossings": len(eng.crossings),
                               "envelope_violations": eng.envelope_violations})
    else:
        out.csv(["n", "sigma_n", "partial_sum", "error_bound"],
                _stream_rows(out, n_max, lambda n: eng.sigma[n - 1], eng.difference))
    return 0


def cmd_riemann(args, out: _Out) -> int:
    r = rearrange.riemann_rearrange(parse_series(args.series), args.target)
    n_max = args.steps
    if args.tol is not None:
        N = r.run_until(Q(args.tol), args.steps)
        if N is None:
            out.line(f"tolerance {args.tol} not reached within {args.steps} steps")
            return 2
        n_max = N
    r.extend(n_max)
    if out.format == "json":
        out.json("riemann", {"target": out.num(r.target), "steps": n_max,
                             "partial": out.interval(r.partial(n_max)),
                             "support_sign": r.sign, "support_ok": r.support_ok(n_max)})
    else:
        out.csv(["n", "sigma_n", "partial_sum", "error_bound"],
                _stream_rows(out, n_max, r.sigma, r.partial))
    return 0


def cmd_sr_classify(args, out: _Out) -> int:
    res = rearrange.sr_classify(parse_series(args.series), parse_ideal(args.ideal), _generators(args))
    if out.format == "json":
        payload = res.to_json()
        payload["anchor"] = [out.num(res.anchor.lo), out.num(res.anchor.hi)]
        out.json("sr-classify", payload)
    else:
        out.csv(["class", "anchor_lo", "anchor_hi", "reason", "caveat"],
                [[res.value, out.num(res.anchor.lo), out.num(res.anchor.hi), res.reason, res.caveat]])
    return 0


def cmd_greedy(args, out: _Out) -> int:
    g = rearrange.greedy_subset_representation(parse_series(args.series), args.target, args.steps)
    if out.format == "json":
        out.json("greedy", {"target": out.num(Q(args.target)), "eps": g.bits,
                            "residuals": [out.num(r) for r in g.residuals],
                            "terminated_at": g.terminated_at})
    else:
        out.csv(["n", "eps", "residual"],
                ([n, e, out.num(r)] for n, (e, r) in enumerate(zip(g.bits, g.residuals), 1)))
    return 0


# ---------------------------------------------------------------------------
# demos
# ---------------------------------------------------------------------------


class _Demo:
    def __init__(self, out: _Out, name: str, statement: str):
        self.out, self.ok = out, True
        out.line(f"demo {name}")
        out.line(f"statement: {statement}")

    def info(self, text: str) -> None:
        self.out.line(f"  {text}")

    def check(self, label: str, cond: bool) -> None:
        self.ok &= bool(cond)
        self.out.line(f"{'PASS' if cond else 'FAIL'} {label}")


def demo_nondense_singleton(out):
    d = _Demo(out, "niegesty", "SR_I is a singleton when every set of I is absolutely summable")
    res = rearrange.sr_classify(make_interleaved_conditional(), generated(EVEN))
    d.info(f"series x_(2n-1) = (-1)^n/n, x_(2n) = 1/2^n; ideal (generated (prog 2 2)): {res.value}")
    d.info(f"reason: {res.reason}")
    d.check("class Singleton", res.value == "Singleton")
    return d.ok


def demo_summable_harmonic(out):
    d = _Demo(out, "summable-harmonic", "the harmonic summable ideal leaves sum (-1)^n/n fixed")
    res = rearrange.sr_classify(make_signed_harmonic(), SummableIdeal("harmonic"))
    d.info(f"class {res.value}; reason: {res.reason}")
    d.check("class Singleton", res.value == "Singleton")
    res2 = rearrange.sr_classify(make_signed_harmonic(), generated(EVEN), [EVEN])
    d.info(f"with ideal (generated (prog 2 2)): {res2.value} ({res2.caveat})")
    d.check("even-generated ideal gives ContainsLeftHalfline", res2.value == "ContainsLeftHalfline")
    return d.ok


def demo_missing_singleton(out):
    d = _Demo(out, "missing-singleton", "A(x_n) = [-x/2, x] while max A(x_n) = x is missing from A_I")
    a = Progression(3, 3)
    s = make_missing_singleton(a, 1)
    h = achieve.hull(s, 16)
    dist = achieve.hausdorff_to_interval(h.pieces, Interval(Fraction(-1, 2), 1))
    d.info(f"hull k=16: {[str(p) for p in h.pieces]} distance to [-1/2, 1] = {out.num(dist)}")
    d.check("hull within 2^-13 of [-1/2, 1]", dist <= Fraction(1, 2**13))
    mx, mn = achieve.extreme_point_membership(s, generated(a))
    d.info(f"max witness verdict {mx}, min witness verdict {mn}")
    d.check("max verdict NotIn", mx is NOT_IN)
    d.check("min verdict In", mn is IN)
    blocks = all(s.gap_block_sum(i) == Fraction(1, 2 ** (i + 2)) for i in range(13))
    d.check("gap blocks sum to x/2^(i+2) for i <= 12", blocks)
    return d.ok


def demo_open_ai(out):
    d = _Demo(out, "open-ai", "A_I(x_n) = (-1, 2) inside A(x_n) = [-1, 2]")
    D, B, E = Progression(3, 3), Progression(2, 3), Progression(1, 3)
    s = make_open_ai(D, B, E)
    target = Interval(-1, 2)
    for k in (4, 8, 12, 16):
        h = achieve.hull(s, k)
        d.info(f"hull k={k}: {len(h.pieces)} piece(s), distance to [-1, 2] = "
               f"{out.num(achieve.hausdorff_to_interval(h.pieces, target))}")
    h = achieve.hull(s, 16)
    d.check("hull k=16 within 2^-14 of [-1, 2]",
            achieve.hausdorff_to_interval(h.pieces, target) <= Fraction(1, 2**14))
    pts = achieve.sample_points(achieve.ideal_sums(s, generated(D), 14, [D]))
    d.info(f"ideal samples k=14: min {out.num(min(pts))}, max {out.num(max(pts))}")
    d.check("no sample equals -1 or 2", -1 not in pts and 2 not in pts)
    mx, mn = achieve.extreme_point_membership(s, generated(D))
    d.info(f"extreme witnesses: max {mx}, min {mn}")
    d.check("endpoints not attained inside the ideal", mx is NOT_IN and mn is NOT_IN)
    return d.ok


def supset_grid(k_half: int) -> set:
    """Dyadic sums j/2^m plus endpoints of the level-m ternary intervals (m = k_half)."""
    dy = [Fraction(j, 2**k_half) for j in range(2**k_half)]
    cantor = [Fraction(0)]
    for i in range(1, k_half + 1):
        cantor = cantor + [c + Fraction(2, 3**i) for c in cantor]
    ends = set(cantor) | {c + Fraction(1, 3**k_half) for c in cantor}
    return {a + b for a in dy for b in ends}


def demo_supset(out):
    d = _Demo(out, "supset", "A_I(x_n) = dyadic sums + Cantor set, A(x_n) = [0, 2]")
    s = make_supset(EVEN)
    pts = achieve.sample_points(achieve.ideal_sums(s, generated(ODD), 14, [ODD]))
    grid = supset_grid(7)
    d.info(f"{len(pts)} samples at k=14; independent grid has {len(grid)} points")
    d.check("samples equal dyadic + level-7 Cantor endpoints", pts == grid)
    h = achieve.hull(s, 14)
    dist = achieve.hausdorff_to_interval(h.pieces, Interval(0, 2))
    d.info(f"hull k=14: {len(h.pieces)} piece(s), distance to [0, 2] = {out.num(dist)}")
    d.check("hull covers [0, 2] within 3^-7", dist <= Fraction(1, 3**7))
    return d.ok


def demo_cantor_plus_point(out):
    d = _Demo(out, "cantor-plus-point", "1 lies in A_I and in A_(F_I): 1 = x_1 = sum_(n>=2) x_n")
    s = make_cantor_plus_point()
    for ideal, gens in ((FIN, []), (generated(EVEN), [EVEN])):
        samples = achieve.ideal_sums(s, ideal, 10, gens)
        rep = achieve.symmetrize(s, ideal, samples)
        d.info(f"ideal {ideal.to_expr()}: intersection sample {{{', '.join(out.num(x) for x in rep.intersection)}}}")
        d.check(f"1 in both sample sets for {ideal.to_expr()}", Fraction(1) in rep.intersection)
        d.check(f"reflection about total/2 for {ideal.to_expr()}", rep.reflection_ok)
    return d.ok


def demo_duplicated(out):
    d = _Demo(out, "duplicated", "x_(2n-1) = x_(2n) = 1/2^n: distinct ideals, equal A_I")
    s = Duplicated(make_dyadic(), require_quick=False)
    eq, only_i, only_j = achieve.compare_ideal_samples(s, generated(ODD), generated(EVEN), 12, [ODD], [EVEN])
    d.info(f"k=12 samples: only-odd {len(only_i)}, only-even {len(only_j)}")
    d.check("A_I and A_J samples coincide", eq)
    q = Duplicated(make_geometric(1, Fraction(1, 5)))
    level, cert = achieve.injectivity_check(q, 4)
    v = achieve.kakeya_classify(q, 20)
    d.info(f"quick duplicate of 1/5^n: level injective {level}, certificate {cert}, Kakeya {v.cls}")
    d.check("duplicate positions break injectivity", not level and cert.kind == "None")
    return d.ok


def demo_block_harmonic(out):
    d = _Demo(out, "block-harmonic", "sum (x_n - x_sigma(n)) = x for any x >= 0")
    s = make_block_harmonic()
    eng = rearrange.rearrange_difference_to(s, 1).engine.run(20000)
    n0 = eng.stable_from(Fraction(1, 100))
    iv = eng.difference(20000)
    d.info(f"target 1, 20000 steps: D_N in [{decimal_str(iv.lo, 12)}, {decimal_str(iv.hi, 12)}], "
           f"within 1/100 from N = {n0}, crossings {len(eng.crossings)}")
    d.check("crossing envelope holds at every crossing", not eng.envelope_violations)
    d.check("D_N within 1/100 of 1 from some N0 <= 20000", n0 is not None)
    d.check("prefix injective", eng.injective())
    return d.ok


def demo_density_null(out):
    d = _Demo(out, "density-null", "sets with few elements reach a vanishing share of dyadic points")
    count, ratio = achieve.density_cover_count(20, 2)
    d.info(f"k=20, at most 2 elements: {count} points, ratio {out.num(ratio)}")
    d.check("count 211", count == 211 and ratio == Fraction(211, 2**20))
    ratios = [achieve.density_cover_count(k, 2)[1] for k in range(10, 27)]
    d.check("ratio with at most 2 elements decreases for k = 10..26",
            all(a > b for a, b in zip(ratios, ratios[1:])))
    for k in range(10, 27):
        d.info(f"k={k} max_ones={k // 10} ratio {out.num(achieve.density_cover_count(k, k // 10)[1])}")
    return d.ok


DEMOS = {
    "niegesty": demo_nondense_singleton,
    "summable-harmonic": demo_summable_harmonic,
    "missing-singleton": demo_missing_singleton,
    "open-ai": demo_open_ai,
    "supset": demo_supset,
    "cantor-plus-point": demo_cantor_plus_point,
    "duplicated": demo_duplicated,
    "block-harmonic": demo_block_harmonic,
    "density-null": demo_density_null,
}


def cmd_demo(args, out: _Out) -> int:
    names = list(DEMOS) if args.name == "all" else [args.name]
    ok = True
    for name in names:
        ok &= DEMOS[name](out)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="achieveset", description="Achievement sets of series, exactly.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--decimal", type=int, metavar="N",
                        help="print N-digit truncated decimals (marked ~) instead of p/q")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, *, series=True, ideal=False, depth=None, target=False, gens=False):
        sp = sub.add_parser(name, parents=[common])
        if series:
            sp.add_argument("--series", required=True, help="(geom 1 1/2), (cantor), ... or JSON")
        if ideal:
            sp.add_argument("--ideal", required=True, help="(fin), (generated (prog 2 2)), ...")
        if depth is not None:
            sp.add_argument("--depth", type=int, default=depth)
        if target:
            sp.add_argument("--target", required=True, help="exact rational p/q")
        if gens:
            sp.add_argument("--gen", action="append", metavar="SET", help="generator set (repeatable)")
        sp.set_defaults(func=func)
        return sp

    add("sums", cmd_sums, depth=8)
    add("hull", cmd_hull, depth=8)
    add("classify", cmd_classify).add_argument("--horizon", type=int, default=60)
    add("measure", cmd_measure, depth=16)
    add("ideal-sums", cmd_ideal_sums, ideal=True, depth=8, gens=True)
    add("symmetrize", cmd_symmetrize, ideal=True, depth=8, gens=True)
    add("extremes", cmd_extremes, ideal=True)
    add("injectivity", cmd_injectivity, depth=12)
    cap = add("cap-law", cmd_cap_law, ideal=True, depth=10, gens=True)
    cap.add_argument("--ideal2", required=True)
    cap.add_argument("--gen2", action="append", metavar="SET")
    for name, func, steps in (("rearrange", cmd_rearrange, 100), ("riemann", cmd_riemann, 100)):
        sp = add(name, func, target=True)
        sp.add_argument("--steps", type=int, default=steps)
        sp.add_argument("--tol", help="stop once the diagnostic error is at most this p/q")
    add("sr-classify", cmd_sr_classify, ideal=True, gens=True)
    add("greedy", cmd_greedy, target=True).add_argument("--steps", type=int, default=24)
    demo = add("demo", cmd_demo, series=False)
    demo.add_argument("name", choices=[*DEMOS, "all"])
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors; keep 2 for refusals
        return 0 if e.code in (0, None) else 1
    out = _Out(args)
    try:
        return args.func(args, out)
    except (Refusal, UndecidableShape, NotRepresentable) as e:
        print(f"refused: {e}", file=sys.stderr)
        return 2
    except (ParseError, DomainError, ConstructionError, ValueError, ZeroDivisionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
