"""Command-line driver with reproducible, schema-versioned reports.

Configuration comes from an optional flat key=value file overridden by
command-line flags; every report embeds the fully resolved configuration,
so a report identifies its own inputs.  With the same configuration and
seed the emitted bytes are identical run to run (timings are only included
on request, since they cannot be).

Exit codes: 0 success, 2 precondition or certification failure, 3 a
desk-scale cap was exceeded, 4 two internal computation routes disagreed
(always a defect, never user error).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields as dc_fields
from time import perf_counter

from .certify import regular_elliptic_certify
from .chartab import TABLE_ORDER_CAP
from .counting import BRUTE_LATTICE_CAP, count_brute, count_structured
from .division import DivisionAlgebra, total_fixed_points
from .errors import (
    CapExceeded,
    LevelTowerError,
    NoNormalForm,
    NonExactDivision,
    NonLinearIsogeny,
    NotAFlag,
    OracleMismatch,
    PrecisionError,
    PreconditionError,
)
from .formal import build_tower, check_level, gl_order
from .fq import FqField
from .groups import GROUP_ORDER_CAP
from .induced import JL_Q_CAP, jl_match
from .laurent import Laurent
from .matrices import charpoly, det, mat_reduce_mod
from .rings import DEFAULT_RANK_CAP, CoeffRing
from .serialize import (
    Cache,
    REPORT_SCHEMA,
    canonical_dumps,
    content_key,
    jsonable,
    tower_from_doc,
    tower_to_doc,
)
from .strata import enumerate_flags, enumerate_summands, flag_of_point, strata_fixed_count

CSV_SCHEMA = "leveltower-csv/1"

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_CAP = 3
EXIT_MISMATCH = 4

EXIT_CODES = {
    "success": EXIT_OK,
    "precondition": EXIT_PRECONDITION,
    "cap": EXIT_CAP,
    "mismatch": EXIT_MISMATCH,
}


def exit_code_for(exc: BaseException) -> int | None:
    if isinstance(exc, CapExceeded):
        return EXIT_CAP
    if isinstance(exc, (OracleMismatch, NonExactDivision, NonLinearIsogeny,
                        NoNormalForm)):
        return EXIT_MISMATCH
    if isinstance(exc, (PreconditionError, NotAFlag, PrecisionError)):
        return EXIT_PRECONDITION
    return None


# -- configuration ----------------------------------------------------------------


@dataclass
class RunConfig:
    q: int = 2
    n: int = 2
    m: int = 1
    prec: int | None = None
    u_spec: str | None = None
    bound: int | None = None
    rank_cap: int = DEFAULT_RANK_CAP
    group_cap: int = GROUP_ORDER_CAP
    table_cap: int = TABLE_ORDER_CAP
    lattice_cap: int = BRUTE_LATTICE_CAP
    jl_q_cap: int = JL_Q_CAP
    pair_cap: int = 20000
    scan_m: int = 3
    cache_dir: str | None = None
    format: str = "json"
    seed: int = 0

    def resolved(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in dc_fields(self)}
        if out["format"] not in ("json", "csv", "text"):
            raise PreconditionError(f"unknown output format {out['format']!r}")
        for key in ("rank_cap", "group_cap", "table_cap", "lattice_cap",
                    "jl_q_cap", "pair_cap"):
            if out[key] <= 0:
                raise PreconditionError(f"cap {key} must be positive")
        return out

    def parsed_u_spec(self):
        if self.u_spec is None:
            return None
        out = []
        for tok in self.u_spec.split(";"):
            tok = tok.strip()
            if tok.startswith("nil"):
                out.append(int(tok[3:]))
            else:
                out.append([int(c) for c in tok.split(",")])
        return out


_INT_KEYS = {"q", "n", "m", "prec", "bound", "rank_cap", "group_cap", "table_cap",
             "lattice_cap", "jl_q_cap", "pair_cap", "scan_m", "seed"}


def load_config_file(path: str) -> dict:
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise PreconditionError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if key in _INT_KEYS:
                out[key] = None if value.lower() == "none" else int(value)
            else:
                out[key] = value
    return out


def resolve_config(args) -> RunConfig:
    cfg = RunConfig()
    names = {f.name for f in dc_fields(RunConfig)}
    if args.config:
        for key, value in load_config_file(args.config).items():
            if key not in names:
                raise PreconditionError(f"unknown config key {key!r}")
            setattr(cfg, key, value)
    for name in names:
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    return cfg


# -- element mini-language ----------------------------------------------------------


def parse_laurent(expr: str, field: FqField) -> Laurent:
    """Sum of terms over F_q((pi)): `3`, `P`, `P^2`, `2*P^3`, `1+P`, `-P`."""
    coeffs = parse_poly(expr, field, allow_T=False)
    return coeffs[0] if coeffs else Laurent.zero(field)


def parse_poly(expr: str, field: FqField, allow_T: bool = True):
    """Coefficient list (low degree first) of a polynomial in T over F_q((pi))."""
    expr = expr.replace(" ", "")
    if not expr:
        raise PreconditionError("empty element expression")
    terms = []
    sign, cur = 1, ""
    for ch in expr:
        if ch in "+-" and cur:
            terms.append((sign, cur))
            sign, cur = (1 if ch == "+" else -1), ""
        elif ch == "-" and not cur:
            sign = -sign
        elif ch == "+" and not cur:
            pass
        else:
            cur += ch
    if not cur:
        raise PreconditionError(f"dangling sign in {expr!r}")
    terms.append((sign, cur))

    out: list[Laurent] = []
    for sign, term in terms:
        code = 1
        pi_exp = 0
        t_deg = 0
        for factor in term.split("*"):
            if not factor:
                raise PreconditionError(f"empty factor in term {term!r}")
            base, _, exp = factor.partition("^")
            e = int(exp) if exp else 1
            if base == "P":
                pi_exp += e
            elif base == "T":
                if not allow_T:
                    raise PreconditionError("T is not allowed in a scalar entry")
                t_deg += e
            else:
                c = int(base)
                if not 0 <= c < field.q:
                    raise PreconditionError(
                        f"coefficient code {c} is outside 0..{field.q - 1}")
                for _ in range(e):
                    code = field.mul(code, c)
        if sign < 0:
            code = field.neg(code)
        while len(out) <= t_deg:
            out.append(Laurent.zero(field))
        out[t_deg] = out[t_deg] + Laurent.pi(field, pi_exp).scale(code)
    return out


def parse_matrix(spec: str, field: FqField):
    """Matrix mini-language: companion:<poly in T>, diag:<entries>, mat:<rows>."""
    kind, sep, rest = spec.partition(":")
    if not sep:
        raise PreconditionError(
            f"matrix spec {spec!r} needs a kind prefix (companion:, diag:, mat:)")
    if kind == "companion":
        from .matrices import companion
        return companion(field, parse_poly(rest, field))
    if kind == "diag":
        entries = [parse_laurent(tok, field) for tok in rest.split(",")]
        n = len(entries)
        return [[entries[i] if i == j else Laurent.zero(field) for j in range(n)]
                for i in range(n)]
    if kind == "mat":
        rows = [[parse_laurent(tok, field) for tok in row.split(",")]
                for row in rest.split(";")]
        if any(len(r) != len(rows) for r in rows):
            raise PreconditionError("mat: needs a square matrix")
        return rows
    raise PreconditionError(f"unknown matrix kind {kind!r}")


def parse_algebra_element(spec: str, alg: DivisionAlgebra):
    """Element of the division algebra: `w`, `x:<code>`, or `<c0>;<c1>;...`
    with each slot a scalar expression over the degree-n coefficient field."""
    if spec == "w":
        return alg.uniformizer()
    if spec.startswith("x:"):
        return alg.teichmuller(int(spec[2:]))
    slots = spec.split(";")
    if len(slots) != alg.n:
        raise PreconditionError(f"expected {alg.n} coordinate slots")
    return alg.elem([parse_laurent(tok, alg.big) for tok in slots])


# -- commands -------------------------------------------------------------------


def cmd_tower(cfg: RunConfig) -> dict:
    cache_info = {"enabled": cfg.cache_dir is not None, "hit": False, "key": None}
    tower = None
    if cfg.cache_dir is not None:
        cache = Cache(cfg.cache_dir)
        key = content_key({
            "kind": "tower", "q": cfg.q, "n": cfg.n, "m": cfg.m,
            "prec": cfg.prec, "u_spec": cfg.u_spec, "rank_cap": cfg.rank_cap,
        })
        cache_info["key"] = key
        hit = cache.get(key)
        if hit is not None:
            tower = tower_from_doc(json.loads(hit))
            cache_info["hit"] = True
    if tower is None:
        tower = build_tower(cfg.n, cfg.q, cfg.m, prec=cfg.prec,
                            u_spec=cfg.parsed_u_spec(), rank_cap=cfg.rank_cap)
        if cfg.cache_dir is not None:
            cache.put(cache_info["key"], canonical_dumps(tower_to_doc(tower)))
    level = check_level(tower.structure, pair_cap=cfg.pair_cap)
    if not level["ok"]:
        raise OracleMismatch(f"level check failed: {level['witness']}")
    expected = gl_order(cfg.n, cfg.q, cfg.m)
    if tower.rank_over_base != expected:
        raise OracleMismatch(
            f"tower rank {tower.rank_over_base} != group order {expected}")
    return {
        "stage_degrees": list(tower.stage_degrees),
        "rank": tower.rank_over_base,
        "gl_order": expected,
        "level_check": level,
        "u_spec_label": tower.u_spec_label,
        "cache": cache_info,
    }


def cmd_count(cfg: RunConfig, b_spec: str, g_spec: str) -> dict:
    alg = DivisionAlgebra(cfg.q, cfg.n)
    b = parse_algebra_element(b_spec, alg)
    g = parse_matrix(g_spec, alg.small)
    rep_s = total_fixed_points(alg, b, g, cfg.m, route="structured")
    rep_b = total_fixed_points(alg, b, g, cfg.m, route="brute")
    if rep_s.total != rep_b.total:
        raise OracleMismatch(
            f"structured total {rep_s.total} != brute-force total {rep_b.total}")
    pol = alg.reduced_charpoly(b)
    cert = regular_elliptic_certify(pol)
    return {
        "b": b_spec,
        "g": g_spec,
        "m": cfg.m,
        "norm_valuation": cert.det_val,
        "det_g_valuation": det(g).valuation(),
        "per_fiber": rep_s.per_fiber,
        "total": rep_s.total,
        "structured": rep_s.summary(),
        "bruteforce": rep_b.summary(),
        "certificate": cert.summary(),
        "agreement": True,
    }


def cmd_strata(cfg: RunConfig) -> dict:
    per_h = {}
    total = 0
    for h in range(1, cfg.n):
        cnt = len(enumerate_summands(cfg.n, cfg.q, cfg.m, h))
        per_h[h] = cnt
        total += cnt
    return {"n": cfg.n, "q": cfg.q, "m": cfg.m,
            "counts": {str(h): c for h, c in per_h.items()}, "total": total}


def cmd_strata_action(cfg: RunConfig, g_spec: str) -> dict:
    field = FqField(*_split(cfg.q))
    g = parse_matrix(g_spec, field)
    cert = regular_elliptic_certify(charpoly(g))
    if cert.det_val != 0:
        raise PreconditionError(
            f"v(det g) = {cert.det_val} != 0, the label action needs a unit class")
    table = {}
    minimal_zero = {}
    for h in range(1, cfg.n):
        row = {}
        for m in range(1, cfg.scan_m + 1):
            row[str(m)] = strata_fixed_count(mat_reduce_mod(g, m), cfg.n, cfg.q, m, h)
        table[str(h)] = row
        zeros = [m for m in range(1, cfg.scan_m + 1)
                 if all(row[str(k)] == 0 for k in range(m, cfg.scan_m + 1))]
        minimal_zero[str(h)] = zeros[0] if zeros else None
    return {"g": g_spec, "certificate": cert.summary(), "fixed_counts": table,
            "observed_minimal_free_level": minimal_zero, "scan_m": cfg.scan_m}


def cmd_flags(cfg: RunConfig) -> dict:
    flags = enumerate_flags(cfg.n, cfg.q, cfg.m)
    return {"n": cfg.n, "q": cfg.q, "m": cfg.m,
            "signature": list(range(1, cfg.n)),
            "count": len(flags)}


def load_value_table(path: str):
    """Value-table file: a header line `n q m`, then `codes : tiers` rows."""
    header = None
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if header is None:
                parts = line.split()
                if len(parts) != 3:
                    raise PreconditionError(f"{path}:{lineno}: header must be `n q m`")
                header = tuple(int(x) for x in parts)
                continue
            if ":" not in line:
                raise PreconditionError(f"{path}:{lineno}: expected `codes : tiers`")
            left, _, right = line.partition(":")
            vec = tuple(int(x) for x in left.strip().split(","))
            tiers = tuple(int(x) for x in right.strip().split(",")) if right.strip() else ()
            values[vec] = tiers
    if header is None:
        raise PreconditionError(f"{path}: missing `n q m` header")
    return header, values


def cmd_flag_of_point(cfg: RunConfig, path: str) -> dict:
    (n, q, m), values = load_value_table(path)
    flag = flag_of_point(values, n, q, m)
    return {"n": n, "q": q, "m": m,
            "signature": list(flag.signature),
            "parts": [A.describe() for A in flag.parts]}


def cmd_jl(cfg: RunConfig) -> dict:
    result = jl_match(cfg.q, cap_q=cfg.jl_q_cap)
    doc = result.summary()
    doc["cuspidal_count"] = len(result.pairs)
    doc["degrees_g"] = list(result.table_g.degrees)
    doc["degrees_b"] = list(result.table_b.degrees)
    return doc


def _split(q: int):
    p = 2
    while q % p:
        p += 1
    f = 0
    t = 1
    while t < q:
        t *= p
        f += 1
    return p, f


def cmd_selftest(cfg: RunConfig) -> dict:
    """A quick battery of cross-checked identities; any failure raises."""
    import random

    from .cyclotomic import Cyclotomic
    from .chartab import character_table, cuspidal_characters
    from .groups import group_gl

    checks = []

    def record(name, ok=True):
        checks.append({"name": name, "status": "pass" if ok else "fail"})
        if not ok:
            raise OracleMismatch(f"selftest failed at {name}")

    tower = build_tower(2, 2, 1)
    record("tower 2,2,1 rank 6", tower.rank_over_base == 6 == gl_order(2, 2, 1))
    record("tower 2,2,1 stages [3,2]", tower.stage_degrees == [3, 2])
    record("tower 2,2,1 level check", check_level(tower.structure)["ok"])

    record("strata census 3,2,1",
           [len(enumerate_summands(3, 2, 1, h)) for h in (1, 2)] == [7, 7])
    record("flags 2,2,1", len(enumerate_flags(2, 2, 1)) == 3)

    field = FqField(2, 1)
    g = parse_matrix("companion:T^2+T+1", field)
    gi = parse_matrix("mat:1,1;1,0", field)
    s = count_structured(g, gi, 1)
    bf = count_brute(g, gi, 1)
    record("count routes agree", s.count == bf.count and bf.stable)
    record("count value 3", s.count == 3)

    rng = random.Random(cfg.seed)
    ring = CoeffRing(field, 3, (2,))
    for _ in range(50):
        a = ring.random_element(rng)
        b = ring.random_element(rng)
        c = ring.random_element(rng)
        if (a + b) * c != a * c + b * c or a * b != b * a:
            record("ring axioms", False)
        if (a * b).nf() != (a * b).nf().nf():
            record("normal form idempotence", False)
    record("ring axioms")
    record("normal form idempotence")

    tab = character_table(group_gl(2, cfg.q, 1)) if cfg.q <= 4 else None
    if tab is not None:
        record(f"cuspidal count q={cfg.q}",
               len(cuspidal_characters(tab)) == cfg.q * (cfg.q - 1) // 2)
    jl = jl_match(2, cap_q=cfg.jl_q_cap)
    record("jl q=2 matching size 1", len(jl.pairs) == 1)
    return {"checks": checks, "passed": len(checks)}


# -- report rendering -------------------------------------------------------------


def render_csv(command: str, results: dict) -> str:
    import csv
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")

    def add(cols):
        writer.writerow([str(c) for c in cols])

    if command == "tower":
        add(["schema", "command", "q", "n", "m", "rank", "gl_order", "stages",
             "level_ok", "cache_hit"])
        add([CSV_SCHEMA, command, results["config"]["q"], results["config"]["n"],
             results["config"]["m"], results["results"]["rank"],
             results["results"]["gl_order"],
             "|".join(str(d) for d in results["results"]["stage_degrees"]),
             results["results"]["level_check"]["ok"],
             results["results"]["cache"]["hit"]])
    elif command == "count":
        add(["schema", "command", "q", "n", "m", "b", "g", "per_fiber", "total",
             "stable", "agreement"])
        r = results["results"]
        add([CSV_SCHEMA, command, results["config"]["q"], results["config"]["n"],
             results["config"]["m"], r["b"], r["g"], r["per_fiber"], r["total"],
             r["bruteforce"]["stable"], r["agreement"]])
    elif command == "strata":
        add(["schema", "command", "q", "n", "m", "h", "count"])
        r = results["results"]
        for h, c in sorted(r["counts"].items(), key=lambda kv: int(kv[0])):
            add([CSV_SCHEMA, command, r["q"], r["n"], r["m"], h, c])
    elif command == "strata-action":
        add(["schema", "command", "g", "h", "m", "fixed"])
        r = results["results"]
        for h, row in sorted(r["fixed_counts"].items(), key=lambda kv: int(kv[0])):
            for m, c in sorted(row.items(), key=lambda kv: int(kv[0])):
                add([CSV_SCHEMA, command, r["g"], h, m, c])
    elif command == "flags":
        r = results["results"]
        add(["schema", "command", "q", "n", "m", "signature", "count"])
        add([CSV_SCHEMA, command, r["q"], r["n"], r["m"],
             "|".join(str(x) for x in r["signature"]), r["count"]])
    elif command == "flag-of-point":
        r = results["results"]
        add(["schema", "command", "q", "n", "m", "signature"])
        add([CSV_SCHEMA, command, r["q"], r["n"], r["m"],
             "|".join(str(x) for x in r["signature"])])
    elif command == "jl":
        r = results["results"]
        add(["schema", "command", "q", "cuspidal_row", "quotient_row"])
        for a, b in r["pairs"]:
            add([CSV_SCHEMA, command, r["q"], a, b])
    elif command == "selftest":
        r = results["results"]
        add(["schema", "command", "check", "status"])
        for chk in r["checks"]:
            add([CSV_SCHEMA, command, chk["name"], chk["status"]])
    else:
        raise PreconditionError(f"no csv schema for {command}")
    return buf.getvalue()


def render_text(command: str, report: dict) -> str:
    lines = [f"command: {command}"]
    for key, value in report["results"].items():
        lines.append(f"  {key}: {json.dumps(jsonable(value), sort_keys=True)}")
    return "\n".join(lines) + "\n"


def emit(report: dict, cfg: RunConfig) -> str:
    if cfg.format == "json":
        return canonical_dumps(jsonable(report)) + "\n"
    if cfg.format == "csv":
        return render_csv(report["command"], report)
    return render_text(report["command"], report)


# -- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value configuration file")
    common.add_argument("--q", type=int)
    common.add_argument("--n", type=int)
    common.add_argument("--m", type=int)
    common.add_argument("--prec", type=int)
    common.add_argument("--u-spec", dest="u_spec")
    common.add_argument("--bound", type=int)
    common.add_argument("--rank-cap", dest="rank_cap", type=int)
    common.add_argument("--group-cap", dest="group_cap", type=int)
    common.add_argument("--table-cap", dest="table_cap", type=int)
    common.add_argument("--lattice-cap", dest="lattice_cap", type=int)
    common.add_argument("--jl-q-cap", dest="jl_q_cap", type=int)
    common.add_argument("--pair-cap", dest="pair_cap", type=int)
    common.add_argument("--scan-m", dest="scan_m", type=int)
    common.add_argument("--cache-dir", dest="cache_dir")
    common.add_argument("--format", choices=["json", "csv", "text"])
    common.add_argument("--seed", type=int)
    common.add_argument("--timings", action="store_true")

    parser = argparse.ArgumentParser(
        prog="leveltower",
        description="Exact arithmetic for level towers, strata, and depth-zero matching.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("tower", parents=[common], help="build a level tower and verify it")
    pc = sub.add_parser("count", parents=[common], help="fixed-coset counts, both routes")
    pc.add_argument("--b", required=True, help="algebra element: w, x:<code>, or c0;c1")
    pc.add_argument("--g", required=True, help="matrix: companion:<poly>, diag:..., mat:...")
    sub.add_parser("strata", parents=[common], help="count boundary labels per rank")
    pa = sub.add_parser("strata-action", parents=[common],
                        help="fixed labels of a certified unit-class matrix")
    pa.add_argument("--g", required=True)
    sub.add_parser("flags", parents=[common], help="count full flags of labels")
    pf = sub.add_parser("flag-of-point", parents=[common],
                        help="flag of a value table read from a file")
    pf.add_argument("--table", required=True, help="value-table file")
    sub.add_parser("jl", parents=[common], help="depth-zero character matching")
    sub.add_parser("selftest", parents=[common], help="run the built-in battery")
    return parser


_HANDLERS = {
    "tower": lambda cfg, args: cmd_tower(cfg),
    "count": lambda cfg, args: cmd_count(cfg, args.b, args.g),
    "strata": lambda cfg, args: cmd_strata(cfg),
    "strata-action": lambda cfg, args: cmd_strata_action(cfg, args.g),
    "flags": lambda cfg, args: cmd_flags(cfg),
    "flag-of-point": lambda cfg, args: cmd_flag_of_point(cfg, args.table),
    "jl": lambda cfg, args: cmd_jl(cfg),
    "selftest": lambda cfg, args: cmd_selftest(cfg),
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        resolved = cfg.resolved()
        t0 = perf_counter()
        results = _HANDLERS[args.command](cfg, args)
        elapsed = perf_counter() - t0
        report = {
            "schema": REPORT_SCHEMA,
            "command": args.command,
            "config": resolved,
            "results": results,
        }
        if args.timings:
            report["timings"] = {"total_seconds": round(elapsed, 6)}
        sys.stdout.write(emit(report, cfg))
        return EXIT_OK
    except LevelTowerError as exc:
        code = exit_code_for(exc)
        if code is None:
            raise
        sys.stderr.write(f"error: {exc}\n")
        return code


if __name__ == "__main__":
    sys.exit(main())
