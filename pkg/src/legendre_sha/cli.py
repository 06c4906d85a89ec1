"""Command-line front end.

Every subcommand builds a document {context, orbits, aggregates} and renders
it as text, JSON or CSV. Exit codes: 0 success, 1 usage error, 2 invalid
input, 3 a checked identity failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from importlib import resources

from . import counting, invariant_factors as snf, rays, structures
from .errors import ConsistencyError, DomainError
from .orbits import (
    OrbitContext,
    OrbitFilter,
    decompose,
    is_balanced_modulus,
    is_balanced_orbit,
    orbit_through,
)
from .words import (
    exponential_form,
    good_base_points,
    height_profile,
    is_complementary,
    standard_base_point,
    standard_word,
    string_diagram,
    word_at,
)

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_IDENTITY = 0, 1, 2, 3
MAX_MODULUS = 10**9
FORMATS = ("text", "json", "csv")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class RunConfig:
    command: str
    p: int | None = None
    d: int | None = None
    f: int | None = None
    r: int | None = None
    i: int | None = None
    m: int | None = None
    exponents: tuple[int, ...] | None = None
    verify: tuple[int, ...] = ()
    format: str = "text"
    parallel: int = 0
    force: bool = False
    convention: rays.RayConvention = rays.RayConvention.LT1
    max_f: int = 4
    filter: OrbitFilter = OrbitFilter.O


@dataclass(frozen=True)
class Outcome:
    document: dict
    ok: bool = True
    text: str = ""


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="legendre-sha", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text, *flags):
        sp = sub.add_parser(name, help=help_text)
        for flag in flags:
            flag(sp)
        sp.add_argument("--format", choices=FORMATS, default="text")
        sp.add_argument("--parallel", type=int, default=0, help="worker processes, 0 = one per CPU")
        sp.add_argument("--force", action="store_true", help=f"allow moduli above {MAX_MODULUS}")
        return sp

    p_ = lambda sp: sp.add_argument("-p", type=int, required=True)
    p_opt = lambda sp: sp.add_argument("-p", type=int)
    d_ = lambda sp: sp.add_argument("-d", type=int)
    f_ = lambda sp: sp.add_argument("-f", type=int)
    f_req = lambda sp: sp.add_argument("-f", type=int, required=True)
    r_ = lambda sp: sp.add_argument("-r", type=int, required=True)
    i_ = lambda sp: sp.add_argument("-i", type=int, required=True)

    def filt(sp):
        sp.add_argument("--filter", choices=[x.value for x in OrbitFilter], default=OrbitFilter.O.value)

    add("orbits", "orbits of p on Z/dZ with balance, words and heights", p_, d_, f_, filt)
    add("word", "word, base points and diagram of the orbit through i", p_, d_, f_, i_)
    add(
        "snf",
        "invariant factors of B(e_1, ..., e_{2k-1}) by all three routes",
        p_opt,
        lambda sp: sp.add_argument("-e", "--exponents", type=_int_list, required=True),
    )
    add("report", "structure report and identity checks for d = p^f + 1", p_, d_, f_)
    add(
        "sha",
        "Sha at each orbit over F_{p^m}(u) (default: the constant field of K_d)",
        p_,
        d_,
        f_,
        lambda sp: sp.add_argument("-m", type=int),
    )
    add(
        "interpolate",
        "the polynomial F_f(T), optionally checked at primes",
        f_req,
        lambda sp: sp.add_argument("--verify", type=_int_list, default=()),
    )
    add(
        "rays",
        "ray orbits for z^d = x^r - 1",
        p_,
        d_,
        r_,
        lambda sp: sp.add_argument(
            "--ray-convention", choices=[c.value for c in rays.RayConvention], default="lt1"
        ),
    )
    add(
        "verify-all",
        "run every identity check for p in {3, 5, 7} and f up to --max-f",
        lambda sp: sp.add_argument("--max-f", type=int, default=4),
    )
    return parser


def parse_config(argv: list[str]) -> RunConfig:
    ns = build_parser().parse_args(argv)
    get = lambda name, default=None: getattr(ns, name, default)
    return RunConfig(
        command=ns.command,
        p=get("p"),
        d=get("d"),
        f=get("f"),
        r=get("r"),
        i=get("i"),
        m=get("m"),
        exponents=get("exponents"),
        verify=tuple(get("verify", ()) or ()),
        format=ns.format,
        parallel=ns.parallel,
        force=ns.force,
        convention=rays.RayConvention(get("ray_convention", "lt1")),
        max_f=get("max_f", 4),
        filter=OrbitFilter(get("filter", OrbitFilter.O.value)),
    )


# Commands


def _modulus(cfg: RunConfig, need_f: bool = False) -> tuple[int, int | None]:
    """Resolve (d, f) from -d and/or -f, enforcing the size guard."""
    if cfg.p is None:
        raise UsageError("-p is required")
    if cfg.f is not None and cfg.f < 1:
        raise DomainError("f must be positive")
    if cfg.d is None and cfg.f is None:
        raise UsageError("give -d or -f")
    if cfg.f is not None and cfg.p**cfg.f + 1 > MAX_MODULUS and not cfg.force:
        raise DomainError(f"p^f + 1 exceeds {MAX_MODULUS}; pass --force to proceed")
    d = cfg.d if cfg.d is not None else cfg.p**cfg.f + 1
    if d > MAX_MODULUS and not cfg.force:
        raise DomainError(f"d exceeds {MAX_MODULUS}; pass --force to proceed")
    f = cfg.f
    if f is None:
        f = structures.infer_f(OrbitContext(d, cfg.p))
    if need_f and (f is None or d != cfg.p**f + 1):
        raise DomainError(f"d = {d} is not p^f + 1 for p = {cfg.p}")
    return d, f


def _context(cfg: RunConfig, d: int | None, f: int | None, **extra) -> dict:
    return {"command": cfg.command, "d": d, "p": cfg.p, "f": f, **extra}


def cmd_orbits(cfg: RunConfig) -> Outcome:
    d, f = _modulus(cfg)
    ctx = OrbitContext(d, cfg.p)
    rows = []
    for o in decompose(ctx, cfg.filter):
        row = {
            "orbit_min": o.least,
            "orbit_size": o.size,
            "gcd_class": o.gcd_class,
            "elements": list(o.elements),
            "balanced": None,
            "word": None,
            "height": None,
        }
        if not o.is_boundary():
            row["balanced"] = is_balanced_orbit(o)
            if row["balanced"]:
                w = standard_word(o)
                row["word"] = w.letters
                row["height"] = height_profile(w).height
        rows.append(row)
    aggregates = {
        "orbit_count": len(rows),
        "balanced_modulus": is_balanced_modulus(ctx) if d > 2 else None,
    }
    return Outcome({"context": _context(cfg, d, f, filter=cfg.filter.value), "orbits": rows, "aggregates": aggregates})


def cmd_word(cfg: RunConfig) -> Outcome:
    d, f = _modulus(cfg)
    o = orbit_through(OrbitContext(d, cfg.p), cfg.i)
    if o.is_boundary():
        raise DomainError(f"{cfg.i} lies on a boundary orbit")
    w = word_at(o, cfg.i)
    row = {
        "orbit_min": o.least,
        "orbit_size": o.size,
        "gcd_class": o.gcd_class,
        "elements": list(o.elements),
        "base": cfg.i % d,
        "word": w.letters,
        "height": height_profile(w).height,
        "good_base_points": good_base_points(o),
        "balanced": w.is_balanced(),
    }
    if w.is_balanced():
        sw = standard_word(o)
        row["standard_base_point"] = standard_base_point(o)
        row["standard_word"] = sw.letters
        row["exponents"] = list(exponential_form(sw).exponents)
        row["complementary"] = is_complementary(sw)
        row["diagram"] = string_diagram(sw) if row["complementary"] else None
    return Outcome({"context": _context(cfg, d, f, i=cfg.i), "orbits": [row], "aggregates": {}})


def cmd_snf(cfg: RunConfig) -> Outcome:
    spec = snf.BidiagonalSpec(cfg.exponents)
    by_min = snf.invariants_by_min_pivot(spec).d
    by_max = snf.invariants_by_max_pivot(spec).d
    oracle = snf.minors_oracle(spec, cfg.p or 2).d if spec.k <= snf.MAX_ORACLE_K else None
    agree = by_min == by_max and (oracle is None or oracle == by_min)
    aggregates = {
        "exponents": list(spec.exponents),
        "min_pivot": list(by_min),
        "max_pivot": list(by_max),
        "minors_oracle": None if oracle is None else list(oracle),
        "checks": {"routes_agree": {"ok": agree, "detail": ""}},
        "all_ok": agree,
    }
    return Outcome({"context": _context(cfg, None, None), "orbits": [], "aggregates": aggregates}, agree)


def _report_document(cfg: RunConfig, report: structures.StructureReport) -> dict:
    doc = report.to_dict()
    doc["context"] = _context(cfg, report.context.d, report.f)
    return doc


def cmd_report(cfg: RunConfig) -> Outcome:
    d, f = _modulus(cfg, need_f=True)
    report = structures.full_report(OrbitContext(d, cfg.p), f, cfg.parallel)
    return Outcome(_report_document(cfg, report), report.all_ok, _report_csv(report))


def cmd_sha(cfg: RunConfig) -> Outcome:
    d, f = _modulus(cfg)
    ctx = OrbitContext(d, cfg.p)
    m = cfg.m if cfg.m is not None else ctx.order
    rows, total = [], structures.AbelianPGroup.trivial(cfg.p)
    for o in decompose(ctx, OrbitFilter.O):
        row = {"orbit_min": o.least, "orbit_size": o.size, "gcd_class": o.gcd_class, "sha": None}
        try:
            g = structures.sha_structure_Fq(o, m)
        except DomainError as exc:
            row["note"] = str(exc)
        else:
            row["sha"] = [[a, b] for a, b in g.content]
            row["word"] = standard_word(o).letters
            total = total + g
        rows.append(row)
    aggregates = {
        "m": m,
        "sha_order_exponent": total.order_exponent,
        "sha_exponent": total.exponent,
        "group": str(total),
    }
    return Outcome({"context": _context(cfg, d, f, m=m), "orbits": rows, "aggregates": aggregates})


def cmd_interpolate(cfg: RunConfig) -> Outcome:
    f = cfg.f
    if f < 1:
        raise DomainError("f must be positive")
    for p in cfg.verify:
        if p**f + 1 > MAX_MODULUS and not cfg.force:
            raise DomainError(f"{p}^{f} + 1 exceeds {MAX_MODULUS}; pass --force to proceed")
    poly = counting.interpolation_poly(f)
    rows, ok = [], True
    for p in cfg.verify:
        value = poly(p)
        enumerated = counting.sha_order_exponent(OrbitContext(p**f + 1, p), f)
        rows.append({"p": p, "F_f(p)": str(value), "enumerated": enumerated, "ok": value == enumerated})
        ok = ok and value == enumerated
    aggregates = {
        "polynomial": str(poly),
        "coefficients": poly.to_json(),
        "degree": poly.degree,
        "verification": rows,
        "all_ok": ok,
    }
    return Outcome({"context": _context(cfg, None, f), "orbits": [], "aggregates": aggregates}, ok)


def cmd_rays(cfg: RunConfig) -> Outcome:
    if cfg.d is None:
        raise UsageError("rays needs -d")
    if cfg.d * cfg.r > MAX_MODULUS and not cfg.force:
        raise DomainError(f"d*r exceeds {MAX_MODULUS}; pass --force to proceed")
    ctx = rays.RayContext(cfg.d, cfg.r, cfg.p, cfg.convention)
    summaries = rays.ray_report(ctx)
    aggregates = {
        "convention": ctx.convention.value,
        "orbit_count": len(summaries),
        "all_balanced": all(s.balanced for s in summaries),
    }
    context = _context(cfg, cfg.d, None, r=cfg.r)
    return Outcome({"context": context, "orbits": [s.to_dict() for s in summaries], "aggregates": aggregates})


def cmd_verify_all(cfg: RunConfig) -> Outcome:
    rows, ok = [], True
    for p in (3, 5, 7):
        for f in range(1, cfg.max_f + 1):
            report = structures.full_report(OrbitContext(p**f + 1, p), f, cfg.parallel)
            failed = [c.name for c in report.checks if c.ok is False]
            rows.append({"p": p, "f": f, "sha_order_exponent": report.sha_order_exponent, "failed": failed})
            ok = ok and not failed
    aggregates = {"runs": rows, "all_ok": ok}
    return Outcome({"context": _context(cfg, None, None, max_f=cfg.max_f), "orbits": [], "aggregates": aggregates}, ok)


COMMANDS = {
    "orbits": cmd_orbits,
    "word": cmd_word,
    "snf": cmd_snf,
    "report": cmd_report,
    "sha": cmd_sha,
    "interpolate": cmd_interpolate,
    "rays": cmd_rays,
    "verify-all": cmd_verify_all,
}


# Rendering


def load_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("schemas/report.schema.json").read_text())


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (list, tuple)):
        return " ".join(_cell(x) for x in value)
    return str(value)


def _report_csv(report: structures.StructureReport) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=structures.CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(report.csv_rows())
    return buf.getvalue()


def render_csv(doc: dict) -> str:
    rows = doc["orbits"] or doc["aggregates"].get("verification") or doc["aggregates"].get("runs") or []
    if not rows:
        rows = [{k: v for k, v in doc["aggregates"].items() if not isinstance(v, dict)}]
    fields = list(dict.fromkeys(k for row in rows for k in row))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(row.get(k)) for k in fields})
    return buf.getvalue()


def render_text(doc: dict) -> str:
    ctx = ", ".join(f"{k}={v}" for k, v in doc["context"].items() if v is not None)
    lines = [ctx]
    rows = doc["orbits"]
    if rows:
        fields = [k for k in rows[0] if k != "elements"]
        table = [fields] + [[_cell(row.get(k)) for k in fields] for row in rows]
        widths = [max(len(r[c]) for r in table) for c in range(len(fields))]
        for r in table:
            lines.append("  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip())
    for key, value in doc["aggregates"].items():
        if key == "checks":
            for name, c in value.items():
                status = {True: "ok", False: "FAIL", None: "n/a"}[c["ok"]]
                lines.append(f"check {name}: {status}" + (f" ({c['detail']})" if c.get("detail") else ""))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            for row in value:
                lines.append("  ".join(f"{k}={_cell(v)}" for k, v in row.items()))
        else:
            lines.append(f"{key}: {_cell(value)}")
    return "\n".join(lines) + "\n"


def render(cfg: RunConfig, outcome: Outcome) -> str:
    if cfg.format == "json":
        return json.dumps(outcome.document, indent=2, sort_keys=True) + "\n"
    if cfg.format == "csv":
        return outcome.text if outcome.text else render_csv(outcome.document)
    return render_text(outcome.document)


def run(cfg: RunConfig) -> tuple[int, str]:
    outcome = COMMANDS[cfg.command](cfg)
    return (EXIT_OK if outcome.ok else EXIT_IDENTITY), render(cfg, outcome)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        code, text = run(cfg)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ConsistencyError as exc:
        print(f"identity check failed: {exc}", file=sys.stderr)
        return EXIT_IDENTITY
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    sys.stdout.write(text)
    return code
