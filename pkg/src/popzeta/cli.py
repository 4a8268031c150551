"""Command-line front end.

Exit codes: 0 success, 1 a check failed (outputs are still written),
2 usage error, 3 resource exhaustion.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import arithfun, asymptotics, powerseries, zeta_eval
from .errors import DomainError, PopZetaError, ResourceError
from .population import cached_population, dump_members, inclusion_exclusion_count, s_pop
from .primes import ArithmeticalList, explicit_list, make_list

COMMANDS = ("enumerate", "count", "identities", "series-identities", "eval", "mertens",
            "estimate-a", "asymptotics", "report")


@dataclass(frozen=True)
class RunSpec:
    command: str
    M: ArithmeticalList | None
    X: int | None = None
    D: int = powerseries.DEFAULT_CAP
    P: int = 10**6
    N: int = 10**6
    T: float = 400.0
    grid: tuple[float, float] = (1e3, 1e6)
    out: Path | None = None
    all: bool = False
    ids: tuple[str, ...] = ()
    points: tuple[complex, ...] = ()
    function: str = "zeta"
    battery: bool = False
    extra: dict = field(default_factory=dict)


class UsageError(Exception):
    pass


def _int(text: str) -> int:
    """Integer, accepting forms like 1e7 as long as the value is integral."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not math.isfinite(v) or v != int(v):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(v)


def _grid(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 1e3:1e7, got {text!r}") from None
    if not 0 < lo < hi:
        raise argparse.ArgumentTypeError("grid needs 0 < lo < hi")
    return lo, hi


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _points(text: str) -> tuple[complex, ...]:
    return tuple(_complex(p) for p in text.split(",") if p)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="popzeta", description="Prime-list populations and partial zeta functions.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, need_list=True):
        g = p.add_mutually_exclusive_group(required=need_list)
        g.add_argument("--list", dest="list_spec", metavar="R0:R", help="arithmetical list p_(r0+nr)")
        g.add_argument("--primes", metavar="P1,P2,...", help="explicit finite prime set")
        p.add_argument("--out", type=Path, help="output file (directory for report)")

    p = sub.add_parser("enumerate", help="list population members up to --max")
    common(p)
    p.add_argument("--max", type=_int, required=True)

    p = sub.add_parser("count", help="N_pop and S_pop at --max")
    common(p)
    p.add_argument("--max", type=_int, required=True)

    p = sub.add_parser("identities", help="exact summation identities for every x <= --max")
    common(p)
    p.add_argument("--max", type=_int, default=2000)
    p.add_argument("--all", action="store_true")
    p.add_argument("--id", dest="ids", action="append", default=[])
    p.add_argument("--a", type=_int, default=2)

    p = sub.add_parser("series-identities", help="generating-series identities to degree D")
    common(p)
    p.add_argument("--D", type=_int, default=powerseries.DEFAULT_CAP)

    p = sub.add_parser("eval", help="evaluate a function on points, or run the analytic battery")
    common(p, need_list=False)
    p.add_argument("--function", default="zeta", choices=zeta_eval.GRID_FUNCTIONS)
    p.add_argument("--s", dest="points", type=_points, default=(2 + 0j,))
    p.add_argument("--P", type=_int, default=10**6)
    p.add_argument("--N", type=_int, default=10**6)
    p.add_argument("--battery", action="store_true")

    for name in ("mertens", "estimate-a", "asymptotics"):
        p = sub.add_parser(name)
        common(p)
        p.add_argument("--grid", type=_grid, default=(1e3, 1e6))

    p = sub.add_parser("report", help="identities, series, battery and fits into one directory")
    common(p)
    p.add_argument("--max", type=_int, default=2000)
    p.add_argument("--D", type=_int, default=powerseries.DEFAULT_CAP)
    p.add_argument("--grid", type=_grid, default=(1e3, 1e6))
    return ap


def _parse_list(ns) -> ArithmeticalList | None:
    if getattr(ns, "list_spec", None):
        try:
            r0, r = (int(v) for v in ns.list_spec.split(":"))
        except ValueError:
            raise UsageError(f"--list must look like r0:r, got {ns.list_spec!r}") from None
        return make_list(r0, r)
    if getattr(ns, "primes", None):
        try:
            ps = [int(v) for v in ns.primes.split(",") if v]
        except ValueError:
            raise UsageError(f"--primes must be comma-separated integers, got {ns.primes!r}") from None
        return explicit_list(ps)
    return None


def parse_args(argv) -> RunSpec:
    """Parse and validate; raises SystemExit(2) on any usage error."""
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        M = _parse_list(ns)
        kw = dict(command=ns.command, M=M, out=ns.out)
        for name in ("D", "P", "N", "grid", "all", "points", "function", "battery"):
            if hasattr(ns, name):
                kw[name] = getattr(ns, name)
        if hasattr(ns, "max"):
            kw["X"] = ns.max
        if hasattr(ns, "ids"):
            kw["ids"] = tuple(ns.ids)
        if hasattr(ns, "a"):
            kw["extra"] = {"a": ns.a}
        spec = RunSpec(**kw)
        _validate(spec)
    except (UsageError, DomainError) as exc:
        ap.error(str(exc))
    return spec


def _validate(spec: RunSpec) -> None:
    if spec.X is not None and spec.X < 1:
        raise UsageError("--max must be >= 1")
    if spec.command == "identities":
        unknown = [i for i in spec.ids if i not in arithfun.SUM_IDENTITIES]
        if unknown:
            raise UsageError(f"unknown identity ids {unknown}")
        if not spec.all and not spec.ids:
            raise UsageError("give --all or at least one --id")
    if spec.command in ("series-identities", "report") and spec.D < 2:
        raise UsageError("--D must be >= 2")
    if spec.command == "eval":
        zeta_eval.EvalConfig(P=spec.P, N=spec.N)
        if spec.function == "wshift" and spec.M is not None and spec.M.kind != "arithmetical":
            raise UsageError("wshift needs --list")
    if spec.command in ("mertens", "estimate-a", "asymptotics") and spec.M.kind != "arithmetical":
        raise UsageError(f"{spec.command} needs an arithmetical list (--list r0:r)")
    if spec.command in ("mertens", "asymptotics") and spec.grid[0] < 3:
        raise UsageError("grid must start at 3 or above")


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)


def _identity_rows(M, X, ids, a) -> tuple[list[str], list[str], bool]:
    table = cached_population(M, max(X, 1))
    rows, summary, ok = [arithfun.CSV_HEADER], ["identity_id,checked,failed"], True
    for iid in ids:
        reps = arithfun.verify_sum_identity_upto(iid, table, X, a)
        bad = sum(not r.passed for r in reps)
        ok &= bad == 0
        rows.extend(r.csv_row() for r in reps)
        summary.append(f"{iid},{len(reps)},{bad}")
    return rows, summary, ok


def _series_rows(M, D) -> tuple[list[str], bool]:
    rows, ok = ["identity_id,M,D,max_abs_coefficient_diff,pass"], True
    for iid in powerseries.SERIES_IDENTITIES:
        r = powerseries.verify_series_identity(iid, M, D)
        ok &= r.passed
        rows.append(f"{iid},{M.label},{D},{r.residual},{'true' if r.passed else 'false'}")
    return rows, ok


def _battery_rows(M, cfg) -> tuple[list[str], bool]:
    lists = None if M is None else (M,)
    reps = zeta_eval.analytic_battery(lists=lists, cfg=cfg)
    rows = ["identity_id,M,s,residual,tol,pass"]
    for r in reps:
        s = complex(r.x)
        rows.append(f"{r.identity_id},{r.M},{s.real!r}{s.imag:+}i,{r.residual!r},{r.tol!r},"
                    f"{'true' if r.passed else 'false'}")
    return rows, all(r.passed for r in reps)


def _fits(M, grid) -> list[asymptotics.AsymptoticFit]:
    xs = asymptotics.default_grid(*grid)
    table = cached_population(M, int(math.floor(xs[-1])))
    A = asymptotics.estimate_A(M, xs, table)
    return [asymptotics.mertens_fit(M, xs), asymptotics.lnp_over_p(M, xs),
            asymptotics.one_over_p(M, xs), A, asymptotics.mesch_check(M, xs, A, table)]


def _fit_summary(fits) -> str:
    lines = ["name,constant,band_lo,band_hi,grid_max"]
    for f in fits:
        lines.append(f"{f.name},{f.constant!r},{f.band[0]!r},{f.band[1]!r},{float(f.grid[-1])!r}")
    return "\n".join(lines) + "\n"


def run(spec: RunSpec) -> int:
    c = spec.command
    M = spec.M
    if c == "enumerate":
        _emit(dump_members(cached_population(M, spec.X)), spec.out)
        return 0
    if c == "count":
        table = cached_population(M, spec.X)
        n = table.count(spec.X)
        ok = True
        if not M.is_full and spec.X <= 10**6:
            ok = inclusion_exclusion_count(M, spec.X, spec.X) == n
        _emit(f"x,n_pop,s_pop\n{spec.X},{n},{s_pop(table, spec.X)!r}\n", spec.out)
        return 0 if ok else 1
    if c == "identities":
        ids = arithfun.SUM_IDENTITIES if spec.all else spec.ids
        rows, summary, ok = _identity_rows(M, spec.X, ids, spec.extra.get("a", 2))
        if spec.out is not None:
            _emit("\n".join(rows) + "\n", spec.out)
        sys.stdout.write("\n".join(summary) + "\n")
        return 0 if ok else 1
    if c == "series-identities":
        rows, ok = _series_rows(M, spec.D)
        _emit("\n".join(rows) + "\n", spec.out)
        return 0 if ok else 1
    if c == "eval":
        cfg = zeta_eval.EvalConfig(P=spec.P, N=spec.N)
        if spec.battery:
            rows, ok = _battery_rows(M, cfg)
            _emit("\n".join(rows) + "\n", spec.out)
            return 0 if ok else 1
        target = M if M is not None else make_list(1, 1)
        _emit(zeta_eval.grid_csv(spec.function, target, spec.points, cfg), spec.out)
        return 0
    if c == "mertens":
        fit = asymptotics.mertens_fit(M, asymptotics.default_grid(*spec.grid))
        if spec.out is not None:
            _emit(fit.csv(), spec.out)
        sys.stdout.write(fit.summary())
        return 0
    if c == "estimate-a":
        xs = asymptotics.default_grid(*spec.grid)
        table = cached_population(M, int(math.floor(xs[-1])))
        fit = asymptotics.estimate_A(M, xs, table)
        if spec.out is not None:
            _emit(fit.csv(), spec.out)
        sys.stdout.write("# exploratory: the density law is unproved\n" + fit.summary())
        return 0
    if c == "asymptotics":
        _emit(_fit_summary(_fits(M, spec.grid)), spec.out)
        return 0
    if c == "report":
        out = spec.out or Path("report")
        out.mkdir(parents=True, exist_ok=True)
        rows, summary, ok1 = _identity_rows(M, spec.X, arithfun.SUM_IDENTITIES, 2)
        (out / "identities.csv").write_text("\n".join(rows) + "\n")
        srows, ok2 = _series_rows(M, spec.D)
        (out / "series_identities.csv").write_text("\n".join(srows) + "\n")
        ok3 = True
        if M.kind == "arithmetical":
            brows, ok3 = _battery_rows(M, zeta_eval.EvalConfig())
            (out / "analytic_battery.csv").write_text("\n".join(brows) + "\n")
            fits = _fits(M, spec.grid)
            for f in fits:
                (out / f"{f.name}.csv").write_text(f.csv())
            (out / "fits.txt").write_text(_fit_summary(fits))
        ok = ok1 and ok2 and ok3
        (out / "summary.txt").write_text("\n".join(summary) + f"\nall_passed,{str(ok).lower()}\n")
        sys.stdout.write(f"report written to {out}; all checks {'passed' if ok else 'FAILED'}\n")
        return 0 if ok else 1
    raise UsageError(f"unknown command {c!r}")


def main(argv=None) -> int:
    spec = parse_args(sys.argv[1:] if argv is None else argv)
    try:
        return run(spec)
    except (ResourceError, MemoryError) as exc:
        sys.stderr.write(f"popzeta: resource exhausted: {exc}\n")
        return 3
    except (DomainError, UsageError) as exc:
        sys.stderr.write(f"popzeta: {exc}\n")
        return 2
    except PopZetaError as exc:
        sys.stderr.write(f"popzeta: {type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
