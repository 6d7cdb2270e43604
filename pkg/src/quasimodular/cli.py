"""Command-line front end: ``quasimodular {derive,verify,zeros,cache}``.

Every command builds a :class:`Report`; the exit status is 0 exactly when all
of its checks pass.  ``--config FILE`` supplies defaults (JSON object keyed by
option name, e.g. ``{"prec": 150, "n_max": 6}``); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

from quasimodular import lemmas, qseries, tables, zeros
from quasimodular.derivation import GENERATORS, iterate_D
from quasimodular.exactalg import format_poly, reduced_form
from quasimodular.report import Report, artifact_versions

SUITES = ("ramanujan", "rho", "lemmas", "congruences", "interplay", "ngcd", "prop41",
          "denominators", "zeros", "all")

# desk-scale limits
MAX_PREC = 2000
MAX_N = 60


@dataclass
class RunConfig:
    levels: List[int] = field(default_factory=lambda: [1, 2, 3])
    prec: Optional[int] = None
    n_max: int = 8
    k_max: Optional[int] = None
    region: zeros.RegionSpec = field(default_factory=zeros.RegionSpec.strip)
    tol: float = zeros.RESIDUAL_TOL
    terms: int = zeros.DEFAULT_TERMS
    cache_dir: Optional[str] = None
    format: str = "text"
    command: List[str] = field(default_factory=list)

    def validate(self) -> "RunConfig":
        if self.prec is not None and not 2 <= self.prec <= MAX_PREC:
            raise ValueError(f"--prec must lie in [2, {MAX_PREC}]")
        if not 0 <= self.n_max <= MAX_N:
            raise ValueError(f"--n-max must lie in [0, {MAX_N}]")
        if any(N not in (1, 2, 3) for N in self.levels):
            raise ValueError("levels must be 1, 2 or 3")
        return self


def _config_from_args(args) -> RunConfig:
    region = zeros.RegionSpec(*args.rect) if getattr(args, "rect", None) else zeros.RegionSpec.strip()
    return RunConfig(
        levels=sorted(set(args.level or getattr(args, "config_level", None) or [1, 2, 3])),
        prec=args.prec,
        n_max=args.n_max,
        k_max=getattr(args, "k_max", None),
        region=region,
        tol=args.tol,
        terms=getattr(args, "terms", zeros.DEFAULT_TERMS),
        cache_dir=args.cache_dir,
        format=args.format,
    ).validate()


# ---------------------------------------------------------------------------
# suites


def _suite_ramanujan(cfg: RunConfig) -> Report:
    report = Report()
    for N in cfg.levels:
        report.extend(qseries.verify_ramanujan(N, cfg.prec or 200))
    return report


def _suite_rho(cfg: RunConfig) -> Report:
    report = Report()
    for N in cfg.levels:
        report.extend(qseries.rho_suite(N, cfg.n_max, cfg.prec or 100, cache_dir=cfg.cache_dir))
    return report


def _suite_lemmas(cfg: RunConfig) -> Report:
    report = Report()
    for N in cfg.levels:
        report.extend(lemmas.lemma_suite(N, cfg.n_max, cache_dir=cfg.cache_dir))
    return report


def _suite_congruences(cfg: RunConfig) -> Report:
    report = Report()
    for N in cfg.levels:
        if N in (2, 3):
            k_max = cfg.k_max or {2: 4, 3: 3}[N]
            report.extend(lemmas.verify_congruences(N, k_max, cache_dir=cfg.cache_dir))
    return report


def _suite_interplay(cfg: RunConfig) -> Report:
    report = Report()
    for N in cfg.levels:
        report.extend(lemmas.verify_interplay_random(N))
        report.extend(lemmas.verify_scalar_relations(N, 12, cache_dir=cfg.cache_dir))
    return report


def _suite_ngcd(cfg: RunConfig) -> Report:
    report = Report()
    for N in cfg.levels:
        report.extend(lemmas.ngcd_report(N, GENERATORS, 1, cfg.n_max, cache_dir=cfg.cache_dir))
    return report


def _suite_prop41(cfg: RunConfig) -> Report:
    report = Report()
    for N in cfg.levels:
        if N in (2, 3):
            report.extend(lemmas.verify_prop41(N, cfg.prec or 100, cache_dir=cfg.cache_dir))
    return report


def _suite_denominators(cfg: RunConfig) -> Report:
    report = Report()
    for N in cfg.levels:
        report.extend(lemmas.verify_denominators(N, {1: 12, 2: 20, 3: 18}[N],
                                                 cache_dir=cfg.cache_dir))
    return report


def _suite_zeros(cfg: RunConfig) -> Report:
    levels = [N for N in cfg.levels if N in (2, 3)] or [2, 3]
    return zeros.zeros_suite(levels, 4, cfg.region, cfg.tol, cfg.terms)


_SUITE_FUNCS: Dict[str, Callable[[RunConfig], Report]] = {
    "ramanujan": _suite_ramanujan,
    "rho": _suite_rho,
    "lemmas": _suite_lemmas,
    "congruences": _suite_congruences,
    "interplay": _suite_interplay,
    "ngcd": _suite_ngcd,
    "prop41": _suite_prop41,
    "denominators": _suite_denominators,
    "zeros": _suite_zeros,
}


def run_suite(name: str, cfg: RunConfig) -> Report:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    names = [s for s in SUITES if s != "all"] if name == "all" else [name]
    report = Report()
    for s in names:
        t0 = time.perf_counter()
        report.extend(_SUITE_FUNCS[s](cfg))
        report.timing[s] = time.perf_counter() - t0
    return report.sorted()


# ---------------------------------------------------------------------------
# commands


def cmd_derive(args, cfg: RunConfig, out) -> Report:
    report = Report()
    N = cfg.levels[0]
    poly = iterate_D(N, args.generator, args.n, scaled=not args.unscaled, cache_dir=cfg.cache_dir)
    rf = reduced_form(poly)
    report.add("derive", True, level=N, generator=args.generator, n=args.n,
               polynomial=format_poly(poly), numerator=format_poly(rf.numerator), ell=rf.ell)
    if cfg.format == "json":
        out.write(json.dumps({"level": N, "generator": args.generator, "n": args.n,
                              "scaled": not args.unscaled, "polynomial": format_poly(poly),
                              "reduced": {"numerator": format_poly(rf.numerator), "ell": rf.ell}},
                             indent=2) + "\n")
    else:
        out.write(format_poly(poly) + "\n")
        out.write(f"reduced: ({format_poly(rf.numerator)}) / y^{rf.ell}\n")
    return report


def cmd_verify(args, cfg: RunConfig, out) -> Report:
    report = run_suite(args.suite, cfg)
    _emit_report(report, cfg, out)
    return report


def cmd_zeros(args, cfg: RunConfig, out) -> Report:
    N = cfg.levels[0]
    sel = zeros.FormSelector(N, args.k, args.j)
    report = Report()
    t0 = time.perf_counter()
    try:
        records = zeros.locate_zeros(sel, cfg.region, cfg.tol, cfg.terms)
    except zeros.ZeroSearchError as exc:
        report.add(f"zeros {sel.label()} located", False, note=str(exc))
        records = []
    else:
        report.add(f"zeros {sel.label()} located", True, count=sum(r.winding for r in records),
                   region=[cfg.region.re_min, cfg.region.re_max, cfg.region.im_min,
                           cfg.region.im_max])
        for r in records:
            report.add(f"zero {r.location.real:+.9f}{r.location.imag:+.9f}i simple",
                       r.simple and r.residual < cfg.tol, residual=r.residual,
                       ratio=r.ratio, multiplicity=r.winding)
    if args.arc_check:
        if N in (2, 3) and args.k in (4, 6) and args.j == 0:
            dev, _ = zeros.arc_deviation(N, args.k, cfg.region, cfg.terms)
            report.add(f"arc deviation E{args.k}^({N})", dev < cfg.tol, deviation=dev)
        else:
            report.add("arc deviation", False, note="arc check needs N in {2,3}, k in {4,6}, j = 0")
    report.timing["zeros"] = time.perf_counter() - t0
    if args.plot_data:
        with open(args.plot_data, "w") as fh:
            json.dump(zeros.plot_points(records), fh)
    if cfg.format == "csv":
        out.write(zeros.zeros_to_csv(records))
    elif cfg.format == "json":
        report.command, report.versions = cfg.command, artifact_versions()
        out.write(json.dumps({"report": report.to_dict(),
                              "zeros": [r.to_dict() for r in records]}, indent=2) + "\n")
    else:
        for r in records:
            out.write(f"{r.location.real:+.12f} {r.location.imag:+.12f}i  residual={r.residual:.2e}"
                      f"  |f'|/scale={r.ratio:.3e}  multiplicity={r.winding}"
                      f"  {'simple' if r.simple else 'NOT simple'}\n")
        out.write(report.to_text() + "\n")
    return report


def cmd_cache(args, cfg: RunConfig, out) -> Report:
    report = Report()
    if args.action == "clear":
        removed = tables.clear_cache(cfg.cache_dir)
        report.add("cache clear", True, removed=[str(p) for p in removed])
    elif args.action == "build":
        gens = [args.generator] if args.generator else list(GENERATORS)
        for N in cfg.levels:
            for g in gens:
                table = tables.get_table(N, g, cfg.cache_dir)
                table[cfg.n_max]
                report.add(f"cache build N={N} g={g}", table.verify_checksum(),
                           entries=len(table), note="; ".join(table.warnings))
    else:
        for entry in tables.cache_status(cfg.cache_dir):
            report.add(f"cache N={entry['level']} g={entry['generator']}", entry["checksum_ok"],
                       entries=entry["entries"], path=entry["path"],
                       note=entry.get("error", "checksum OK"))
        if not report.checks:
            report.add("cache status", True, note=f"no tables in {tables.resolve_cache_dir(cfg.cache_dir)}")
    _emit_report(report, cfg, out)
    return report


def _emit_report(report: Report, cfg: RunConfig, out) -> None:
    fmt = cfg.format
    report.command = cfg.command
    report.versions = artifact_versions()
    if fmt == "json":
        out.write(report.to_json() + "\n")
    elif fmt == "csv":
        out.write("name,status,note\n")
        for c in report.checks:
            note = c.note.replace('"', "'")
            out.write(f"\"{c.name}\",{'pass' if c.passed else 'fail'},\"{note}\"\n")
    else:
        out.write(report.to_text() + "\n")


# ---------------------------------------------------------------------------
# argument parsing


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-N", "--level", type=int, action="append", choices=(1, 2, 3),
                   help="level (repeatable; default: all applicable)")
    p.add_argument("--prec", type=int, help="q-expansion truncation order")
    p.add_argument("--n-max", type=int, default=8, help="iteration bound (default 8)")
    p.add_argument("--tol", type=float, default=zeros.RESIDUAL_TOL, help="residual tolerance")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--cache-dir", help="iterate cache directory (env QML_CACHE_DIR)")
    p.add_argument("--config", help="JSON file with option defaults")
    p.add_argument("-o", "--output", help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quasimodular", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", help="print (d*D)^n applied to a generator")
    _common(p)
    p.add_argument("-g", "--generator", choices=GENERATORS, default="x")
    p.add_argument("-n", type=int, default=1)
    p.add_argument("--unscaled", action="store_true", help="print D^n instead of (d*D)^n")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=SUITES)
    _common(p)
    p.add_argument("--k-max", type=int, help="congruence depth")
    p.add_argument("--rect", type=float, nargs=4, metavar=("RE0", "RE1", "IM0", "IM1"))
    p.add_argument("--strip", action="store_true", help="default strip region")
    p.add_argument("--terms", type=int, default=zeros.DEFAULT_TERMS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("zeros", help="locate zeros of theta^j E_k^(N)")
    _common(p)
    p.add_argument("-k", type=int, choices=(2, 4, 6), default=2)
    p.add_argument("-j", type=int, default=0)
    p.add_argument("--rect", type=float, nargs=4, metavar=("RE0", "RE1", "IM0", "IM1"))
    p.add_argument("--strip", action="store_true", help="Re in [-1/2,1/2], Im in [0.3,2] (default)")
    p.add_argument("--terms", type=int, default=zeros.DEFAULT_TERMS)
    p.add_argument("--arc-check", action="store_true")
    p.add_argument("--plot-data", help="write zero locations as a JSON point list")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("cache", help="inspect or manage iterate tables")
    p.add_argument("action", choices=("status", "build", "clear"))
    _common(p)
    p.add_argument("-g", "--generator", choices=GENERATORS)
    p.set_defaults(func=cmd_cache)
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    with open(known.config) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise SystemExit("config file must hold a JSON object")
    defaults = {k.replace("-", "_"): v for k, v in data.items()}
    if "level" in defaults:
        # append actions extend their default list, so keep file levels aside
        lv = defaults.pop("level")
        defaults["config_level"] = lv if isinstance(lv, list) else [lv]
    for action in parser._subparsers._group_actions:  # propagate to every subcommand
        for subparser in action.choices.values():
            subparser.set_defaults(**defaults)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    _apply_config_file(parser, argv)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config_from_args(args)
        cfg.command = argv
    except ValueError as exc:
        parser.error(str(exc))
    if args.command in ("derive", "zeros") and len(cfg.levels) > 1:
        explicit = args.level or getattr(args, "config_level", None)
        cfg.levels = cfg.levels[:1] if explicit else [2 if args.command == "zeros" else 1]
    out = open(args.output, "w") if args.output else sys.stdout
    try:
        report = args.func(args, cfg, out)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
