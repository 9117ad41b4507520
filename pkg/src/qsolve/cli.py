"""Command line driver: ``qsolve count|solve|oracle-compare|validate``.

Results are written to stdout as JSON (default), CSV or a readable table.
The process exit code summarises the run: 0 success, 2 count mismatch,
3 validation failure (including spectrum mismatch), 4 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import mpmath

from . import __version__
from .algebra.rational import format_rational, to_rational
from .errors import BadPartition, MalformedInput, QSolveError
from .representation import FatHook, Partition, enumerate_partitions, fits_fat_hook, multiplicity

EXIT_OK = 0
EXIT_COUNT = 2
EXIT_VALIDATION = 3
EXIT_INPUT = 4

SCHEMA_VERSION = 1
ORACLE_TOLERANCE = 1e-8


@dataclass
class RunConfig:
    command: str
    length: int
    partition: str | None = None  # "a,b,c" or "all"
    fat_hook: str | None = None
    relations: str = "full"
    momentum_split: bool = False
    inhomogeneities: list[str] | None = None
    precision_bits: int = 128
    threads: int = 1
    output: str = "json"
    seed: int = 0
    dump_grid: bool = False
    figures: str | None = None
    timing: bool = False
    input_file: str | None = None

    def validate(self) -> None:
        if self.length < 0:
            raise BadPartition("length must be non-negative")
        if self.precision_bits < 53:
            raise MalformedInput("precision must be at least 53 bits")
        if self.threads < 1:
            raise MalformedInput("thread count must be positive")
        if self.inhomogeneities is not None and len(self.inhomogeneities) != self.length:
            raise MalformedInput(f"expected {self.length} inhomogeneities, got {len(self.inhomogeneities)}")
        for lam in self.partitions():
            if lam.weight != self.length:
                raise BadPartition(f"partition {lam} does not have weight {self.length}")

    def hook(self) -> FatHook | None:
        return FatHook.parse(self.fat_hook) if self.fat_hook else None

    def partitions(self) -> list[Partition]:
        hook = self.hook()
        if self.partition in (None, "all"):
            return enumerate_partitions(self.length, hook)
        lam = Partition.parse(self.partition)
        if hook is not None and not fits_fat_hook(lam, hook):
            raise BadPartition(f"partition {lam} does not fit the {hook.N}|{hook.M} fat hook")
        return [lam]

    def inhom(self):
        if self.inhomogeneities is None:
            return None
        return [to_rational(x) for x in self.inhomogeneities]

    def echo(self) -> dict:
        out = asdict(self)
        out.pop("timing")
        out.pop("figures")
        return out


@dataclass
class PartitionResult:
    partition: tuple
    expected_count: int
    found_distinct: int
    found_with_multiplicity: int
    validated_count: int
    payload: dict
    wall_time: float = 0.0
    failures: list = field(default_factory=list)


# --- solving -------------------------------------------------------------------

def _digits(bits: int) -> int:
    return int(math.ceil(bits * math.log10(2))) + 2


def solve_partition(config: RunConfig, lam: Partition, threads: int = 1) -> PartitionResult:
    """Full pipeline for one diagram: grid, (split) solve, validation."""
    from .physics import analyze
    from .qgrid import build_grid, momentum_split
    from .solver.solve import PolySystem, solve_points, split_solve

    start = time.perf_counter()
    inhom = config.inhom()
    grid = build_grid(lam, config.relations, inhom)
    system = PolySystem(grid.symbols, grid.sorted_equations())
    if config.momentum_split and inhom is None and system.variables:
        factors = [(str(d), f) for d, f in momentum_split(grid)]
        solutions = split_solve(system, factors, config.precision_bits, config.seed, threads)
    else:
        solutions = solve_points(system, config.precision_bits, config.seed)
    entries = analyze(grid, solutions, inhom, config.precision_bits)
    digits = _digits(config.precision_bits)
    names = [s.name for s in grid.symbols]
    records = [_entry_json(e, names, digits) for e in entries]
    payload = {
        "partition": list(lam.parts),
        "expected_count": multiplicity(lam),
        "found_distinct": solutions.count_distinct,
        "found_with_multiplicity": solutions.count_with_multiplicity,
        "validated_count": sum(1 for e in entries if e.validation.passed),
        "radical": solutions.radical,
        "relations": grid.region.label(),
        "path": [list(v) for v in grid.path.vertices],
        "symbols": names,
        "precision_bits": solutions.precision_bits,
        "eliminants": {v.name: _poly_string(p) for v, p in sorted(solutions.eliminants.items(), key=lambda kv: kv[0].name)},
        "solutions": records,
    }
    if config.dump_grid:
        payload["grid"] = grid.to_json()
    failures = [
        f"partition {lam} solution {r['index']}: " + ", ".join(k for k, v in r["validation"].items() if v is False and k != "passed")
        for r in records if not r["validation"]["passed"]
    ]
    return PartitionResult(
        tuple(lam.parts), payload["expected_count"], payload["found_distinct"],
        payload["found_with_multiplicity"], payload["validated_count"], payload,
        time.perf_counter() - start, failures,
    )


def _poly_string(p: list) -> str:
    from .algebra import dense

    return dense.to_string(p, "x")


def _entry_json(e, names: list[str], digits: int) -> dict:
    out = {
        "index": e.index,
        "coefficients": {"Q[1,0]": [c.to_json(digits) for c in e.q_coefficients]},
        "values": {n: v.to_json(digits) for n, v in zip(names, e.values)},
        "energy": e.energy.to_json(digits),
        "momentum_phase": e.momentum_phase.to_json(digits),
        "exceptional": e.exceptional,
        "root_multiplicities": list(e.root_multiplicities),
        "bethe_roots": [{"re": mpmath.nstr(mpmath.re(z), 20), "im": mpmath.nstr(mpmath.im(z), 20)} for z in e.roots],
        "component": e.component,
        "validation": e.validation.to_json(),
    }
    return out


def _solve_job(args):
    config, parts, threads = args
    return solve_partition(config, Partition(parts), threads)


def run_solve(config: RunConfig) -> list[PartitionResult]:
    partitions = config.partitions()
    if config.threads > 1 and len(partitions) > 1:
        jobs = [(config, lam.parts, 1) for lam in partitions]
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            return list(pool.map(_solve_job, jobs))
    return [solve_partition(config, lam, config.threads) for lam in partitions]


# --- oracle comparison ------------------------------------------------------------

def oracle_levels(lam: Partition) -> list[float]:
    """Reference energies for the multiplet ``lam`` from exact diagonalization."""
    from .oracle import irrep_levels, su2_new_levels

    if lam.rows <= 2:
        M = lam.row(2)
        return sorted(su2_new_levels(lam.weight)[M])
    return sorted(irrep_levels(lam).eigenvalues)


def compare_spectra(bethe: list[float], oracle: list[float], tol: float = ORACLE_TOLERANCE) -> dict:
    bethe, oracle = sorted(bethe), sorted(oracle)
    pairs = []
    ok = len(bethe) == len(oracle)
    for k in range(max(len(bethe), len(oracle))):
        b = bethe[k] if k < len(bethe) else None
        o = oracle[k] if k < len(oracle) else None
        match = b is not None and o is not None and abs(b - o) <= tol
        ok = ok and match
        pairs.append({"bethe": repr(b) if b is not None else None, "oracle": repr(o) if o is not None else None,
                      "match": match})
    return {"match": ok, "levels": pairs}


# --- validation of stored results -----------------------------------------------

def _parse_number(d: dict, prec: int):
    with mpmath.workprec(prec):
        if "exact" in d:
            q = to_rational(d["exact"])
            return mpmath.mpc(mpmath.mpf(int(q.numerator)) / int(q.denominator))
        try:
            return mpmath.mpc(mpmath.mpf(d["re"]), mpmath.mpf(d["im"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"bad number {d!r}") from exc


def _close(a, b, tol) -> bool:
    return abs(a - b) <= tol * max(1, abs(b))


def validate_solution(grid, record: dict, inhom, prec: int, tol=mpmath.mpf(10) ** -20) -> list[str]:
    """Recompute every check for one stored solution; returns failed check names."""
    from .algebra.rings import ComplexField
    from .physics import (baxter_T, baxter_pair, bethe_residuals, dual_q, energy_momentum, is_exceptional)
    from .qgrid import select_relations, substitute

    failed = []
    work = max(prec, 128)
    ring = ComplexField(work, tol)
    try:
        values = {s: _parse_number(record["values"][s.name], work) for s in grid.symbols}
        reported_q = [_parse_number(c, work) for c in record["coefficients"]["Q[1,0]"]]
        reported_e = _parse_number(record["energy"], work)
        reported_p = _parse_number(record["momentum_phase"], work)
    except KeyError as exc:
        raise MalformedInput(f"solution {record.get('index')} lacks field {exc}") from exc
    try:
        with mpmath.workprec(work):
            full = substitute(grid, ring, values, select_relations(grid.lam, "full"), inhom)
            if not all(ring.is_zero(e.poly) for e in full.equations):
                failed.append("grid_polynomiality_ok")
            Q, Q20 = baxter_pair(full)
            if len(Q.coeffs) != len(reported_q) or not all(
                _close(a, b, tol) for a, b in zip(Q.coeffs, reported_q)
            ):
                failed.append("coefficients_consistent")
            Qr = type(Q)(reported_q, ring)
            if not baxter_T(Qr, full.q00, Q20)[1]:
                failed.append("baxter_T_polynomial_ok")
            if dual_q(Qr, full.q00, Q20) is None:
                failed.append("dual_q_polynomial_ok")
            phase, energy = energy_momentum(Qr)
            if not _close(energy, reported_e, tol * 1e6) or not _close(phase, reported_p, tol * 1e6):
                failed.append("energy_momentum_consistent")
            if inhom is None and abs(phase ** grid.lam.weight - 1) > tol * 1e6:
                failed.append("momentum_quantized_ok")
            exceptional = bool(record.get("exceptional"))
            if exceptional != is_exceptional(Qr):
                failed.append("exceptional_flag")
            if Qr.degree >= 1 and not exceptional:
                res = bethe_residuals(Qr, full.q00, Q20, work, exceptional=False)
                if res is not None and res > mpmath.mpf("1e-20"):
                    failed.append("bethe_residual")
    except QSolveError as exc:
        failed.append(f"undecidable ({exc})")
    return failed


def run_validate(path: str) -> tuple[dict, int]:
    from .qgrid import build_grid

    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict) or data.get("schema_version") != SCHEMA_VERSION:
        raise MalformedInput("unsupported or missing schema_version")
    try:
        cfg = data["config"]
        parts_list = data["partitions"]
    except KeyError as exc:
        raise MalformedInput(f"missing field {exc}") from exc
    inhom = [to_rational(x) for x in cfg["inhomogeneities"]] if cfg.get("inhomogeneities") else None
    prec = int(cfg.get("precision_bits", 128))
    report = []
    code = EXIT_OK
    for item in parts_list:
        lam = Partition(tuple(item["partition"]))
        grid = build_grid(lam, item.get("relations", cfg.get("relations", "full")), inhom)
        sols = []
        for record in item.get("solutions", []):
            failed = validate_solution(grid, record, inhom, prec)
            sols.append({"index": record.get("index"), "passed": not failed, "failed": failed})
            if failed:
                code = EXIT_VALIDATION
                print(f"validation failed: partition {lam} solution {record.get('index')}: {', '.join(failed)}",
                      file=sys.stderr)
        count_ok = item.get("found_distinct") == multiplicity(lam) == len(sols)
        if not count_ok and code == EXIT_OK:
            code = EXIT_COUNT
        report.append({"partition": list(lam.parts), "count_ok": count_ok, "solutions": sols})
    return {"schema_version": SCHEMA_VERSION, "validated_file": path, "partitions": report}, code


# --- figures ---------------------------------------------------------------------

def _figures_solve(results: list[PartitionResult], outdir: str, L: int) -> list[str]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(outdir, exist_ok=True)
    written = []
    for res in results:
        fig, ax = plt.subplots(figsize=(5, 4))
        for rec in res.payload["solutions"]:
            xs = [float(r["re"]) for r in rec["bethe_roots"]]
            ys = [float(r["im"]) for r in rec["bethe_roots"]]
            ax.scatter(xs, ys, s=14, marker="x" if rec["exceptional"] else "o")
        ax.set_xlabel("Re u")
        ax.set_ylabel("Im u")
        label = "-".join(map(str, res.partition)) or "empty"
        ax.set_title(f"Bethe roots, L={L}, partition {label}")
        ax.axhline(0, color="0.8", lw=0.5)
        path = os.path.join(outdir, f"roots_{label}.png")
        fig.tight_layout()
        fig.savefig(path, dpi=100, metadata={"Software": None})
        plt.close(fig)
        written.append(path)
    return written


def _figure_spectrum(comparisons: list[dict], outdir: str, L: int) -> str:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(outdir, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 4))
    for k, comp in enumerate(comparisons):
        for lv in comp["comparison"]["levels"]:
            if lv["oracle"] is not None:
                ax.plot([k - 0.3, k + 0.3], [float(lv["oracle"])] * 2, color="C0", lw=1)
            if lv["bethe"] is not None:
                ax.plot(k, float(lv["bethe"]), "o", color="C1", ms=4, mfc="none")
    ax.set_xticks(range(len(comparisons)))
    ax.set_xticklabels([",".join(map(str, c["partition"])) for c in comparisons], rotation=45, fontsize=7)
    ax.set_ylabel("energy")
    ax.set_title(f"Bethe (circles) vs exact diagonalization (bars), L={L}")
    path = os.path.join(outdir, f"spectrum_L{L}.png")
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
    return path


# --- output ------------------------------------------------------------------------

def _emit(doc: dict, fmt: str, rows: list[list] | None, header: list[str] | None, stream) -> None:
    if fmt == "json":
        stream.write(json.dumps(doc, indent=1, sort_keys=False) + "\n")
        return
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        stream.write(buf.getvalue())
        return
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)] if rows else [len(h) for h in header]
    stream.write("  ".join(h.ljust(w) for h, w in zip(header, widths)) + "\n")
    for r in rows:
        stream.write("  ".join(str(x).ljust(w) for x, w in zip(r, widths)) + "\n")


def _short(d: dict) -> str:
    if "exact" in d:
        return d["exact"]
    re_, im_ = mpmath.mpf(d["re"]), mpmath.mpf(d["im"])
    return mpmath.nstr(re_, 15) if abs(im_) < mpmath.mpf(10) ** -25 else mpmath.nstr(mpmath.mpc(re_, im_), 15)


def cmd_count(config: RunConfig, stream) -> int:
    parts = config.partitions()
    doc = {"schema_version": SCHEMA_VERSION, "config": config.echo(),
           "partitions": [{"partition": list(p.parts), "expected_count": multiplicity(p)} for p in parts]}
    rows = [[str(p), multiplicity(p)] for p in parts]
    _emit(doc, config.output, rows, ["partition", "count"], stream)
    return EXIT_OK


def _solve_doc(config: RunConfig, results: list[PartitionResult]) -> dict:
    parts = []
    for r in results:
        payload = dict(r.payload)
        if config.timing:
            payload["wall_time_s"] = f"{r.wall_time:.3f}"
        parts.append(payload)
    return {"schema_version": SCHEMA_VERSION, "version": __version__, "config": config.echo(), "partitions": parts}


def _solve_rows(results: list[PartitionResult]):
    header = ["partition", "index", "energy", "momentum_phase", "exceptional", "passed"]
    rows = []
    for r in results:
        for rec in r.payload["solutions"]:
            rows.append([",".join(map(str, r.partition)), rec["index"], _short(rec["energy"]),
                         _short(rec["momentum_phase"]), rec["exceptional"], rec["validation"]["passed"]])
    return header, rows


def _exit_code(results: list[PartitionResult]) -> int:
    if any(r.found_distinct != r.expected_count for r in results):
        return EXIT_COUNT
    if any(r.validated_count != r.found_distinct for r in results):
        return EXIT_VALIDATION
    return EXIT_OK


def _summary(results: list[PartitionResult]) -> None:
    for r in results:
        print(f"partition {','.join(map(str, r.partition))}: expected {r.expected_count}, found {r.found_distinct} "
              f"distinct ({r.found_with_multiplicity} with multiplicity), {r.validated_count} validated, "
              f"{r.wall_time:.2f}s", file=sys.stderr)
        for msg in r.failures:
            print(f"validation failed: {msg}", file=sys.stderr)


def cmd_solve(config: RunConfig, stream) -> int:
    results = run_solve(config)
    header, rows = _solve_rows(results)
    _emit(_solve_doc(config, results), config.output, rows, header, stream)
    if config.figures:
        _figures_solve(results, config.figures, config.length)
    _summary(results)
    return _exit_code(results)


def cmd_oracle_compare(config: RunConfig, stream) -> int:
    if config.inhomogeneities is not None:
        raise MalformedInput("the exact-diagonalization oracle covers the homogeneous chain only")
    results = run_solve(config)
    comparisons = []
    for r in results:
        lam = Partition(r.partition)
        bethe = [float(mpmath.mpf(rec["energy"]["re"])) for rec in r.payload["solutions"]]
        comp = compare_spectra(bethe, oracle_levels(lam))
        comparisons.append({"partition": list(lam.parts), "comparison": comp})
    doc = _solve_doc(config, results)
    doc["oracle_comparison"] = comparisons
    header = ["partition", "level", "bethe", "oracle", "match"]
    rows = [[",".join(map(str, c["partition"])), k, lv["bethe"], lv["oracle"], lv["match"]]
            for c in comparisons for k, lv in enumerate(c["comparison"]["levels"])]
    _emit(doc, config.output, rows, header, stream)
    if config.figures:
        _figures_solve(results, config.figures, config.length)
        _figure_spectrum(comparisons, config.figures, config.length)
    _summary(results)
    code = _exit_code(results)
    bad = [c for c in comparisons if not c["comparison"]["match"]]
    for c in bad:
        print(f"spectrum mismatch for partition {','.join(map(str, c['partition']))}:", file=sys.stderr)
        for lv in c["comparison"]["levels"]:
            if not lv["match"]:
                print(f"  bethe {lv['bethe']}  oracle {lv['oracle']}", file=sys.stderr)
    if bad and code == EXIT_OK:
        code = EXIT_VALIDATION
    return code


def cmd_validate(config: RunConfig, stream) -> int:
    doc, code = run_validate(config.input_file)
    rows = [[",".join(map(str, p["partition"])), s["index"], s["passed"], ";".join(s["failed"])]
            for p in doc["partitions"] for s in p["solutions"]]
    _emit(doc, config.output, rows, ["partition", "index", "passed", "failed"], stream)
    return code


# --- argument parsing ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsolve", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qsolve {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=["json", "csv", "pretty"], default="json")

    chain = argparse.ArgumentParser(add_help=False)
    chain.add_argument("--length", type=int, required=True, help="number of sites L")
    which = chain.add_mutually_exclusive_group()
    which.add_argument("--partition", help="Young diagram as comma-separated row lengths")
    which.add_argument("--all", action="store_true", help="every partition of L (see --fat-hook)")
    chain.add_argument("--fat-hook", help="restrict to diagrams inside the N|M fat hook, given as N,M")

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--relations", default="full", help="full | minimal | rect:N,S")
    solver.add_argument("--momentum-split", action="store_true")
    solver.add_argument("--inhomogeneities", help="comma-separated rationals, one per site")
    solver.add_argument("--precision-bits", type=int, default=128)
    solver.add_argument("--threads", type=int, default=None, help="worker processes (default $QSOLVE_THREADS or 1)")
    solver.add_argument("--seed", type=int, default=0, help="seed for random coordinate changes")
    solver.add_argument("--dump-grid", action="store_true", help="include the Q-grid and its equations")
    solver.add_argument("--figures", help="directory for PNG figures")
    solver.add_argument("--timing", action="store_true", help="include wall times in JSON (breaks byte identity)")

    sub.add_parser("count", parents=[common, chain], help="hook-formula multiplicities")
    sub.add_parser("solve", parents=[common, chain, solver], help="solve and validate")
    sub.add_parser("oracle-compare", parents=[common, chain, solver],
                   help="solve and compare energies with exact diagonalization")
    val = sub.add_parser("validate", parents=[common], help="re-check a stored JSON result")
    val.add_argument("input_file")
    return parser


def config_from_args(args) -> RunConfig:
    if args.command == "validate":
        return RunConfig("validate", 0, output=args.output, input_file=args.input_file)
    threads = getattr(args, "threads", None)
    if threads is None:
        env = os.environ.get("QSOLVE_THREADS")
        try:
            threads = int(env) if env else 1
        except ValueError as exc:
            raise MalformedInput(f"QSOLVE_THREADS must be an integer, got {env!r}") from exc
    inhom = getattr(args, "inhomogeneities", None)
    config = RunConfig(
        command=args.command,
        length=args.length,
        partition="all" if args.all or args.partition is None else args.partition,
        fat_hook=args.fat_hook,
        relations=getattr(args, "relations", "full"),
        momentum_split=getattr(args, "momentum_split", False),
        inhomogeneities=[x.strip() for x in inhom.split(",")] if inhom else None,
        precision_bits=getattr(args, "precision_bits", 128),
        threads=threads,
        output=args.output,
        seed=getattr(args, "seed", 0),
        dump_grid=getattr(args, "dump_grid", False),
        figures=getattr(args, "figures", None),
        timing=getattr(args, "timing", False),
    )
    if config.inhomogeneities:
        config.inhomogeneities = [format_rational(to_rational(x)) for x in config.inhomogeneities]
    return config


COMMANDS = {"count": cmd_count, "solve": cmd_solve, "oracle-compare": cmd_oracle_compare, "validate": cmd_validate}


def main(argv=None, stream=None) -> int:
    stream = stream or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        config = config_from_args(args)
        if config.command != "validate":
            if config.relations not in ("full", "minimal") and not config.relations.startswith("rect:"):
                raise MalformedInput(f"unknown relation mode {config.relations!r}")
            config.validate()
        return COMMANDS[config.command](config, stream)
    except (BadPartition, MalformedInput, ValueError) as exc:
        print(f"qsolve: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except QSolveError as exc:
        print(f"qsolve: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
