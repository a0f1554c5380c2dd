"""Command-line front-end: construct sets, run estimators and verifiers,
emit CSV and SVG.

Exit codes: 0 success or all checks pass, 1 verification failure, 2 usage
or parse error, 3 I/O error.  Identical configurations produce identical
output bytes regardless of worker count.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .constructions import (
    ConcaveTarget,
    TwoPhaseParams,
    concave_union,
    full_binary_tree,
    geometric_sequence_tree,
    left_path_tree,
    target_from_poly,
    two_phase_schedule,
)
from .errors import BudgetError, FormatError
from . import formats
from .schedule import BranchingSchedule, materialize
from . import spectra
from .svg import render_plot

__all__ = ["main", "RunConfig"]

DEFAULT_GRID = "0.1:0.9:0.1"
DEFAULT_EPSILONS = "0.1,0.05,0.02"
ALL_CHECKS = ("main-theorem", "bound", "chain", "nthroot")


@dataclass
class RunConfig:
    """Merged CLI + config-file settings for one invocation."""

    subcommand: str
    input: str | None = None
    output: str | None = None
    theta_grid: list[Fraction] = field(default_factory=list)
    m_range: tuple[int, int] | None = None
    tol: float = 0.05
    neighbors: bool = False
    workers: int = 1
    epsilons: list[Fraction] = field(default_factory=list)
    params: dict = field(default_factory=dict)


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational {text!r}") from exc


def parse_theta_grid(spec: str) -> list[Fraction]:
    """Parse "start:stop:step" into an inclusive ascending grid."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"theta grid must be start:stop:step, got {spec!r}")
    start, stop, step = (_parse_fraction(p) for p in parts)
    if step <= 0:
        raise ValueError("theta grid step must be positive")
    if not (0 < start <= stop < 1):
        raise ValueError("theta grid must lie strictly inside (0, 1)")
    out = []
    cur = start
    while cur <= stop:
        out.append(cur)
        cur += step
    return out


def parse_m_range(spec: str) -> tuple[int, int]:
    parts = spec.split(":")
    if len(parts) != 2:
        raise ValueError(f"m range must be lo:hi, got {spec!r}")
    return int(parts[0]), int(parts[1])


def read_config(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, encoding="ascii") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, value = line.partition("=")
            if not eq:
                raise ValueError(f"bad config line {raw.rstrip()!r}")
            out[key.strip()] = value.strip()
    return out


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fds",
        description="Construct dyadic sets with prescribed Assouad-type "
        "spectra; estimate and cross-verify their dimensions.",
    )
    sub = ap.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", default=None)
    common.add_argument("--output", "-o", default=None)
    common.add_argument("--theta-grid", default=None, metavar="A:B:C")
    common.add_argument("--m-range", default=None, metavar="LO:HI")
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--neighbors", choices=("on", "off"), default=None)
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--config", default=None)

    con = sub.add_parser("construct", parents=[common], help="generate a set file")
    con.add_argument(
        "generator",
        choices=("two-phase", "concave-union", "geometric", "full", "path", "from-schedule"),
    )
    con.add_argument("--s", default=None)
    con.add_argument("--t", default=None)
    con.add_argument("--m0", type=int, default=None)
    con.add_argument("--blocks", type=int, default=None)
    con.add_argument("--depth", type=int, default=None)
    con.add_argument("--target", default=None, help="polynomial coefficients c0,c1,...")
    con.add_argument("--components", type=int, default=None)
    con.add_argument("--shifts", default=None, help="explicit comma-separated shifts")
    con.add_argument("--shift-linear", type=int, default=None)

    est = sub.add_parser("estimate", parents=[common], help="estimate a dimension")
    est.add_argument("--mode", choices=("spectrum", "upper", "box", "qa"), default="spectrum")
    est.add_argument("--epsilons", default=None, help="comma-separated, e.g. 0.1,0.05,0.02")

    ver = sub.add_parser("verify", parents=[common], help="run identity checks")
    ver.add_argument("--check", action="append", default=None, help="repeatable; default all")
    ver.add_argument("--epsilons", default=None)
    ver.add_argument("--n-values", default="2,3")

    plo = sub.add_parser("plot", parents=[common], help="render CSVs as one SVG")
    plo.add_argument("csvs", nargs="*")
    plo.add_argument("--overlay-u", default=None, metavar="S,T")
    plo.add_argument("--overlay-poly", default=None, metavar="C0,C1,...")
    return ap


_CONFIG_KEYS = {
    "s",
    "t",
    "m0",
    "blocks",
    "target",
    "samples",
    "shifts",
    "depth",
    "theta-grid",
    "m-range",
    "tol",
    "neighbors",
    "workers",
    "epsilons",
}


def _merge_config(args: argparse.Namespace) -> None:
    """Fill unset CLI options from the config file; flags win."""
    if not getattr(args, "config", None):
        return
    cfg = read_config(args.config)
    unknown = set(cfg) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key, value in cfg.items():
        attr = key.replace("-", "_")
        if getattr(args, attr, None) is None:
            setattr(args, attr, value)


def _load_input(args) -> formats.SetLike:
    if not args.input:
        raise ValueError("--input is required")
    return formats.load(args.input)


def _run_config(args, depth: int) -> RunConfig:
    """Merged settings for an estimate/verify invocation."""
    grid = parse_theta_grid(args.theta_grid or DEFAULT_GRID)
    eps_spec = getattr(args, "epsilons", None)
    return RunConfig(
        subcommand=args.subcommand,
        input=args.input,
        output=args.output,
        theta_grid=grid,
        m_range=_effective_range(args, depth, grid),
        tol=float(args.tol) if args.tol is not None else 0.05,
        neighbors=(args.neighbors or "off") == "on",
        workers=int(args.workers) if args.workers is not None else 1,
        epsilons=[_parse_fraction(tok) for tok in str(eps_spec).split(",")]
        if eps_spec
        else [],
    )


def _effective_range(args, depth: int, grid) -> tuple[int, int]:
    if args.m_range is not None:
        spec = args.m_range if isinstance(args.m_range, str) else None
        lo, hi = parse_m_range(spec) if spec else args.m_range
    else:
        # default: deep enough for long windows, low enough to fit the grid
        lo = max(1, depth // 4)
        if grid:
            top = (depth * min(grid).numerator) // min(grid).denominator
            lo = max(1, min(lo, top))
        hi = depth
        return lo, hi
    return lo, hi


def cmd_construct(args) -> int:
    gen = args.generator
    out = args.output
    if not out:
        raise ValueError("--output is required")
    if gen == "two-phase":
        if args.s is None or args.t is None:
            raise ValueError("two-phase needs --s and --t")
        params = TwoPhaseParams(
            _parse_fraction(str(args.s)),
            _parse_fraction(str(args.t)),
            int(args.m0) if args.m0 is not None else 4,
            int(args.blocks) if args.blocks is not None else 3,
        )
        sched = two_phase_schedule(params)
        formats.dump(sched, out)
        print(f"wrote {out}: fds-schedule depth={sched.depth} runs={len(sched.runs)}")
    elif gen == "concave-union":
        samples = getattr(args, "samples", None)
        if args.target is not None:
            coeffs = [_parse_fraction(tok) for tok in str(args.target).split(",")]
            count = int(args.components) if args.components is not None else 8
            target = target_from_poly(coeffs, count)
        elif samples is not None:
            # explicit sample list: "<f0>;<q>:<f>,<q>:<f>,..."
            head, _, body = str(samples).partition(";")
            pts = []
            for tok in body.split(","):
                q, _, f = tok.partition(":")
                pts.append((_parse_fraction(q), _parse_fraction(f)))
            target = ConcaveTarget(_parse_fraction(head), tuple(pts))
        else:
            raise ValueError("concave-union needs --target c0,c1,... or samples=")
        shifts = (
            [int(tok) for tok in str(args.shifts).split(",")] if args.shifts else None
        )
        cs = concave_union(
            target,
            m0=int(args.m0) if args.m0 is not None else 4,
            blocks=int(args.blocks) if args.blocks is not None else 3,
            shifts=shifts,
            shift_linear=args.shift_linear,
        )
        formats.dump(cs, out)
        print(
            f"wrote {out}: fds-composite components={len(cs.components)} depth={cs.depth}"
        )
    elif gen in ("geometric", "full", "path"):
        depth = args.depth if args.depth is not None else {"geometric": 256, "full": 10, "path": 64}[gen]
        depth = int(depth)
        tree = {
            "geometric": geometric_sequence_tree,
            "full": full_binary_tree,
            "path": left_path_tree,
        }[gen](depth)
        formats.dump(tree, out)
        print(f"wrote {out}: fds-tree depth={tree.depth} nodes={tree.node_count()}")
    elif gen == "from-schedule":
        obj = _load_input(args)
        if not isinstance(obj, BranchingSchedule):
            raise ValueError("from-schedule needs an fds-schedule input")
        tree = materialize(obj)
        formats.dump(tree, out)
        print(f"wrote {out}: fds-tree depth={tree.depth} nodes={tree.node_count()}")
    return 0


def _chunk(seq, n):
    k = max(1, len(seq) // n + (1 if len(seq) % n else 0))
    return [seq[i : i + k] for i in range(0, len(seq), k)]


def _grid_estimate(kind, rep, grid, m_range, neighbors, workers):
    fn = spectra.estimate_spectrum if kind == "spectrum" else spectra.estimate_upper
    if workers <= 1 or len(grid) <= 1:
        return fn(rep, grid, m_range, neighbors)
    chunks = _chunk(grid, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda g: fn(rep, g, m_range, neighbors), chunks))
    est = parts[0]
    for p in parts[1:]:
        est.thetas.extend(p.thetas)
        est.values.extend(p.values)
        est.witnesses.extend(p.witnesses)
    return est


def cmd_estimate(args) -> int:
    rep = _load_input(args)
    if not args.output:
        raise ValueError("--output is required")
    cfg = _run_config(args, _depth_of(rep))
    mode = args.mode
    if mode in ("spectrum", "upper"):
        est = _grid_estimate(
            mode, rep, cfg.theta_grid, cfg.m_range, cfg.neighbors, cfg.workers
        )
        summary = (
            f"{mode}: {len(est.values)} grid points, "
            f"min={min(est.values)!r} max={max(est.values)!r}"
        )
    elif mode == "box":
        est = spectra.estimate_box(rep, cfg.m_range)
        summary = f"box: value={est.value!r} witness m={est.m_witness}"
    else:
        eps = cfg.epsilons or [
            _parse_fraction(tok) for tok in DEFAULT_EPSILONS.split(",")
        ]
        est = spectra.estimate_quasi_assouad(rep, eps, cfg.m_range, cfg.neighbors)
        summary = f"qa: headline={est.headline!r} ({est.trend})"
    text = spectra.estimate_to_csv(est)
    with open(cfg.output, "w", encoding="ascii") as fh:
        fh.write(text)
    print(f"{summary} -> {cfg.output}")
    return 0


def _depth_of(rep) -> int:
    return rep.depth


def cmd_verify(args) -> int:
    rep = _load_input(args)
    cfg = _run_config(args, _depth_of(rep))
    checks = args.check or list(ALL_CHECKS)
    expanded: list[str] = []
    for c in checks:
        expanded.extend(tok.strip() for tok in c.split(","))
    unknown = [c for c in expanded if c not in ALL_CHECKS]
    if unknown:
        raise ValueError(f"unknown checks: {unknown}; choose from {ALL_CHECKS}")
    n_values = [int(tok) for tok in str(args.n_values).split(",")]
    grid, m_range, tol, nb = cfg.theta_grid, cfg.m_range, cfg.tol, cfg.neighbors
    reports = []
    for check in expanded:
        if check == "main-theorem":
            reports.append(spectra.verify_main_theorem(rep, grid, m_range, nb))
        elif check == "bound":
            reports.append(spectra.verify_bound(rep, grid, m_range, tol, nb))
        elif check == "chain":
            reports.append(
                spectra.verify_chain(rep, grid, m_range, tol, cfg.epsilons or None, nb)
            )
        else:
            reports.append(
                spectra.verify_nthroot(rep, grid, n_values, m_range, tol, nb)
            )
    for rep_ in reports:
        sys.stdout.write(spectra.report_to_text(rep_))
    return 0 if all(r.passed for r in reports) else 1


def _read_csv_series(path: str) -> list[tuple[float, float]]:
    with open(path, encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != "theta,value,m_witness,mprime_witness":
        raise FormatError(f"{path}: not a spectrum CSV")
    pts = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != 4:
            raise FormatError(f"{path}: bad row {ln!r}")
        try:
            theta = float(cells[0]) if cells[0] else 0.0
            value = float(cells[1])
        except ValueError as exc:
            raise FormatError(f"{path}: bad row {ln!r}") from exc
        pts.append((theta, value))
    if not pts:
        raise FormatError(f"{path}: empty CSV body")
    return pts


def cmd_plot(args) -> int:
    out = args.output
    if not out:
        raise ValueError("--output is required")
    paths = list(args.csvs)
    if args.input:
        paths.insert(0, args.input)
    if not paths:
        raise ValueError("plot needs at least one CSV input")
    series = []
    for p in paths:
        label = p.rsplit("/", 1)[-1]
        series.append((label, _read_csv_series(p)))
    samples = [k / 200 for k in range(1, 200)]
    if args.overlay_u:
        s_tok, t_tok = str(args.overlay_u).split(",")
        from .constructions import closed_form_u

        s, t = float(Fraction(s_tok)), float(Fraction(t_tok))
        series.append(
            (f"u(s={s_tok},t={t_tok})", [(x, closed_form_u(s, t, x)) for x in samples])
        )
    if args.overlay_poly:
        coeffs = [float(Fraction(tok)) for tok in str(args.overlay_poly).split(",")]
        def poly(x: float) -> float:
            acc = 0.0
            for c in reversed(coeffs):
                acc = acc * x + c
            return acc
        series.append(("target f", [(x, poly(x)) for x in samples]))
    text = render_plot(series)
    with open(out, "w", encoding="ascii") as fh:
        fh.write(text)
    print(f"wrote {out}: {len(series)} series")
    return 0


def main(argv: list[str] | None = None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        _merge_config(args)
        if args.subcommand == "construct":
            return cmd_construct(args)
        if args.subcommand == "estimate":
            return cmd_estimate(args)
        if args.subcommand == "verify":
            return cmd_verify(args)
        return cmd_plot(args)
    except (ValueError, BudgetError) as exc:  # includes FormatError
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
