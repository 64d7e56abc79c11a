"""``quasifrag``: deterministic runner for entropies, sweeps, figure tables and oracle checks.

Exit status: 0 success, 1 oracle check above tolerance, 2 invalid job,
3 cost cap refused, 4 numerical breakdown.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .core import CapExceeded, OccupancySpec, SpecError, expand
from .entropy import NumericalError
from .experiments import (
    DEFAULT_CAPS,
    Caps,
    add_boson_rows,
    add_fermion_rows,
    add_harmonic_rows,
    add_ising_rows,
    build_figure,
    mode_set_from,
    model_table,
    resolve_figure,
    state_curves,
)
from .harmonic import HarmonicModel
from .ising import EVEN, ODD, IsingModel, pattern_excitation, physical_excitation
from .oracles import SUITES, TOLERANCES, suite_passed
from .output import Table, write_atomic

TASKS = ("compute", "sweep", "reproduce-fig", "oracle-check")
MODELS = ("fermion", "ising", "boson", "harmonic")
FORMATS = ("csv", "json", "svg")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_CAP, EXIT_NUMERICAL = 0, 1, 2, 3, 4


@dataclass
class JobSpec:
    task: str
    model: str | None = None
    spec: OccupancySpec | None = None
    L: int | None = None
    modes: tuple[int, ...] | None = None
    grid: str | None = None
    n: tuple[float, ...] = (1.0,)
    out: Path | None = None
    fmt: str = "csv"
    figure: str | None = None
    h: float = 1.0
    sector: str = EVEN
    m: float = 10.0
    max_L: int | None = None
    caps: Caps = field(default_factory=Caps)

    @property
    def chain_length(self) -> int:
        return self.spec.L if self.spec is not None else int(self.L)

    def validate(self) -> None:
        if self.task not in TASKS:
            raise SpecError(f"unknown task {self.task!r}; choose one of {', '.join(TASKS)}")
        if self.fmt not in FORMATS:
            raise SpecError(f"unknown format {self.fmt!r}")
        if any(not v > 0 for v in self.n):
            raise SpecError(f"Renyi indices must be positive, got {list(self.n)}")
        if self.task == "reproduce-fig":
            if self.figure is None:
                raise SpecError("reproduce-fig needs a figure key")
            self.figure = resolve_figure(self.figure)
            return
        if self.model not in MODELS:
            raise SpecError(f"--model must be one of {', '.join(MODELS)}")
        if self.task == "oracle-check":
            return
        if self.spec is None and (self.L is None or self.modes is None):
            raise SpecError("give a state with --spec, or with --L and --modes")
        if self.spec is not None and self.modes is not None:
            raise SpecError("--spec and --modes are mutually exclusive")
        if not self.grid_values():
            raise SpecError("grid is empty")
        if self.model == "harmonic" and self.n != (2.0,):
            raise SpecError("the harmonic chain supports only --n 2")
        if self.model == "ising" and self.chain_length % 2:
            raise SpecError(f"the Ising ring needs even L, got {self.chain_length}")
        N = len(self.mode_set().K)
        if self.model == "boson" and N > self.caps.boson_N:
            raise CapExceeded(f"{N} bosons exceed the cap of {self.caps.boson_N} (Ryser cost ~ {2.0**N * N:.3g})")
        if self.model == "harmonic" and N > self.caps.harmonic_K:
            raise CapExceeded(
                f"{N} excitations exceed the cap of {self.caps.harmonic_K} ({4 * N} Wick insertions)"
            )

    def mode_set(self):
        if self.spec is not None:
            return expand(self.spec)
        return mode_set_from(self.L, self.modes)

    def grid_values(self) -> list[int]:
        return parse_grid(self.grid or ("all" if self.task == "sweep" else "half"), self.chain_length)


def parse_grid(text: str, L: int) -> list[int]:
    """Subsystem sizes from ``all``, ``half``, ``0,3,6`` or ``x=1/4,1/2``."""
    text = text.strip()
    if text == "all":
        return list(range(L + 1))
    if text == "half":
        return [L // 2]
    if text.startswith("x="):
        out = []
        for item in text[2:].split(","):
            x = Fraction(item.strip())
            L_A = x * L
            if L_A.denominator != 1 or not 0 <= L_A <= L:
                raise SpecError(f"x={item} does not give a whole subsystem in a chain of {L} sites")
            out.append(int(L_A))
        return sorted(set(out))
    try:
        values = sorted({int(v) for v in text.split(",") if v.strip()})
    except ValueError as exc:
        raise SpecError(f"cannot read grid {text!r}: {exc}") from None
    bad = [v for v in values if not 0 <= v <= L]
    if bad:
        raise SpecError(f"subsystem sizes {bad} not inside [0, {L}]")
    return values


def _parse_n(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot read Renyi indices {text!r}: {exc}") from None


def _parse_modes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot read modes {text!r}: {exc}") from None


def load_spec(text: str) -> OccupancySpec:
    """An occupancy spec from a JSON file path or an inline JSON object."""
    if text.lstrip().startswith("{"):
        return OccupancySpec.from_json(text)
    path = Path(text)
    if not path.is_file():
        raise SpecError(f"spec file {text} not found")
    try:
        return OccupancySpec.from_json(path.read_text())
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec file {text} is not valid JSON: {exc}") from None


# -- task runners ----------------------------------------------------------


def _state_table(job: JobSpec) -> Table:
    K = job.mode_set()
    L = job.chain_length
    grid = job.grid_values()
    table = model_table(job.model)
    if job.model == "fermion":
        add_fermion_rows(table, L, K, job.spec, grid, job.n)
    elif job.model == "ising":
        model = IsingModel(L, job.h)
        if job.spec is not None:
            exc = pattern_excitation(model, job.spec, job.sector)
        else:
            exc = physical_excitation(model, job.sector, K.K)
        add_ising_rows(table, model, exc, job.spec, grid, job.n)
    elif job.model == "boson":
        add_boson_rows(table, L, K, job.spec, grid, job.n, job.caps)
    else:
        add_harmonic_rows(table, HarmonicModel(L, job.m), K, grid, job.caps)
    table.sort()
    table.title = f"{job.model} {job.task}"
    table.curves = state_curves(table, ("n",))
    return table


def _oracle_table(job: JobSpec) -> Table:
    suite = SUITES[job.model]
    kwargs: dict = {"caps": job.caps}
    if job.model == "fermion":
        kwargs["max_L"] = job.max_L or 10
        kwargs["ns"] = job.n
    elif job.model == "ising":
        kwargs["Ls"] = tuple(L for L in (8, 10, 12) if L <= (job.max_L or 12))
        kwargs["ns"] = job.n
    elif job.model == "boson":
        kwargs["max_L"] = job.max_L or 8
        kwargs["ns"] = job.n
    else:
        kwargs["max_L"] = job.max_L or 12
    table = suite(**kwargs)
    table.title = f"{job.model} oracle check"
    table.curves = state_curves(table, ("method", "n"), y="max_abs_err", pred=None)
    return table


@dataclass
class Report:
    exit_code: int
    summary: str
    table: Table | None = None


def run(job: JobSpec) -> Report:
    """Validate and execute a job, writing its outputs atomically."""
    job.validate()
    if job.task == "reproduce-fig":
        table = build_figure(job.figure, job.caps)
        label = f"reproduce-fig {job.figure}"
    elif job.task == "oracle-check":
        table = _oracle_table(job)
        label = f"oracle-check {job.model}"
    else:
        table = _state_table(job)
        label = f"{job.task} {job.model}"

    written = []
    if job.out is not None:
        written.append(write_atomic(job.out, table.render(job.fmt)))
        if job.task == "reproduce-fig" and job.fmt != "svg":
            written.append(write_atomic(job.out.with_suffix(".svg"), table.to_svg()))
    worst = table.max_error()
    parts = [f"{label}: {len(table.rows)} rows"]
    if written:
        parts.append("-> " + ", ".join(str(p) for p in written))
    if worst is not None:
        parts.append(f"max {table.error_column} {worst:.3e}")
    code = EXIT_OK
    if job.task == "oracle-check":
        ok = suite_passed(job.model, table)
        parts.append(f"tolerance {TOLERANCES[job.model]:g} {'PASS' if ok else 'FAIL'}")
        code = EXIT_OK if ok else EXIT_CHECK_FAILED
    return Report(code, "; ".join(parts), table)


# -- argument handling -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quasifrag", description=__doc__.splitlines()[0])
    ap.add_argument("task", choices=TASKS)
    ap.add_argument("target", nargs="?", help="figure key for reproduce-fig, model for the other tasks")
    ap.add_argument("--model", choices=MODELS)
    ap.add_argument("--spec", help="occupancy spec: JSON file or inline JSON object")
    ap.add_argument("--L", type=int, help="chain length for an explicit --modes state")
    ap.add_argument("--modes", type=_parse_modes, help="explicit excited momenta, e.g. 0,2,4")
    ap.add_argument("--grid", help="subsystem sizes: all | half | 0,3,6 | x=1/4,1/2")
    ap.add_argument("--n", type=_parse_n, default=None, help="Renyi indices, e.g. 1,2")
    ap.add_argument("--h", type=float, default=1.0, help="Ising transverse field")
    ap.add_argument("--sector", choices=(EVEN, ODD), default=EVEN, help="Ising parity sector")
    ap.add_argument("--m", type=float, default=10.0, help="harmonic-chain mass")
    ap.add_argument("--max-L", type=int, help="largest chain in an oracle check")
    ap.add_argument("--out", type=Path, help="output path; stdout when omitted")
    ap.add_argument("--format", dest="fmt", choices=FORMATS, default="csv")
    caps = ap.add_argument_group("cost caps (raising any needs --i-accept-the-cost)")
    caps.add_argument("--cap-fock-L", type=int, default=DEFAULT_CAPS.fock_L)
    caps.add_argument("--cap-ed-L", type=int, default=DEFAULT_CAPS.ed_L)
    caps.add_argument("--cap-boson-N", type=int, default=DEFAULT_CAPS.boson_N)
    caps.add_argument("--cap-harmonic-K", type=int, default=DEFAULT_CAPS.harmonic_K)
    caps.add_argument("--i-accept-the-cost", action="store_true")
    return ap


def job_from_args(args: argparse.Namespace) -> JobSpec:
    caps = Caps(args.cap_fock_L, args.cap_ed_L, args.cap_boson_N, args.cap_harmonic_K)
    raised = caps.raised_over(DEFAULT_CAPS)
    if raised and not args.i_accept_the_cost:
        raise CapExceeded(
            f"raising {', '.join(raised)} above the default needs --i-accept-the-cost "
            f"(defaults: {DEFAULT_CAPS})"
        )
    model = args.model
    figure = None
    if args.task == "reproduce-fig":
        figure = args.target
    elif args.target is not None:
        if model is not None and model != args.target:
            raise SpecError(f"model given twice: {args.target!r} and --model {model!r}")
        model = args.target
    default_n = {"harmonic": (2.0,), "boson": (2.0,)}.get(model or "", (1.0,))
    if args.task == "oracle-check":
        default_n = {"fermion": (1.0, 2.0), "ising": (1.0, 2.0), "boson": (1.0, 2.0, 3.0)}.get(model or "", (2.0,))
    return JobSpec(
        task=args.task,
        model=model,
        spec=load_spec(args.spec) if args.spec else None,
        L=args.L,
        modes=args.modes,
        grid=args.grid,
        n=args.n if args.n is not None else default_n,
        out=args.out,
        fmt=args.fmt,
        figure=figure,
        h=args.h,
        sector=args.sector,
        m=args.m,
        max_L=args.max_L,
        caps=caps,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = job_from_args(args)
        report = run(job)
    except CapExceeded as exc:
        print(f"quasifrag: refused: {exc}", file=sys.stderr)
        return EXIT_CAP
    except SpecError as exc:
        print(f"quasifrag: invalid job: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"quasifrag: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if job.out is None and report.table is not None:
        sys.stdout.write(report.table.render(job.fmt))
        print(report.summary, file=sys.stderr)
    else:
        print(report.summary)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
