"""Row builders shared by the CLI tasks, and the fixed figure-reproduction jobs.

Every builder appends rows to a :class:`~quasifrag.output.Table` and never
depends on evaluation order, so the sorted table is a pure function of the
job parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .boson import BOSON_CAP, CONFIG_BUDGET, BosonState, _n_configs, boson_sector_entropy, naive_prediction
from .core import Block, CapExceeded, ModeSet, OccupancySpec, SpecError, UnitPattern, expand
from .fermion import FOCK_CAP, fermion_entropy, per_pattern_s, predict_mixed_density, predict_xxz
from .harmonic import HARMONIC_CAP, HarmonicModel, harmonic_excited_renyi2, harmonic_ground_renyi2
from .ising import ED_MAX_L, EVEN, IsingExcitation, IsingModel, ising_correlation_entropy, pattern_excitation
from .output import BASE_COLUMNS, Table
from .svg import Curve


@dataclass(frozen=True)
class Caps:
    """Cost caps for every exponential-cost path.

    fock_L
        Largest chain for the Fock-space oracle (``4^L`` work).
    ed_L
        Largest spin chain for dense exact diagonalisation (``2^L`` matrix).
    boson_N
        Most bosons in a sector construction (Ryser cost ``N 2^N`` per amplitude).
    harmonic_K
        Most excitations in the Wick sum (``4|K|`` insertions).
    """

    fock_L: int = FOCK_CAP
    ed_L: int = ED_MAX_L
    boson_N: int = BOSON_CAP
    harmonic_K: int = HARMONIC_CAP

    def raised_over(self, other: Caps) -> list[str]:
        return [name for name in self.__dataclass_fields__ if getattr(self, name) > getattr(other, name)]


DEFAULT_CAPS = Caps()

MODEL_COLUMNS = {
    "fermion": (),
    "ising": ("h", "sector"),
    "boson": ("N", "p", "extrapolated"),
    "harmonic": ("m", "S_ground", "S_free_boson"),
}


def model_table(model: str, extra: tuple[str, ...] = ()) -> Table:
    cols = list(BASE_COLUMNS) + list(MODEL_COLUMNS[model]) + list(extra)
    keys = [c for c in ("state", "h", "m", "p", "extrapolated") if c in cols] + ["method", "n", "L", "L_A"]
    return Table(cols, key_columns=keys)


def _add_row(table: Table, method: str, n: float, L: int, L_A: int, S: float, prediction, **extra) -> None:
    x = Fraction(L_A, L)
    s_per_L = S / L
    err = abs(s_per_L - prediction) if prediction is not None else None
    table.add(
        method=method, n=float(n), L=L, L_A=L_A, x=x, S=S, S_per_L=s_per_L,
        prediction=prediction, abs_err=err, **extra,
    )


def fermion_prediction(spec: OccupancySpec | None, n: float, x: Fraction) -> float | None:
    """Scaling-limit ``S / L``; exactly zero at ``x`` in ``{0, 1}``."""
    if spec is None:
        return None
    if x <= 0 or x >= 1:
        return 0.0
    return predict_mixed_density(spec, n, x)


def boson_naive_density(spec: OccupancySpec | None, n: float, x: Fraction) -> float | None:
    if spec is None:
        return None
    if x <= 0 or x >= 1:
        return 0.0
    return sum(float(Fraction(b.p, spec.L)) * naive_prediction(b.pattern, n, x) for b in spec.blocks)


# -- per-model row builders --------------------------------------------------


def add_fermion_rows(table, L, K, spec, grid, ns, **extra) -> None:
    for n in ns:
        for L_A in grid:
            S = fermion_entropy(L, L_A, K, n)
            _add_row(table, "correlation", n, L, L_A, S, fermion_prediction(spec, n, Fraction(L_A, L)), **extra)


def add_ising_rows(table, model: IsingModel, exc: IsingExcitation, spec, grid, ns, **extra) -> None:
    for n in ns:
        for L_A in grid:
            S = ising_correlation_entropy(model, exc, L_A, n).value
            pred = fermion_prediction(spec, n, Fraction(L_A, model.L))
            _add_row(table, "correlation", n, model.L, L_A, S, pred, h=model.h, sector=exc.sector, **extra)


def add_boson_rows(table, L, K, spec, grid, ns, caps: Caps = DEFAULT_CAPS, **extra) -> None:
    state = BosonState(L, K)
    extra.setdefault("p", sum(b.p for b in spec.blocks) if spec is not None else None)
    for n in ns:
        for L_A in grid:
            S = boson_sector_entropy(state, L_A, n, cap=caps.boson_N).value
            pred = boson_naive_density(spec, n, Fraction(L_A, L))
            _add_row(table, "boson_sector", n, L, L_A, S, pred, N=state.N, extrapolated=False, **extra)


def add_harmonic_rows(table, model: HarmonicModel, K, grid, caps: Caps = DEFAULT_CAPS, **extra) -> None:
    """Renyi-2 rows; the prediction is the ground-state value plus the free-boson value of ``K``."""
    L = model.L
    state = BosonState(L, K)
    free_ok = state.N <= caps.boson_N
    for L_A in grid:
        S = harmonic_excited_renyi2(model, state.K, L_A, cap=caps.harmonic_K).value
        ground = harmonic_ground_renyi2(model, L_A).value
        free = boson_sector_entropy(state, L_A, 2, cap=caps.boson_N).value if free_ok else None
        pred = (ground + free) / L if free is not None else None
        _add_row(
            table, "gaussian_wick", 2, L, L_A, S, pred,
            m=model.m, S_ground=ground, S_free_boson=free, **extra,
        )


def state_curves(table: Table, group: tuple[str, ...], y: str = "S_per_L", pred: str | None = "prediction"):
    """One solid curve per group of rows, plus a dashed prediction curve when present."""
    idx = {c: table.columns.index(c) for c in table.columns}
    groups: dict[tuple, list] = {}
    for row in table.rows:
        key = tuple(row[idx[g]] for g in group if g in idx)
        groups.setdefault(key, []).append(row)
    curves = []
    for key, rows in groups.items():
        label = " ".join(f"{g}={v}" for g, v in zip([g for g in group if g in idx], key) if v is not None)
        pts = sorted((float(r[idx["x"]]), r[idx[y]]) for r in rows if r[idx[y]] is not None)
        if pts:
            curves.append(Curve(tuple(a for a, _ in pts), tuple(float(b) for _, b in pts), label))
        if pred and pred in idx:
            pp = sorted((float(r[idx["x"]]), r[idx[pred]]) for r in rows if r[idx[pred]] is not None)
            if pp:
                curves.append(
                    Curve(tuple(a for a, _ in pp), tuple(float(b) for _, b in pp), f"{label} prediction", True)
                )
    return curves


# -- figure jobs --------------------------------------------------------------


def _x_grid(points: int = 200) -> list[Fraction]:
    return [Fraction(i, points + 1) for i in range(1, points + 1)]


def _pattern_label(pattern: UnitPattern) -> str:
    return f"l={pattern.l} kappa={','.join(map(str, pattern.kappa))}"


def _spec_label(spec: OccupancySpec) -> str:
    parts = [f"{_pattern_label(b.pattern)} p={b.p} offset={b.offset}" for b in spec.blocks]
    return f"L={spec.L} " + " + ".join(parts)


def fig_universal(caps: Caps = DEFAULT_CAPS) -> Table:
    """Per-pattern function for ``kappa = {0}`` and ``{0, 1}`` at growing ``l``, von Neumann."""
    table = Table(list(BASE_COLUMNS) + ["state"], key_columns=["state", "x"], ylabel="s(x)")
    table.title = "per-pattern entropy"
    cells = [UnitPattern(l, (0,)) for l in range(2, 9)] + [UnitPattern(l, (0, 1)) for l in range(3, 9)]
    for pattern in cells:
        for x in _x_grid():
            table.add(method="prediction", n=1.0, x=x, prediction=per_pattern_s(pattern, 1, x),
                      state=_pattern_label(pattern))
    table.sort()
    table.curves = state_curves(table, ("state",), y="prediction", pred=None)
    return table


def _fermion_state_figure(specs: list[OccupancySpec], title: str, n: float = 1.0) -> Table:
    table = model_table("fermion", ("state",))
    table.title = title
    for spec in specs:
        K = expand(spec)
        add_fermion_rows(table, spec.L, K, spec, range(spec.L + 1), [n], state=_spec_label(spec))
    table.sort()
    table.curves = state_curves(table, ("state",))
    return table


def partial_specs(L: int = 96) -> list[OccupancySpec]:
    if L % 24:
        raise SpecError(f"partial-occupancy figure needs L divisible by 24, got {L}")
    two, three = UnitPattern(2, (0,)), UnitPattern(3, (0, 1))
    return [
        OccupancySpec(L, (Block(two, L // 4),)),
        OccupancySpec(L, (Block(two, L // 8),)),
        OccupancySpec(L, (Block(three, L // 6),)),
        OccupancySpec(L, (Block(three, L // 12),)),
    ]


def mixed_spec(L: int, offset: int | None = None) -> OccupancySpec:
    """``l=2, {0}`` on the first third and ``l=3, {0,1}`` on a quarter starting at ``offset``."""
    if L % 12:
        raise SpecError(f"mixed-occupancy state needs L divisible by 12, got {L}")
    offset = L // 2 if offset is None else offset
    return OccupancySpec(
        L, (Block(UnitPattern(2, (0,)), L // 6, 0), Block(UnitPattern(3, (0, 1)), L // 12, offset))
    )


def fig_partial(L: int = 96) -> Table:
    return _fermion_state_figure(partial_specs(L), "partial occupancy")


def fig_mixed(L: int = 96) -> Table:
    return _fermion_state_figure([mixed_spec(L, L // 3), mixed_spec(L)], "mixed occupancy")


def ising_specs(L: int = 96) -> list[OccupancySpec]:
    """Full ``l=2`` pattern, and ``l=2`` on a third next to ``l=3, {0,1}`` on a half."""
    if L % 6:
        raise SpecError(f"Ising pattern figure needs L divisible by 6, got {L}")
    two, three = UnitPattern(2, (0,)), UnitPattern(3, (0, 1))
    return [
        OccupancySpec(L, (Block(two, L // 2),)),
        OccupancySpec(L, (Block(two, L // 6, 0), Block(three, L // 6, L // 3))),
    ]


def fig_ising(L: int = 96, h: float = 1.0) -> Table:
    table = model_table("ising", ("state",))
    table.title = f"transverse-field Ising, h={h:g}"
    model = IsingModel(L, h)
    for spec in ising_specs(L):
        exc = pattern_excitation(model, spec, EVEN)
        add_ising_rows(table, model, exc, spec, range(L + 1), [1.0], state=_spec_label(spec))
    table.sort()
    table.curves = state_curves(table, ("state",))
    return table


def fig_xxz() -> Table:
    """Fermionic predictions for magnon cells ``l`` (prediction curves only)."""
    table = Table(list(BASE_COLUMNS) + ["state"], key_columns=["state", "x"], ylabel="s(x)")
    table.title = "XXZ magnon-cell predictions"
    for l in range(2, 7):
        for x in _x_grid():
            table.add(method="prediction", n=1.0, x=x, prediction=predict_xxz(l, 1, x), state=f"magnon cell l={l}")
    table.sort()
    table.curves = state_curves(table, ("state",), y="prediction", pred=None)
    return table


BOSON_PANELS = (
    (UnitPattern(2, (0,)), (2, 4, 6, 8)),
    (UnitPattern(3, (0, 1)), (2, 3, 4)),
)


def boson_panel_ps(pattern: UnitPattern, ps, caps: Caps = DEFAULT_CAPS) -> list[int]:
    keep = []
    for p in ps:
        N = p * pattern.size
        if N <= caps.boson_N and _n_configs(p * pattern.l, N) <= CONFIG_BUDGET:
            keep.append(p)
    return keep


def fig_bosons(caps: Caps = DEFAULT_CAPS, n: float = 2.0) -> Table:
    """``S / p`` of fully occupied boson patterns against the naive interpolation.

    Rows carry ``S / L``; multiply by ``l`` for ``S / p``.  Extrapolated rows
    hold the linear-in-``1/p`` estimate from the two largest ``p`` at the
    subsystem fractions shared by every ``p``.
    """
    table = model_table("boson", ("state",))
    table.title = f"free bosons, Renyi-{n:g}"
    for pattern, ps in BOSON_PANELS:
        ps = boson_panel_ps(pattern, ps, caps)
        if not ps:
            raise CapExceeded(f"no repetition count of {_pattern_label(pattern)} fits the boson cap {caps.boson_N}")
        label = _pattern_label(pattern)
        values: dict[int, dict[Fraction, float]] = {}
        for p in ps:
            L = p * pattern.l
            spec = OccupancySpec(L, (Block(pattern, p),))
            add_boson_rows(table, L, expand(spec), spec, range(L + 1), [n], caps, state=label, p=p)
            idx = table.columns.index
            values[p] = {
                r[idx("x")]: r[idx("S")] / p
                for r in table.rows
                if r[idx("state")] == label and r[idx("p")] == p and not r[idx("extrapolated")]
            }
        if len(ps) >= 2:
            p1, p2 = ps[-2], ps[-1]
            z = Fraction(1, pattern.l)
            for x in sorted(set(values[p1]) & set(values[p2])):
                s1, s2 = values[p1][x], values[p2][x]
                extrap = (p2 * s2 - p1 * s1) / (p2 - p1)
                naive = boson_naive_density(OccupancySpec(pattern.l, (Block(pattern, 1),)), n, x)
                table.add(
                    method="boson_sector", n=float(n), x=x, S_per_L=float(z) * extrap, prediction=naive,
                    abs_err=abs(float(z) * extrap - naive), N=None, p=None, extrapolated=True, state=label,
                )
    table.sort()
    table.curves = state_curves(table, ("state", "p", "extrapolated"))
    table.ylabel = "S / L"
    return table


HARMONIC_MASSES = (1.0, 2.0, 5.0, 10.0)


def fig_harmonic(caps: Caps = DEFAULT_CAPS, L: int = 12, masses=HARMONIC_MASSES) -> Table:
    """Excited-state Renyi-2 of the harmonic chain for the full and half-filled ``l=2`` pattern."""
    table = model_table("harmonic", ("state",))
    table.title = f"harmonic chain, L={L}, Renyi-2"
    pattern = UnitPattern(2, (0,))
    specs = [OccupancySpec(L, (Block(pattern, L // 2),)), OccupancySpec(L, (Block(pattern, L // 4),))]
    for m in masses:
        model = HarmonicModel(L, m)
        for spec in specs:
            add_harmonic_rows(table, model, expand(spec), range(L + 1), caps, state=_spec_label(spec))
    table.sort()
    table.curves = state_curves(table, ("state", "m"))
    return table


FIGURES = {
    "universal": fig_universal,
    "partial": fig_partial,
    "mixed": fig_mixed,
    "ising": fig_ising,
    "xxz": fig_xxz,
    "bosons": fig_bosons,
    "harmonic": fig_harmonic,
}

FIGURE_NUMBERS = {
    "2": "universal",
    "3": "partial",
    "4": "mixed",
    "5": "ising",
    "6": "xxz",
    "7": "bosons",
    "8": "harmonic",
}


def resolve_figure(key: str) -> str:
    name = FIGURE_NUMBERS.get(str(key), str(key))
    if name not in FIGURES:
        choices = ", ".join(list(FIGURES) + [f"{k} ({v})" for k, v in FIGURE_NUMBERS.items()])
        raise SpecError(f"unknown figure {key!r}; choose one of {choices}")
    return name


def build_figure(key: str, caps: Caps = DEFAULT_CAPS) -> Table:
    name = resolve_figure(key)
    builder = FIGURES[name]
    if name in ("bosons", "harmonic"):
        return builder(caps)
    return builder()


def mode_set_from(L: int, modes) -> ModeSet:
    return ModeSet(L, tuple(sorted(int(k) for k in modes)))
