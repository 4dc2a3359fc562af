"""Quantum-connection examples and the end-to-end analysis pipeline."""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import FconnError
from .exactalg import RatFunc
from .formalconn import (
    CHART_PARTNER,
    GradingVector,
    RationalConnection,
    change_chart,
    dualize,
    grading_gauge,
    regularized_monodromy_eigenvalues,
    split_exponential_type,
)
from .newton import cyclic_operator, newton_polygon

EXAMPLE_IDS = ("p1", "cubic_surface_block", "cubic_surface_h2", "kkp_slope_half", "kkp_slope_one")


@dataclass(frozen=True)
class Example:
    id: str
    connection: RationalConnection
    grading: GradingVector = None
    split_chart: str = None  # chart to switch to before splitting, if any
    dim: int = None  # complex dimension of the underlying manifold, when meaningful


def _mono(c, k, var):
    return RatFunc.monomial(k, Fraction(c), var)


def _p1():
    q = "q"
    conn = RationalConnection.from_rows(q, [[0, _mono(2, 1, q)], [_mono(2, -1, q), 0]])
    return Example("p1", conn, GradingVector((0, 2)), "Q", 1)


def _cubic_block():
    lead = [[0, 108, 252], [1, 9, 36], [0, 3, 0]]
    res = [0, 1, 2]
    rows = [[_mono(-lead[i][j], -2, "Q") + _mono(res[i] if i == j else 0, -1, "Q") for j in range(3)]
            for i in range(3)]
    return Example("cubic_surface_block", RationalConnection.from_rows("Q", rows), dim=2)


def _cubic_h2(rank=6):
    # complementary summand on which the class acts by -6, with residue I
    rows = [[_mono(6, -2, "Q") + _mono(1, -1, "Q") if i == j else 0 for j in range(rank)] for i in range(rank)]
    return Example("cubic_surface_h2", RationalConnection.from_rows("Q", rows), dim=2)


def _kkp(shift):
    q = "q"
    rows = [[_mono(shift, -2, q), _mono(-1, -2, q)],
            [_mono(-1, -1, q), _mono(shift, -2, q) + _mono(Fraction(-1, 2), -1, q)]]
    name = "kkp_slope_one" if shift else "kkp_slope_half"
    return Example(name, RationalConnection.from_rows(q, rows))


def build_example(example_id, h2_rank=6):
    """The named example: a connection plus the grading/chart data the pipeline needs."""
    if example_id == "p1":
        return _p1()
    if example_id == "cubic_surface_block":
        return _cubic_block()
    if example_id == "cubic_surface_h2":
        return _cubic_h2(h2_rank)
    if example_id == "kkp_slope_half":
        return _kkp(0)
    if example_id == "kkp_slope_one":
        return _kkp(1)
    raise ValueError(f"unknown example {example_id!r}; choose from {', '.join(EXAMPLE_IDS)}")


@dataclass(frozen=True)
class PipelineOptions:
    grading: GradingVector = None
    split_chart: str = None
    order: int = 12
    dim: int = None
    newton_charts: bool = True
    duality: bool = True

    @classmethod
    def for_example(cls, ex, **overrides):
        kw = {"grading": ex.grading, "split_chart": ex.split_chart, "dim": ex.dim}
        kw.update(overrides)
        return cls(**kw)


@dataclass
class PipelineReport:
    input: dict
    chart_trail: list = field(default_factory=list)
    exp_type: object = None
    monodromy: list = None
    max_jordan_block: int = None
    newton: dict = field(default_factory=dict)
    duality: dict = None
    jordan_bound: dict = None
    errors: dict = field(default_factory=dict)

    def to_json(self):
        out = {"input": self.input, "chart_trail": self.chart_trail}
        if self.exp_type is not None:
            out["exp_type"] = self.exp_type.to_json()
        if self.monodromy is not None:
            out["regularized_monodromy"] = [
                {"lambda": str(lam), "exponents": [f"{a} mod 1" for a in exps]} for lam, exps in self.monodromy]
            out["max_jordan_block"] = self.max_jordan_block
        if self.newton:
            out["newton"] = {chart: np.to_json() for chart, np in self.newton.items()}
        if self.duality is not None:
            out["duality"] = self.duality
        if self.jordan_bound is not None:
            out["jordan_bound"] = self.jordan_bound
        if self.errors:
            out["errors"] = self.errors
        return out


def _err(exc):
    return f"{type(exc).__name__}: {exc}"


def _dual_check(conn, report, order):
    dual, _ = split_exponential_type(dualize(conn), order)
    expected = sorted((-b.lam, tuple(sorted((-a) % 1 for a in b.exponents))) for b in report.blocks)
    got = sorted((b.lam, tuple(sorted(b.exponents))) for b in dual.blocks)
    return {"passed": expected == got,
            "dual_lambdas": [str(b.lam) for b in dual.blocks],
            "dual_exponents": [[f"{a} mod 1" for a in sorted(b.exponents)] for b in dual.blocks]}


def analyze_pipeline(conn, options=None):
    """Grading gauge, chart change, splitting, monodromy, Newton polygons and duality.

    A failing stage is recorded in ``errors`` and the remaining stages still run.
    """
    options = options or PipelineOptions()
    rep = PipelineReport(input={"connection": conn.to_json(), "order": options.order,
                                "grading": list(options.grading.degrees) if options.grading else None,
                                "split_chart": options.split_chart, "dim": options.dim})
    work = conn
    rep.chart_trail.append(conn.var)
    if options.grading is not None:
        try:
            work = grading_gauge(work, options.grading)
            rep.chart_trail.append(f"{work.var} (graded)")
        except FconnError as exc:
            rep.errors["grading_gauge"] = _err(exc)
    base = work
    if options.split_chart and options.split_chart != work.var:
        work = change_chart(work, options.split_chart)
        rep.chart_trail.append(work.var)

    try:
        report, _ = split_exponential_type(work, options.order)
        rep.exp_type = report
        rep.monodromy, rep.max_jordan_block = regularized_monodromy_eigenvalues(report)
    except FconnError as exc:
        rep.errors["split_exponential_type"] = _err(exc)

    if options.newton_charts:
        for chart in (base.var, CHART_PARTNER[base.var]):
            try:
                c = base if chart == base.var else change_chart(base, chart)
                _, op = cyclic_operator(c)
                rep.newton[chart] = newton_polygon(op)
            except (FconnError, ArithmeticError, RuntimeError) as exc:
                rep.errors[f"newton_{chart}"] = _err(exc)

    if options.duality and rep.exp_type is not None:
        try:
            rep.duality = _dual_check(work, rep.exp_type, options.order)
        except FconnError as exc:
            rep.errors["duality"] = _err(exc)

    if options.dim is not None and rep.exp_type is not None:
        biggest = rep.max_jordan_block
        rep.jordan_bound = {"bound": options.dim + 1, "max_block": biggest,
                            "holds": biggest is not None and biggest <= options.dim + 1}
    return rep


def analyze_example(example_id, order=12):
    ex = build_example(example_id)
    return analyze_pipeline(ex.connection, PipelineOptions.for_example(ex, order=order))
