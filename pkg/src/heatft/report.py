"""Run orchestration, verdicts and plot-ready exports.

``evaluate_run`` drives the full pipeline over a time grid and returns an
``FtReport`` holding, per time point, the heat histograms, the detailed
fluctuation records, every integral fluctuation average with its
pass/fail flag, and the complete 64-row path table.  ``write_outputs``
renders the report to CSV files plus a summary JSON; the CSV numeric
format is 17 significant digits so files round-trip exactly.
"""

from __future__ import annotations

import json
import time as _time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ._version import __version__
from .dynamics import (
    TimeGrid,
    build_exchange,
    certify_energy_conservation,
    evolve,
    propagator_at,
    total_hamiltonian,
)
from .errors import GridMismatch, HeatFtError, PipelineStageError
from .functionals import (
    INTEGRAL_ROWS,
    assemble_heat_histogram,
    detailed_ft_ratio,
    evaluate_table,
    heat_of_path,
    integral_ft_averages,
    mean_functionals,
)
from .ingest import (
    DEFAULT_PSD_TOL_INGEST,
    StateSnapshot,
    UncertaintyConfig,
    monte_carlo_uncertainty,
    save_snapshots,
)
from .linalg import partial_trace, unitarity_defect
from .states import (
    PRESETS,
    ThermalParameters,
    correlated_initial_state,
    effective_local_beta,
    preset,
)
from .trajectories import assign_bases, forward_path_probabilities

REPORT_SCHEMA_VERSION = 1

# Exit codes: 0 all checks pass, otherwise the first failing category in
# evaluation order (structural, integral, detailed, second_law), then
# I/O and configuration problems.
EXIT_OK = 0
EXIT_GENERIC = 1
EXIT_INTEGRAL = 2
EXIT_DETAILED = 3
EXIT_SECOND_LAW = 4
EXIT_STRUCTURAL = 5
EXIT_INGEST = 6
EXIT_CONFIG = 7
_CATEGORY_ORDER = ("structural", "integral", "detailed", "second_law")
_CATEGORY_CODES = {
    "structural": EXIT_STRUCTURAL,
    "integral": EXIT_INTEGRAL,
    "detailed": EXIT_DETAILED,
    "second_law": EXIT_SECOND_LAW,
}

MASS_DEFINED_EPS = 1e-12
EXCLUDED_MASS_LIMIT = 1e-12
NORMALIZATION_TOL = 1e-10


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs; serializes to the CLI config file."""

    thermal: ThermalParameters
    grid: TimeGrid
    mode: str = "simulate"  # "simulate" | "analyze"
    literal_rho0_jl: bool = False
    uncertainty: UncertaintyConfig | None = None
    seed: int = 0
    tolerance_integral: float = 1e-9
    tolerance_detailed: float = 1e-9
    tolerance_second_law: float = 1e-10
    psd_tol: float = 1e-10
    psd_tol_ingest: float = DEFAULT_PSD_TOL_INGEST
    preset_name: str | None = None

    def __post_init__(self):
        if self.mode not in ("simulate", "analyze"):
            raise ValueError("mode must be 'simulate' or 'analyze'")

    def to_dict(self) -> dict:
        return {
            "thermal": self.thermal.to_dict(),
            "grid": self.grid.to_dict(),
            "mode": self.mode,
            "literal_rho0_jl": self.literal_rho0_jl,
            "uncertainty": self.uncertainty.to_dict() if self.uncertainty else None,
            "seed": self.seed,
            "tolerance_integral": self.tolerance_integral,
            "tolerance_detailed": self.tolerance_detailed,
            "tolerance_second_law": self.tolerance_second_law,
            "psd_tol": self.psd_tol,
            "psd_tol_ingest": self.psd_tol_ingest,
            "preset_name": self.preset_name,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        unc = data.get("uncertainty")
        return cls(
            thermal=ThermalParameters.from_dict(data["thermal"]),
            grid=TimeGrid.from_dict(data.get("grid", {})),
            mode=data.get("mode", "simulate"),
            literal_rho0_jl=bool(data.get("literal_rho0_jl", False)),
            uncertainty=UncertaintyConfig.from_dict(unc) if unc else None,
            seed=int(data.get("seed", 0)),
            tolerance_integral=float(data.get("tolerance_integral", 1e-9)),
            tolerance_detailed=float(data.get("tolerance_detailed", 1e-9)),
            tolerance_second_law=float(data.get("tolerance_second_law", 1e-10)),
            psd_tol=float(data.get("psd_tol", 1e-10)),
            psd_tol_ingest=float(data.get("psd_tol_ingest", DEFAULT_PSD_TOL_INGEST)),
            preset_name=data.get("preset_name"),
        )

    @classmethod
    def from_preset(cls, name: str, **overrides) -> "RunConfig":
        params = preset(name)
        grid = overrides.pop("grid", TimeGrid.uniform())
        return cls(thermal=params, grid=grid, preset_name=name, **overrides)


@dataclass(frozen=True)
class PathRow:
    """One path table row as exported to paths.csv."""

    s: int
    a0: int
    b0: int
    a1: int
    b1: int
    o1: float
    o2: float
    o3: float
    o4: float
    p_forward: float
    p_reverse: float
    q_pev: float
    in_measure: bool
    functionals: dict | None


@dataclass(frozen=True)
class TimePointReport:
    """Everything evaluated at a single interaction time."""

    time: float
    hist_forward: tuple
    hist_reverse: tuple
    heat_support: tuple
    detailed: tuple  # per support point: dict
    integral: dict  # row -> value
    integral_deviation: dict  # row -> |value - 1|
    integral_pass: dict  # row -> bool (rows counted toward the verdict)
    mean_heat_pev: float
    mean_sigma: float
    jw_slope: float | None  # fitted slope of ln[Pf(Q)/Pr(-Q)]; dbeta for alpha = 0
    functional_means: dict
    excluded_mass: float
    commutator_norm: float
    unitarity_defect: float
    forward_mass_defect: float
    reverse_mass_defect: float
    max_sstar_eigenvalue_gap: float
    warnings: tuple
    paths: tuple

    def to_dict(self) -> dict:
        d = {
            "time_s": self.time,
            "hist_forward": list(self.hist_forward),
            "hist_reverse": list(self.hist_reverse),
            "heat_support_pev": list(self.heat_support),
            "detailed": [dict(r) for r in self.detailed],
            "integral": dict(self.integral),
            "integral_deviation": dict(self.integral_deviation),
            "integral_pass": dict(self.integral_pass),
            "mean_heat_pev": self.mean_heat_pev,
            "mean_sigma": self.mean_sigma,
            "jw_slope": self.jw_slope,
            "functional_means": dict(self.functional_means),
            "excluded_mass": self.excluded_mass,
            "commutator_norm": self.commutator_norm,
            "unitarity_defect": self.unitarity_defect,
            "forward_mass_defect": self.forward_mass_defect,
            "reverse_mass_defect": self.reverse_mass_defect,
            "max_sstar_eigenvalue_gap": self.max_sstar_eigenvalue_gap,
            "warnings": list(self.warnings),
            "paths": [
                {
                    "s": p.s, "a0": p.a0, "b0": p.b0, "a1": p.a1, "b1": p.b1,
                    "o1": p.o1, "o2": p.o2, "o3": p.o3, "o4": p.o4,
                    "p_forward": p.p_forward, "p_reverse": p.p_reverse,
                    "q_pev": p.q_pev, "in_measure": p.in_measure,
                    "functionals": p.functionals,
                }
                for p in self.paths
            ],
        }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TimePointReport":
        return cls(
            time=float(d["time_s"]),
            hist_forward=tuple(d["hist_forward"]),
            hist_reverse=tuple(d["hist_reverse"]),
            heat_support=tuple(d["heat_support_pev"]),
            detailed=tuple(d["detailed"]),
            integral=dict(d["integral"]),
            integral_deviation=dict(d["integral_deviation"]),
            integral_pass=dict(d["integral_pass"]),
            mean_heat_pev=float(d["mean_heat_pev"]),
            mean_sigma=float(d["mean_sigma"]),
            jw_slope=d.get("jw_slope"),
            functional_means=dict(d["functional_means"]),
            excluded_mass=float(d["excluded_mass"]),
            commutator_norm=float(d["commutator_norm"]),
            unitarity_defect=float(d["unitarity_defect"]),
            forward_mass_defect=float(d["forward_mass_defect"]),
            reverse_mass_defect=float(d["reverse_mass_defect"]),
            max_sstar_eigenvalue_gap=float(d["max_sstar_eigenvalue_gap"]),
            warnings=tuple(d["warnings"]),
            paths=tuple(
                PathRow(
                    s=p["s"], a0=p["a0"], b0=p["b0"], a1=p["a1"], b1=p["b1"],
                    o1=p["o1"], o2=p["o2"], o3=p["o3"], o4=p["o4"],
                    p_forward=p["p_forward"], p_reverse=p["p_reverse"],
                    q_pev=p["q_pev"], in_measure=p["in_measure"],
                    functionals=p["functionals"],
                )
                for p in d["paths"]
            ),
        )


@dataclass(frozen=True)
class FtReport:
    """Full run outcome: per-time reports plus the overall verdict."""

    config: dict
    points: tuple
    passed: bool
    failures: tuple  # (category, time_s, detail) triples
    exit_code: int
    metadata: dict = field(default_factory=dict)
    uncertainty: dict | None = None

    @property
    def times(self) -> tuple:
        return tuple(p.time for p in self.points)

    def to_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "package_version": __version__,
            "config": self.config,
            "points": [p.to_dict() for p in self.points],
            "passed": self.passed,
            "failures": [list(f) for f in self.failures],
            "exit_code": self.exit_code,
            "metadata": self.metadata,
            "uncertainty": self.uncertainty,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FtReport":
        return cls(
            config=d["config"],
            points=tuple(TimePointReport.from_dict(p) for p in d["points"]),
            passed=bool(d["passed"]),
            failures=tuple(tuple(f) for f in d["failures"]),
            exit_code=int(d["exit_code"]),
            metadata=d.get("metadata", {}),
            uncertainty=d.get("uncertainty"),
        )


def simulate_states(config: RunConfig) -> list:
    """Initial state evolved across the grid, as snapshots."""
    rho0 = correlated_initial_state(config.thermal)
    coupling = build_exchange(config.thermal.j_coupling)
    out = []
    for t in config.grid.times:
        u = propagator_at(coupling, t)
        out.append(
            StateSnapshot(time=t, rho=evolve(rho0, u), source="simulated")
        )
    return out


def _evaluate_point(
    config: RunConfig,
    coupling,
    h_a,
    h_b,
    h_total,
    rho0: np.ndarray,
    rho_t: np.ndarray,
    t: float,
    mode: str,
) -> TimePointReport:
    u = propagator_at(coupling, t)
    comm = certify_energy_conservation(u, h_total)
    u_defect = unitarity_defect(u)
    psd_tol = config.psd_tol if mode == "simulate" else config.psd_tol_ingest
    ba = assign_bases(rho0, rho_t, u, h_a, h_b, mode=mode, psd_tol=psd_tol)
    records = forward_path_probabilities(ba, u)
    table = evaluate_table(
        records, ba, config.thermal.delta_beta, config.literal_rho0_jl
    )
    hist_f = assemble_heat_histogram(records, ba, "forward")
    hist_r = assemble_heat_histogram(records, ba, "reverse")
    detailed = detailed_ft_ratio(hist_f, hist_r, config.thermal.delta_beta)
    integral = integral_ft_averages(records, table, config.thermal.delta_beta)
    means = mean_functionals(records, table)

    deviation = {name: abs(integral[name] - 1.0) for name in INTEGRAL_ROWS}
    is_uncorrelated = config.thermal.alpha == 0
    integral_pass = {}
    for name in INTEGRAL_ROWS:
        if name == "exp_neg_q_dbeta" and not is_uncorrelated:
            continue  # exchange theorem only claimed without initial correlations
        integral_pass[name] = deviation[name] <= config.tolerance_integral

    paths = []
    for rec, vals, ok in zip(records, table.values, table.in_measure):
        paths.append(
            PathRow(
                s=rec.s, a0=rec.a0, b0=rec.b0, a1=rec.a1, b1=rec.b1,
                o1=rec.overlaps[0], o2=rec.overlaps[1],
                o3=rec.overlaps[2], o4=rec.overlaps[3],
                p_forward=rec.p_forward, p_reverse=rec.p_reverse,
                q_pev=heat_of_path(rec, ba),
                in_measure=ok,
                functionals=(
                    {
                        "i0": vals.i0, "i1": vals.i1,
                        "j0": vals.j0, "j1": vals.j1,
                        "c0": vals.c0, "c1": vals.c1,
                        "sigma_a": vals.sigma_a, "sigma_b": vals.sigma_b,
                        "gamma": vals.gamma, "sigma_total": vals.sigma_total,
                    }
                    if vals is not None
                    else None
                ),
            )
        )

    detailed_dicts = tuple(
        {
            "q_pev": r.q,
            "p_f": r.p_f,
            "p_r_neg": r.p_r_neg,
            "lhs": r.lhs,
            "rhs_jw": r.rhs_jw,
            "psi": r.psi,
            "defined": r.defined,
        }
        for r in detailed
    )

    by_q = {r.q: r for r in detailed}
    level = hist_f.support[2]
    jw_slope = None
    if by_q[level].defined and by_q[-level].defined:
        jw_slope = (by_q[level].lhs - by_q[-level].lhs) / (2.0 * level)

    return TimePointReport(
        time=t,
        hist_forward=tuple(hist_f.masses),
        hist_reverse=tuple(hist_r.masses),
        heat_support=tuple(hist_f.support),
        detailed=detailed_dicts,
        integral={k: float(v) for k, v in integral.items()},
        integral_deviation=deviation,
        integral_pass=integral_pass,
        mean_heat_pev=float(integral["mean_heat_pev"]),
        mean_sigma=float(integral["mean_sigma"]),
        jw_slope=jw_slope,
        functional_means=means,
        excluded_mass=table.excluded_mass,
        commutator_norm=comm,
        unitarity_defect=u_defect,
        forward_mass_defect=abs(sum(r.p_forward for r in records) - 1.0),
        reverse_mass_defect=abs(sum(r.p_reverse for r in records) - 1.0),
        max_sstar_eigenvalue_gap=float(
            np.max(np.abs(ba.p_sstar - ba.p_s))
        ),
        warnings=ba.warnings,
        paths=tuple(paths),
    )


def _collect_failures(config: RunConfig, points) -> list:
    failures = []
    is_uncorrelated = config.thermal.alpha == 0
    for p in points:
        if p.commutator_norm > 1e-10:
            failures.append(("structural", p.time, f"commutator {p.commutator_norm:.3e}"))
        if p.unitarity_defect > 1e-10:
            failures.append(("structural", p.time, f"unitarity {p.unitarity_defect:.3e}"))
        if p.forward_mass_defect > NORMALIZATION_TOL:
            failures.append(
                ("structural", p.time, f"forward mass defect {p.forward_mass_defect:.3e}")
            )
        if p.reverse_mass_defect > NORMALIZATION_TOL:
            failures.append(
                ("structural", p.time, f"reverse mass defect {p.reverse_mass_defect:.3e}")
            )
        if p.excluded_mass > EXCLUDED_MASS_LIMIT:
            failures.append(
                ("structural", p.time, f"excluded mass {p.excluded_mass:.3e}")
            )
        for name, ok in p.integral_pass.items():
            if not ok:
                failures.append(
                    ("integral", p.time,
                     f"{name} deviates by {p.integral_deviation[name]:.3e}")
                )
        if is_uncorrelated:
            for rec in p.detailed:
                if rec["defined"] and min(rec["p_f"], rec["p_r_neg"]) > MASS_DEFINED_EPS:
                    if abs(rec["lhs"] - rec["rhs_jw"]) > config.tolerance_detailed:
                        failures.append(
                            ("detailed", p.time,
                             f"JW ratio off by {abs(rec['lhs'] - rec['rhs_jw']):.3e} "
                             f"at Q={rec['q_pev']:+.4f} peV")
                        )
        if p.mean_sigma < -config.tolerance_second_law:
            failures.append(
                ("second_law", p.time, f"mean sigma {p.mean_sigma:.3e} < 0")
            )
        for name, value in p.functional_means.items():
            if value < -config.tolerance_second_law:
                failures.append(
                    ("second_law", p.time, f"mean {name} = {value:.3e} < 0")
                )
    return failures


def _exit_code(failures) -> int:
    if not failures:
        return EXIT_OK
    seen = {f[0] for f in failures}
    for category in _CATEGORY_ORDER:
        if category in seen:
            return _CATEGORY_CODES[category]
    return EXIT_GENERIC


def evaluate_run(config: RunConfig, snapshots=None) -> FtReport:
    """Run the full pipeline and assemble the report.

    ``simulate`` mode evolves the configured initial state over the grid;
    ``analyze`` mode takes externally supplied snapshots (the first one,
    at t = 0, is the initial state).  Any stage error is re-raised with
    the failing time point attached.
    """
    h_a = config.thermal.hamiltonian("A")
    h_b = config.thermal.hamiltonian("B")
    h_total = total_hamiltonian(h_a, h_b)
    coupling = build_exchange(config.thermal.j_coupling)

    if config.mode == "analyze":
        if not snapshots:
            raise ValueError("analyze mode needs snapshots")
        if snapshots[0].time != 0.0:
            raise ValueError("analyze mode needs a snapshot at t = 0")
        times = [s.time for s in snapshots]
        rho0 = snapshots[0].rho
        series = [(s.time, s.rho) for s in snapshots]
        mode = "measured"
    else:
        rho0 = correlated_initial_state(config.thermal)
        times = list(config.grid.times)
        series = None
        mode = "simulate"

    started = _time.perf_counter()
    points = []
    for index, t in enumerate(times):
        try:
            if series is None:
                rho_t = evolve(rho0, propagator_at(coupling, t))
            else:
                rho_t = series[index][1]
            points.append(
                _evaluate_point(
                    config, coupling, h_a, h_b, h_total, rho0, rho_t, t, mode
                )
            )
        except HeatFtError as exc:
            raise PipelineStageError(t, index, exc) from exc
    elapsed = _time.perf_counter() - started

    failures = _collect_failures(config, points)
    marginal_checks = None
    if config.mode == "analyze":
        # sanity-check that the uploaded initial marginals are thermal and
        # report their effective temperatures next to the configured ones
        marginal_checks = {}
        for which, beta_cfg in (("a", config.thermal.beta_a), ("b", config.thermal.beta_b)):
            marginal = partial_trace(rho0, which.upper(), validate=False)
            estimate = effective_local_beta(
                marginal, config.thermal.hamiltonian(which.upper())
            )
            marginal_checks[which] = {
                "status": estimate.status,
                "beta_inv_pev": (
                    1.0 / estimate.beta if estimate.beta else None
                ),
                "configured_beta_inv_pev": 1.0 / beta_cfg,
                "off_diagonal": estimate.off_diagonal,
            }
    metadata = {
        "jl_variant": "literal_rho0" if config.literal_rho0_jl else "consistent_final_state",
        "sigma_convention": "sigma = Q_A*dbeta + I0 - I1 - Sigma_A - Sigma_B + gamma",
        "reverse_process": "re-prepared initial ensemble propagated with U^dag",
        "uncertainty_procedure": (
            "per-entry Gaussian perturbation of Hermitian degrees of freedom, "
            "repair, full re-analysis"
        ),
        "runtime_s": elapsed,
        "mode": config.mode,
    }
    if marginal_checks is not None:
        metadata["initial_marginals"] = marginal_checks

    uncertainty = None
    if config.uncertainty is not None and config.uncertainty.noise_sigma > 0:
        if config.mode != "analyze":
            raise ValueError("uncertainty propagation runs in analyze mode")
        uncertainty = monte_carlo_uncertainty(
            snapshots, config.uncertainty, _mc_pipeline(config)
        )

    return FtReport(
        config=config.to_dict(),
        points=tuple(points),
        passed=not failures,
        failures=tuple(failures),
        exit_code=_exit_code(failures),
        metadata=metadata,
        uncertainty=uncertainty,
    )


def _mc_pipeline(config: RunConfig):
    """Flat scalar extractor for Monte-Carlo resampling."""
    base = replace(config, uncertainty=None)

    def run(snapshots) -> dict:
        rep = evaluate_run(base, snapshots=snapshots)
        flat = {}
        for i, p in enumerate(rep.points):
            tag = f"t{i:02d}"
            for name in INTEGRAL_ROWS:
                flat[f"{tag}.{name}"] = p.integral[name]
            for j, label in enumerate(("minus", "zero", "plus")):
                flat[f"{tag}.hist_f_{label}"] = p.hist_forward[j]
                flat[f"{tag}.hist_r_{label}"] = p.hist_reverse[j]
        return flat

    return run


def export_snapshots(config: RunConfig, path) -> list:
    """Simulate the configured run and write the snapshot series."""
    snapshots = simulate_states(config)
    save_snapshots(snapshots, path)
    return snapshots


def compare_runs(a: FtReport, b: FtReport) -> dict:
    """Per-time, per-quantity differences between two reports."""
    if a.times != b.times:
        raise GridMismatch(
            f"grids differ: {len(a.times)} vs {len(b.times)} points"
        )
    rows = []
    max_abs = 0.0
    for pa, pb in zip(a.points, b.points):
        entry = {"time_s": pa.time, "diffs": {}, "psi": {}}
        for name in INTEGRAL_ROWS:
            d = abs(pa.integral[name] - pb.integral[name])
            entry["diffs"][name] = d
            max_abs = max(max_abs, d)
        for j, label in enumerate(("minus", "zero", "plus")):
            d_f = abs(pa.hist_forward[j] - pb.hist_forward[j])
            d_r = abs(pa.hist_reverse[j] - pb.hist_reverse[j])
            entry["diffs"][f"hist_f_{label}"] = d_f
            entry["diffs"][f"hist_r_{label}"] = d_r
            max_abs = max(max_abs, d_f, d_r)
        for ra, rb in zip(pa.detailed, pb.detailed):
            if ra["defined"] and rb["defined"]:
                key = f"q={ra['q_pev']:+.4f}"
                entry["psi"][key] = {
                    "a": ra["psi"],
                    "b": rb["psi"],
                    "a_minus_1": ra["psi"] - 1.0,
                    "b_minus_1": rb["psi"] - 1.0,
                }
        rows.append(entry)
    return {"max_abs_difference": max_abs, "per_time": rows}


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_outputs(report: FtReport, outdir) -> dict:
    """Write the CSV set and summary JSON; returns written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = {}

    def write_csv(name: str, header, rows):
        path = outdir / name
        lines = [",".join(header)]
        lines += [",".join(row) for row in rows]
        path.write_text("\n".join(lines) + "\n")
        written[name] = path

    support = report.points[0].heat_support if report.points else ()
    hist_header = ["time_s"] + [f"p_q={_fmt(q)}_pev" for q in support]
    write_csv(
        "heat_forward.csv",
        hist_header,
        [
            [_fmt(p.time)] + [_fmt(m) for m in p.hist_forward]
            for p in report.points
        ],
    )
    write_csv(
        "heat_reverse.csv",
        hist_header,
        [
            [_fmt(p.time)] + [_fmt(m) for m in p.hist_reverse]
            for p in report.points
        ],
    )
    write_csv(
        "detailed_ft.csv",
        ["time_s", "q_pev", "p_f", "p_r_neg_q", "lhs_log_ratio", "rhs_q_dbeta",
         "psi", "defined"],
        [
            [
                _fmt(p.time), _fmt(r["q_pev"]), _fmt(r["p_f"]), _fmt(r["p_r_neg"]),
                _fmt(r["lhs"]) if r["defined"] else "",
                _fmt(r["rhs_jw"]),
                _fmt(r["psi"]) if r["defined"] else "",
                "1" if r["defined"] else "0",
            ]
            for p in report.points
            for r in p.detailed
        ],
    )
    write_csv(
        "integral_ft.csv",
        ["time_s", "functional", "value", "abs_deviation", "counted", "passed"],
        [
            [
                _fmt(p.time), name, _fmt(p.integral[name]),
                _fmt(p.integral_deviation[name]),
                "1" if name in p.integral_pass else "0",
                "1" if p.integral_pass.get(name, True) else "0",
            ]
            for p in report.points
            for name in INTEGRAL_ROWS
        ],
    )
    func_names = ("i0", "i1", "j0", "j1", "c0", "c1", "sigma_a", "sigma_b",
                  "gamma", "sigma_total")
    write_csv(
        "paths.csv",
        ["time_s", "s", "a0", "b0", "a1", "b1", "o1", "o2", "o3", "o4",
         "p_forward", "p_reverse", "q_pev", "in_measure"] + list(func_names),
        [
            [
                _fmt(p.time), str(row.s), str(row.a0), str(row.b0), str(row.a1),
                str(row.b1), _fmt(row.o1), _fmt(row.o2), _fmt(row.o3),
                _fmt(row.o4), _fmt(row.p_forward), _fmt(row.p_reverse),
                _fmt(row.q_pev), "1" if row.in_measure else "0",
            ]
            + [
                _fmt(row.functionals[n]) if row.functionals else ""
                for n in func_names
            ]
            for p in report.points
            for row in p.paths
        ],
    )
    summary = outdir / "summary.json"
    summary.write_text(json.dumps(report.to_dict(), sort_keys=True))
    written["summary.json"] = summary
    return written


def load_report(path) -> FtReport:
    return FtReport.from_dict(json.loads(Path(path).read_text()))


def preset_catalog() -> dict:
    return {name: dict(values) for name, values in PRESETS.items()}
