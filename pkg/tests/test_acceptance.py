"""Acceptance suite: one check per shipped guarantee, printed pass/fail.

Run with  pytest tests/test_acceptance.py -v -s  to see the per-criterion
lines.  Tolerances are fixed here, not configurable.
"""

import time

import numpy as np
import pytest

from heatft.dynamics import TimeGrid, build_exchange, propagator_at, total_hamiltonian
from heatft.linalg import commutator_norm, unitarity_defect, validate_density_matrix
from heatft.report import RunConfig, compare_runs, evaluate_run, simulate_states
from heatft.states import PLANCK_H_PEV_S, preset
from heatft.trajectories import assign_bases, enumerate_paths

from . import oracles

HNU0 = PLANCK_H_PEV_S * 1000.0
INDIVIDUAL_ROWS = (
    "exp_neg_i0", "exp_neg_i1", "exp_neg_j0", "exp_neg_j1",
    "exp_neg_c0", "exp_neg_c1", "exp_neg_sigma_a", "exp_neg_sigma_b",
    "exp_neg_gamma",
)


def report_line(number: int, passed: bool, text: str) -> None:
    status = "PASS" if passed else "FAIL"
    print(f"ACCEPTANCE {number}: {status} - {text}")
    assert passed, f"criterion {number}: {text}"


@pytest.fixture(scope="module")
def correlated_run():
    config = RunConfig.from_preset("correlated")
    started = time.perf_counter()
    report = evaluate_run(config)
    elapsed = time.perf_counter() - started
    return report, elapsed


@pytest.fixture(scope="module")
def uncorrelated_run():
    return evaluate_run(RunConfig.from_preset("uncorrelated"))


def test_criterion_1_composite_integral_ft(correlated_run):
    report, elapsed = correlated_run
    worst = max(p.integral_deviation["exp_neg_sigma"] for p in report.points)
    passed = worst <= 1e-9 and len(report.points) == 22 and elapsed < 1.0
    report_line(
        1, passed,
        f"composite integral FT <exp(-sigma)> = 1 at all 22 points "
        f"(max deviation {worst:.2e}, runtime {elapsed:.3f} s)",
    )


def test_criterion_2_individual_integral_fts(correlated_run):
    report, _ = correlated_run
    worst_name, worst = None, 0.0
    for p in report.points:
        for name in INDIVIDUAL_ROWS:
            dev = p.integral_deviation[name]
            if dev > worst:
                worst_name, worst = name, dev
    passed = worst <= 1e-9
    report_line(
        2, passed,
        f"nine individual integral FTs = 1 at all points "
        f"(worst {worst_name}: {worst:.2e})",
    )


def test_criterion_3_jarzynski_wojcik_limit(uncorrelated_run):
    report = uncorrelated_run
    worst_integral = max(
        p.integral_deviation["exp_neg_q_dbeta"] for p in report.points
    )
    worst_detailed = 0.0
    checked = 0
    for p in report.points:
        for rec in p.detailed:
            if (
                rec["q_pev"] != 0.0
                and min(rec["p_f"], rec["p_r_neg"]) > 1e-12
            ):
                checked += 1
                worst_detailed = max(
                    worst_detailed, abs(rec["lhs"] - rec["rhs_jw"])
                )
    passed = worst_integral <= 1e-9 and worst_detailed <= 1e-9 and checked > 0
    report_line(
        3, passed,
        f"exchange-theorem limit: <exp(-Q dbeta)> dev {worst_integral:.2e}; "
        f"ln[Pf(Q)/Pr(-Q)] = Q dbeta dev {worst_detailed:.2e} over "
        f"{checked} (t, Q) pairs",
    )


def test_criterion_4_correlated_detailed_ft():
    grid = TimeGrid.explicit([0.0, 1.88e-3, 2.32e-3])
    report = evaluate_run(RunConfig.from_preset("correlated", grid=grid))
    psi = {}
    for p in report.points[1:]:
        psi[p.time] = {
            rec["q_pev"]: rec["psi"] for rec in p.detailed if rec["defined"]
        }
    departures = [
        abs(psi[t][q] - 1.0) for t in (1.88e-3, 2.32e-3) for q in (HNU0, -HNU0)
    ]
    time_gaps = [
        abs(psi[1.88e-3][q] - psi[2.32e-3][q]) for q in (HNU0, -HNU0)
    ]
    passed = min(departures) > 1e-3 and min(time_gaps) > 0.0
    report_line(
        4, passed,
        f"correlated detailed FT: min |psi - 1| = {min(departures):.3e} at "
        f"1.88/2.32 ms, psi time-dependence gap {min(time_gaps):.3e}",
    )


def test_criterion_5_mirror_symmetry(uncorrelated_run):
    # Without initial correlations the forward and reverse heat
    # distributions are identical; given the exchange-theorem asymmetry
    # P_r(-Q) = exp(-Q dbeta) P_f(Q), the identity holds between the
    # distributions over their own heat variables.
    report = uncorrelated_run
    worst = max(
        abs(f - r)
        for p in report.points
        for f, r in zip(p.hist_forward, p.hist_reverse)
    )
    passed = worst <= 1e-10
    report_line(
        5, passed,
        f"mirror symmetry without correlations: max |P_f(q) - P_r(q)| = "
        f"{worst:.2e} over all q and t",
    )


def test_criterion_6_second_law(correlated_run, uncorrelated_run):
    worst = np.inf
    for report in (correlated_run[0], uncorrelated_run):
        for p in report.points:
            worst = min(worst, p.mean_sigma)
            for value in p.functional_means.values():
                worst = min(worst, value)
    passed = worst >= -1e-10
    report_line(
        6, passed,
        f"second law and Jensen chain: smallest functional mean {worst:.3e}",
    )


def test_criterion_7_oracle_equivalence():
    rng = np.random.default_rng(424242)
    params = preset("correlated")
    coupling = build_exchange(params.j_coupling)
    grid = TimeGrid.uniform().times
    times = rng.choice(grid[1:], size=5, replace=False)
    worst = 0.0
    from heatft.dynamics import evolve
    from heatft.states import correlated_initial_state

    rho0 = correlated_initial_state(params)
    for t in times:
        u = propagator_at(coupling, float(t))
        rho_t = evolve(rho0, u)
        ba = assign_bases(
            rho0, rho_t, u, params.hamiltonian("A"), params.hamiltonian("B")
        )
        records = enumerate_paths(ba, u)
        oracle = oracles.brute_force_tables(
            params.beta_a, params.beta_b, params.alpha, params.j_coupling, float(t)
        )
        for rec in records:
            pf, pr = oracle["table"][rec.labels]
            worst = max(worst, abs(rec.p_forward - pf), abs(rec.p_reverse - pr))
    passed = worst <= 1e-10
    report_line(
        7, passed,
        f"path tables match the brute-force oracle at 5 random grid points "
        f"(worst entry gap {worst:.2e})",
    )


def test_criterion_8_structural_checks(correlated_run, uncorrelated_run):
    params = preset("correlated")
    coupling = build_exchange(params.j_coupling)
    h_total = total_hamiltonian(params.hamiltonian("A"), params.hamiltonian("B"))
    worst_comm = 0.0
    worst_unitarity = 0.0
    for t in TimeGrid.uniform().times:
        u = propagator_at(coupling, t)
        worst_comm = max(worst_comm, commutator_norm(u, h_total))
        worst_unitarity = max(worst_unitarity, unitarity_defect(u))
    states_valid = True
    for config_name in ("correlated", "uncorrelated"):
        for snap in simulate_states(RunConfig.from_preset(config_name)):
            if not validate_density_matrix(snap.rho).valid:
                states_valid = False
    support_ok = all(
        p.heat_support == (-HNU0, 0.0, HNU0)
        for report in (correlated_run[0], uncorrelated_run)
        for p in report.points
    )
    passed = (
        worst_comm < 1e-10 and worst_unitarity < 1e-10 and states_valid
        and support_ok
    )
    report_line(
        8, passed,
        f"structure: commutator {worst_comm:.2e}, unitarity "
        f"{worst_unitarity:.2e}, states valid {states_valid}, heat support "
        f"from h = {PLANCK_H_PEV_S} peV s",
    )


def test_criterion_9_ingest_round_trip(tmp_path):
    from heatft.ingest import load_snapshots
    from heatft.report import export_snapshots

    config = RunConfig.from_preset("correlated")
    sim_report = evaluate_run(config)
    path = tmp_path / "snapshots.json"
    export_snapshots(config, path)
    snapshots = load_snapshots(path)
    analyze_config = RunConfig(
        thermal=config.thermal, grid=config.grid, mode="analyze",
        preset_name=config.preset_name,
    )
    ana_report = evaluate_run(analyze_config, snapshots=snapshots)
    diff = compare_runs(sim_report, ana_report)
    passed = diff["max_abs_difference"] <= 1e-12
    report_line(
        9, passed,
        f"analyze(export(simulate)) reproduces the report "
        f"(max difference {diff['max_abs_difference']:.2e})",
    )
