"""Snapshot I/O, repair, and Monte-Carlo uncertainty propagation."""

import json

import numpy as np
import pytest

from heatft.errors import InvalidSnapshot, MonteCarloFailure, ParseError
from heatft.ingest import (
    UncertaintyConfig,
    load_snapshots,
    monte_carlo_uncertainty,
    pairs_to_matrix,
    psd_project,
    save_snapshots,
    snapshots_from_payload,
    snapshots_to_payload,
)
from heatft.dynamics import TimeGrid
from heatft.report import RunConfig, simulate_states


@pytest.fixture
def simulated():
    grid = TimeGrid.explicit([0.0, 1.16e-3, 2.32e-3])
    return simulate_states(RunConfig.from_preset("correlated", grid=grid))


class TestLoadSave:
    def test_round_trip_bit_identical(self, simulated, tmp_path):
        path = tmp_path / "snaps.json"
        save_snapshots(simulated, path)
        loaded = load_snapshots(path)
        assert len(loaded) == len(simulated)
        for a, b in zip(simulated, loaded):
            assert a.time == b.time
            assert np.array_equal(a.rho, b.rho)
            assert b.repair_log == ()

    def test_file_roundtrip_twice_is_stable(self, simulated, tmp_path):
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        save_snapshots(simulated, p1)
        save_snapshots(load_snapshots(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_hermiticity_defect_repaired_and_logged(self, simulated, tmp_path):
        payload = snapshots_to_payload(simulated)
        payload["states"][1][0][1][0] += 1e-4  # break Hermiticity
        snaps = snapshots_from_payload(payload)
        assert any("hermitized" in entry for entry in snaps[1].repair_log)
        defect = float(np.max(np.abs(snaps[1].rho - snaps[1].rho.conj().T)))
        assert defect < 1e-15

    def test_negative_eigenvalue_rejected(self, simulated):
        payload = snapshots_to_payload(simulated)
        m = pairs_to_matrix(payload["states"][0])
        m[0, 0] -= 0.05
        m[1, 1] += 0.05
        m[0, 1] = m[1, 0] = 0.3  # push an eigenvalue below -tol
        from heatft.ingest import matrix_to_pairs

        payload["states"][0] = matrix_to_pairs(m)
        with pytest.raises(InvalidSnapshot):
            snapshots_from_payload(payload)

    def test_sorting_by_time(self, simulated):
        payload = snapshots_to_payload(simulated)
        payload["times"] = payload["times"][::-1]
        payload["states"] = payload["states"][::-1]
        snaps = snapshots_from_payload(payload)
        assert [s.time for s in snaps] == sorted(payload["times"])

    def test_schema_violations(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("not json at all {")
        with pytest.raises(ParseError):
            load_snapshots(bad)
        bad.write_text(json.dumps({"times": [0.0], "states": [[[1, 2]]]}))
        with pytest.raises(ParseError):
            load_snapshots(bad)
        bad.write_text(json.dumps({"times": [0.0, 1.0], "states": []}))
        with pytest.raises(ParseError):
            load_snapshots(bad)

    def test_csv_format(self, simulated, tmp_path):
        path = tmp_path / "snaps.csv"
        lines = ["t,row,col,re,im"]
        for snap in simulated:
            for i in range(4):
                for j in range(4):
                    lines.append(
                        f"{float(snap.time)!r},{i},{j},{float(snap.rho[i, j].real)!r},"
                        f"{float(snap.rho[i, j].imag)!r}"
                    )
        path.write_text("\n".join(lines))
        loaded = load_snapshots(path)
        assert len(loaded) == len(simulated)
        for a, b in zip(simulated, loaded):
            assert a.time == b.time
            assert np.array_equal(a.rho, b.rho)


class TestPsdProject:
    def test_valid_state_unchanged(self, simulated):
        rho = simulated[1].rho
        projected, distance = psd_project(rho)
        assert distance == 0.0
        assert projected is rho

    def test_clip_and_renormalize_hand_example(self):
        rho = np.diag([0.6, 0.5, 0.0, -0.1]).astype(complex)
        projected, distance = psd_project(rho)
        expected = np.diag([0.6, 0.5, 0.0, 0.0]) / 1.1
        assert np.max(np.abs(projected - expected)) < 1e-12
        assert distance > 0.0

    def test_pure_state_unchanged(self):
        psi = np.array([1.0, 1.0j, 0.0, 0.0]) / np.sqrt(2.0)
        rho = np.outer(psi, psi.conj())
        projected, distance = psd_project(rho)
        assert distance == 0.0

    def test_idempotent_bit_identical(self, rng):
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = (m + m.conj().T) / 2.0
        rho = rho / np.trace(rho).real
        once, _ = psd_project(rho)
        twice, moved = psd_project(once)
        assert moved == 0.0
        assert np.array_equal(once, twice)


class TestMonteCarlo:
    @staticmethod
    def _pipeline(config):
        def run(snapshots):
            cfg = RunConfig.from_dict(config.to_dict())
            from heatft.report import evaluate_run

            rep = evaluate_run(cfg, snapshots=snapshots)
            return {
                "exp_neg_sigma": rep.points[-1].integral["exp_neg_sigma"],
                "hist_plus": rep.points[-1].hist_forward[2],
            }

        return run

    @staticmethod
    def _setup():
        grid = TimeGrid.explicit([0.0, 1.16e-3, 2.32e-3])
        sim_config = RunConfig.from_preset("correlated", grid=grid)
        snapshots = simulate_states(sim_config)
        analyze_config = RunConfig(
            thermal=sim_config.thermal, grid=grid, mode="analyze"
        )
        return snapshots, analyze_config

    def test_zero_noise_zero_std(self):
        snapshots, config = self._setup()
        result = monte_carlo_uncertainty(
            snapshots,
            UncertaintyConfig(n_resamples=10, noise_sigma=0.0, seed=7),
            self._pipeline(config),
        )
        for stats in result["quantities"].values():
            assert stats["std"] == 0.0

    def test_determinism_and_seed_sensitivity(self):
        snapshots, config = self._setup()
        cfg = UncertaintyConfig(n_resamples=25, noise_sigma=1e-3, seed=11)
        first = monte_carlo_uncertainty(snapshots, cfg, self._pipeline(config))
        second = monte_carlo_uncertainty(snapshots, cfg, self._pipeline(config))
        assert first == second
        other = monte_carlo_uncertainty(
            snapshots,
            UncertaintyConfig(n_resamples=25, noise_sigma=1e-3, seed=12),
            self._pipeline(config),
        )
        assert first != other

    def test_sigma_ft_within_three_std(self):
        snapshots, config = self._setup()
        result = monte_carlo_uncertainty(
            snapshots,
            UncertaintyConfig(n_resamples=300, noise_sigma=1e-3, seed=3),
            self._pipeline(config),
        )
        stats = result["quantities"]["exp_neg_sigma"]
        assert stats["std"] > 0.0
        assert abs(stats["mean"] - 1.0) < 3.0 * stats["std"] + 1e-9

    def test_noise_to_zero_limit(self):
        snapshots, config = self._setup()
        exact = self._pipeline(config)(snapshots)
        result = monte_carlo_uncertainty(
            snapshots,
            UncertaintyConfig(n_resamples=200, noise_sigma=1e-6, seed=5),
            self._pipeline(config),
        )
        for name, stats in result["quantities"].items():
            spread = max(stats["std"], 1e-12)
            assert abs(stats["mean"] - exact[name]) < 5.0 * spread

    def test_failure_fraction_guard(self):
        snapshots, _ = self._setup()

        calls = {"n": 0}

        def flaky(_):
            calls["n"] += 1
            raise RuntimeError("broken pipeline")

        with pytest.raises(MonteCarloFailure):
            monte_carlo_uncertainty(
                snapshots,
                UncertaintyConfig(n_resamples=20, noise_sigma=1e-3, seed=1),
                flaky,
            )
