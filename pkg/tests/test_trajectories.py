"""Path enumeration: probabilities, pairings, gamma, oracle equivalence."""

import numpy as np
import pytest

from heatft.dynamics import TimeGrid, build_exchange, evolve, propagator_at
from heatft.states import ThermalParameters, correlated_initial_state, preset
from heatft.trajectories import (
    assign_bases,
    enumerate_paths,
    forward_path_probabilities,
    gamma_of_path,
    reverse_path_probabilities,
)

from . import oracles


def build_point(params: ThermalParameters, t: float, mode: str = "simulate"):
    coupling = build_exchange(params.j_coupling)
    u = propagator_at(coupling, t)
    rho0 = correlated_initial_state(params)
    rho_t = evolve(rho0, u)
    ba = assign_bases(
        rho0, rho_t, u, params.hamiltonian("A"), params.hamiltonian("B"), mode=mode
    )
    return ba, u, rho0, rho_t


class TestAssignBases:
    def test_t0_product_state_pairing_is_identity(self, uncorrelated_params):
        ba, u, _, _ = build_point(uncorrelated_params, 0.0)
        assert np.min(ba.sstar_overlap) > 1.0 - 1e-10
        assert np.max(np.abs(ba.p_sstar - ba.p_s)) < 1e-12

    def test_correlated_eigenvectors_are_not_products(self, correlated_params):
        ba, _, _, _ = build_point(correlated_params, 0.0)
        overlaps = np.abs(ba.prod0.conj().T @ ba.global_initial.eigenvectors) ** 2
        # at least one global eigenvector overlaps no product vector fully
        assert np.min(np.max(overlaps, axis=0)) < 1.0 - 1e-6

    def test_matched_overlap_near_one(self, correlated_params):
        for t in (0.5e-3, 1.5e-3, 2.32e-3):
            ba, _, _, _ = build_point(correlated_params, t)
            assert np.min(ba.sstar_overlap) > 1.0 - 1e-8

    def test_spectra_match_as_multisets(self, correlated_params):
        ba, _, _, _ = build_point(correlated_params, 1.88e-3)
        assert np.max(
            np.abs(np.sort(ba.p_s) - np.sort(ba.p_sstar))
        ) < 1e-10

    def test_equal_temperature_degenerate_deterministic(self):
        params = ThermalParameters(
            beta_a=1.0 / 4.0, beta_b=1.0 / 4.0, nu0=1000.0, j_coupling=215.1, alpha=0.0
        )
        reference = None
        for _ in range(100):
            ba, u, _, _ = build_point(params, 1.3e-3)
            table = [(r.p_forward, r.p_reverse) for r in enumerate_paths(ba, u)]
            if reference is None:
                reference = table
                assert any("DegeneracyAmbiguity" in w for w in ba.warnings)
            else:
                assert table == reference

    def test_simulate_mode_rejects_inconsistent_rho_t(self, correlated_params):
        coupling = build_exchange(correlated_params.j_coupling)
        u = propagator_at(coupling, 1e-3)
        rho0 = correlated_initial_state(correlated_params)
        wrong = evolve(rho0, propagator_at(coupling, 2e-3))
        with pytest.raises(ValueError):
            assign_bases(
                rho0,
                wrong,
                u,
                correlated_params.hamiltonian("A"),
                correlated_params.hamiltonian("B"),
                mode="simulate",
            )


class TestForwardProbabilities:
    def test_t0_identity_propagator_structure(self, uncorrelated_params):
        ba, u, _, _ = build_point(uncorrelated_params, 0.0)
        records = forward_path_probabilities(ba, u)
        assert len(records) == 64
        for rec in records:
            if rec.p_forward > 1e-14:
                assert (rec.a1, rec.b1) == (rec.a0, rec.b0)

    def test_alpha_zero_reduces_to_two_measurement_joint(self, uncorrelated_params):
        t = 1.7e-3
        ba, u, _, _ = build_point(uncorrelated_params, t)
        records = forward_path_probabilities(ba, u)
        # o1 is 0/1: s enumerates the product eigenbasis
        for rec in records:
            o1 = rec.overlaps[0]
            assert min(abs(o1), abs(o1 - 1.0)) < 1e-12
        # joint of (a0 b0) -> (a1 b1) equals p(a0)p(b0)|<a1 b1|U|a0 b0>|^2
        pa = ba.local_a_initial.eigenvalues
        pb = ba.local_b_initial.eigenvalues
        for a0 in range(2):
            for b0 in range(2):
                for a1 in range(2):
                    for b1 in range(2):
                        total = sum(
                            r.p_forward
                            for r in records
                            if (r.a0, r.b0, r.a1, r.b1) == (a0, b0, a1, b1)
                        )
                        k0 = 2 * a0 + b0
                        k1 = 2 * a1 + b1
                        amp = abs(
                            np.vdot(ba.prod1[:, k1], u @ ba.prod0[:, k0])
                        ) ** 2
                        assert total == pytest.approx(
                            float(pa[a0] * pb[b0]) * amp, abs=1e-12
                        )

    def test_normalization_both_presets_all_times(self):
        for name in ("correlated", "uncorrelated"):
            params = preset(name)
            for t in TimeGrid.uniform().times:
                ba, u, _, _ = build_point(params, t)
                records = enumerate_paths(ba, u)
                assert sum(r.p_forward for r in records) == pytest.approx(1.0, abs=1e-10)
                assert sum(r.p_reverse for r in records) == pytest.approx(1.0, abs=1e-10)

    def test_marginalization_consistency(self, correlated_params):
        ba, u, rho0, _ = build_point(correlated_params, 1.3e-3)
        records = forward_path_probabilities(ba, u)
        for a0 in range(2):
            total = sum(r.p_forward for r in records if r.a0 == a0)
            expected = sum(
                float(ba.p_s[s])
                * float(np.abs(np.vdot(ba.prod0[:, 2 * a0 + b0],
                                       ba.global_initial.eigenvectors[:, s])) ** 2)
                for s in range(4)
                for b0 in range(2)
            )
            assert total == pytest.approx(expected, abs=1e-10)

    def test_alpha_zero_marginal_equals_population(self, uncorrelated_params):
        ba, u, _, _ = build_point(uncorrelated_params, 1.3e-3)
        records = forward_path_probabilities(ba, u)
        for a0 in range(2):
            total = sum(r.p_forward for r in records if r.a0 == a0)
            assert total == pytest.approx(
                float(ba.local_a_initial.eigenvalues[a0]), abs=1e-10
            )

    def test_determinism_bit_for_bit(self, correlated_params):
        ba1, u1, _, _ = build_point(correlated_params, 2.0e-3)
        ba2, u2, _, _ = build_point(correlated_params, 2.0e-3)
        t1 = [(r.labels, r.p_forward, r.p_reverse, r.overlaps) for r in enumerate_paths(ba1, u1)]
        t2 = [(r.labels, r.p_forward, r.p_reverse, r.overlaps) for r in enumerate_paths(ba2, u2)]
        assert t1 == t2


class TestReverseProbabilities:
    def test_t0_reverse_is_forward(self, uncorrelated_params):
        ba, u, _, _ = build_point(uncorrelated_params, 0.0)
        for rec in reverse_path_probabilities(ba, u):
            assert rec.p_reverse == pytest.approx(rec.p_forward, abs=1e-14)

    def test_correlated_reverse_differs_from_forward(self, correlated_params):
        from heatft.functionals import assemble_heat_histogram

        ba, u, _, _ = build_point(correlated_params, 2.32e-3)
        records = reverse_path_probabilities(ba, u)
        hf = assemble_heat_histogram(records, ba, "forward")
        hr = assemble_heat_histogram(records, ba, "reverse")
        level = ba.level_splitting
        for q in (level, -level):
            assert abs(hf.mass_at(q) - hr.mass_at(-q)) > 1e-3

    def test_reverse_run_oracle(self, correlated_params):
        """p_reverse equals an explicit re-run with U^dag, relabeled."""
        t = 1.3e-3
        ba, u, rho0, _ = build_point(correlated_params, t)
        records = enumerate_paths(ba, u)
        vs = ba.global_initial.eigenvectors
        for rec in records:
            k0 = 2 * rec.a0 + rec.b0
            k1 = 2 * rec.a1 + rec.b1
            expected = (
                float(ba.p_s[rec.s])
                * abs(np.vdot(ba.prod1[:, k1], vs[:, rec.s])) ** 2
                * abs(np.vdot(ba.prod0[:, k0], u.conj().T @ vs[:, rec.s])) ** 2
            )
            assert rec.p_reverse == pytest.approx(expected, abs=1e-14)


class TestGamma:
    def test_gamma_zero_on_every_path_in_simulation(self, correlated_params):
        for t in (0.0, 0.9e-3, 1.88e-3, 2.32e-3):
            ba, u, _, _ = build_point(correlated_params, t)
            for rec in enumerate_paths(ba, u):
                if rec.p_forward > 1e-14:
                    assert abs(gamma_of_path(rec)) < 1e-8

    def test_gamma_average_vanishes(self, correlated_params):
        ba, u, _, _ = build_point(correlated_params, 1.77e-3)
        records = enumerate_paths(ba, u)
        avg = sum(
            r.p_forward * gamma_of_path(r) for r in records if r.p_forward > 1e-14
        )
        assert abs(avg) < 1e-8

    def test_noisy_final_state_gamma_nonzero_but_ft_holds(self, correlated_params, rng):
        coupling = build_exchange(correlated_params.j_coupling)
        t = 1.5e-3
        u = propagator_at(coupling, t)
        rho0 = correlated_initial_state(correlated_params)
        rho_t = evolve(rho0, u)
        noise = rng.normal(0.0, 1e-3, size=(4, 4)) + 1j * rng.normal(0.0, 1e-3, size=(4, 4))
        noisy = rho_t + (noise + noise.conj().T) / 2.0
        noisy = noisy / np.trace(noisy).real
        from heatft.ingest import psd_project

        noisy, _ = psd_project(noisy)
        ba = assign_bases(
            rho0,
            noisy,
            u,
            correlated_params.hamiltonian("A"),
            correlated_params.hamiltonian("B"),
            mode="measured",
            psd_tol=1e-3,
        )
        records = enumerate_paths(ba, u)
        gammas = [
            gamma_of_path(r) for r in records if r.p_forward > 1e-14
        ]
        assert max(abs(g) for g in gammas) > 1e-6  # noise breaks exactness
        avg = sum(
            r.p_forward * np.exp(-gamma_of_path(r))
            for r in records
            if r.p_forward > 1e-14
        )
        assert avg == pytest.approx(1.0, abs=5e-2)


class TestOracleEquivalence:
    @pytest.mark.parametrize("preset_name", ["correlated", "uncorrelated"])
    def test_full_table_against_brute_force(self, preset_name, rng):
        params = preset(preset_name)
        grid = TimeGrid.uniform().times
        for t in rng.choice(grid[1:], size=3, replace=False):
            ba, u, _, _ = build_point(params, float(t))
            records = enumerate_paths(ba, u)
            oracle = oracles.brute_force_tables(
                params.beta_a, params.beta_b, params.alpha, params.j_coupling, float(t)
            )
            for rec in records:
                pf, pr = oracle["table"][rec.labels]
                assert rec.p_forward == pytest.approx(pf, abs=1e-10)
                assert rec.p_reverse == pytest.approx(pr, abs=1e-10)
