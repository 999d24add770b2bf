import json
import logging

import numpy as np
import pytest

from polyconsensus import pipeline
from polyconsensus.core.errors import AssumptionViolation, ConfigError, IntervalError
from polyconsensus.core.schemas import ModelConfig, TraceMetadata, VerificationReport
from polyconsensus.dynamics import lyapunov_value, oscillator_network, rhs
from polyconsensus.lmi import assemble_theorem1
from polyconsensus.pattern import check_assumption1
from polyconsensus.polybasis import build_slack_basis
from polyconsensus.sdp import SolverOptions


class TestLoadConfig:
    def test_json_syntax_error_has_location(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{\n  "n": 1,\n  "N": 2\n  "pattern": {}\n}\n')
        with pytest.raises(ConfigError) as info:
            pipeline.load_config(path)
        assert "broken.json:4:" in str(info.value)

    def test_schema_error_names_the_field(self):
        bad = {"n": 1, "N": 2, "agent_terms": [{"row": 0, "coeff": 1.0, "powers": [1]}], "pattern": {"cycle": 2}}
        with pytest.raises(ConfigError) as info:
            pipeline.parse_config(bad)
        assert "agent_terms.0.row" in str(info.value)

    def test_powers_length_checked(self):
        bad = {"n": 2, "N": 3, "agent_terms": [{"row": 1, "coeff": 1.0, "powers": [1]}], "pattern": {"cycle": 3}}
        with pytest.raises(ConfigError):
            pipeline.parse_config(bad)

    def test_pattern_needs_one_source(self):
        bad = {"n": 1, "N": 3, "pattern": {"cycle": 3, "edges": [[1, 2, 1.0]]}}
        with pytest.raises(ConfigError):
            pipeline.parse_config(bad)

    def test_single_agent_rejected(self):
        with pytest.raises(ConfigError) as info:
            pipeline.parse_config({"n": 1, "N": 1, "pattern": {"matrix": [[0.0]]}})
        assert "N" in str(info.value)

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError):
            pipeline.parse_config({"n": 1, "N": 3, "pattern": {"cycle": 3}, "gain": 2.0})

    def test_round_trip_through_file(self, tmp_path, single_integrator_config):
        path = tmp_path / "si.json"
        path.write_text(single_integrator_config.model_dump_json())
        loaded = pipeline.load_config(path)
        assert loaded.content_hash() == single_integrator_config.content_hash()


class TestBuildModel:
    def test_gain_scales_coupling(self):
        config = pipeline.example_config("vdp")
        model = pipeline.build_model(config)
        np.testing.assert_array_equal(model.A_b, [[0, 0, 0, 0, 0, 0], [0, -15, -15, 0, 0, 0]])

    def test_disconnected_pattern(self, disconnected_config):
        with pytest.raises(AssumptionViolation) as info:
            pipeline.build_model(disconnected_config)
        assert "zero-multiplicity" in info.value.message

    def test_explicit_matrix_pattern(self):
        config = ModelConfig.model_validate({
            "n": 1, "N": 3,
            "coupling_terms": [{"row": 1, "coeff": -1.0, "powers": [1]}],
            "pattern": {"matrix": [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]},
        })
        model = pipeline.build_model(config)
        assert model.spectral.distinct_nonzero() == pytest.approx([3.0])


    def test_zero_tolerance_falls_back_to_settings(self, monkeypatch):
        config = ModelConfig.model_validate({
            "n": 1, "N": 3,
            "coupling_terms": [{"row": 1, "coeff": -1.0, "powers": [1]}],
            "pattern": {"edges": [[1, 2, 1.0], [2, 3, 1e-6]]},
        })
        assert config.method.zero_tol is None
        assert pipeline.build_model(config).spectral.lambda_min > 0
        # the weak edge gives an eigenvalue near 1.5e-6
        monkeypatch.setattr(pipeline.settings, "zero_tol", 1e-3)
        with pytest.raises(AssumptionViolation):
            pipeline.build_model(config)
        assert pipeline.build_model(config, zero_tol=1e-8).N == 3

    @pytest.mark.parametrize("name", ["vdp", "lorenz"])
    def test_config_terms_match_closed_form(self, rng, name):
        config = pipeline.example_config(name)
        model = pipeline.build_model(config)
        P = model.pattern.entries
        c, p = config.c, config.parameters
        for _ in range(1000):
            X = rng.uniform(-3.0, 3.0, size=(model.N, model.n))
            if name == "vdp":
                x, y = X.T
                local = np.column_stack([y, p["mu"] * (1 - x) * y - x])
                coupled = np.column_stack([np.zeros(model.N), -c * P @ (x + y)])
            else:
                x, y, z = X.T
                local = np.column_stack([
                    p["sigma"] * (y - x), x * (p["rho"] - z) - y, x * y - p["beta"] * z,
                ])
                coupled = -c * P @ X
            np.testing.assert_allclose(
                rhs(model, X.ravel()), (local + coupled).ravel(), rtol=1e-12, atol=1e-9
            )


class TestExampleConfig:
    def test_vdp_parameters(self):
        config = pipeline.example_config("vdp")
        assert (config.N, config.c, config.parameters["mu"], config.method.l) == (10, 15.0, 0.5, 6)
        assert config.method.method == "theorem2"
        assert check_assumption1(pipeline.build_pattern(config.pattern, config.N)).ok

    def test_lorenz_parameters(self):
        config = pipeline.example_config("lorenz")
        assert (config.N, config.c, config.method.l) == (8, 50.0, 6)
        assert config.parameters == pytest.approx({"sigma": 10.0, "rho": 28.0, "beta": 8.0 / 3.0})
        model = pipeline.build_model(config)
        agent, coupling, _ = oscillator_network("lorenz", 50.0)
        np.testing.assert_allclose(model.A_a, agent.A)
        np.testing.assert_allclose(model.A_b, coupling.A)

    def test_classical_variant(self):
        config = pipeline.example_config("vdp", classical=True)
        assert config.name == "vdp-classical"
        assert pipeline.build_model(config).basis.d == 3

    def test_emitted_json_validates(self):
        for name in ("vdp", "lorenz"):
            text = pipeline.example_config(name).model_dump_json(exclude_none=True)
            assert pipeline.parse_config(text).content_hash() == pipeline.example_config(name).content_hash()


class TestCertify:
    def test_single_integrator(self, solved):
        assert solved.status == "certified"
        assert solved.report.passed
        assert solved.certificate.status == "certified"
        assert solved.certificate.L_matrices()[0][0, 0] > 0
        assert solved.certificate.eigenvalues == pytest.approx([2.0])

    def test_theorem2_single_integrator(self, single_integrator):
        outcome = pipeline.certify(single_integrator, method="theorem2", l=1, epsilon=0.1)
        assert outcome.status == "certified"
        assert outcome.report.passed
        kyp = outcome.certificate.kyp
        assert (kyp.lambda_min, kyp.lambda_max) == pytest.approx((2.0, 2.0))
        assert np.linalg.eigvalsh(np.array(kyp.D1))[0] > 0

    def test_theorem2_refuses_mixed_signs(self):
        config = ModelConfig.model_validate({
            "n": 1, "N": 3,
            "coupling_terms": [{"row": 1, "coeff": -1.0, "powers": [1]}],
            "pattern": {"edges": [[1, 2, 1.0], [2, 3, -1.0]]},
        })
        with pytest.raises(IntervalError):
            pipeline.certify(pipeline.build_model(config), method="theorem2", l=2)

    def test_unverified_result_is_downgraded(self, single_integrator, monkeypatch):
        failing = VerificationReport(
            verdict="fail", tol_verify=1e-7, checks=[], worst_positivity_min=-1.0, worst_dissipation_max=0.0, worst_violation=1.0
        )
        monkeypatch.setattr(pipeline, "verify_certificate", lambda *args, **kwargs: failing)
        outcome = pipeline.certify(
            single_integrator, method="theorem1", l=1, epsilon=0.1, options=SolverOptions(method="builtin")
        )
        assert outcome.result.status == "certified"
        assert outcome.status == "unknown"
        assert outcome.certificate.status == "unknown"

    def test_rejected_cvxpy_answer_is_not_reported_certified(self, single_integrator, monkeypatch):
        failing = VerificationReport(
            verdict="fail", tol_verify=1e-7, checks=[], worst_positivity_min=-1.0, worst_dissipation_max=0.0, worst_violation=1.0
        )
        monkeypatch.setattr(pipeline, "verify_certificate", lambda *args, **kwargs: failing)
        outcome = pipeline.certify(single_integrator, method="theorem1", l=1, epsilon=0.1)
        assert outcome.result.status == "unknown"
        assert "independent verification" in outcome.result.message
        assert outcome.status == "unknown"

    def test_lifted_nonstrict_level_is_not_infeasible(self, single_integrator):
        # L = 2 meets every block once the box is lifted, so the box alone must not yield infeasible
        outcome = pipeline.certify(single_integrator, method="theorem1", l=1, epsilon=0.1, margin_neg=2.0)
        assert not outcome.problem.homogeneous
        assert outcome.status == "unknown"

    def test_interval_certificate_meets_per_eigenvalue_blocks(self, linear_vdp, linear_vdp_certified):
        outcome = linear_vdp_certified
        assert outcome.status == "certified"
        report, _ = pipeline.verify(linear_vdp, outcome.certificate)
        assert report.passed
        assert len(report.checks) == 2 * (linear_vdp.N - 1)

        slack = build_slack_basis(linear_vdp.basis)
        layout, blocks = assemble_theorem1(
            linear_vdp.basis, slack, linear_vdp.A_a, linear_vdp.A_b, linear_vdp.spectral, 1, 1.0
        )
        y = layout.pack({"L1": outcome.certificate.L_matrices()[0], "tau": outcome.certificate.tau_vector()})
        for block in blocks:
            extreme = np.linalg.eigvalsh(block.sign * block.value(y))[0]
            if block.strict:
                assert extreme > 0
            else:
                assert extreme >= -1e-7

    def test_warns_when_l_exceeds_N(self, single_integrator, caplog):
        with caplog.at_level(logging.WARNING, logger="polyconsensus"):
            outcome = pipeline.certify(single_integrator, method="theorem1", l=3, epsilon=0.1)
        assert "exceeds N=2" in caplog.text
        assert outcome.status == "certified"

    def test_model_hash_recorded(self, single_integrator_config):
        model = pipeline.build_model(single_integrator_config)
        outcome = pipeline.certify(
            model, method="theorem1", l=1, epsilon=0.1, model_hash=single_integrator_config.content_hash()
        )
        assert outcome.certificate.model_hash == single_integrator_config.content_hash()
        report, mismatch = pipeline.verify(model, outcome.certificate, model_hash=single_integrator_config.content_hash())
        assert report.passed and not mismatch


class TestVerify:
    def test_hash_mismatch_is_flagged_but_checked(self, solved, single_integrator, caplog):
        certificate = solved.certificate.model_copy(update={"model_hash": "a" * 64})
        with caplog.at_level(logging.WARNING, logger="polyconsensus"):
            report, mismatch = pipeline.verify(single_integrator, certificate, model_hash="b" * 64)
        assert mismatch
        assert report.passed
        assert "issued for model" in caplog.text


class TestSimulate:
    def test_trace_files(self, solved, single_integrator, tmp_path):
        trace, metadata = pipeline.simulate(single_integrator, solved.certificate, dt=1e-2, t_final=2.0, seed=3)
        csv_path, meta_path = pipeline.write_trace(trace, metadata, tmp_path / "trace.csv")
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "t,x_1_1,x_2_1,V,disagreement"
        assert len(lines) == trace.times.size + 1
        meta = TraceMetadata.model_validate(json.loads(meta_path.read_text()))
        assert meta.seed == 3
        assert meta.certificate_hash == solved.certificate.content_hash()
        assert meta.witness_fraction == pytest.approx(1.0)
        assert meta.final_disagreement < meta.initial_disagreement

    def test_deterministic(self, single_integrator, tmp_path):
        first = pipeline.simulate(single_integrator, None, dt=1e-2, t_final=0.5, seed=11)[0]
        second = pipeline.simulate(single_integrator, None, dt=1e-2, t_final=0.5, seed=11)[0]
        np.testing.assert_array_equal(first.states, second.states)
        assert first.V is None

    def test_certificate_hash_ignores_iterations(self, solved):
        changed = solved.certificate.model_copy(update={"iterations": 12345})
        assert changed.content_hash() == solved.certificate.content_hash()

    def test_v_positive_off_consensus(self, rng, linear_vdp, linear_vdp_certified):
        certificate = linear_vdp_certified.certificate
        for _ in range(200):
            X = rng.normal(size=(linear_vdp.N, linear_vdp.n))
            X -= X.mean(axis=0)
            assert lyapunov_value(certificate, linear_vdp.pattern, X.ravel()) > 0
        consensus = np.tile(rng.normal(size=linear_vdp.n), linear_vdp.N)
        assert lyapunov_value(certificate, linear_vdp.pattern, consensus) == pytest.approx(0.0, abs=1e-9)

    def test_v_decreases_along_trajectory(self, linear_vdp, linear_vdp_certified):
        trace, metadata = pipeline.simulate(
            linear_vdp, linear_vdp_certified.certificate, dt=1e-3, t_final=1.0, seed=8
        )
        assert not trace.diverged
        assert np.all(np.diff(trace.V) < 0)
        assert metadata.v_ratio < 1.0
        assert metadata.witness_fraction >= 0.99
