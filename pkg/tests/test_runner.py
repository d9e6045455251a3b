"""Config parsing, blow-up constants, verdict logic, and the full pipeline."""

import copy
import json
import math
import os

import numpy as np
import pytest

from grushinlab import (ConfigError, Expression, Power,
                        compute_blowup_constants, decide_verdict,
                        parse_config, parse_config_dict, run_experiment,
                        run_sweep)

from oracles import blowup_constants_reference


def minimal_dict(**extra):
    data = {"space": {"m": 1, "k": 1, "gamma": 0.0},
            "bounds": [[0.0, 1.0], [0.0, 1.0]],
            "cells": [8, 8]}
    data.update(copy.deepcopy(extra))
    return data


def fast_dict(**extra):
    """A config small enough that full runs take well under a second."""
    return minimal_dict(sim={"t_end": 0.01, "dt_init": 1e-3}, **extra)


class TestParseConfig:
    def test_minimal_config_gets_defaults(self):
        cfg = parse_config_dict(minimal_dict())
        assert cfg.space.gamma == 0.0
        assert cfg.cells == (8, 8)
        assert isinstance(cfg.nonlinearity, Power)
        assert (cfg.nonlinearity.p, cfg.nonlinearity.c) == (3.0, 1.0)
        assert (cfg.alpha, cfg.beta, cfg.theta) == (4.0, 0.1, 0.01)
        assert cfg.initial.kind == "product_sine"
        assert cfg.initial.amplitude == 1.0
        assert cfg.mode == "free"
        assert cfg.sim.t_end == 1.0
        assert cfg.output.csv == "records.csv"
        assert cfg.output.svg_fields == ("calE", "supnorm")
        assert cfg.umax_factor == 10.0
        assert cfg.notes is None

    def test_negative_gamma_names_its_pointer(self):
        data = minimal_dict()
        data["space"]["gamma"] = -1.0
        with pytest.raises(ConfigError) as exc:
            parse_config_dict(data)
        assert any("/space/gamma" in p for p in exc.value.problems)

    def test_unknown_key_is_named(self):
        with pytest.raises(ConfigError, match="gama"):
            parse_config_dict(minimal_dict(gama=1.0))

    def test_bounds_count_must_match_space(self):
        data = minimal_dict()
        data["bounds"] = [[0.0, 1.0], [0.0, 1.0], [0.0, 1.0]]
        with pytest.raises(ConfigError, match="/bounds"):
            parse_config_dict(data)

    def test_cells_count_must_match_space(self):
        data = minimal_dict()
        data["cells"] = [8, 8, 8]
        with pytest.raises(ConfigError, match="/cells"):
            parse_config_dict(data)

    def test_nonlinearity_wants_exactly_one_variant(self):
        both = minimal_dict(nonlinearity={"power": {"p": 3, "c": 1},
                                          "expr": "u^3"})
        with pytest.raises(ConfigError, match="/nonlinearity"):
            parse_config_dict(both)
        with pytest.raises(ConfigError, match="/nonlinearity"):
            parse_config_dict(minimal_dict(nonlinearity={}))

    def test_expression_nonlinearity_parses(self):
        cfg = parse_config_dict(minimal_dict(nonlinearity={"expr": "u^3"}))
        assert isinstance(cfg.nonlinearity, Expression)
        assert cfg.nonlinearity.text == "u^3"

    def test_unknown_svg_field_rejected(self):
        data = minimal_dict(output={"svg_fields": ["calE", "bogus"]})
        with pytest.raises(ConfigError, match="/output/svg_fields"):
            parse_config_dict(data)

    def test_bad_mode_rejected(self):
        with pytest.raises(ConfigError, match="/mode"):
            parse_config_dict(minimal_dict(mode="explode"))
        for mode in ("free", "blowup", "global"):
            assert parse_config_dict(minimal_dict(mode=mode)).mode == mode

    def test_inconsistent_sim_block_rejected(self):
        data = minimal_dict(sim={"dt_init": 1e-3, "dt_min": 1e-2})
        with pytest.raises(ConfigError, match="dt_min"):
            parse_config_dict(data)

    def test_relative_initial_path_resolves_against_base_dir(self):
        data = minimal_dict(initial={"kind": "file", "path": "u0.txt"})
        cfg = parse_config_dict(data, base_dir="/some/where")
        assert cfg.initial.path == os.path.join("/some/where", "u0.txt")

    def test_missing_file_and_bad_json(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            parse_config(str(tmp_path / "nope.json"))
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ConfigError, match="not valid JSON"):
            parse_config(str(bad))
        arr = tmp_path / "arr.json"
        arr.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="object"):
            parse_config(str(arr))

    def test_shipped_configs_parse(self):
        from conftest import config_path
        for name in ("blowup_cubic.json", "global_decay.json",
                     "free_sine.json"):
            cfg = parse_config(config_path(name))
            assert cfg.space.n == 2


class TestBlowupConstants:
    def test_reference_point_exact(self):
        assert compute_blowup_constants(8.0, 1.0, 2.0) == (1.0, 1.0, 0.5)

    def test_documented_example(self):
        sigma, M, tstar = compute_blowup_constants(4.0, 0.5, 1.0)
        assert sigma == pytest.approx(math.sqrt(2.0) - 1.0, rel=1e-12)
        assert M == pytest.approx(1.20711, rel=1e-5)
        assert tstar == pytest.approx(2.91421, rel=1e-5)

    def test_each_precondition_fails_individually(self):
        with pytest.raises(ValueError, match="alpha"):
            compute_blowup_constants(2.0, 1.0, 1.0)
        with pytest.raises(ValueError, match="F0"):
            compute_blowup_constants(4.0, 0.0, 1.0)
        with pytest.raises(ValueError, match="I0"):
            compute_blowup_constants(4.0, 1.0, 0.0)

    def test_scaling_in_F0_and_I0(self):
        _, M, tstar = compute_blowup_constants(4.0, 1.0, 1.0)
        _, M_f, _ = compute_blowup_constants(4.0, 2.0, 1.0)
        _, M_i, tstar_i = compute_blowup_constants(4.0, 1.0, 2.0)
        assert M_f == pytest.approx(M / 2.0, rel=1e-14)
        assert M_i == pytest.approx(4.0 * M, rel=1e-14)
        assert tstar_i == pytest.approx(2.0 * tstar, rel=1e-14)

    def test_against_independent_arrangement(self):
        rng = np.random.default_rng(20260814)
        for _ in range(1000):
            alpha = 2.0 + 10.0 ** rng.uniform(-3, 2)
            F0 = 10.0 ** rng.uniform(-6, 6)
            I0 = 10.0 ** rng.uniform(-6, 6)
            got = compute_blowup_constants(alpha, F0, I0)
            want = blowup_constants_reference(alpha, F0, I0)
            for g, w in zip(got, want):
                assert g == pytest.approx(w, rel=1e-14)


class TestDecideVerdict:
    def test_free_mode_has_no_verdict(self):
        assert decide_verdict("free", True, "blowup", 0.1, 0.1, 1.0, None) is None
        assert decide_verdict("free", False, "completed", None, 1.0, None,
                              2.0) is None

    def test_unmet_hypotheses_dominate(self):
        for mode in ("blowup", "global"):
            got = decide_verdict(mode, False, "blowup", 0.1, 0.1, 1.0, 0.5)
            assert got == "HypothesesNotMet"

    def test_failed_simulation_is_inconclusive(self):
        assert decide_verdict("blowup", True, "failed", None, 0.3, 1.0,
                              None) == "Inconclusive"
        assert decide_verdict("global", True, "failed", None, 0.3, None,
                              None) == "Inconclusive"

    def test_blowup_within_bound_is_consistent(self):
        assert decide_verdict("blowup", True, "blowup", 1.0, 1.0, 1.0,
                              None) == "ConsistentWithTheorem"
        # Equality with the slacked horizon still counts.
        assert decide_verdict("blowup", True, "blowup", 1.1, 1.1, 1.0,
                              None) == "ConsistentWithTheorem"

    def test_late_blowup_contradicts(self):
        assert decide_verdict("blowup", True, "blowup", 1.2, 1.2, 1.0,
                              None) == "InconsistencyFlag"

    def test_completed_past_horizon_contradicts(self):
        assert decide_verdict("blowup", True, "completed", None, 2.0, 1.0,
                              None) == "InconsistencyFlag"

    def test_completed_short_of_horizon_is_inconclusive(self):
        assert decide_verdict("blowup", True, "completed", None, 0.5, 1.0,
                              None) == "Inconclusive"

    def test_blowup_without_constants_is_inconclusive(self):
        assert decide_verdict("blowup", True, "blowup", 0.1, 0.1, None,
                              None) == "Inconclusive"

    def test_global_blowup_contradicts(self):
        assert decide_verdict("global", True, "blowup", 0.1, 0.1, None,
                              0.9) == "InconsistencyFlag"

    def test_global_decay_margin_thresholds(self):
        assert decide_verdict("global", True, "completed", None, 1.0, None,
                              1.0005) == "ConsistentWithTheorem"
        assert decide_verdict("global", True, "completed", None, 1.0, None,
                              1.001) == "ConsistentWithTheorem"
        assert decide_verdict("global", True, "completed", None, 1.0, None,
                              1.01) == "InconsistencyFlag"
        assert decide_verdict("global", True, "completed", None, 1.0, None,
                              None) == "Inconclusive"


class TestRunExperiment:
    def test_free_mode_pipeline(self):
        rpt = run_experiment(parse_config_dict(fast_dict()))
        assert rpt.failure is None
        assert rpt.verdict is None
        assert rpt.hypotheses_met is None
        assert rpt.hypothesis_initial is None
        assert rpt.lambda1 > 0.0
        assert rpt.sim["status"] == "completed"
        assert rpt.margins["certified_count"] >= 2
        assert rpt.decay_rate == 2.0 - 4.0

    def test_f_positivity_warning_carried_not_fatal(self):
        cfg = parse_config_dict(fast_dict(nonlinearity={"expr": "0*u"}))
        rpt = run_experiment(cfg)
        assert rpt.failure is None
        assert rpt.f_positive["ok"] is False
        assert any("positiv" in w for w in rpt.warnings)
        assert rpt.sim["status"] == "completed"

    def test_global_alpha_zero_reports_hypotheses_not_met(self):
        cfg = parse_config_dict(fast_dict(mode="global", alpha=0.0, beta=1.0,
                                          theta=0.0))
        rpt = run_experiment(cfg)
        assert rpt.failure is None
        assert rpt.hypotheses_met is False
        assert rpt.verdict == "HypothesesNotMet"
        assert rpt.joint_satisfiable is False

    def test_failure_is_localized_to_its_stage(self):
        cfg = parse_config_dict(fast_dict(
            initial={"kind": "file", "path": "no/such/file.txt"}))
        rpt = run_experiment(cfg)
        assert rpt.failure is not None
        assert rpt.failure["stage"] == "initial-condition"
        assert rpt.verdict is None
        assert rpt.lambda1 is not None  # earlier stages already landed

    def test_eigensolver_failure_reports_stage(self):
        cfg = parse_config_dict(fast_dict(eigen={"tol": 1e-14, "max_iter": 1}))
        rpt = run_experiment(cfg)
        assert rpt.failure is not None
        assert rpt.failure["stage"] == "eigenvalue"
        assert "NonConvergence" in rpt.failure["error"]

    def test_report_serializes_without_nan(self):
        rpt = run_experiment(parse_config_dict(fast_dict()))
        payload = json.loads(rpt.to_json())
        assert payload["mode"] == "free"
        assert payload["parameters"]["cells"] == [8, 8]
        assert payload["sim"]["status"] == "completed"

    def test_artifacts_written(self, tmp_path):
        cfg = parse_config_dict(fast_dict())
        out = str(tmp_path / "art")
        rpt = run_experiment(cfg, out_dir=out, dump_matrix=True)
        assert rpt.failure is None
        for name in ("records.csv", "plot.svg", "report.json", "matrix.txt"):
            assert os.path.exists(os.path.join(out, name))
        first = open(os.path.join(out, "matrix.txt")).readline().split()
        assert first[0] == "0"
        saved = json.load(open(os.path.join(out, "report.json")))
        assert saved["verdict"] == rpt.verdict

    def test_reruns_are_byte_identical(self, tmp_path):
        cfg = parse_config_dict(fast_dict())
        blobs = []
        for tag in ("a", "b"):
            out = tmp_path / tag
            run_experiment(cfg, out_dir=str(out))
            blobs.append(((out / "records.csv").read_bytes(),
                          (out / "report.json").read_bytes()))
        assert blobs[0] == blobs[1]

    def test_custom_output_names(self, tmp_path):
        cfg = parse_config_dict(fast_dict(
            output={"csv": "r.csv", "report": "rep.json", "svg": "p.svg",
                    "svg_fields": ["l2"]}))
        out = str(tmp_path / "named")
        run_experiment(cfg, out_dir=out)
        for name in ("r.csv", "rep.json", "p.svg"):
            assert os.path.exists(os.path.join(out, name))
        assert open(os.path.join(out, "p.svg")).read().count("<polyline") == 1


class TestRunSweep:
    def test_amplitude_sweep_f0_sign_is_monotone(self):
        cfg = parse_config_dict(fast_dict(mode="blowup"))
        rows = run_sweep(cfg, "amplitude", [0.1, 1.0, 10.0])
        assert [r["value"] for r in rows] == [0.1, 1.0, 10.0]
        signs = [r["F0"] > 0.0 for r in rows]
        for earlier, later in zip(signs, signs[1:]):
            assert later >= earlier
        assert not signs[0]
        assert signs[-1]

    def test_gamma_sweep_has_positive_lambda1(self):
        cfg = parse_config_dict(fast_dict())
        rows = run_sweep(cfg, "gamma", [0.0, 0.5, 1.0])
        assert all(r["lambda1"] > 0.0 for r in rows)

    def test_empty_values_write_header_only(self, tmp_path):
        cfg = parse_config_dict(fast_dict())
        out = str(tmp_path / "sweep")
        rows = run_sweep(cfg, "gamma", [], out_dir=out)
        assert rows == []
        content = open(os.path.join(out, "sweep.csv")).read()
        assert content == "value,lambda1,F0,verdict,outcome\n"

    def test_failing_value_keeps_its_row(self, tmp_path):
        cfg = parse_config_dict(fast_dict(
            initial={"kind": "file", "path": "no/such/file.txt"}))
        out = str(tmp_path / "sweepfail")
        rows = run_sweep(cfg, "gamma", [0.0, 1.0], out_dir=out)
        assert len(rows) == 2
        for row in rows:
            assert row["verdict"] == "Failed[initial-condition]"
            assert row["outcome"] is None
        lines = open(os.path.join(out, "sweep.csv")).read().splitlines()
        assert lines[0] == "value,lambda1,F0,verdict,outcome"
        assert len(lines) == 3
        assert lines[1].endswith(",")  # empty outcome cell

    def test_unknown_axis_rejected(self):
        cfg = parse_config_dict(fast_dict())
        with pytest.raises(ValueError, match="axis"):
            run_sweep(cfg, "cells", [8, 16])
