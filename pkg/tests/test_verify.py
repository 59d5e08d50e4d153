import numpy as np

from modlz.checks import (check_invariant_defect, check_oracle_vs_exact,
                          check_transfer_formula, run_verification)
from modlz.config import build_config, validate_config
from modlz.model import make_params, spin_operators


def _cfg(**overrides):
    cfg = build_config("verify", overrides=overrides)
    validate_config(cfg)
    return cfg


def test_default_verification_passes():
    report = run_verification(_cfg())
    assert report.passed
    assert len(report.results) == 8
    text = report.render_text()
    assert text.count("[pass]") == 8
    assert "all checks passed" in text


def test_verification_at_loose_tolerance_still_passes():
    loose = run_verification(_cfg(tol=1e-4))
    assert loose.passed
    tight = run_verification(_cfg())
    loose_val = {r.name: r.value for r in loose.results}
    tight_val = {r.name: r.value for r in tight.results}
    assert loose_val["oracle_vs_exact"] > tight_val["oracle_vs_exact"]


def test_verification_with_higher_spin_params():
    report = run_verification(_cfg(j=1.5))
    assert report.passed


def test_doctored_modulation_depth_is_caught():
    """A kappa inconsistent with eta and nu must fail the defect check."""
    broken = make_params(1.0, 0.8, 0.5)
    object.__setattr__(broken, "kappa", 0.55)
    ops = spin_operators(0.5)
    result = check_invariant_defect(broken, ops)
    assert not result.passed
    assert result.value > 1e-3
    # the same corruption leaks into the closed-form propagator
    assert not check_oracle_vs_exact(broken, ops, 1e-10).passed


def test_transfer_check_gate_scales_with_tol():
    tight = check_transfer_formula(1e-10)
    loose = check_transfer_formula(1e-5)
    assert tight.passed and loose.passed
    assert tight.gate < loose.gate


def test_report_dict_shape():
    report = run_verification(_cfg())
    payload = report.to_dict()
    assert payload["passed"] is True
    assert {c["name"] for c in payload["checks"]} == {
        "spin_algebra", "invariant_defect", "invariant_spectrum",
        "geometric_connection", "oracle_vs_exact", "transfer_formula",
        "transition_stochasticity", "isotropic_decay"}
    for c in payload["checks"]:
        assert c["value"] <= c["gate"]
        assert isinstance(c["value"], float)


def test_failing_report_renders_verdict():
    broken = make_params(1.0, 0.8, 0.5)
    object.__setattr__(broken, "kappa", 0.9)
    ops = spin_operators(0.5)
    bad = check_invariant_defect(broken, ops)
    assert "FAIL" in bad.line()
