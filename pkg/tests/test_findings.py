import json

from todalift import findings


def test_invariant_normalization_adjudication():
    out = findings.invariant_normalization_finding(seed=3, samples=20)
    good = out["residuals"]["reciprocal_k"]
    bad = out["residuals"]["reciprocal_2^k"]
    assert good["I1_vs_sum_p"] < 1e-12
    assert good["I2_vs_H"] < 1e-12
    assert bad["I1_vs_sum_p"] > 1e-2
    assert bad["I2_vs_H"] > 1e-2
    assert "Tr(L^k)/k" in out["conclusion"]


def test_lambda_factor_adjudication():
    out = findings.lambda_factor_finding(seed=3, n=4)
    for value in out["fitted_alpha"].values():
        assert abs(value - 1.0) < 1e-8
    assert max(out["drift"]["alpha=1"].values()) < 1e-10
    assert min(out["drift"]["alpha=2"].values()) > 1e-3


def test_zdot_orientation_adjudication():
    out = findings.zdot_orientation_finding(seed=3, n=3)
    res = out["residuals"]
    # the superdiagonal reproduces the Lax matrix for both orientations
    assert res["superdiagonal_both"] < 1e-12
    # beyond it the two orientations deviate by the same amount
    assert abs(res["Zinv_Zdot_minus_M"] - res["Zdot_Zinv_minus_M"]) < 1e-12
    assert res["Zinv_Zdot_minus_M"] > 1e-3
    # the deviation is the predicted bracket correction
    assert res["extra_13_component_vs_(w2 dw1 - w1 dw2)/2"] < 1e-12
    track = out["autoparallel_tracking_sup_dq"]
    assert track["omega0=0"] < 1e-6
    assert track["omega0 generic"] > 1e-2


def test_f_variant_adjudication():
    out = findings.f_variant_finding(seed=3)
    for per_dim in out["residuals"].values():
        assert per_dim["direct_conjugation"] < 1e-12
        assert per_dim["variant_1"] > 1e-3
        assert per_dim["variant_2"] > 1e-3
    assert out["lambda_ab_residual"] < 1e-14


def test_bundled_report_round_trips(tmp_path):
    doc = findings.generate_findings(seed=1, n=3)
    path = tmp_path / "findings.json"
    findings.write_findings(str(path), doc)
    loaded = json.loads(path.read_text())
    assert set(loaded) == {
        "invariant_normalization",
        "lambda_velocity_factor",
        "zdot_orientation",
        "f_coefficient_variant",
    }
    for section in loaded.values():
        assert "conclusion" in section
