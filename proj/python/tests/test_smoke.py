import math

import numpy as np
import pytest

import impstop


def test_example1_constants():
    c = impstop.example1_constants()
    assert c["x_hat"] == pytest.approx(0.283189, abs=1e-6)
    assert c["x_star"] == pytest.approx(0.488411, abs=1e-6)
    assert c["x_tilde"] == pytest.approx(5.702786, abs=1e-6)


def test_exponent_identities():
    cp, cm = impstop.example1_exponents(0.05, 0.3, 0.1)
    assert abs(cp * cm + 2 * 0.1 / 0.09) < 1e-10
    assert abs(cp + cm - 1 + 2 * 0.05 / 0.09) < 1e-10


def test_investor_constants_with_and_without_jumps():
    c = impstop.investor_constants()
    assert c["k"] == pytest.approx(0.454545, abs=1e-6)
    assert c["omega_star"] == pytest.approx(1.666667, abs=1e-6)
    p = impstop.Example2Params()
    p.atoms = [impstop.JumpAtom(0.2, 0.5)]
    cj = impstop.investor_constants(p)
    assert cj["k"] == pytest.approx(0.535714, abs=1e-6)
    assert cj["omega_star"] == pytest.approx(2.307692, abs=1e-6)


def test_value_in_stop_region_is_obstacle():
    v = impstop.example1_value(impstop.Example1Params(), [0.1, 0.2])
    assert v == pytest.approx([0.1 - 0.5, 0.2 - 0.5])


def test_solve_classify_and_certify():
    cfg = impstop.reference_config("example1")
    out = impstop.solve(cfg, grid=1000)
    value = out["value"]
    assert out["x"].shape == (1000, 1)
    rel = np.max(np.abs(value - out["closed_form"])) / np.max(np.abs(out["closed_form"]))
    assert rel < 5e-3
    regions = impstop.classify(cfg, value, grid=1000)
    assert set(regions) <= {"I1", "I2", "I3", "boundary"}
    assert regions.count("I1") > 0 and regions.count("I2") > 0
    ok, conditions, report = impstop.certify(cfg, value, grid=1000)
    assert ok, report
    assert conditions["(iv)"]


def test_perturbed_value_is_not_a_candidate():
    cfg = impstop.reference_config("example1")
    value = impstop.solve(cfg, grid=400)["value"] + np.sin(np.arange(400))
    with pytest.raises(impstop.StructuralError):
        impstop.classify(cfg, value, grid=400)


def test_config_errors_surface_as_value_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[model]\ntemplate = nothing\n")
    with pytest.raises(ValueError):
        impstop.solve(str(bad))


def test_run_reports_exit_codes(tmp_path):
    code, _, err = impstop.run("solve", config=str(tmp_path / "none.cfg"))
    assert code == 3 and "not found" in err
    code, out, _ = impstop.run("solve", config=impstop.reference_config("example1"),
                               out=str(tmp_path / "solve"), grid=300)
    assert code == 0
    assert (tmp_path / "solve" / "manifest.json").exists()
    assert math.isfinite(float(out.split("residual ")[1].split()[0]))
