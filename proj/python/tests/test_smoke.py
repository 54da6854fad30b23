import math

import numpy as np
import pytest

import modalstab as ms


def test_special_functions():
    assert ms.bessel_j_zero(0, 1) == pytest.approx(2.404825557695773, abs=1e-13)
    assert ms.bessel_j(0, 0.0) == 1.0
    assert ms.spherical_bessel_zero(0, 1) == pytest.approx(math.pi, abs=1e-13)
    assert ms.spherical_bessel_j(0, 1.0) == pytest.approx(math.sin(1.0), abs=1e-15)


def test_spectrum_counts():
    disk = ms.ModeTable.enumerate(ms.Shape.disk, 2.0, 6.61, 300)
    ball = ms.ModeTable.enumerate(ms.Shape.ball, 2.0, 6.61, 300)
    assert disk.unstable_count == 5
    assert ball.unstable_count == 4
    assert len(disk) == 300
    j01 = 2.404825557695773
    assert disk[0].mu == pytest.approx(6.61 - (j01 / 2) ** 2, abs=1e-12)
    assert np.all(np.diff(disk.mu) <= 0)


def test_synthesis_identities():
    t = ms.ModeTable.enumerate(ms.Shape.disk, 2.0, 6.61, 300)
    gs = ms.synthesize(t, [12.34, 14.34, 16.34, 18.34, 20.34])
    ao = np.diag(gs.mu)
    np.testing.assert_allclose(gs.generator_direct, 2 * ao - gs.weighted_sum, atol=1e-10)
    report = ms.validate_gains(gs)
    assert report.hurwitz_direct
    assert report.margin_direct == pytest.approx(ms.hurwitz_margin(gs.generator_direct))
    gammas, scale, _ = ms.auto_scale_gains(t, [6.17, 7.17, 8.17, 9.17, 10.17], -0.5)
    assert scale == 2.0
    assert gammas[0] == pytest.approx(12.34)


def test_errors_are_typed():
    t = ms.ModeTable.enumerate(ms.Shape.disk, 2.0, 6.61, 50)
    with pytest.raises(ms.SynthesisError):
        ms.synthesize(t, [1.0, 2.0])
    with pytest.raises(ms.ResonanceError):
        ms.lifting_coefficients(t[0].mu, np.ones(5), t)
    with pytest.raises(ms.ConfigError):
        ms.RunConfig.parse("dt = -1")
    assert issubclass(ms.ConfigError, ms.Error)


def test_config_round_trip():
    c = ms.RunConfig.default(ms.Shape.ball)
    c.set("gammas", "1, 2, 3.5")
    c.seed = 11
    assert ms.RunConfig.parse(c.serialize()) == c


def test_simulate_and_verify_open_loop(tmp_path):
    c = ms.RunConfig()
    c.set("mode", "open_loop")
    c.grid = 30
    s = ms.simulate(c)
    assert s["diverged"]
    u1 = np.abs(s["states"][0])
    growth = np.polyfit(s["times"][10:70], np.log(u1[10:70]), 1)[0]
    assert growth == pytest.approx(5.164203509263305, rel=1e-6)

    c.output_dir = str(tmp_path)
    code, log = ms.run_verify(c)
    assert code == 1
    assert "FAIL" in log
    assert (tmp_path / "claims.json").exists()


def test_closed_loop_decays(tmp_path):
    c = ms.RunConfig()
    c.grid = 30
    s = ms.simulate(c)
    assert s["gains_source"] == "auto-scaled"
    assert s["margin_direct"] < 0
    u = np.asarray(s["norms"]["u_norm"])
    assert u[-1] < 1e-3 * u[0]

    c.output_dir = str(tmp_path)
    code, _ = ms.run_simulate(c)
    assert code == 0
    assert (tmp_path / "norms.csv").read_text().startswith("t,h2_surrogate")
