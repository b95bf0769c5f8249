import pathlib

import pytest

import evadesos as ev

ROOT = pathlib.Path(__file__).resolve().parents[2]


def test_config_round_trip():
    cfg = ev.parse_config("R = 4\nu_max = 0.03\nw_max = 0.01\n")
    assert cfg.R == 4.0 and cfg.u_max == 0.03
    again = ev.parse_config(str(cfg))
    assert str(again) == str(cfg)
    with pytest.raises(ev.ConfigError):
        ev.parse_config("R = 4\nR_a = 5\n")


def test_program_size_and_export():
    cfg = ev.load_config(str(ROOT / "configs" / "full.cfg"))
    size = ev.program_size(cfg)
    assert (size.rows, size.blocks, size.max_side) == (11830, 33, 210)
    assert not size.fits_internal()
    toy = ev.load_config(str(ROOT / "tests" / "golden" / "toy.cfg"))
    golden = (ROOT / "tests" / "golden" / "toy.dat-s").read_text()
    assert ev.export_sdpa(toy) == golden


def test_infeasible_and_too_large():
    cfg = ev.load_config(str(ROOT / "configs" / "desk.cfg"))
    cfg.u_max = 0.0
    with pytest.raises(ev.InfeasibleError):
        ev.synthesize(cfg)
    with pytest.raises(ev.TooLargeError):
        ev.synthesize(ev.load_config(str(ROOT / "configs" / "full.cfg")))


FLAT = """evadesos-certificate 1
alpha = 2
[config]
x_ie = 0.5, -1.8
x_ip = 0.5, 1
[poly V]
0 0 0 0 16.000000000000004
1 0 0 0 -5.6568542494923806
0 1 0 0 -5.6568542494923806
2 0 0 0 1
0 2 0 0 1
[poly rho]
0 0 0 0 1
[poly psi1]
[poly psi2]
[poly y1]
[poly y2]
[poly y3]
[poly y4]
[solver]
[end]
"""


def test_flat_certificate(tmp_path):
    # rho = 1, psi = 0: the evader never moves.
    cert = ev.Certificate.from_text(FLAT)
    assert cert.rho([0.5, -1.8, 0.5, 1.0]) == 1.0
    assert ev.Certificate.from_text(cert.to_text()).to_text() == cert.to_text()
    ok, report = ev.verify(cert, samples=500)
    assert not ok
    assert report.startswith("overall = fail")
    outcome, min_dist, csv = ev.simulate(cert, t_max=400.0)
    assert outcome == "Captured"
    assert min_dist <= 0.5
    assert csv.startswith("t,")
    cert.save(str(tmp_path / "flat.cert"))
    assert ev.main(["verify", str(tmp_path / "flat.cert"), "--quiet", "--samples", "500"]) == 4


def test_cli_exit_codes(tmp_path):
    assert ev.main([]) == 1
    assert ev.main(["synthesize", str(ROOT / "configs" / "full.cfg"), "--quiet"]) == 3
