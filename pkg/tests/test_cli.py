from pathlib import Path

import pytest

from supcogarch.cli import main
from supcogarch.config import ConfigError, ExperimentConfig, parse_config, serialize_config

LIGHT_CFG = """
[model]
kind = compound_poisson
rate = 1.0
jumps = standard_normal

[cogarch]
beta = 1.0
eta = 1.0

[mixture]
phis = 0.12, 0.06
weights = 0.6, 0.4

[simulation]
variants = sup1, sup2, sup3
horizon = 20.0
replications = 150
q_paths = 5
tail_samples = 400
seed = 77
sample_grid_step = 1.0

[analysis]
increments = 1.0
lags = 1.0, 2.0
tolerance_k = 6.0

[output]
out_dir = out
"""


@pytest.fixture()
def cfg_file(tmp_path: Path) -> Path:
    path = tmp_path / "exp.cfg"
    path.write_text(LIGHT_CFG)
    return path


def test_config_roundtrip_identity():
    cfg = parse_config(LIGHT_CFG)
    assert parse_config(serialize_config(cfg)) == cfg
    # defaults round-trip too
    default = ExperimentConfig()
    assert parse_config(serialize_config(default)) == default


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        parse_config("[model]\nkind = compound_poisson\nbogus = 1\n")
    with pytest.raises(ConfigError):
        parse_config("[nonsense]\nx = 1\n")


def test_config_validation_names_field():
    with pytest.raises(ConfigError) as exc:
        parse_config("[cogarch]\nbeta = -1.0\n")
    assert exc.value.field == "cogarch.beta"
    with pytest.raises(ConfigError) as exc:
        parse_config("[mixture]\nphis = 0.5, 0.2\nweights = 0.5, 0.2\n")
    assert "mixture" in exc.value.field
    with pytest.raises(ConfigError) as exc:
        parse_config("[simulation]\nreplications = 10\n")
    assert exc.value.field == "simulation.replications"


def test_config_burn_in_empty_means_auto():
    cfg = parse_config("[simulation]\nburn_in =\n")
    assert cfg.burn_in is None
    cfg = parse_config("[simulation]\nburn_in = 25.0\n")
    assert cfg.burn_in == 25.0


def test_cli_bad_config_exit_code(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[cogarch]\neta = 0.0\n")
    assert main(["analytics", "--config", str(bad)]) == 1


def test_cli_missing_config_is_io_error(tmp_path):
    assert main(["analytics", "--config", str(tmp_path / "absent.cfg")]) == 3


def test_simulate_outputs_and_determinism(cfg_file, tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", str(cfg_file), "--out", str(out1)]) == 0
    assert main(["simulate", "--config", str(cfg_file), "--out", str(out2)]) == 0
    names = sorted(p.name for p in out1.iterdir())
    assert "sup1_bundle.csv" in names and "sup3_chosen_phi.csv" in names
    assert "sup1_price.csv" in names and "sup1_driver_1.csv" in names
    for name in names:
        if name == "config.cfg":  # echoes the effective out dir
            continue
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name
    header = (out1 / "sup2_bundle.csv").read_text().splitlines()[0]
    assert header == "time,aggregate,component_0.06,component_0.12"


def test_simulate_seed_override_changes_output(cfg_file, tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    main(["simulate", "--config", str(cfg_file), "--out", str(out1)])
    main(["simulate", "--config", str(cfg_file), "--out", str(out2), "--seed", "123"])
    assert (out1 / "sup2_bundle.csv").read_text() != (out2 / "sup2_bundle.csv").read_text()


def test_analytics_table(cfg_file, tmp_path):
    out = tmp_path / "an"
    assert main(["analytics", "--config", str(cfg_file), "--out", str(out)]) == 0
    table = dict(
        line.split(",", 1) for line in (out / "analytics.csv").read_text().splitlines()[1:]
    )
    assert float(table["phi_max"]) > 1.0
    assert float(table["kappa_bar"]) > 3.0
    assert float(table["sup1.mean"]) == pytest.approx(
        0.6 / (1 - 0.12) + 0.4 / (1 - 0.06), rel=1e-12
    )
    assert "sup2.sq_increment_cov[r=1;h=1]" in table
    assert float(table["sup2.sq_increment_cov[r=1;h=1]"]) > 0.0


def test_analytics_diverges_markers(tmp_path):
    # showcase mixture: the 0.95 atom has no second moment, sup variances diverge
    cfg = tmp_path / "fig.cfg"
    cfg.write_text(
        "[mixture]\nphis = 0.5, 0.95\nweights = 0.75, 0.25\n"
        "[simulation]\nreplications = 150\n"
    )
    out = tmp_path / "an"
    assert main(["analytics", "--config", str(cfg), "--out", str(out)]) == 0
    table = dict(
        line.split(",", 1) for line in (out / "analytics.csv").read_text().splitlines()[1:]
    )
    assert float(table["sup1.mean"]) == pytest.approx(6.5)
    assert table["sup1.variance"] == "diverges"
    assert table["cogarch[0.95].variance"] == "diverges"
    assert float(table["cogarch[0.95].mean"]) == pytest.approx(20.0)


def test_verify_light_config_passes(cfg_file, tmp_path):
    out = tmp_path / "v"
    assert main(["verify", "--config", str(cfg_file), "--out", str(out)]) == 0
    text = (out / "verification.csv").read_text()
    assert text.startswith("name,analytic,estimate,std_error,n,k,pass")
    assert (out / "verification_checks.csv").exists()
    price = (out / "price_increments.csv").read_text()
    assert price.startswith("r,h,stat,analytic,mc,se,pass")


def test_verify_detects_wrong_target():
    # a deliberately corrupted analytic target must flip the exit code
    from supcogarch.analysis import MomentReport
    from supcogarch.verify import VerificationResult

    good = MomentReport("ok", 1.0, 1.0, 0.01, 200)
    bad = MomentReport("broken", 2.0, 1.0, 0.01, 200)
    assert VerificationResult([good], [], []).passed
    assert not VerificationResult([good, bad], [], []).passed
    assert VerificationResult([good, bad], [], []).failures() == ["broken"]


def test_verify_exit_code_on_injected_failure(cfg_file, tmp_path, monkeypatch):
    import supcogarch.cli as cli
    from supcogarch.analysis import MomentReport
    from supcogarch.verify import VerificationResult

    def fake_battery(cfg):
        return VerificationResult([MomentReport("broken", 2.0, 1.0, 0.01, 200)], [], [])

    monkeypatch.setattr(cli, "run_verification", fake_battery)
    assert main(["verify", "--config", str(cfg_file), "--out", str(tmp_path / "v")]) == 2


def test_verify_tolerance_multiplier_honored(cfg_file, tmp_path):
    # a huge k accepts everything; a vanishing k rejects the MC noise
    relaxed = tmp_path / "relaxed.cfg"
    relaxed.write_text(LIGHT_CFG.replace("tolerance_k = 6.0", "tolerance_k = 1e9"))
    strict = tmp_path / "strict.cfg"
    strict.write_text(LIGHT_CFG.replace("tolerance_k = 6.0", "tolerance_k = 1e-9"))
    assert main(["verify", "--config", str(relaxed), "--out", str(tmp_path / "r")]) == 0
    assert main(["verify", "--config", str(strict), "--out", str(tmp_path / "s")]) == 2


def test_qstats_outputs(cfg_file, tmp_path):
    out = tmp_path / "q"
    assert main(["qstats", "--config", str(cfg_file), "--out", str(out)]) == 0
    summary = (out / "q_summary.csv").read_text().splitlines()
    assert summary[0] == "variant,n_paths,n_q_samples,common,vol_only,price_only"
    rows = {line.split(",")[0]: line.split(",") for line in summary[1:]}
    assert int(rows["sup1"][4]) > 0  # volatility-only jumps present
    assert int(rows["sup2"][4]) == 0
    assert (out / "sup3_logq_hist.csv").exists()
    assert (out / "sup1_q.csv").read_text().startswith("time,q,chosen_phi")


def test_threads_flag_preserves_bytes(cfg_file, tmp_path):
    out1, out2 = tmp_path / "t1", tmp_path / "t4"
    assert main(["verify", "--config", str(cfg_file), "--out", str(out1), "--threads", "1"]) == 0
    assert main(["verify", "--config", str(cfg_file), "--out", str(out2), "--threads", "4"]) == 0
    for name in ("verification.csv", "verification_checks.csv", "price_increments.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name
