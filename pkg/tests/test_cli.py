import json

from qpp.cli import main


def run_cli(tmp_path, command, config, *extra):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps(config))
    out = tmp_path / "out.txt"
    code = main([command, "--config", str(cfg), "--out", str(out), *extra])
    text = out.read_text() if out.exists() else ""
    return code, text


def test_pp_command(tmp_path):
    code, text = run_cli(
        tmp_path, "pp", {"signature": {"parts": [0, 0]}, "q": "1/2", "order": 4}
    )
    assert code == 0
    doc = json.loads(text)
    assert doc["atoms"] == [{"pos": "1/2", "w": "1/4"}, {"pos": "0", "w": "3/4"}]
    assert doc["moments_equal"] is True
    assert doc["moments_direct"][1] == "1/8"
    assert doc["signed"] is False


def test_pp_uniform_weights(tmp_path):
    code, text = run_cli(
        tmp_path, "pp", {"signature": {"parts": [0, 0, 0, 0, 0]}, "q": "0"}
    )
    assert code == 0
    doc = json.loads(text)
    assert all(atom["w"] == "1/5" for atom in doc["atoms"])


def test_pp_offset_consistency(tmp_path):
    code, text = run_cli(
        tmp_path,
        "pp",
        {"signature": {"parts": [3, 1]}, "q": "1/3", "offset": "-2", "order": 5},
    )
    assert code == 0
    assert json.loads(text)["moments_equal"] is True


def test_pp_rejects_bad_signature(tmp_path):
    code, _ = run_cli(tmp_path, "pp", {"signature": {"parts": [1, 3]}, "q": "0"})
    assert code == 2


def test_limit_command(tmp_path):
    config = {
        "psi": {"a": ["0", "1", "1/2"]},
        "phi": {"b": ["0", "1", "0"]},
        "q": "1/2",
        "order": 2,
        "regime": "full",
    }
    code, text = run_cli(tmp_path, "limit", config)
    assert code == 0
    doc = json.loads(text)
    assert doc["moments"][0] == "1"
    assert doc["moments_alt_equal"] is True
    # kappa_1 = a_1 + (1-q)/2 = 1 + 1/4
    assert doc["cumulants"][0] == "5/4"
    # kappa'_1 = b_1 - (1-q)/2
    assert doc["inf_cumulants"][0] == "3/4"


def test_limit_order_error_exit_code(tmp_path):
    config = {"psi": {"a": ["0", "1"]}, "q": "0", "order": 9}
    code, _ = run_cli(tmp_path, "limit", config)
    assert code == 3


def test_transfer_command_uniform_to_delta_one(tmp_path):
    config = {
        "moments": ["1", "1/2", "1/3", "1/4"],
        "q": "0",
        "q_prime": "-1",
    }
    code, text = run_cli(tmp_path, "transfer", config)
    assert code == 0
    doc = json.loads(text)
    assert doc["transferred"] == ["1", "1", "1", "1"]
    assert doc["round_trip_exact"] is True


def test_density_command_csv_with_mass_footer(tmp_path):
    config = {
        "model": {"kind": "interp", "gamma": "1/4", "q": "1/2"},
        "grid": 50,
    }
    code, text = run_cli(tmp_path, "density", config, "--format", "csv")
    assert code == 0
    lines = text.strip().splitlines()
    assert lines[0] == "t,f,model"
    footer = [l for l in lines if l.startswith("# mass,")]
    assert len(footer) == 1 and footer[0].endswith("ok,true")


def test_density_moment_report(tmp_path):
    config = {
        "model": {"kind": "uniform"},
        "grid": 10,
        "compare_moments": ["1", "1/2", "1/3"],
    }
    code, text = run_cli(tmp_path, "density", config)
    assert code == 0
    doc = json.loads(text)
    rows = doc["moment_report"]
    assert [r["k"] for r in rows] == [0, 1, 2]
    assert all(r["abs_err"] < 1e-10 for r in rows)
    assert rows[1]["series"] == "1/2"


def test_density_plot_written(tmp_path):
    config = {"model": {"kind": "semicircle", "gamma": "1"}, "grid": 40}
    png = tmp_path / "fig.png"
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(config))
    out = tmp_path / "d.csv"
    code = main(
        ["density", "--config", str(cfg), "--out", str(out), "--format", "csv",
         "--plot", str(png)]
    )
    assert code == 0
    assert png.exists() and png.stat().st_size > 1000


def test_density_plot_with_atoms(tmp_path):
    config = {"model": {"kind": "marchenko_pastur", "gamma": "1/4"}, "grid": 40}
    png = tmp_path / "atoms.png"
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(config))
    code = main(
        ["density", "--config", str(cfg), "--out", str(tmp_path / "d.csv"),
         "--format", "csv", "--plot", str(png)]
    )
    assert code == 0
    assert png.exists() and png.stat().st_size > 1000


def test_converge_command(tmp_path):
    config = {"q": "1/2", "k_max": 2, "Ns": [4, 8, 16]}
    code, text = run_cli(tmp_path, "converge", config)
    assert code == 0
    doc = json.loads(text)
    rows = doc["rows"]
    assert len(rows) == 9
    # k = 1 gap is exactly c_1/N = -(1-q)/(2N): scaled gap is constant -1/4
    k1 = [r for r in rows if r["k"] == 1]
    assert all(r["scaled_gap"] == "-1/4" for r in k1)


def test_converge_csv_and_plot(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"q": "0", "k_max": 1, "Ns": [4, 8]}))
    out = tmp_path / "rows.csv"
    code = main(["converge", "--config", str(cfg), "--out", str(out),
                 "--format", "csv", "--plot"])
    assert code == 0
    assert out.read_text().startswith("N,k,moment,limit,scaled_gap,predicted")
    assert (tmp_path / "rows.png").exists()


def test_identical_config_byte_identical_output(tmp_path):
    config = {"model": {"kind": "mk_dense", "alphas": ["0"], "betas": ["1"], "q": "1/3"},
              "grid": 25}
    _, text1 = run_cli(tmp_path, "density", config)
    _, text2 = run_cli(tmp_path, "density", config)
    assert text1 == text2


def test_command_mismatch_is_input_error(tmp_path):
    code, _ = run_cli(tmp_path, "pp", {"command": "limit"})
    assert code == 2


def test_missing_config_is_input_error(capsys):
    assert main(["pp"]) == 2


def test_malformed_json_is_input_error(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    assert main(["pp", "--config", str(cfg)]) == 2
