import csv
import io
import json
import subprocess
import sys

import pytest

from hartmann_gup.cli import ConfigError, load_config, main, parse_config_text


def run(argv, env=None):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, stdout=out, stderr=err, environ=env or {})
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def cfg(tmp_path):
    def write(text):
        path = tmp_path / "run.cfg"
        path.write_text(text)
        return str(path)

    return write


def test_config_parsing_and_comments():
    values = parse_config_text("# model\nq = 2   # ring\nbeta=1e-4\n\ncap_level = 1\n")
    assert values == {"q": 2.0, "beta": 1e-4, "cap_level": 1}


@pytest.mark.parametrize(
    "text,needle",
    [("q = 1\netaa = 2\n", "run.cfg:2: unknown key 'etaa'"), ("q 1\n", "run.cfg:1"), ("cap_m = x\n", "run.cfg:1"), ("q=1\nq=2\n", "duplicate")],
)
def test_bad_config_exit_2(cfg, text, needle):
    code, out, err = run(["spectrum", "--config", cfg(text)])
    assert code == 2
    assert needle in err
    assert out == ""


def test_invalid_physics_exit_2(cfg):
    assert run(["spectrum", "--config", cfg("mu = -1\n")])[0] == 2
    assert run(["spectrum", "--config", cfg("q = -1\n")])[0] == 2
    assert run(["spectrum", "--config", "/nonexistent/file.cfg"])[0] == 2


def test_env_override_via_main(cfg):
    path = cfg("cap_level = 0\ncap_m = 1\n")
    _, out, _ = run(["spectrum", "--config", path], env={"HARTMANN_Q": "2"})
    assert "1.4142135623730951" in out


def test_env_override_precedence(cfg):
    path = cfg("q = 2\ncap_level = 0\ncap_m = 0\n")
    c = load_config(path, environ={"HARTMANN_Q": "8"})
    assert c.q == 8.0 and c.cap_level == 0
    c = load_config(path, environ={"HARTMANN_Q": "8"}, rel_tol=1e-9)
    assert c.rel_tol == 1e-9
    with pytest.raises(ConfigError):
        load_config(path, environ={"HARTMANN_ETAA": "1"})


def test_spectrum_hydrogen(cfg):
    code, out, _ = run(["spectrum", "--config", cfg("cap_level = 2\ncap_m = 0\n")])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [float(r["E0"]) for r in rows[:2]] == [-0.5, -0.125]
    code, out, _ = run(["spectrum", "--config", cfg("cap_level = 0\ncap_m = 0\n")])
    assert len(out.strip().splitlines()) == 2


def test_spectrum_ring_k_column(cfg):
    code, out, _ = run(["spectrum", "--config", cfg("q = 2\ncap_level = 0\ncap_m = 1\n")])
    ks = {r["m"]: float(r["k"]) for r in csv.DictReader(io.StringIO(out))}
    assert ks["0"] == 1.0 and ks["1"] == pytest.approx(2**0.5)


def test_csv_uses_17_digits(cfg):
    _, out, _ = run(["spectrum", "--config", cfg("q = 2\ncap_level = 0\ncap_m = 1\n")])
    assert "1.4142135623730951" in out
    _, out, _ = run(["spectrum", "--display", "--config", cfg("q = 2\ncap_level = 0\ncap_m = 1\n")])
    assert "1.41421," in out


def test_json_round_trip(cfg):
    path = cfg("q = 8\nbeta = 1e-4\ncap_level = 1\ncap_m = 0\n")
    code, out, _ = run(["splitting", "--config", path, "--format", "json"])
    assert code == 0
    payload = json.loads(out)
    assert payload["columns"][0] == "block_id"
    rows = payload["rows"]
    _, csv_out, _ = run(["splitting", "--config", path])
    for row, crow in zip(rows, csv.DictReader(io.StringIO(csv_out))):
        for col in payload["columns"]:
            v = row[col]
            if isinstance(v, float):
                assert float(crow[col]) == v
            else:
                assert crow[col] == ("" if v is None else str(v))


def test_splitting_q8_block(cfg):
    code, out, err = run(["splitting", "--config", cfg("q = 8\nbeta = 1e-4\ncap_level = 1\ncap_m = 0\n")])
    assert code == 0
    rows = [r for r in csv.DictReader(io.StringIO(out)) if r["block_id"] == "1"]
    assert len(rows) == 2
    assert float(rows[0]["dE_numeric"]) != float(rows[1]["dE_numeric"])
    assert "lifted" in err


def test_splitting_reports_invalid_blocks(cfg):
    code, out, err = run(["splitting", "--config", cfg("q = 0.5\nbeta = 1e-4\ncap_level = 1\ncap_m = 1\n")])
    assert code == 0
    flags = {r["validity_flags"] for r in csv.DictReader(io.StringIO(out))}
    assert "invalid_k_le_1" in flags and "ok" in flags
    assert "diverges" in err


def test_splitting_beta_zero(cfg):
    _, out, _ = run(["splitting", "--config", cfg("cap_level = 1\ncap_m = 1\n")])
    assert {float(r["dE_numeric"]) for r in csv.DictReader(io.StringIO(out))} == {0.0}


def test_recurrence_table_outputs(cfg, tmp_path):
    path = cfg("state = 0,0,0\ns_min = -2\ns_max = 2\nt_max = 1\n")
    code, out, _ = run(["recurrence-table", "--config", path])
    assert code == 0
    assert out.startswith("s,value,provenance,printed_value,verdict\n")
    assert "n,k,t,value,provenance,printed_value,verdict" in out
    target = tmp_path / "table.csv"
    run(["recurrence-table", "--config", path, "--out", str(target)])
    radial = list(csv.DictReader((tmp_path / "table_radial.csv").open()))
    assert [float(r["value"]) for r in radial] == pytest.approx([2.0, 1.0, 1.0, 1.5, 3.0])
    angular = list(csv.DictReader((tmp_path / "table_angular.csv").open()))
    assert all(float(r["value"]) == 1.0 for r in angular if r["t"] == "0")
    code, out, _ = run(["recurrence-table", "--config", path, "--format", "json"])
    assert json.loads(out)["radial"][3]["provenance"] == "recurrence"


def test_matel_command(cfg):
    code, out, _ = run(["matel", "--config", cfg("q = 2\ncap_level = 1\ncap_m = 1\nt_max = 1\ns_min = -2\ns_max = 0\n")])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows and set(rows[0]) >= {"closed_form", "oracle", "verdict"}


def test_verify_report_and_determinism(cfg, tmp_path):
    path = cfg("cap_level = 1\ncap_m = 1\n")
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert run(["verify", "--config", path, "--out", str(a)])[0] == 0
    assert run(["verify", "--config", path, "--out", str(b)])[0] == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert "seed_n1 (1, 0, 1): printed=1.19999" in text
    assert "verdict=mismatch" in text
    assert "exactly zero" in text


def test_verify_json_contents(cfg):
    code, out, _ = run(["verify", "--config", cfg("cap_level = 1\ncap_m = 1\nq = 8\n"), "--format", "json"])
    assert code == 0
    report = json.loads(out)
    summary = {s["formula"]: s for s in report["summary"]}
    assert summary["eq_A_kramers"]["mismatch"] == 0
    assert summary["radial_series"]["mismatch"] == 0
    assert summary["angular_offdiagonal_corrected"]["mismatch"] == 0
    assert "dE010_printed" in summary
    assert report["parity"]["odd_pairs"] == report["parity"]["exact_zero"] > 0


def test_verify_nonconvergence_exit_3(cfg):
    code, _, err = run(["verify", "--config", cfg("cap_level = 0\ncap_m = 0\nmax_levels = 1\n")])
    assert code == 3
    assert "converge" in err


def test_console_entry_point(cfg):
    proc = subprocess.run(
        [sys.executable, "-m", "hartmann_gup", "spectrum", "--config", cfg("mu = 0\n")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
    assert "mu must be positive" in proc.stderr
