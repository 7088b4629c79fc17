"""Command-line surface: exit codes, JSON output, determinism, experiments."""

import json

from ropcheck.cli import main
from ropcheck.mpoly import parse_poly_file


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gen_qn_then_check_rejects(tmp_path, capsys):
    path = tmp_path / "q4.txt"
    assert main(["gen", "qn", "--p", "1009", "--n", "4", "--out", str(path)]) == 0
    capsys.readouterr()
    code, out, _ = run(capsys, "check", str(path))
    assert code == 1
    assert "verdict: READ_MANY" in out
    assert "witness subset:" in out


def test_gen_rof_then_check_accepts(tmp_path, capsys):
    path = tmp_path / "f.txt"
    assert main(["gen", "rof", "--p", "1009", "--n", "5", "--seed", "3",
                 "--out", str(path)]) == 0
    capsys.readouterr()
    code, out, _ = run(capsys, "check", str(path))
    assert code == 0
    assert "verdict: ROP" in out


def test_gen_deterministic_stdout(capsys):
    code1, out1, _ = run(capsys, "gen", "rof", "--p", "101", "--n", "8", "--seed", "7")
    code2, out2, _ = run(capsys, "gen", "rof", "--p", "101", "--n", "8", "--seed", "7")
    assert code1 == code2 == 0
    assert out1 == out2
    _, other, _ = run(capsys, "gen", "rof", "--p", "101", "--n", "8", "--seed", "8")
    assert other != out1


def test_gen_random_multilinear_parses(capsys):
    code, out, _ = run(capsys, "gen", "random-multilinear", "--n", "4", "--seed", "2")
    assert code == 0
    P = parse_poly_file(out)
    assert P.arity == 4 and P.is_multilinear()


def test_check_json_schema(tmp_path, capsys):
    path = tmp_path / "q4.txt"
    main(["gen", "qn", "--p", "1009", "--n", "4", "--out", str(path)])
    capsys.readouterr()
    code, out, _ = run(capsys, "check", str(path), "--json", "--seed", "5")
    assert code == 1
    doc = json.loads(out)
    assert doc["verdict"] == "READ_MANY"
    assert doc["seed"] == 5
    assert isinstance(doc["witness_I"], list) and min(doc["witness_I"]) >= 1


def test_check_deterministic_for_seed(tmp_path, capsys):
    path = tmp_path / "q5.txt"
    main(["gen", "qn", "--p", "1009", "--n", "5", "--out", str(path)])
    capsys.readouterr()
    _, out1, _ = run(capsys, "check", str(path), "--seed", "9")
    _, out2, _ = run(capsys, "check", str(path), "--seed", "9")
    assert out1 == out2


def test_check_indeterminate_exit_code(tmp_path, capsys):
    path = tmp_path / "q4.txt"
    main(["gen", "qn", "--p", "1009", "--n", "4", "--out", str(path)])
    capsys.readouterr()
    code, out, _ = run(capsys, "check", str(path), "--retries", "0")
    assert code == 4
    assert "INDETERMINATE" in out


def test_malformed_file_exit_2(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("not a header\n")
    code, _, err = run(capsys, "check", str(path))
    assert code == 2
    assert "error:" in err
    code, _, _ = run(capsys, "check", str(tmp_path / "missing.txt"))
    assert code == 2


def test_non_multilinear_exit_3(tmp_path, capsys):
    path = tmp_path / "sq.txt"
    path.write_text("field p=101 n=2\nx1^2 + x2\n")
    code, _, err = run(capsys, "check", str(path))
    assert code == 3
    assert "error:" in err


def test_unknown_arguments_exit_2(capsys):
    assert main(["bogus"]) == 2
    assert main(["check"]) == 2
    assert main(["gen", "qn", "--n", "4", "--p", "6"]) == 2
    capsys.readouterr()


def test_blackbox_accepts_formula_file(tmp_path, capsys):
    path = tmp_path / "f.txt"
    main(["gen", "rof", "--p", "101", "--n", "4", "--seed", "1", "--out", str(path)])
    capsys.readouterr()
    code, out, err = run(capsys, "blackbox", str(path), "--seed", "3")
    assert code == 0
    assert "verdict: YES" in out
    # 101 < 1.5 * 4^4 / 0.25
    assert "warning" in err


def test_blackbox_rejects_hard_case(tmp_path, capsys):
    path = tmp_path / "q6.txt"
    main(["gen", "qn", "--p", "11677", "--n", "6", "--out", str(path)])
    capsys.readouterr()
    # Sweep seeds until one rejects; the acceptance suite measures the rate.
    for seed in range(5):
        code, out, _ = run(capsys, "blackbox", str(path), "--seed", str(seed), "--json")
        if code == 1:
            doc = json.loads(out)
            assert doc["verdict"] == "NO"
            assert doc["failure_kind"] in ("NOT_ROP", "NOT_MULTILINEAR")
            return
    raise AssertionError("no rejection in 5 seeds")


def test_blackbox_repeat_reports_rate(tmp_path, capsys):
    path = tmp_path / "f.txt"
    main(["gen", "rof", "--p", "40961", "--n", "4", "--seed", "2", "--out", str(path)])
    capsys.readouterr()
    code, out, _ = run(capsys, "blackbox", str(path), "--repeat", "3", "--seed", "0")
    assert code == 0
    assert "runs: 3" in out and "no_rate: 0.0000" in out


def test_property_commands(tmp_path, capsys):
    path = tmp_path / "f.txt"
    main(["gen", "rof", "--p", "1009", "--n", "4", "--seed", "5", "--out", str(path)])
    capsys.readouterr()
    code, out, _ = run(capsys, "property", str(path), "--delta", "0.5", "--seed", "1")
    assert code == 0
    assert "verdict: YES" in out
    assert "repeats: 6" in out


def test_property_rejects_polynomial_file(tmp_path, capsys):
    path = tmp_path / "e2.txt"
    path.write_text("field p=1009 n=3\nx1*x2 + x2*x3 + x1*x3\n")
    code, out, _ = run(capsys, "property", str(path), "--delta", "0.5", "--seed", "0")
    assert code == 1
    assert "verdict: NO" in out
    assert "failing subset: x1 x2 x3" in out


def test_experiment_qn_fraction_gf2(capsys):
    code, out, _ = run(capsys, "experiment", "qn-fraction", "--p", "2", "--n", "4")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "p,n,samples,good_fraction,stderr"
    assert lines[1] == "2,4,16,1.000000,0.000000"


def test_experiment_qn_fraction_multi_n(capsys):
    code, out, _ = run(capsys, "experiment", "qn-fraction", "--p", "2", "--n", "4,5")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 3
    assert lines[2].startswith("2,5,32,1.000000")


def test_experiment_tau_multilinear(tmp_path, capsys):
    path = tmp_path / "f.txt"
    main(["gen", "rof", "--p", "1009", "--n", "5", "--seed", "4", "--out", str(path)])
    capsys.readouterr()
    code, out, _ = run(capsys, "experiment", "tau", str(path), "--samples", "200")
    assert code == 0
    assert "fraction: 0.000000" in out


def test_experiment_trivariate_enum_sampled(capsys):
    code, out, _ = run(capsys, "experiment", "trivariate-enum", "--p", "5",
                       "--samples", "300", "--seed", "1")
    assert code == 0
    assert out.strip() == "300 cases, 0 disagreements"


def test_experiment_trivariate_enum_scale_guard(capsys):
    code, _, err = run(capsys, "experiment", "trivariate-enum", "--p", "11")
    assert code == 2
    assert "error:" in err
