"""End-to-end checks for the command-line interface.

All commands run in-process through main(argv); stdout/stderr are captured
and parsed back, so the tests pin the exact emitted bytes where determinism
is part of the contract.
"""

import io
import json
import math
from contextlib import redirect_stderr, redirect_stdout

import pytest

from qrl import families
from qrl.cfrac import exact_unit, fundamental_unit, principal_expansion
from qrl.classno import l_value_exact, l_value_truncated
from qrl.cli import main


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


def one_json(text):
    lines = text.splitlines()
    assert len(lines) == 1
    return json.loads(lines[0])


# ---------------------------------------------------------------------------
# single-value commands


def test_unit_61():
    code, out, err = run_cli(["unit", "--d", "61"])
    assert code == 0 and err == ""
    record = one_json(out)
    info = fundamental_unit(61)
    assert list(record) == ["d", "l", "regulator", "norm_sign"]
    assert record["d"] == 61
    assert record["l"] == info.period_length
    assert record["norm_sign"] == -1
    unit = exact_unit(61)
    closed = math.log((unit.x + unit.y * math.sqrt(61)) / 2)
    assert abs(record["regulator"] - closed) < 1e-9


def test_unit_exact_coordinates():
    code, out, _ = run_cli(["unit", "--d", "61", "--exact"])
    assert code == 0
    record = one_json(out)
    unit = exact_unit(61)
    assert record["x"] == unit.x and record["y"] == unit.y
    assert (record["x"] ** 2 - 61 * record["y"] ** 2) // 4 in (-1, 1)


def test_unit_rejects_non_discriminant():
    code, out, err = run_cli(["unit", "--d", "7"])
    assert code == 1 and out == ""
    record = one_json(err)
    assert record["error"] == "ValueError"
    assert "discriminant" in record["message"]


def test_classno_40():
    code, out, _ = run_cli(["classno", "--d", "40"])
    assert code == 0
    record = one_json(out)
    assert record["h"] == 2


def test_cf_matches_expansion():
    code, out, _ = run_cli(["cf", "--d", "13"])
    assert code == 0
    record = one_json(out)
    exp = principal_expansion(13)
    assert record["preperiod"] == list(exp.preperiod)
    assert record["period"] == list(exp.period)
    assert record["period_length"] == len(exp.period)
    assert record["a"] == 1 and record["b"] == 1


def test_lvalue_exact_golden_ratio():
    code, out, _ = run_cli(["lvalue", "--d", "5"])
    assert code == 0
    record = one_json(out)
    closed = (2 / math.sqrt(5)) * math.log((1 + math.sqrt(5)) / 2)
    assert record["method"] == "exact"
    assert abs(record["value"] - closed) < 1e-9
    assert record["value"] == float(f"{l_value_exact(5):.12g}")


def test_lvalue_euler_truncation():
    code, out, _ = run_cli(["lvalue", "--d", "5", "--method", "euler", "--bound", "1000"])
    assert code == 0
    record = one_json(out)
    assert record["bound"] == 1000
    assert record["value"] == float(f"{l_value_truncated(5, 1000):.12g}")


def test_constants_surface_both_values():
    code, out, _ = run_cli(["constants", "--m", "1", "--primes", "2,5"])
    assert code == 0
    record = one_json(out)
    assert record["C_m"] == 144.0
    witness = families.check_star(1, [2, 5])
    if witness is None:
        assert "star_modulus" not in record
    else:
        assert record["star_modulus"] == witness.modulus
        assert record["star_residue"] == witness.residue


def test_ideal_classify():
    code, out, _ = run_cli(["ideal", "--literal", "2*[10,(-7+sqrt(7049))/2]"])
    assert code == 0
    record = one_json(out)
    assert record["e"] == 2 and record["a"] == 10 and record["b"] == -7
    assert record["norm"] == 40
    assert record["primitive"] is False
    assert record["literal"] == "2*[10,(-7+sqrt(7049))/2]"


# ---------------------------------------------------------------------------
# family build / scan


def test_family_build_reference_spec():
    code, out, _ = run_cli(
        ["family", "build", "--m", "1", "--primes", "5", "--x", "1e10"]
    )
    assert code == 0
    record = one_json(out)
    assert record["q"] == 6006
    assert record["n0"] == 1365
    assert record["S_prime"] == [7, 11, 13]
    assert record["eps1"] == 0.9


def test_family_scan_chowla_csv():
    code, out, _ = run_cli(
        ["family", "scan", "--kind", "chowla", "--kmin", "1", "--kmax", "10"]
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "k,n,d_1,squarefree,h,regulator,L_trunc,bound_ok"
    records = families.family_scan("chowla", {}, range(1, 11))
    assert len(lines) == 1 + len(records)
    first = lines[1].split(",")
    assert first[0] == str(records[0].k)
    assert first[2] == str(records[0].d_values[0])
    assert first[-1] == "1"


def test_family_scan_empty_range_header_only():
    code, out, _ = run_cli(
        ["family", "scan", "--kind", "chowla", "--kmin", "5", "--kmax", "4"]
    )
    assert code == 0
    assert out == "k,n,d_1,squarefree,h,regulator,L_trunc,bound_ok\n"


def test_family_scan_requires_one_source():
    code, _, err = run_cli(["family", "scan", "--kmax", "5"])
    assert code == 1
    assert "exactly one" in one_json(err)["message"]


def test_family_scan_spec_roundtrip_and_jobs(tmp_path):
    spec_path = tmp_path / "spec.json"
    code, _, _ = run_cli(
        [
            "family", "build", "--m", "1", "--primes", "5", "--x", "1e10",
            "--out", str(spec_path),
        ]
    )
    assert code == 0
    argv = ["family", "scan", "--spec", str(spec_path), "--kmax", "12"]
    code1, out1, _ = run_cli(argv)
    code2, out2, _ = run_cli(argv + ["--jobs", "3"])
    assert code1 == code2 == 0
    assert out1 == out2
    lines = out1.splitlines()
    assert lines[0] == "k,n,d_1,squarefree,h,regulator,L_trunc,bound_ok"
    spec = families.build_progression(1, [5], 10**10, 0.9)
    records = families.scan_squarefree(spec, k_max=12)
    assert len(lines) == 1 + len(records)
    for line, rec in zip(lines[1:], records):
        cells = line.split(",")
        assert cells[0] == str(rec.k)
        assert cells[1] == str(rec.n)
        assert cells[2] == str(rec.d_values[0])
        assert cells[3] == "1"
        assert cells[4] == "" and cells[5] == ""


def test_family_scan_json_format():
    code, out, _ = run_cli(
        [
            "family", "scan", "--kind", "shanks", "--kmin", "2", "--kmax", "5",
            "--format", "json",
        ]
    )
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    records = families.family_scan("shanks", {}, range(2, 6))
    assert [row["k"] for row in rows] == [rec.k for rec in records]
    assert all(row["bound_ok"] for row in rows)


def test_family_scan_bound_exponent_validation(tmp_path):
    spec_path = tmp_path / "spec.json"
    run_cli(
        [
            "family", "build", "--m", "1", "--primes", "5", "--x", "1e10",
            "--out", str(spec_path),
        ]
    )
    code, _, err = run_cli(
        [
            "family", "scan", "--spec", str(spec_path), "--kmax", "3",
            "--with-h", "--bound-exponent", "1.5",
        ]
    )
    assert code == 1
    assert "greater than 2" in one_json(err)["message"]


# ---------------------------------------------------------------------------
# verify


def test_verify_shanks_all_ok():
    code, out, err = run_cli(["verify", "shanks", "--kmin", "2", "--kmax", "8"])
    assert code == 0 and err == ""
    rows = [json.loads(line) for line in out.splitlines()]
    assert [row["k"] for row in rows] == list(range(2, 9))
    assert all(row["ok"] for row in rows)
    assert all(row["family"] == "shanks" for row in rows)


def test_verify_chowla_all_ok():
    code, out, _ = run_cli(["verify", "chowla", "--kmax", "50"])
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert rows and all(row["ok"] for row in rows)
    for row in rows:
        assert row["regulator"] <= row["bound"] + 1e-9


def test_verify_yamamoto_all_ok():
    code, out, _ = run_cli(["verify", "yamamoto", "--p", "5", "--kmax", "50"])
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert rows and all(row["ok"] for row in rows)


def test_verify_yamamoto_requires_p():
    code, _, err = run_cli(["verify", "yamamoto", "--kmax", "5"])
    assert code == 1
    assert "--p" in one_json(err)["message"]


# ---------------------------------------------------------------------------
# criterion


def test_criterion_d61_norm3():
    code, out, _ = run_cli(["criterion", "--d", "61", "--norms", "3"])
    assert code == 0
    record = one_json(out)
    assert record["d"] == 61
    assert record["norms"] == [3]
    assert abs(record["discrete_sum"] - 1.625967) < 1e-5
    assert abs(record["exact_sum"] - 2.905732) < 1e-5
    assert abs(record["regulator"] - 3.664215) < 1e-5
    assert record["discrete_sum"] <= record["exact_sum"] <= record["regulator"]


def test_criterion_ramified_clearing():
    code, out, _ = run_cli(["criterion", "--d", "105", "--norms", "6=2*3"])
    assert code == 0
    record = one_json(out)
    assert record["norms"] == [4]


def test_criterion_hypothesis_failure_exit_code():
    code, out, err = run_cli(["criterion", "--d", "60", "--norms", "6=2*3"])
    assert code == 1 and out == ""
    assert "gcd" in one_json(err)["message"]


def test_criterion_needs_arguments():
    code, _, err = run_cli(["criterion", "--d", "61"])
    assert code == 1
    assert "--norms" in one_json(err)["message"]


def test_criterion_hk_search():
    code, out, _ = run_cli(["criterion", "hk-remark", "--search"])
    assert code == 0
    record = one_json(out)
    assert record["params"] == [2, 2, 2, 1, 43]
    assert record["d"] == 7049
    assert record["product_content"] == 2
    assert record["product_norm"] == 40
    assert record["norm_bound_ok"] is True
    assert record["product"] == "2*[10,(-7+sqrt(7049))/2]"
    assert "unit" in record["subset_sums"]


def test_criterion_hk_explicit_params():
    code, out, _ = run_cli(["criterion", "hk-remark", "--params", "2,2,2,1,3"])
    assert code == 0
    record = one_json(out)
    assert record["d"] == 2009
    assert record["norm_bound_ok"] is False


def test_criterion_hk_mode_needs_source():
    code, _, err = run_cli(["criterion", "hk-remark"])
    assert code == 1
    assert "--search or --params" in one_json(err)["message"]


# ---------------------------------------------------------------------------
# output plumbing


def test_out_flag_writes_file(tmp_path):
    path = tmp_path / "unit.json"
    code, out, _ = run_cli(["unit", "--d", "61", "--out", str(path)])
    assert code == 0 and out == ""
    _, stdout, _ = run_cli(["unit", "--d", "61"])
    assert path.read_text() == stdout


def test_reruns_byte_identical():
    for argv in (
        ["unit", "--d", "316"],
        ["criterion", "--d", "61", "--norms", "3"],
        ["family", "scan", "--kind", "chowla", "--kmax", "6"],
    ):
        _, first, _ = run_cli(argv)
        _, second, _ = run_cli(argv)
        assert first == second


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as excinfo:
        run_cli(["lvalue", "--d", "5", "--method", "bogus"])
    assert excinfo.value.code == 2
