import io
import json
import random
from pathlib import Path

import pytest

from sym2eps import cli_report as cli

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(argv):
    out = io.StringIO()
    code = cli.main(argv, out)
    return code, out.getvalue()


def write(tmp_path, obj, name="rec.json"):
    f = tmp_path / name
    f.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(f)


def special_record(**extra):
    rec = {"weight": 2, "primes": [{"p": 7, "Np": 1, "Cp": 0, "ap": {"num": 1}, "type": "special"}]}
    rec.update(extra)
    return rec


def test_special_7_report():
    code, text = run(["report", str(SAMPLES / "special_7.json")])
    assert code == 0
    assert "eps_7 = -i" in text
    assert "printed closed form: i" in text
    assert "global a(sym^2) = 49" in text


def test_principal_5_report_json():
    code, text = run(["--format", "json", "report", str(SAMPLES / "principal_5.json")])
    assert code == 0
    obj = json.loads(text)
    p5 = obj["primes"][0]
    assert p5["epsilon"]["value"]["text"] == "-1/5 * a_5^2"
    assert p5["epsilon"]["value"]["symbols"] == {"a_5": 2}
    assert p5["epsilon"]["printed"]["text"] == "1/5 * a_5^2"
    assert p5["conductor"] == {"a_sym2": 4, "set": "P1", "M_prime": 1}
    assert obj["global"]["a_sym2"] == 625 and obj["global"]["consistent"]


def test_mixed_report_global_conductor():
    code, text = run(["--format", "json", "report", str(SAMPLES / "mixed.json")])
    assert code == 0
    obj = json.loads(text)
    assert obj["level"] == 175
    assert obj["global"]["a_sym2"] == 5 ** 4 * 7 ** 2
    assert obj["global"]["sets"]["S"] == [7] and obj["global"]["sets"]["P1"] == [5]


def test_supercuspidal_report_classification():
    code, text = run(["--format", "json", "report", str(SAMPLES / "supercuspidal_3_5.json")])
    assert code == 0
    p3, p5 = json.loads(text)["primes"]
    assert p3["classification"]["observed"] == "PropertyB"
    assert p3["classification"]["type"] == "TypeI"
    assert p5["classification"]["K"] == "Q_5(sqrt(-p zeta_(p-1)))"
    assert p5["epsilon"]["value"]["text"] == "-1"
    assert p5["epsilon"]["printed"]["text"] == "1"


def test_report_with_oracle():
    code, text = run(["report", "--oracle", str(SAMPLES / "special_7.json")])
    assert code == 0
    assert "(match)" in text
    assert "disagrees with the oracle" in text


def test_report_is_deterministic():
    a = run(["--format", "json", "report", str(SAMPLES / "supercuspidal_3_5.json")])
    b = run(["--format", "json", "report", str(SAMPLES / "supercuspidal_3_5.json")])
    assert a == b


def test_input_errors_exit_2(tmp_path, capsys):
    bad_c = special_record()
    bad_c["primes"][0].update({"Np": 1, "Cp": 2})
    assert run(["report", write(tmp_path, bad_c)])[0] == 2
    assert "Cp" in capsys.readouterr().err
    assert run(["report", write(tmp_path, "{not json")])[0] == 2
    assert run(["report", str(tmp_path / "missing.json")])[0] == 2
    assert run(["report", write(tmp_path, special_record(level=11))])[0] == 2
    assert run(["report", write(tmp_path, special_record(weight=1))])[0] == 2
    twice = special_record()
    twice["primes"] *= 2
    assert run(["report", write(tmp_path, twice)])[0] == 2


def test_kappa_table_of_wrong_size_is_an_input_error(tmp_path, capsys):
    rec = {"weight": 2, "primes": [{
        "p": 3, "Np": 2, "Cp": 0, "type": "supercuspidal",
        "supercuspidal": {"K": {"kind": "unramified"},
                          "kappa": {"conductor": 1, "table": [[1, 0, 0], [2, 0, "1/2"]]}}}]}
    assert run(["report", write(tmp_path, rec)])[0] == 2
    assert "expected 8 entries" in capsys.readouterr().err


def test_kappa_table_input(tmp_path):
    from sym2eps.quadratic_ext import make_quad_ext
    from sym2eps import sym2_transfer as s2
    K = make_quad_ext(3, "unramified")
    kappa = next(s2.dihedral_kappas(K, 1, 1))
    rows = [[x, y, str(t)] for (x, y), t in kappa.value_table().items()]
    d = s2.dihedral_data(kappa)
    rec = {"weight": 2, "primes": [{
        "p": 3, "Np": d.N_p, "Cp": d.C_p, "type": "supercuspidal",
        "supercuspidal": {"K": {"kind": "unramified"},
                          "kappa": {"conductor": 1, "table": rows}}}]}
    r = cli.parse_record(rec)
    assert r.primes[0].supercuspidal.kappa.same_as(kappa)
    assert run(["report", write(tmp_path, rec)])[0] == 0


def test_regime_errors_exit_3(tmp_path, capsys):
    assert run(["report", write(tmp_path, special_record(flags={"minimal": False}))])[0] == 3
    assert "unsupported regime" in capsys.readouterr().err
    rec = {"weight": 2, "primes": [{
        "p": 2, "Np": 4, "Cp": 2, "type": "supercuspidal",
        "supercuspidal": {"K": {"kind": "unramified", "square_class": 5},
                          "kappa": {"conductor": 2, "exponents": [0, 1, 1]}}}]}
    code = run(["report", write(tmp_path, rec)])[0]
    assert code in (2, 3)


def test_gauss_subcommand():
    code, text = run(["--format", "json", "gauss", "--p", "5", "--r", "1"])
    assert code == 0
    rows = json.loads(text)["characters"]
    assert [r["order"] for r in rows] == [2, 4]
    assert all(r["abs2"] == "5" for r in rows)
    assert rows[0]["G"]["text"] == "sqrt(5)"
    assert all(r["gross_koblitz"]["sign"] == -1 for r in rows)
    code, text = run(["gauss", "--p", "3", "--r", "2", "--char-order", "2"])
    assert code == 0 and "without the power fails" in text
    assert run(["gauss", "--p", "4", "--r", "1"])[0] == 2
    assert run(["gauss", "--p", "5", "--r", "1", "--char-order", "3"])[0] == 2


def test_verify_small_and_caps():
    code, text = run(["verify", "--p-max", "3", "--cond-max", "1"])
    assert code == 0
    assert "all checks passed" in text
    assert run(["verify", "--p-max", "17"])[0] == 2
    assert run(["--precision", "0", "verify"])[0] == 2


def test_verify_json_lists_printed_form_failures():
    code, text = run(["--format", "json", "verify", "--p-max", "5", "--cond-max", "2"])
    assert code == 0
    obj = json.loads(text)
    assert obj["passed"]
    forms = {f["branch"]: f for f in obj["printed_forms"]}
    assert forms["principal, odd p, N_p >= 2"]["fails"] > 0


def test_random_records_are_reproducible():
    a = cli.random_records(5, random.Random(3))
    b = cli.random_records(5, random.Random(3))
    assert [[(d.p, d.N_p, d.C_p, d.declared_type) for d in r] for r in a] == \
        [[(d.p, d.N_p, d.C_p, d.declared_type) for d in r] for r in b]
