import json
import math

import numpy as np
import pytest

from weylhelp import cli
from weylhelp.catalog import UnknownEntryError, catalog, catalog_json, describe, names
from weylhelp.weyl import m_eval, problem_from_json


@pytest.mark.parametrize("name", names())
def test_catalog_round_trip(name):
    p = catalog(name)
    d = json.loads(json.dumps(cli._jsonable(p.to_json())))
    q = problem_from_json(d)
    assert q.to_json() == p.to_json()
    assert describe(name)


def test_catalog_known_shapes():
    hl = catalog_json("hardy-littlewood")
    assert hl["b"] == "inf"
    assert catalog("regular-interval").b == 1.0
    with pytest.raises(UnknownEntryError):
        catalog("no-such-problem")
    with pytest.raises(ValueError):
        catalog("power-weight", alpha=-1.0)


def test_liouville_equivalent_strings_share_m():
    # (0,1) with r = (1-x)^-2 and (0,inf) with w = (1+x)^-2 are the same string after x -> x/(1-x)
    a = catalog("singular-interval")
    b = catalog("w-integrable")
    for lam in (1j, 3 - 1j, -2 + 0.5j):
        ma, mb = m_eval(a, lam), m_eval(b, lam)
        assert abs(ma.m - mb.m) <= ma.enclosure + mb.enclosure + 1e-8 * abs(ma.m)


def run_main(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_help_check_valid(capsys):
    code, out, _ = run_main(capsys, ["help", "check", "--catalog", "hardy-littlewood"])
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"] == "valid"
    assert rep["provenance"]["trail"]


def test_cli_sim_check_factorial_negative(capsys):
    code, out, _ = run_main(capsys, ["sim", "check", "--catalog", "factorial-weight"])
    assert code == 1
    assert json.loads(out)["verdict"] == "no"


def test_cli_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"w": {"pieces": [')
    code, _, err = run_main(capsys, ["mfun", "eval", "--problem", str(bad), "--lambda", "i"])
    assert code == 64
    assert json.loads(err)["error"] == "usage"


def test_cli_bad_inputs(capsys):
    assert run_main(capsys, ["catalog", "nope"])[0] == 64
    assert run_main(capsys, ["mfun", "eval", "--catalog", "hardy-littlewood", "--lambda", "2"])[0] == 64
    assert run_main(capsys, ["mfun", "eval", "--catalog", "hardy-littlewood", "--lambda", "i",
                             "--ode-rtol", "-1"])[0] == 64
    assert run_main(capsys, ["mfun", "table", "--catalog", "hardy-littlewood", "--per-decade", "1"])[0] == 64


def test_cli_mfun_eval_value(capsys):
    code, out, _ = run_main(capsys, ["mfun", "eval", "--catalog", "hardy-littlewood", "--lambda=-1+1i"])
    assert code == 0
    m = cli.parse_complex(json.loads(out)["result"]["m"])
    assert m == pytest.approx((1 - 1j) ** -0.5, rel=1e-6)


def test_cli_csv_columns(capsys):
    code, out, _ = run_main(capsys, ["mfun", "table", "--catalog", "hardy-littlewood", "--from", "0.1", "--to",
                                     "10", "--per-decade", "2", "--format", "csv"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split(",") == ["y", "re_m", "im_m", "enclosure"]
    y, re, im, _ = map(float, lines[1].split(","))
    m = (-1j * y) ** -0.5
    assert (re, im) == pytest.approx((m.real, m.imag), rel=1e-6)


def test_cli_catalog_listing(capsys):
    code, out, _ = run_main(capsys, ["catalog"])
    assert code == 0 and "hardy-littlewood" in json.loads(out)
    code, out, _ = run_main(capsys, ["catalog", "A_l-log"])
    assert code == 0
    assert problem_from_json(json.loads(out)).to_json() == catalog("A_l-log").to_json()


def test_cli_deterministic_excluding_timestamp(capsys):
    argv = ["help", "bound", "--catalog", "factorial-r", "--seed", "3"]
    reports = []
    for _ in range(2):
        code, out, _ = run_main(capsys, argv)
        rep = json.loads(out)
        del rep["provenance"]["timestamp"]
        reports.append(json.dumps(rep, sort_keys=True))
    assert reports[0] == reports[1]


def test_complex_strings():
    for z in (1 + 2j, -0.5 - 1e-9j, 3.0 + 0j, 1j):
        assert cli.parse_complex(cli.cstr(z)) == pytest.approx(z)
    assert cli.parse_complex("i") == 1j
    with pytest.raises(ValueError):
        cli.parse_complex("one")


def test_jsonable_handles_inf_and_numpy():
    d = cli._jsonable({"a": math.inf, "b": np.float64(2.0), "c": (1, 2)})
    json.dumps(d, allow_nan=False)
