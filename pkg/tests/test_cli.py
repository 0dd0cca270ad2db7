import json

import numpy as np
import pytest

from loopfactor.cli import main
from loopfactor.laurent import MatrixLaurent
from loopfactor.loops import assemble, DiagExponent


@pytest.fixture
def params_file(tmp_path):
    path = tmp_path / "params.json"
    path.write_text(
        json.dumps(
            {
                "eta": [[0.3, 0.0]],
                "chi0": 0.2,
                "chi": [[0.0, 0.1]],
                "zeta": [[0.25, -0.1]],
            }
        )
    )
    return str(path)


def test_synth_and_recover_roundtrip(tmp_path, params_file):
    loop_path = str(tmp_path / "loop.json")
    assert main(["--cmd", "synth", "--in", params_file, "--out", loop_path]) == 0
    g = MatrixLaurent.from_json(json.load(open(loop_path)))
    expect = assemble(
        [0.3], DiagExponent(chi0=0.2j, chis=[0.1j]), [0.25 - 0.1j], trunc=30
    )
    assert (g - expect).norm_inf() < 1e-14

    rec_path = str(tmp_path / "rec.json")
    assert main(["--cmd", "recover", "--in", loop_path, "--out", rec_path, "--N", "40"]) == 0
    rec = json.load(open(rec_path))
    assert np.allclose([c[0] + 1j * c[1] for c in rec["eta"]], [0.3], atol=1e-7)
    assert np.allclose([c[0] + 1j * c[1] for c in rec["zeta"]], [0.25 - 0.1j], atol=1e-7)
    assert np.isclose(rec["chi0"], 0.2, atol=1e-8)
    assert rec["resynthesis_residual"] < 1e-7


def test_factor_command(tmp_path, params_file):
    loop_path = str(tmp_path / "loop.json")
    main(["--cmd", "synth", "--in", params_file, "--out", loop_path])
    fac_path = str(tmp_path / "factors.json")
    assert main(["--cmd", "factor", "--in", loop_path, "--out", fac_path, "--N", "40"]) == 0
    obj = json.load(open(fac_path))
    assert obj["residual"] < 1e-8
    assert obj["a0"] > 0
    l = MatrixLaurent.from_json(obj["l"])
    assert l.max_deg <= 0  # anti-analytic factor


def test_verify_exit_codes(tmp_path, capsys):
    rc = main(["--cmd", "verify", "--suite", "planch,keyid", "--N", "32", "--seed", "1"])
    out = capsys.readouterr().out
    assert rc == 0
    lines = [json.loads(line) for line in out.strip().splitlines()]
    assert all("identity" in r and "rel_err" in r for r in lines)
    ids = [r["identity"] for r in lines]
    assert ids == sorted(ids)
    planch = [
        r for r in lines
        if r["identity"].startswith("planch") and abs(r["lhs"] - 0.5) < 1e-12
    ]
    assert planch  # the zeta=(1) case reports lhs = 0.5


def test_verify_csv_format(capsys):
    rc = main(["--cmd", "verify", "--suite", "rh", "--N", "24", "--format", "csv"])
    out = capsys.readouterr().out
    assert rc == 0
    assert out.splitlines()[0] == "identity,N,lhs,rhs,abs_err,rel_err,seconds"


def test_verify_bad_suite():
    assert main(["--cmd", "verify", "--suite", "nope"]) == 2


def test_strata_roundtrip(tmp_path):
    path = tmp_path / "strata.json"
    path.write_text(
        json.dumps({"label": [0, 1], "eta": [[0.1, 0.0]], "chi0": 0.0, "chi": [],
                    "zeta": [[0.0, 0.0], [0.0, 0.0], [0.2, 0.0]]})
    )
    out_path = str(tmp_path / "out.json")
    rc = main(["--cmd", "strata", "--in", str(path), "--out", out_path, "--N", "24"])
    assert rc == 0
    obj = json.load(open(out_path))
    assert obj["classified"] == [0, 1] and obj["roundtrip_ok"]


def test_tables_command(tmp_path, capsys):
    rc = main(["--cmd", "tables", "--N", "4"])
    out = capsys.readouterr().out
    assert rc == 0
    obj = json.loads(out)
    assert obj["pnk_positive_integers"] and obj["C_positive_integers"]
    assert obj["pnk"]["1"]["1"] == {"1": "1"}
    rc = main(["--cmd", "tables", "--N", "3", "--format", "csv"])
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "table,n,k,monomial,coefficient"
    assert rc == 0


def test_missing_input_is_usage_error():
    assert main(["--cmd", "synth"]) == 2


def test_bad_json_is_input_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["--cmd", "synth", "--in", str(path)]) == 2
