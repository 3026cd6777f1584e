from __future__ import annotations

import csv
import io
import json

import pytest

from rbslab import __version__, cli, rbs
from rbslab.cli import EXIT_CAP, EXIT_FAIL, EXIT_OK, EXIT_USAGE, JobSpec, main


def invoke(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_tits_report(capsys, tmp_path):
    code, out, _ = invoke(capsys, "tits", "--ring", "F2", "--rank", "3", "--cache-dir",
                          str(tmp_path))
    rep = json.loads(out)
    assert code == EXIT_OK and rep["exit_code"] == EXIT_OK
    assert rep["schema"] == "rbslab.report/1" and rep["version"] == __version__
    assert rep["payload"]["homology"]["degrees"]["1"]["betti"] == 8
    assert rep["payload"]["concentrated"]


def test_cache_hit_is_byte_identical(capsys, tmp_path):
    args = ("cofibre-check", "--ring", "F2", "--rank", "2", "--p", "2", "--max-degree", "3",
            "--cache-dir", str(tmp_path))
    _, first, _ = invoke(capsys, *args)
    _, second, _ = invoke(capsys, *args)
    a, b = json.loads(first), json.loads(second)
    assert not a["cache_hit"] and b["cache_hit"]
    assert a["payload"]["verdict"] == "equal"
    assert json.dumps(a["payload"], sort_keys=True) == json.dumps(b["payload"], sort_keys=True)
    assert a["job"] == b["job"] and a["exit_code"] == b["exit_code"]


def test_version_mismatch_recomputes(capsys, tmp_path):
    args = ("steinberg", "--ring", "F3", "--rank", "2", "--cache-dir", str(tmp_path))
    invoke(capsys, *args)
    (entry,) = tmp_path.glob("*.json")
    data = json.loads(entry.read_text())
    data["version"] = "0.0.0"
    entry.write_text(json.dumps(data))
    _, out, _ = invoke(capsys, *args)
    assert not json.loads(out)["cache_hit"]


def test_cache_key_depends_on_job_and_version():
    a = JobSpec(command="tits", ring="F2", rank=2)
    b = JobSpec(command="tits", ring="F2", rank=3)
    assert a.cache_key() != b.cache_key()
    assert a.cache_key() != a.cache_key(version="0.0.0")
    assert a.cache_key() == JobSpec(command="tits", ring="F2", rank=2).cache_key()


def test_snug_csv(capsys):
    code, out, _ = invoke(capsys, "snug", "--context", "1<2<3|4<5|6", "--word", "123456",
                          "--csv", "--no-cache")
    rows = dict(csv.reader(io.StringIO(out)))
    assert code == EXIT_OK
    assert rows["payload.partition"] == "(123)(45)(6)"


def test_output_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = invoke(capsys, "fred", "--size", "2", "--no-cache", "--output", str(target))
    assert code == EXIT_OK and out == ""
    rep = json.loads(target.read_text(encoding="utf-8"))
    assert rep["payload"]["is_poset"]
    assert len(rep["payload"]["objects"]) == 3
    assert list(tmp_path.iterdir()) == [target]


def test_ordpm_roundtrip(capsys):
    code, out, _ = invoke(capsys, "ordpm-roundtrip", "--size", "3", "--no-cache")
    assert code == EXIT_OK
    assert json.loads(out)["payload"]["mismatches"] == 0


@pytest.mark.parametrize("argv", [
    ["tits", "--rank", "2"],
    ["tits", "--ring", "Z6", "--rank", "2", "--no-cache"],
    ["tits", "--ring", "F2", "--rank", "2", "--coeff", "Fp:4"],
    ["rbs-homology", "--ring", "F2", "--rank", "2", "--max-degree", "0", "--no-cache"],
    ["cofibre-check", "--ring", "F2", "--rank", "2", "--max-degree", "2", "--no-cache"],
    ["bogus"],
])
def test_usage_errors_exit_one(capsys, argv):
    with pytest.raises(SystemExit) as e:
        raise SystemExit(main(argv))
    assert e.value.code == EXIT_USAGE
    assert capsys.readouterr().err


def test_cap_exceeded_reports_partial(capsys):
    code, out, _ = invoke(capsys, "rbs-homology", "--ring", "F3", "--rank", "2",
                          "--max-degree", "4", "--chain-cap", "50000", "--no-cache")
    p = json.loads(out)["payload"]
    assert code == EXIT_CAP
    assert p["error"]["kind"] == "cap exceeded"
    assert p["error"]["needed"] > p["error"]["cap"] == 50000
    assert p["partial"]["max_degree"] == 2
    assert p["partial"]["homology"]["degrees"]["1"]["torsion"] == [2]


def test_cofibre_disagreement_exits_two(capsys, monkeypatch):
    real = rbs.cofibre_check

    def broken(*args, **kwargs):
        r = real(*args, **kwargs)
        r.agree[0] = False
        return r

    monkeypatch.setattr(rbs, "cofibre_check", broken)
    code, out, _ = invoke(capsys, "cofibre-check", "--ring", "F2", "--rank", "2", "--p", "2",
                          "--max-degree", "2", "--no-cache")
    assert code == EXIT_FAIL
    assert json.loads(out)["payload"]["verdict"] == "different"


def test_acceptance_grid_subset(capsys):
    code, out, err = invoke(capsys, "acceptance-grid", "--criteria", "2,4,5", "--no-cache")
    assert code == EXIT_OK
    assert err.count("PASS criterion") == 3
    assert [c["number"] for c in json.loads(out)["payload"]["criteria"]] == [2, 4, 5]


def test_acceptance_grid_cap(capsys):
    code, out, err = invoke(capsys, "acceptance-grid", "--criteria", "1", "--chain-cap", "100",
                            "--no-cache")
    (c,) = json.loads(out)["payload"]["criteria"]
    assert code == EXIT_CAP
    assert "FAIL criterion  1" in err
    assert c["details"]["error"] == "cap exceeded"
    assert "RBS(F2^2)" in c["details"]["job"]


def test_atomic_write_leaves_no_temporaries(tmp_path):
    path = tmp_path / "x.json"
    cli.atomic_write(path, "one")
    cli.atomic_write(path, "two")
    assert path.read_text() == "two"
    assert list(tmp_path.iterdir()) == [path]
