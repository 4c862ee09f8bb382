"""End-to-end CLI behaviour: argument handling, record shapes, exit
codes, and batch determinism across worker counts."""

import json

from bundles import bundle_sig
from veerpoly.cli import main

M003 = "cPcbbbdxm_10"
TWO_TET_EO = "cPcbbbiht_12"
FOURTEEN = "oLLLLLPwQQcccefgijlmkklnnnlnewbnetafobnkj_12001112122200"


def run_cli(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def parse_summary(text):
    """The batch summary line is 'batch: {json} in 1.2s'."""
    payload = text[text.index("{"):text.rindex("}") + 1]
    return json.loads(payload)


# ------------------------------------------------------------ compute

def test_compute_full_record(capsys):
    rc, out, _ = run_cli(capsys, "compute", M003)
    assert rc == 0
    rec = json.loads(out)
    assert rec["sig"] == M003
    assert rec["b1"] == 1 and rec["torsion"] == [5] and rec["cusps"] == 1
    assert rec["edge_orientable"] is False
    assert rec["cover_cusps"] == 1
    assert rec["sigma"] == [-1]
    assert rec["theta"] is not None and rec["delta"] is not None
    # sigma exists, so the cover polynomial is skipped by design
    assert rec["delta_hat"] is None
    assert rec["verify"]["identity"] == "sign_twist"
    assert rec["verify"]["passed"] is True
    assert rec["runtime_ms"] > 0


def test_compute_default_equals_all(capsys):
    _, out_default, _ = run_cli(capsys, "compute", M003)
    _, out_all, _ = run_cli(capsys, "compute", M003, "--all")
    a, b = json.loads(out_default), json.loads(out_all)
    a.pop("runtime_ms"), b.pop("runtime_ms")
    assert a == b


def test_compute_flag_filtering(capsys):
    rc, out, _ = run_cli(capsys, "compute", M003, "--edge-orientability")
    rec = json.loads(out)
    assert rc == 0
    assert "theta" not in rec and "delta" not in rec
    assert rec["edge_orientable"] is False and rec["cover_cusps"] == 1

    rc, out, _ = run_cli(capsys, "compute", M003, "--taut")
    rec = json.loads(out)
    assert rc == 0
    assert "theta" in rec and "delta" not in rec
    assert rec["verify"]["passed"] is True


def test_compute_bad_signature_exits_one(capsys):
    rc, out, err = run_cli(capsys, "compute", "!!bad")
    assert rc == 1
    assert out == ""
    assert "error:" in err


# --------------------------------------------------------------- fill

def test_fill_fibre_slope(capsys):
    rc, out, _ = run_cli(capsys, "fill", M003, "--slopes", "c0:1/2")
    assert rc == 0
    rec = json.loads(out)
    assert rec["slopes"] == {"c0": "1/2"}
    assert rec["s"] == 1
    assert rec["boundary_empty"] is True
    assert rec["sigma_N"] == [-1]
    assert rec["case"] == "II(b)"
    assert rec["division_ok"] is True
    assert rec["equality_expected"] is True
    assert rec["delta_N"] is not None
    assert rec["hypotheses"] == {"sigma_N_exists": True, "trivial_cores": []}
    assert rec["cores"]["c0"]["nontrivial"] is True


def test_fill_empty_slopes_reports_unfilled_identity(capsys):
    rc, out, _ = run_cli(capsys, "fill", M003, "--slopes", "")
    assert rc == 0
    rec = json.loads(out)
    assert rec["slopes"] == {}
    assert rec["case"] == "II(a)"
    assert rec["division_ok"] is True and rec["equality_expected"] is True
    # nothing filled: the specialised polynomials are the originals
    assert rec["i_theta"] is not None and rec["i_delta"] is not None


def test_fill_without_sign_vector_reports_hypothesis(capsys):
    rc, out, _ = run_cli(capsys, "fill", FOURTEEN, "--slopes", "c0:1/1")
    assert rc == 0
    rec = json.loads(out)
    assert rec["hypotheses"]["sigma_N_exists"] is False
    assert rec["sigma_N"] is None
    assert rec["case"] is None and rec["delta_N"] is None
    assert rec["i_theta"] is not None


def test_fill_rank_zero_exits_one(capsys):
    rc, _, err = run_cli(capsys, "fill", M003, "--slopes", "c0:1/0")
    assert rc == 1
    assert "kills all free homology" in err


def test_fill_bad_slope_exits_one(capsys):
    rc, _, err = run_cli(capsys, "fill", M003, "--slopes", "c0:2/4")
    assert rc == 1
    assert "not primitive" in err


# -------------------------------------------------------------- batch

def write_census(path, sigs):
    path.write_text("# test census\n" + "".join(s + "\n" for s in sigs))


def test_batch_stdout_and_summary(capsys, tmp_path):
    census = tmp_path / "census.txt"
    write_census(census, [M003, TWO_TET_EO, "!!bad"])
    rc, out, err = run_cli(capsys, "batch", str(census))
    assert rc == 0
    lines = out.splitlines()
    assert len(lines) == 3
    recs = [json.loads(ln) for ln in lines]
    # input order is preserved
    assert [r["sig"] for r in recs] == [M003, TWO_TET_EO, "!!bad"]
    assert "error" in recs[2]
    # default batch skips the polynomials
    assert recs[0]["theta"] is None and recs[0]["verify"] is None
    summary = parse_summary(err)
    assert summary["total"] == 3 and summary["errors"] == 1
    assert summary["edge_orientable"] == 1
    assert summary["not_edge_orientable"] == 1
    assert summary["cover_same_cusps"] == 1
    assert summary["cover_double_cusps"] == 0


def test_batch_verify_summary(capsys, tmp_path):
    census = tmp_path / "census.txt"
    write_census(census, [M003, TWO_TET_EO])
    rc, out, err = run_cli(capsys, "batch", str(census), "--verify")
    assert rc == 0
    recs = [json.loads(ln) for ln in out.splitlines()]
    assert all(r["verify"]["passed"] for r in recs)
    summary = parse_summary(err)
    assert summary["verify_passed"] == 2 and summary["verify_failed"] == 0


def test_batch_output_identical_across_worker_counts(capsys, tmp_path,
                                                     monkeypatch):
    census = tmp_path / "census.txt"
    write_census(census, [M003, TWO_TET_EO, bundle_sig("RLL", -1), "!!bad"])
    out1, out2, out3 = (tmp_path / n for n in ("a.jsonl", "b.jsonl",
                                               "c.jsonl"))
    rc, stdout, _ = run_cli(capsys, "batch", str(census), "--verify",
                            "--jobs", "1", "--out", str(out1))
    assert rc == 0
    # with --out the summary goes to stdout instead
    assert "batch:" in stdout
    rc, _, _ = run_cli(capsys, "batch", str(census), "--verify",
                       "--jobs", "2", "--out", str(out2))
    assert rc == 0
    assert out1.read_bytes() == out2.read_bytes()
    # worker count can also come from the environment
    monkeypatch.setenv("VEERPOLY_JOBS", "2")
    rc, _, _ = run_cli(capsys, "batch", str(census), "--verify",
                       "--out", str(out3))
    assert rc == 0
    assert out1.read_bytes() == out3.read_bytes()


def test_batch_missing_file_exits_one(capsys, tmp_path):
    rc, _, err = run_cli(capsys, "batch", str(tmp_path / "absent.txt"))
    assert rc == 1
    assert "error:" in err
