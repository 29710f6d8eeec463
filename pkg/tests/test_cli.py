import contextlib
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from abpkit.cli import run

GOLDEN = Path(__file__).parent / "golden"


def cli(*argv, stdin=""):
    """Run the CLI in-process; returns (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    old_in = sys.stdin
    sys.stdin = io.StringIO(stdin)
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = run(list(argv))
    finally:
        sys.stdin = old_in
    return code, out.getvalue(), err.getvalue()


def pipe(*stages):
    text = ""
    for argv in stages:
        code, text, err = cli(*argv, stdin=text)
        assert code == 0, err
    return text


def test_mv3_pipeline_reproduces_golden_block():
    text = pipe(["generate", "mv-det", "--m", "3"], ["convert", "abp-to-det"], ["emit", "--format", "text"])
    assert text.split() == (GOLDEN / "mv_det_m3.txt").read_text().split()
    assert text == (GOLDEN / "mv_det_m3.txt").read_text()


def test_emit_matrix_flag():
    code, text, _ = cli("generate", "mv-det", "--m", "4", "--emit-matrix")
    assert code == 0 and text == (GOLDEN / "mv_det_m4.txt").read_text()


def test_grenet_verify_exit_zero():
    himm = pipe(["generate", "grenet-perm", "--m", "5"])
    code, out, err = cli("verify", "--target", "perm", "--m", "5", "--seed", "1", stdin=himm)
    assert code == 0
    assert json.loads(out)["equal"] is True
    assert "seed=1" in err and "trials=20" in err


def test_mv3_is_not_perm3():
    abp = pipe(["generate", "mv-det", "--m", "3"])
    code, out, _ = cli("verify", "--target", "perm", "--m", "3", stdin=abp)
    doc = json.loads(out)
    assert code == 1 and doc["equal"] is False and len(doc["witness"]) == 9


@pytest.mark.parametrize("m", [2, 3])
def test_detexpr_verify_uses_sign(m):
    det = pipe(["generate", "mv-det", "--m", str(m)], ["convert", "abp-to-det"])
    assert cli("verify", "--target", "det", "--m", str(m), stdin=det)[0] == 0
    folded = pipe(["generate", "mv-det", "--m", str(m)], ["convert", "abp-to-det", "--fold-sign"])
    assert json.loads(folded)["sign"] == 1
    assert cli("verify", "--target", "det", "--m", str(m), stdin=folded)[0] == 0


@pytest.mark.parametrize(
    "convert",
    ["dlabp-to-himm", "labp-to-imm", "to-matrix-power"],
)
def test_conversions_verify(convert):
    out = pipe(["generate", "grenet-perm", "--m", "3", "--dlabp"], ["convert", convert])
    assert cli("verify", "--target", "perm", "--m", "3", stdin=out)[0] == 0


def test_himm_dlabp_round_trip():
    himm = pipe(["generate", "grenet-perm", "--m", "4"])
    back = cli("convert", "dlabp-to-himm", stdin=cli("convert", "himm-to-dlabp", stdin=himm)[1])[1]
    assert json.loads(back)["mats"] == json.loads(himm)["mats"]


def test_analyze_and_transform_chain():
    std = pipe(["generate", "mv-det", "--m", "3"], ["convert", "abp-to-det"], ["transform", "--standardize"])
    code, out, _ = cli("analyze", "det-expr", "--lemma", "--profile", "--rational", "--witness", "y11,y22,y33", stdin=std)
    doc = json.loads(out)
    assert code == 0
    assert doc["lemma"]["prop_I"] and doc["lemma"]["prop_II"] and doc["lemma"]["holds"]
    assert doc["profile"]["is_standard"] and doc["profile"]["rational_ranks_agree"]
    assert doc["witness"] is not None


def test_restrict_chain():
    out = pipe(
        ["generate", "mv-det", "--m", "4"],
        ["convert", "abp-to-det", "--target", "det"],
        ["transform", "--restrict", "--seed", "5"],
    )
    assert json.loads(out)["m"] == 3
    assert cli("verify", "--target", "det", "--m", "3", stdin=out)[0] == 0


def test_homogenize_and_analyze_abp():
    out = pipe(["generate", "mv-det", "--m", "3"], ["transform", "--homogenize", "3"], ["analyze", "abp"])
    doc = json.loads(out)
    assert doc["is_degree_layered"] and doc["degree"] == 3


def test_certify_binomial():
    himm = pipe(["generate", "grenet-perm", "--m", "4"])
    code, out, err = cli("certify", "binomial", "--target", "perm", "--m", "4", stdin=himm)
    assert code == 0 and json.loads(out)["total"] == 15
    assert "layer  vertices  rank  bound  holds" in err


def test_certify_nosqueeze_and_locality_error():
    dl = pipe(["generate", "grenet-perm", "--m", "4", "--dlabp"])
    code, out, _ = cli("certify", "nosqueeze", "--rows", "1,2,3", "--cols", "1,2", "--prefix-layers", "2", stdin=dl)
    assert code == 0 and json.loads(out)["certificates"][0]["bound"] == 3
    code, _, err = cli("certify", "nosqueeze", "--rows", "1,2", "--cols", "1,3", "--prefix-layers", "2", stdin=dl)
    assert code == 2 and "edge layers [3]" in err


def test_check_multilinear():
    himm = pipe(["generate", "grenet-perm", "--m", "3"])
    assert cli("check", "multilinear", "--grouping", "column", stdin=himm)[0] == 0
    assert cli("check", "multilinear", "--grouping", "row", stdin=himm)[0] == 1


@pytest.mark.parametrize(
    "argv, stdin",
    [
        (["bogus"], ""),
        (["generate", "mv-det"], ""),
        (["emit"], "{not json"),
        (["emit"], '{"kind": "abp"}'),
        (["analyze", "det-expr", "--lemma"], None),
        (["generate", "grenet-perm", "--m", "30"], ""),
        (["verify", "--target", "det", "--m", "3", "--prime", "15"], None),
        (["emit", "--format", "text"], "abp"),
    ],
)
def test_usage_errors_exit_two(argv, stdin):
    if stdin is None:
        stdin = pipe(["generate", "mv-det", "--m", "3"], ["convert", "abp-to-det"])
        stdin = json.dumps({**json.loads(stdin), "lambda": [[1] + [0] * 8] + json.loads(stdin)["lambda"][1:]})
    elif stdin == "abp":
        stdin = pipe(["generate", "mv-det", "--m", "3"])
    code, _, err = cli(*argv, stdin=stdin)
    assert code == 2
    assert err


def test_reproduce_paper(tmp_path):
    code, _, _ = cli("reproduce-paper", "--out", str(tmp_path))
    assert code == 0
    for m in (3, 4, 5):
        assert (tmp_path / f"mv_det_m{m}.txt").read_text() == (GOLDEN / f"mv_det_m{m}.txt").read_text()


def test_outputs_are_byte_identical_across_runs(tmp_path):
    runs = []
    for k in range(2):
        path = tmp_path / f"run{k}.json"
        cli("generate", "mv-det", "--m", "4", "--output", str(path))
        r = cli("transform", "--restrict", "--seed", "9", "--input", str(path))
        runs.append((path.read_bytes(), r[1]))
    assert runs[0] == runs[1]


def test_env_seed_and_prime(monkeypatch):
    monkeypatch.setenv("ABPKIT_SEED", "17")
    code, _, err = cli("generate", "mv-det", "--m", "2")
    assert code == 0 and "seed=17" in err
    code, _, err = cli("generate", "mv-det", "--m", "2", "--prime", "1000000007")
    assert "prime=1000000007" in err


def test_help_lists_subcommands():
    code, out, _ = cli("--help")
    assert code == 0
    for name in ("generate", "convert", "verify", "analyze", "transform", "certify", "emit", "reproduce-paper"):
        assert name in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "abpkit.cli", "generate", "mv-det", "--m", "3", "--emit-matrix"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert proc.stdout == (GOLDEN / "mv_det_m3.txt").read_text()
