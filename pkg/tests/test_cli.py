import subprocess
import sys

import pytest

from codeclass.cli import main
from codeclass.clf import read_clf, write_clf
from codeclass.code import LinearCode


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def value(out, key):
    for tok in out.split():
        if tok.startswith(key + "="):
            return tok.split("=", 1)[1]
    raise KeyError(key)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "codeclass", "classify", "--q", "2", "--n", "7", "--k", "4", "--dmin", "3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "classes=1" in proc.stdout


@pytest.mark.parametrize("algo", ["aug-col", "aug-row"])
def test_classify_writes_list(tmp_path, capsys, algo):
    out = tmp_path / "c.clf"
    code, text, _ = run(capsys, "classify", "--q", "2", "--n", "10", "--k", "4", "--dmin", "3", "--algo", algo, "--out", str(out))
    assert code == 0
    assert value(text, "classes") == "76"
    lst = read_clf(out)
    assert len(lst.codes) == 76
    assert all(c.min_distance >= 3 and c.dual_distance >= 2 for c in lst.codes)


def test_classify_lattice(capsys):
    code, text, _ = run(capsys, "classify", "--q", "3", "--n", "12", "--k", "2", "--delta", "9", "--algo", "lattice")
    assert code == 0 and value(text, "classes") == "1"
    code, text, _ = run(capsys, "classify", "--q", "2", "--n", "9", "--k", "3", "--dmin", "3", "--ddual", "3", "--algo", "lattice")
    code2, text2, _ = run(capsys, "classify", "--q", "2", "--n", "9", "--k", "3", "--dmin", "3", "--ddual", "3")
    assert code == code2 == 0 and value(text, "classes") == value(text2, "classes")


def test_even_flag(capsys):
    _, a, _ = run(capsys, "classify", "--q", "2", "--n", "8", "--k", "4", "--even")
    _, b, _ = run(capsys, "classify", "--q", "2", "--n", "8", "--k", "4", "--delta", "2")
    assert value(a, "classes") == value(b, "classes")


@pytest.mark.parametrize(
    "argv",
    [
        ["classify", "--q", "2", "--n", "3", "--k", "4"],
        ["classify", "--q", "5", "--n", "3", "--k", "2"],
        ["classify", "--n", "3", "--k", "2"],
        ["classify", "--q", "2", "--n", "3", "--k", "2", "--selforth", "hermitian"],
        ["classify", "--q", "2", "--n", "3", "--k", "2", "--resume"],
        ["classify", "--q", "2", "--n", "3", "--k", "2", "--shard", "3/2"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors_exit_1(capsys, argv):
    with_exit = None
    try:
        with_exit = main(argv)
    except SystemExit as exc:  # argparse help paths
        with_exit = exc.code
    assert with_exit == 1


def test_runtime_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.clf"
    bad.write_text("CLF 1 q=2\ncode n=3 k=1\n1x1\n")
    code, _, err = run(capsys, "analyze", str(bad), "--metric", "weight-enumerator")
    assert code == 2 and "line 3" in err
    code, _, _ = run(capsys, "analyze", str(tmp_path / "missing.clf"), "--metric", "aut-order")
    assert code == 2
    code, _, err = run(capsys, "classify", "--q", "2", "--n", "40", "--k", "5", "--dmin", "3", "--algo", "aug-row")
    assert code == 2 and "limit" in err


def test_extend_example(tmp_path, capsys):
    src = tmp_path / "seed.clf"
    write_clf(src, 2, [LinearCode.from_rows("111111", 2)])
    out = tmp_path / "ext.clf"
    code, text, _ = run(capsys, "extend", str(src), "--r", "1", "--delta", "2", "--a", "2", "--b", "3", "--show-solutions", "--out", str(out))
    assert code == 0
    assert "seed 0: x=(3,1,3) y=(1,0,0)" in text
    assert value(text, "solutions") == "1" and value(text, "classes") == "1"
    assert read_clf(out).codes[0].weight_enumerator == (1, 0, 0, 0, 2, 0, 1, 0)
    write_clf(src, 2, [LinearCode.from_rows("1111", 2)])
    code, text, _ = run(capsys, "extend", str(src), "--r", "3", "--delta", "2", "--a", "2", "--b", "3")
    assert code == 0 and value(text, "classes") == "0"


def test_extend_rejects_seed_outside_window(tmp_path, capsys):
    src = tmp_path / "seed.clf"
    write_clf(src, 2, [LinearCode.from_rows("111", 2)])
    code, _, err = run(capsys, "extend", str(src), "--r", "1", "--delta", "2", "--a", "1", "--b", "2")
    assert code == 2 and "seed 0" in err


def test_analyze_metrics(tmp_path, capsys):
    src = tmp_path / "c.clf"
    write_clf(src, 2, [LinearCode.from_rows("1000011 0100101 0010110 0001111", 2), LinearCode.from_rows("110 011", 2)])
    code, text, _ = run(capsys, "analyze", str(src), "--metric", "minimal-codewords")
    assert code == 0 and "count=2 min=3 max=14" in text and "min_projective=3" in text
    code, text, _ = run(capsys, "analyze", str(src), "--metric", "aut-order")
    assert code == 0 and "max=168" in text
    code, text, _ = run(capsys, "analyze", str(src), "--metric", "self-orthogonality")
    assert code == 0 and "euclidean=False" in text


def test_shard_and_merge_round_trip(tmp_path, capsys):
    full = tmp_path / "full.clf"
    run(capsys, "classify", "--q", "2", "--n", "9", "--k", "4", "--dmin", "2", "--out", str(full))
    outdir = tmp_path / "shards"
    code, _, _ = run(capsys, "shard", str(full), "--total", "3", "--outdir", str(outdir))
    assert code == 0
    parts = sorted(outdir.glob("shard-*-of-3.clf"))
    assert len(parts) == 3
    merged = tmp_path / "merged.clf"
    code, text, _ = run(capsys, "merge", *map(str, parts), "--out", str(merged))
    assert code == 0
    assert read_clf(merged).codes == read_clf(full).codes
    code, _, err = run(capsys, "merge", *map(str, parts[:2]), "--out", str(tmp_path / "m2.clf"))
    assert code == 2 and "incomplete merge" in err and "[2]" in err


@pytest.mark.parametrize("algo", ["aug-col", "aug-row", "lattice"])
def test_sharded_runs_merge_to_full(tmp_path, capsys, algo):
    base = ["classify", "--q", "2", "--n", "10", "--k", "4", "--dmin", "4", "--algo", algo]
    if algo == "lattice":
        base += ["--delta", "2"]
    else:
        base += ["--even"]
    full = tmp_path / "full.clf"
    run(capsys, *base, "--out", str(full))
    parts = []
    for i in range(3):
        p = tmp_path / f"p{i}.clf"
        assert run(capsys, *base, "--shard", f"{i}/3", "--out", str(p))[0] == 0
        parts.append(str(p))
    merged = tmp_path / "m.clf"
    assert run(capsys, "merge", *parts, "--out", str(merged))[0] == 0
    a, b = read_clf(merged).codes, read_clf(full).codes
    assert a == b and len(a) > 0
    # rerunning is byte-identical
    again = tmp_path / "m2.clf"
    run(capsys, "merge", *reversed(parts), "--out", str(again))
    assert again.read_text() == merged.read_text()


def test_workers_match_sequential(tmp_path, capsys):
    a, b = tmp_path / "a.clf", tmp_path / "b.clf"
    args = ["classify", "--q", "3", "--n", "8", "--k", "3", "--dmin", "4"]
    run(capsys, *args, "--out", str(a))
    assert run(capsys, *args, "--workers", "2", "--out", str(b))[0] == 0
    assert read_clf(a).codes == read_clf(b).codes


def test_checkpoint_and_resume(tmp_path, capsys):
    ck = tmp_path / "ck"
    args = ["classify", "--q", "2", "--n", "11", "--k", "4", "--dmin", "3"]
    full = tmp_path / "full.clf"
    run(capsys, *args, "--checkpoint", str(ck), "--out", str(full))
    levels = sorted(ck.glob("level-*.clf"), key=lambda p: int(p.stem.split("-")[1]))
    assert levels and levels[-1].name == "level-11.clf"
    # simulate an interruption after level 9
    for p in levels:
        if int(p.stem.split("-")[1]) > 9:
            p.unlink()
    resumed = tmp_path / "resumed.clf"
    code, text, _ = run(capsys, *args, "--checkpoint", str(ck), "--resume", "--out", str(resumed))
    assert code == 0
    assert read_clf(resumed).codes == read_clf(full).codes
