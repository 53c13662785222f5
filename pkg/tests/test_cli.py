import csv
import io
import json

import pytest

from hsrc.cli import parse_element, parse_range, run
from hsrc import make_field


def run_cli(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def obj(tmp_path):
    path = tmp_path / "obj.bin"
    path.write_bytes(bytes(range(256)) * 3 + b"tail")
    return path


def encode7(capsys, obj, tmp_path):
    frags = tmp_path / "frags"
    assert run_cli(capsys, "encode", "--k", 3, "--m", 4, "--n", 7, "--in", obj, "--outdir", frags)[0] == 0
    return frags


def test_encode_decode(capsys, obj, tmp_path):
    frags = encode7(capsys, obj, tmp_path)
    files = sorted(frags.glob("*.hsrc"))
    assert len(files) == 7
    out = tmp_path / "back.bin"
    # points 1, 2, 4 are independent
    code, _, _ = run_cli(capsys, "decode", "--out", out, files[0], files[1], files[3])
    assert code == 0 and out.read_bytes() == obj.read_bytes()


def test_decode_dependent_points(capsys, obj, tmp_path):
    frags = encode7(capsys, obj, tmp_path)
    files = sorted(frags.glob("*.hsrc"))
    # points 1, w and w^4 = w + 1
    code, _, err = run_cli(capsys, "decode", "--out", tmp_path / "x", *files[:3])
    assert code == 1
    assert "unrecoverable: rank 2 < k=3" in err


@pytest.mark.parametrize("size", [0, 1, 11, 12, 13])
def test_repair_all_then_decode(capsys, tmp_path, size):
    obj = tmp_path / "o"
    obj.write_bytes(bytes((7 * i) % 256 for i in range(size)))
    frags = encode7(capsys, obj, tmp_path)
    for i in (2, 5, 6):
        (frags / f"frag-{i:04d}.hsrc").unlink()
    code, out, _ = run_cli(capsys, "repair", *sorted(frags.glob("*.hsrc")))
    assert code == 0 and len(out.split()) == 3
    back = tmp_path / "b"
    assert run_cli(capsys, "decode", "--out", back, *sorted(frags.glob("*.hsrc")))[0] == 0
    assert back.read_bytes() == obj.read_bytes()


def test_repair_impossible(capsys, obj, tmp_path):
    frags = encode7(capsys, obj, tmp_path)
    files = sorted(frags.glob("*.hsrc"))
    code, _, err = run_cli(capsys, "repair", "--outdir", tmp_path / "r", *files[:3])
    assert code == 1 and "irreparable" in err


def test_malformed_and_mixed_files(capsys, obj, tmp_path):
    frags = encode7(capsys, obj, tmp_path)
    code, _, err = run_cli(capsys, "decode", "--out", tmp_path / "x", obj)
    assert code == 2 and "magic" in err
    other = tmp_path / "other"
    run_cli(capsys, "encode", "--k", 2, "--m", 4, "--n", 7, "--in", obj, "--outdir", other)
    files = [frags / "frag-0001.hsrc", other / "frag-0002.hsrc", frags / "frag-0004.hsrc"]
    assert run_cli(capsys, "decode", "--out", tmp_path / "x", *files)[0] == 2


def test_usage_errors(capsys):
    assert run_cli(capsys, "bogus")[0] == 2
    assert run_cli(capsys, "encode", "--k", 3)[0] == 2
    assert run_cli(capsys, "pairs", "--m", 4, "--k", 3, "--n", 7, "--target", "wat")[0] == 2
    assert run_cli(capsys, "pairs", "--m", 4, "--k", 5, "--n", 7, "--target", 1)[0] == 2


def test_pairs_json(capsys):
    code, out, _ = run_cli(capsys, "pairs", "--m", 4, "--k", 3, "--n", 7, "--target", 1)
    doc = json.loads(out)
    assert code == 0 and doc["diversity"] == 3
    assert {frozenset(p) for p in doc["pair_labels"]} == {
        frozenset(("w", "w^4")), frozenset(("w^2", "w^8")), frozenset(("w^5", "w^10"))}
    doc2 = json.loads(run_cli(capsys, "pairs", "--m", 4, "--k", 3, "--n", 7, "--target", "w^2")[1])
    assert doc2["target"] == 4


def test_resilience_csv(capsys):
    argv = ["resilience", "--n", 7, "--k", 3, "--pfrag", "0.5:0.9:0.2", "--mode", "both",
            "--trials", 2000, "--seed", 4]
    code, out, _ = run_cli(capsys, *argv)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["p_frag"] for r in rows] == ["0.5", "0.7", "0.9"]
    assert list(rows[0]) == ["p_frag", "p_obj_src", "p_obj_ec", "mc_estimate", "mc_stderr",
                             "n", "k", "trials", "seed"]
    assert float(rows[0]["p_obj_src"]) == pytest.approx(0.71875)
    assert run_cli(capsys, *argv)[1] == out


def test_bandwidth_csv(capsys):
    code, out, _ = run_cli(capsys, "bandwidth", "--n", 15, "--k", 3)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 12
    assert rows[0]["x_th"] == "3"
    assert all(float(r["per_lost_eager"]) == 2 for r in rows)


def test_schedule_json(capsys):
    missing = ",".join(["1", "w"] + [f"w^{e}" for e in range(2, 7)])
    available = ",".join(f"w^{e}" for e in range(7, 15))
    code, out, _ = run_cli(capsys, "schedule", "--m", 4, "--k", 3, "--n", 15,
                           "--missing", missing, "--available", available)
    doc = json.loads(out)
    assert code == 0 and doc["makespan"] <= 3
    assert doc["baselines"] == {"hybrid": 7, "ec": 9}
    code, _, err = run_cli(capsys, "schedule", "--m", 4, "--k", 3, "--n", 15,
                           "--missing", "8", "--available", "1,2,3")
    assert code == 1 and "irreparable set" in err


def test_parsers():
    F = make_field(4)
    assert parse_element("w^4", F) == 3
    assert parse_element("w", F) == 2
    assert parse_element("0x9", F) == 9
    assert parse_range("0.5:0.95:0.05")[-1] == 0.95
    assert len(parse_range("0.5:0.95:0.05")) == 10
    assert parse_range("0.3") == [0.3]
