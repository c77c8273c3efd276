import json
import subprocess
import sys

import pytest

from entropylab.cli import EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, main, parse_k_range
from entropylab.compressors import lz78_parse
from entropylab.core import ingest


@pytest.fixture
def toronto_file(tmp_path):
    p = tmp_path / "toronto.txt"
    p.write_bytes(b"TORONTO")
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_k_range():
    assert parse_k_range("0..3") == [0, 1, 2, 3]
    assert parse_k_range("2") == [2]
    assert parse_k_range("0,2,5") == [0, 2, 5]


def test_entropy_toronto(capsys, toronto_file):
    code, out, _ = run(capsys, "entropy", "--k", "0..3", toronto_file, "--no-timestamp")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert "generated_at" not in doc
    (result,) = doc["results"]
    values = [row["H_k"] for row in result["profile"]]
    assert values == pytest.approx([1.8424, 0.2857, 0, 0], abs=1e-4)
    assert result["n"] == 7 and result["sigma"] == 256


def test_entropy_explicit_alphabet_table_bits(capsys, toronto_file, tmp_path):
    alpha = tmp_path / "alpha.txt"
    alpha.write_text("N\nO\nR\nT\n")
    code, out, _ = run(capsys, "entropy", "--k", "1", "--alphabet-file", alpha, toronto_file)
    row = json.loads(out)["results"][0]["profile"][0]
    assert row["table_bits"] == 16 * 3 + 144
    assert "generated_at" in json.loads(out)


def test_entropy_csv_and_text(capsys, toronto_file):
    code, out, _ = run(capsys, "entropy", "--k", "0..1", "--format", "csv", toronto_file)
    lines = out.splitlines()
    assert lines[0] == "file,n,sigma,k,H_k,table_bits"
    assert lines[2].split(",")[4] == "0.285714285714"
    code, out, _ = run(capsys, "entropy", "--format", "text", toronto_file)
    assert "H_0 = 1.84237099318" in out


def test_entropy_errors(capsys, tmp_path):
    empty = tmp_path / "empty"
    empty.write_bytes(b"")
    code, _, err = run(capsys, "entropy", empty)
    assert code == EXIT_IO and "empty input" in err
    code, _, err = run(capsys, "entropy", tmp_path / "missing")
    assert code == EXIT_IO
    bad = tmp_path / "f"
    bad.write_bytes(b"TOXIC")
    alpha = tmp_path / "alpha"
    alpha.write_text("T\nO\n")
    code, _, err = run(capsys, "entropy", "--alphabet-file", alpha, bad)
    assert code == EXIT_IO and "offset 2" in err
    code, _, _ = run(capsys, "entropy", "--k", "x..y", bad)
    assert code == EXIT_USAGE


def test_multiple_files_keep_input_order(capsys, tmp_path):
    paths = []
    for i, text in enumerate([b"AAAA", b"ABAB", b"ABCD"]):
        p = tmp_path / f"f{i}"
        p.write_bytes(text)
        paths.append(p)
    code, out, _ = run(capsys, "entropy", "--jobs", "3", "--no-timestamp", *paths)
    files = [r["file"] for r in json.loads(out)["results"]]
    assert files == [str(p) for p in paths]


def test_generate_de_bruijn(capsys, tmp_path):
    out = tmp_path / "db.txt"
    code, _, _ = run(capsys, "generate", "de-bruijn", "--sigma", "2", "--k", "10", "-o", out)
    assert code == EXIT_OK
    assert len(out.read_bytes()) == 1033
    meta = json.loads((tmp_path / "db.txt.json").read_text())
    assert meta["spec"] == {"kind": "de-bruijn", "sigma": 2, "k": 10}


def test_generate_champernowne_million(capsys, tmp_path):
    out = tmp_path / "ch.txt"
    code, _, _ = run(capsys, "generate", "champernowne", "--base", "10", "--n", "1000000", "-o", out)
    data = out.read_bytes()
    assert code == EXIT_OK and len(data) == 10**6
    assert data.startswith(b"123456789101112")
    # 1..99999 fill 488889 digits, so 100000 starts right after
    assert data[488889:488895] == b"100000"


def test_generate_markov_same_seed_identical(capsys, tmp_path):
    corpus = tmp_path / "corpus.txt"
    corpus.write_bytes(b"the rain in spain stays mainly in the plain " * 10)
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        code, _, _ = run(capsys, "generate", "markov-sample", "--corpus", corpus, "--k", "2",
                         "--n", "300", "--seed", "5", "--no-timestamp", "-o", out)
        assert code == EXIT_OK
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert (tmp_path / "a.json").read_text() == (tmp_path / "b.json").read_text()


def test_generate_from_config(capsys, tmp_path):
    cfg = tmp_path / "gen.json"
    cfg.write_text(json.dumps({"kind": "copeland-erdos", "base": 10, "n": 8}))
    out = tmp_path / "ce.txt"
    code, _, _ = run(capsys, "generate", "--config", cfg, "-o", out)
    assert code == EXIT_OK and out.read_bytes() == b"23571113"


def test_generate_errors(capsys, tmp_path, monkeypatch):
    out = tmp_path / "x"
    code, _, err = run(capsys, "generate", "de-bruijn", "--sigma", "1", "--k", "3", "-o", out)
    assert code == EXIT_USAGE
    monkeypatch.setenv("ENTROPY_LAB_MEM_CAP", "1000")
    code, _, err = run(capsys, "generate", "de-bruijn", "--sigma", "2", "--k", "12", "-o", out)
    assert code == EXIT_USAGE and "--sigma or --k" in err


@pytest.mark.parametrize("algo", ["lz77", "lz78", "order0", "bwt"])
def test_compress_decompress_roundtrip(capsys, tmp_path, algo):
    src = tmp_path / "src.bin"
    src.write_bytes(bytes(range(256)) * 3 + b"compress me twice " * 20)
    blob = tmp_path / "src.elab"
    code, out, _ = run(capsys, "compress", "--algo", algo, "--report", src, "-o", blob)
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["accounting_check"] is True
    assert sum(report["sections"].values()) == report["payload_bits"]
    restored = tmp_path / "restored.bin"
    code, _, _ = run(capsys, "decompress", blob, "-o", restored)
    assert code == EXIT_OK and restored.read_bytes() == src.read_bytes()


def test_compress_lz78_de_bruijn_has_more_phrases(capsys, tmp_path):
    db = tmp_path / "db.txt"
    run(capsys, "generate", "de-bruijn", "--sigma", "2", "--k", "10", "-o", db)
    const = tmp_path / "const.txt"
    const.write_bytes(b"0" * len(db.read_bytes()))
    counts = []
    for path in (db, const):
        code, out, _ = run(capsys, "compress", "--algo", "lz78", path)
        counts.append(json.loads(out)["stats"]["phrase_count"])
    assert counts[0] > counts[1]
    assert counts[0] == len(lz78_parse(ingest(db.read_bytes())))


def test_decompress_corrupt_blob(capsys, tmp_path):
    src = tmp_path / "s"
    src.write_bytes(b"hello hello hello")
    run(capsys, "compress", "--algo", "bwt", src)
    raw = bytearray((tmp_path / "s.elab").read_bytes())
    raw[0] ^= 0xFF
    (tmp_path / "bad.elab").write_bytes(raw)
    code, _, err = run(capsys, "decompress", tmp_path / "bad.elab")
    assert code == EXIT_IO and "container" in err and "offset" in err


def test_verify_manzini(capsys, toronto_file):
    code, out, _ = run(capsys, "verify", "--bound", "manzini", "--k", "0..2", toronto_file, "--strict")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert [r["parameters"]["k"] for r in doc["reports"]] == [0, 1, 2]
    assert all(r["satisfied"] for r in doc["reports"])
    assert doc["reference_mu"] == 0.01


def test_verify_klv_zeta_term(capsys, toronto_file):
    code, out, _ = run(capsys, "verify", "--bound", "klv", "--k", "1", "--lambda", "2", toronto_file)
    (report,) = json.loads(out)["reports"]
    assert report["terms"]["zeta"] / 7 == pytest.approx(0.718029758223, abs=1e-9)


def test_verify_noiseless_random(capsys):
    code, out, _ = run(capsys, "verify", "--bound", "noiseless", "--random", "100", "--strict")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["summary"] == {"reports": 100, "violations": 0}


def test_verify_strict_failure_exit_code(capsys, toronto_file):
    # lambda large, c = 0 and k past n: the formula collapses to ~0 bits
    argv = ["verify", "--bound", "klv", "--k", "9", "--lambda", "100", "--c", "0", toronto_file]
    code, out, _ = run(capsys, *argv)
    assert code == EXIT_OK and json.loads(out)["summary"]["violations"] == 1
    code, _, _ = run(capsys, *argv, "--strict")
    assert code == EXIT_VERIFY


def test_verify_rejects_bad_lambda(capsys, toronto_file):
    code, _, err = run(capsys, "verify", "--bound", "klv", "--lambda", "1", toronto_file)
    assert code == EXIT_USAGE and "greater than 1" in err


def test_reports_deterministic_without_timestamp(capsys, toronto_file):
    argv = ["verify", "--bound", "manzini", toronto_file, "--no-timestamp"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_twelve_significant_digits(capsys, toronto_file):
    code, out, _ = run(capsys, "entropy", toronto_file)
    assert '"H_k": 1.84237099318' in out


def test_convergence_csv(capsys):
    code, out, _ = run(capsys, "convergence", "constant", "--sizes", "10,100", "--format", "csv")
    assert code == EXIT_OK and out.startswith("n,H_k,lz77_ratio,lz78_ratio,bwt_ratio\n")


def test_module_entry_point(toronto_file):
    proc = subprocess.run([sys.executable, "-m", "entropylab", "entropy", str(toronto_file), "--k", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"][0]["profile"][0]["H_k"] == pytest.approx(2 / 7)
    proc = subprocess.run([sys.executable, "-m", "entropylab", "frobnicate"], capture_output=True)
    assert proc.returncode == EXIT_USAGE
