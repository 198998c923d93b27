import json
import subprocess
import sys

import pytest

from planes import cli
from planes.designs import affine_to_code, prime_plane
from planes.formats import dump_vectors, format_grid_blocks, format_plane
from planes.isotopy import isotopy_classes
from planes.search import seed_b0


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bound(capsys):
    code, out, _ = run(["bound", "--order", "7"], capsys)
    assert code == 0 and "bound=49" in out
    code, out, _ = run(["bound", "--order", "3", "--brute-force"], capsys)
    assert code == 0 and "brute_force_transform=pass" in out


def test_usage_errors(capsys):
    assert run(["prove", "--bogus"], capsys)[0] == 64
    assert run([], capsys)[0] == 64
    assert run(["prove", "--order", "12", "--out", "x"], capsys)[0] == 64
    assert run(["prove", "--order", "6"], capsys)[0] == 64
    assert run(["prove", "--order", "6", "--out", "x", "--jobs", "0"], capsys)[0] == 64
    assert run(["isotopy", "--order", "9"], capsys)[0] == 64
    assert run(["--version"], capsys)[0] == 0


def test_prove_and_verify(tmp_path, capsys):
    out_dir = tmp_path / "run6"
    code, out, err = run(["prove", "--order", "6", "--catalogue", "gen", "--out", str(out_dir)], capsys)
    assert code == 0
    assert "verdict=NonExistence certificates=76" in out
    assert "event=prove_done" in err and "level=info" in err
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["verdict"] == "NonExistence"
    code, out, _ = run(["verify", "--bundle", str(out_dir)], capsys)
    assert code == 0 and out.strip().endswith("PASS")

    cert = out_dir / "class-1" / "node-0.cert.json"
    assert run(["verify", "--cert", str(cert)], capsys)[0] == 0
    obj = json.loads(cert.read_text())
    obj["tables"]["1,2"][0][0] = "12345/1"
    cert.write_text(json.dumps(obj))
    assert run(["verify", "--cert", str(cert)], capsys)[0] == 1
    assert run(["verify", "--bundle", str(out_dir)], capsys)[0] == 1
    cert.write_text("{")
    assert run(["verify", "--cert", str(cert)], capsys)[0] == 2
    assert run(["verify", "--bundle", str(tmp_path / "nothing")], capsys)[0] == 2


def test_inconclusive_exit(tmp_path, capsys):
    code, out, _ = run(["prove", "--order", "6", "--out", str(tmp_path / "r"), "--max-depth", "0"], capsys)
    assert code == 3 and "verdict=Inconclusive" in out


def test_config_and_overrides(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# settings\norder = 5\nout = {tmp_path / 'from_cfg'}\nclass = 1\nlog-level = WARNING\n")
    code, out, err = run(["--config", str(cfg), "prove", "--order", "6"], capsys)
    assert code == 0 and "verdict=Partial" in out
    assert err == ""
    manifest = json.loads((tmp_path / "from_cfg" / "manifest.json").read_text())
    assert manifest["order"] == 6 and manifest["searched_classes"] == [1]
    cfg.write_text("colour = blue\n")
    assert run(["--config", str(cfg), "prove", "--order", "6", "--out", "x"], capsys)[0] == 64
    cfg.write_text("no equals sign\n")
    assert run(["--config", str(cfg), "bound", "--order", "3"], capsys)[0] == 64
    monkeypatch.setenv("PLANES_JOBS", "many")
    assert run(["prove", "--order", "6", "--out", str(tmp_path / "j")], capsys)[0] == 64


def test_jobs_env_gives_identical_bundle(tmp_path, capsys, monkeypatch):
    from planes.certify import bundle_digest

    run(["prove", "--order", "5", "--out", str(tmp_path / "a"), "--jobs", "1"], capsys)
    monkeypatch.setenv("PLANES_JOBS", "3")
    run(["prove", "--order", "5", "--out", str(tmp_path / "b")], capsys)
    assert bundle_digest(tmp_path / "a") == bundle_digest(tmp_path / "b")


def test_catalogue_file(tmp_path, capsys):
    cat = tmp_path / "cat.txt"
    assert run(["isotopy", "--order", "5", "--out", str(cat)], capsys)[0] == 0
    code, out, _ = run(["prove", "--order", "6", "--catalogue", str(cat), "--out", str(tmp_path / "r"),
                        "--class", "1"], capsys)
    assert code == 0
    assert run(["prove", "--order", "7", "--catalogue", str(cat), "--out", str(tmp_path / "s")], capsys)[0] == 64
    assert run(["prove", "--order", "6", "--catalogue", str(cat), "--out", "x", "--class", "5"], capsys)[0] == 64


def test_isotopy_commands(tmp_path, capsys):
    code, out, err = run(["isotopy", "--order", "5"], capsys)
    assert code == 0 and out.count("\n\n") == 1 and "classes=2" in err
    code, out, _ = run(["isotopy", "--order", "5", "--enumerate"], capsys)
    assert "reduced_squares=56" in out
    f = tmp_path / "sq.txt"
    f.write_text(format_grid_blocks([[[1, 0], [0, 1]]]))
    code, out, _ = run(["isotopy", "--canonicalize", str(f)], capsys)
    assert code == 0 and out == "0 1\n1 0\n"


def test_witness_command(tmp_path, capsys):
    cat = isotopy_classes(5)
    outcomes = []
    for label in (1, 2):
        f = tmp_path / f"b0-{label}.txt"
        f.write_text(dump_vectors(seed_b0(6, cat[label]).vectors))
        cert = tmp_path / f"c{label}.json"
        code, out, _ = run(["witness", "--b0", str(f), "--out", str(cert), "--label", str(label)], capsys)
        assert code == 0
        outcomes.append("witness found" in out)
        assert cert.exists() == outcomes[-1]
    assert sorted(outcomes) == [False, True]
    bad = tmp_path / "bad.txt"
    bad.write_text("0,0,0\n0,0,1\n")
    assert run(["witness", "--b0", str(bad)], capsys)[0] == 64


def test_structures(tmp_path, capsys):
    f = tmp_path / "s.txt"
    f.write_text(format_grid_blocks([[[0, 1], [1, 0]]]))
    assert run(["structures", "--kind", "latin", str(f)], capsys)[0] == 0
    f.write_text(format_grid_blocks([[[0, 1], [0, 1]]]))
    code, out, _ = run(["structures", "--kind", "latin", str(f)], capsys)
    assert code == 1 and out.startswith("invalid")
    f.write_text("0 1\n1 q\n")
    assert run(["structures", "--kind", "latin", str(f)], capsys)[0] == 2

    f.write_text(dump_vectors(affine_to_code(prime_plane(5)).vectors))
    assert run(["structures", "--kind", "code", "--complete", str(f)], capsys)[0] == 0
    f.write_text(dump_vectors(affine_to_code(prime_plane(5)).vectors[:-1]))
    assert run(["structures", "--kind", "code", "--complete", str(f)], capsys)[0] == 1

    f.write_text(format_plane(prime_plane(3).classes))
    assert run(["structures", "--kind", "affine", str(f)], capsys)[0] == 0
    assert run(["structures", "--kind", "projective", str(f)], capsys)[0] == 0
    f.write_text(format_plane(prime_plane(3).classes[:-1]))
    assert run(["structures", "--kind", "affine", str(f)], capsys)[0] == 1
    assert run(["structures", "--kind", "mols", str(tmp_path / "none.txt")], capsys)[0] == 2


def test_internal_error_exit(monkeypatch, capsys):
    def boom(args):
        raise RuntimeError("invariant broken")

    monkeypatch.setitem(cli.COMMANDS, "bound", boom)
    code, _, err = run(["bound", "--order", "3"], capsys)
    assert code == 70 and "event=internal_error" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "planes", "bound", "--order", "2"], capture_output=True, text=True)
    assert res.returncode == 0 and "bound=4" in res.stdout
