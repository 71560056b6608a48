import json

import numpy as np
import pytest

from halfline_kdv.cli import ManifestError, main, parse_manifest

FAST = "T = 0.1\nwindow_T0 = 0.1\nL = 20\nn_x = 256\nn_t = 64\n"


def run(tmp_path, text, *extra, name="run"):
    mf = tmp_path / f"{name}.manifest"
    mf.write_text(text)
    out = tmp_path / name
    return main(["solve", "--manifest", str(mf), "--out", str(out), *extra]), out


def test_parse_manifest_types():
    m = parse_manifest("scenario = soliton_k1\nc = 0.5\nn_t = 128\nwindow_constant = none\n"
                       "emit_field = no\n# comment\n")
    assert m.scenario == "soliton_k1" and m.scenario_params == {"c": 0.5}
    assert m.config == {"n_t": 128, "window_constant": None}
    assert m.emit["field"] is False


@pytest.mark.parametrize("text", [
    "scenario = soliton_k1\nbogus = 1\n",
    "scenario = nowhere\n",
    "k = 1\n",
    "scenario = zero\nphi = zero\n",
    "scenario = soliton_k1\nn_t = many\n",
    "scenario = soliton_k1\nemit_mass = maybe\n",
])
def test_parse_manifest_rejects(text):
    with pytest.raises(ManifestError):
        parse_manifest(text)


def test_zero_manifest(tmp_path):
    code, out = run(tmp_path, "scenario = zero\n" + FAST)
    assert code == 0
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["converged"] is True
    assert meta["constants"]["C_A"] == pytest.approx(1.5466858841559797)
    assert {"numpy", "scipy", "halfline_kdv"} <= set(meta["versions"])
    fld = np.loadtxt(out / "field.csv", delimiter=",")
    assert not np.any(fld[:, 1:])
    for name in ("boundary.csv", "mass.csv", "ledger.csv"):
        assert (out / name).exists()


def test_soliton_manifest(tmp_path):
    code, out = run(tmp_path, "scenario = soliton_k1\nT = 0.2\nwindow_T0 = 0.2\nn_t = 256\n")
    assert code == 0
    b = np.loadtxt(out / "boundary.csv", delimiter=",")
    assert b[:, 2].max() < 1e-3
    line = (out / "boundary.csv").read_text().splitlines()[1]
    assert len(line.split(",")[1].split("e")[0].replace("-", "").replace(".", "")) == 18


def test_explicit_manifest(tmp_path):
    code, out = run(tmp_path, "k = 1\nphi = gaussian: 0.5, 5.0, 1.0\nf = zero\nemit_field = false\n"
                    + FAST)
    assert code == 0
    assert not (out / "field.csv").exists()
    assert np.all(np.loadtxt(out / "mass.csv", delimiter=",")[:, 1] > 0)


@pytest.mark.parametrize("text", ["scenario = zero\ns = 0.5\n", "k = 1\nphi = wave: 1\nf = zero\n",
                                  "k = 1\nphi = gaussian: 1, 2\nf = zero\n",
                                  "scenario = zero\nc = 2\n"])
def test_invalid_manifest_exit_2(tmp_path, text, capsys):
    code, _ = run(tmp_path, text)
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_missing_manifest(tmp_path):
    assert main(["solve", "--manifest", str(tmp_path / "none"), "--out", str(tmp_path)]) == 2


def test_nonconvergence_exit_3(tmp_path):
    text = ("k = 1\nphi = gaussian: 1.0, 5.0, 1.0\nf = zero\npicard_max_iter = 2\n"
            "picard_tol = 1e-14\nmax_retries = 0\n" + FAST)
    code, out = run(tmp_path, text)
    assert code == 3
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["converged"] is False and len(meta["residual_history"][0]) == 2


def test_output_env(tmp_path, monkeypatch):
    target = tmp_path / "from_env"
    monkeypatch.setenv("HALFLINE_KDV_OUT", str(target))
    mf = tmp_path / "m.manifest"
    mf.write_text("scenario = zero\n" + FAST)
    assert main(["solve", "--manifest", str(mf)]) == 0
    assert (target / "metadata.json").exists()


def test_deterministic(tmp_path):
    text = "scenario = soliton_k2\n" + FAST
    _, a = run(tmp_path, text, name="a")
    _, b = run(tmp_path, text, name="b")
    for f in sorted(a.iterdir()):
        assert f.read_bytes() == (b / f.name).read_bytes()


def test_plotdata(tmp_path):
    _, out = run(tmp_path, "scenario = soliton_k1\n" + FAST)
    assert main(["plotdata", str(out)]) == 0
    for name in ("boundary_slice.dat", "mass_slice.dat", "snapshot_slice.dat"):
        arr = np.loadtxt(out / name)
        assert arr.ndim == 2 and arr.shape[1] == 2
    snap = np.loadtxt(out / "snapshot_slice.dat")
    fld = np.loadtxt(out / "field.csv", delimiter=",")
    np.testing.assert_array_equal(snap[:, 1], fld[:, -1])
    assert main(["plotdata", str(out), "--time", "0", "--out", str(tmp_path / "p")]) == 0
    np.testing.assert_array_equal(np.loadtxt(tmp_path / "p" / "snapshot_slice.dat")[:, 1], fld[:, 1])


def test_plotdata_bad_dir(tmp_path):
    assert main(["plotdata", str(tmp_path / "missing")]) == 2
    bad = tmp_path / "bad"
    bad.mkdir()
    (bad / "metadata.json").write_text("{not json")
    assert main(["plotdata", str(bad)]) == 2


def test_verify_suites(capsys):
    assert main(["verify", "--suite", "unknown"]) == 2
    assert main(["verify", "--suite", "airy"]) == 0
    assert "Airy constant" in capsys.readouterr().out
    assert main(["verify", "--suite", "fractional", "--threads", "2"]) == 0
    assert "[PASS]" in capsys.readouterr().out


def test_bad_arguments():
    assert main(["frobnicate"]) == 2
    assert main(["--threads", "0", "verify", "--suite", "airy"]) == 2
