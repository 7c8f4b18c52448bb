import importlib
import json

import pytest

from qldpctoolkit.cli import main


def _toric_flags(tmp_path):
    return [
        "--classical", "repetition",
        "--ell", "4",
        "--bundle", str(tmp_path / "bundle.json"),
        "--trials-out", str(tmp_path / "trials.jsonl"),
        "--summary-out", str(tmp_path / "summary.csv"),
    ]


def test_build_then_params(tmp_path, capsys):
    assert main(["build", *_toric_flags(tmp_path)]) == 0
    assert (tmp_path / "bundle.json").is_file()
    capsys.readouterr()
    assert main(["params", *_toric_flags(tmp_path)]) == 0
    info = json.loads(capsys.readouterr().out)
    assert (info["n"], info["k"], info["distance"]) == (32, 2, 4)


def test_bench(tmp_path):
    flags = _toric_flags(tmp_path) + ["--weights", "0,1", "--trials", "2", "--sides", "z,x"]
    assert main(["-v", "bench", *flags]) == 0
    assert len((tmp_path / "trials.jsonl").read_text().splitlines()) == 8
    assert (tmp_path / "summary.csv").is_file()


def test_decode(tmp_path, capsys):
    flags = _toric_flags(tmp_path)
    main(["build", *flags])
    syndrome = tmp_path / "s.json"
    syndrome.write_text("[]")
    capsys.readouterr()
    assert main(["decode", str(syndrome), *flags]) == 0
    assert json.loads(capsys.readouterr().out) == {"side": "Z", "status": "ok", "weight": 0, "support": []}


def test_config_file_and_bad_args(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"classical": "repetition", "ell": 4, "mode": "hgp"}))
    assert main(["build", "--config", str(config), "--bundle", str(tmp_path / "b.json")]) == 0
    with pytest.raises(SystemExit):
        main(["bench", "--mode", "toric"])
    with pytest.raises(SystemExit):
        main([])


def test_params_rebuilds_when_the_bundle_is_for_another_code(tmp_path, capsys):
    bundle = ["--classical", "repetition", "--bundle", str(tmp_path / "b.json")]
    assert main(["build", "--ell", "3", *bundle]) == 0
    capsys.readouterr()
    assert main(["params", "--ell", "5", *bundle]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["n"] == 2 * 5 * 5


@pytest.mark.parametrize("module", ["qldpctoolkit.bundle", "qldpctoolkit.cli", "qldpctoolkit.harness"])
def test_entry_modules_are_documented(module):
    assert importlib.import_module(module).__doc__.strip()
