import json
import subprocess
import sys

import pytest

from torelli_cert import __version__
from torelli_cert.certificate import KEY_ORDER, Certificate, emit, load
from torelli_cert.cli import (
    EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_PASS, EXIT_USAGE, PROPOSITIONS, SweepSpec,
    certificate_filename, exit_code, main, read_config, run, sweep, sweep_jobs,
)
from torelli_cert.errors import CertificateFormatError, ParameterError, UsageError
from torelli_cert.symplectic import SurfaceParams


def test_run_tau_closed_g3():
    cert = run("tau-surjectivity", SurfaceParams(3, 1, "closed"))
    assert cert.passed and cert.metrics["rank"] == 14


def test_run_lantern_has_transcript():
    cert = run("lantern")
    assert cert.passed and "T_x.x1" in cert.transcript


def test_run_errors():
    with pytest.raises(UsageError):
        run("prop-9.9", SurfaceParams(3, 1))
    with pytest.raises(ParameterError, match="1 <= k < g-1"):
        run("tau-surjectivity", SurfaceParams(3, 2, "closed"))
    with pytest.raises(ParameterError):
        run("bcj-b2")


@pytest.mark.parametrize("genus", range(3, 7))
def test_boundary_twist_checks(genus):
    cert = run("boundary-twist-checks", SurfaceParams(genus, 1, "bordered"))
    assert cert.passed and cert.metrics["tau_terms"] == 0
    assert cert.metrics["sigma_terms"] == genus


def test_emit_round_trip(tmp_path):
    cert = run("factorization-3.2", SurfaceParams(4, 1, "punctured"))
    path = tmp_path / "c.json"
    emit(cert, path)
    text = path.read_text()
    assert text.endswith("\n")
    assert list(json.loads(text)) == list(KEY_ORDER)
    assert load(path) == cert
    first = path.read_bytes()
    emit(cert, path)
    assert path.read_bytes() == first


def test_emit_unwritable_location(tmp_path):
    cert = run("lantern")
    target = tmp_path / "missing" / "c.json"
    with pytest.raises(OSError, match="c.json"):
        emit(cert, target)
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError):
        emit(cert, blocker / "c.json")


def test_reader_rejects_unknown_fields():
    data = json.loads(run("lantern").to_json())
    data["extra"] = 1
    with pytest.raises(CertificateFormatError, match="extra"):
        Certificate.from_dict(data)
    data.pop("extra")
    data["schema_version"] = 2
    with pytest.raises(CertificateFormatError):
        Certificate.from_dict(data)
    with pytest.raises(CertificateFormatError):
        Certificate.from_json('{"proposition": "a", "proposition": "b"}')


def test_certificate_invariants():
    with pytest.raises(ValueError):
        Certificate("x", None, {}, {"rank_ok": 0}, "pass")
    with pytest.raises(ValueError):
        Certificate("x", None, {}, {"ratio": 0.5}, "fail")
    with pytest.raises(ValueError):
        Certificate("x", None, {}, {}, "maybe")


def test_exit_code_rules():
    p = Certificate("x", None, {}, {}, "pass")
    f = Certificate("x", None, {}, {}, "fail")
    i = Certificate("x", None, {}, {}, "inconclusive")
    assert exit_code([p, p]) == EXIT_PASS
    assert exit_code([p, i]) == EXIT_INCONCLUSIVE
    assert exit_code([i, f, p]) == EXIT_FAIL


def test_main_verify(tmp_path, capsys):
    out = tmp_path / "t.json"
    code = main(["verify", "tau-surjectivity", "--genus", "3", "--k", "1",
                 "--surface", "closed", "--json", str(out)])
    assert code == EXIT_PASS
    cert = load(out)
    assert cert.metrics["rank"] == 14 and cert.elapsed_ms == 0
    assert capsys.readouterr().out == out.read_text()


def test_main_usage_errors(capsys):
    assert main(["verify", "tau-surjectivity", "--genus", "3", "--k", "2"]) == EXIT_USAGE
    assert "k < g-1" in capsys.readouterr().err
    assert main(["verify", "no-such-prop"]) == EXIT_USAGE
    assert main(["sweep", "--gmin", "3", "--gmax", "3", "--kinds"]) == EXIT_USAGE
    assert main(["sweep", "--gmin", "2", "--gmax", "3"]) == EXIT_USAGE
    assert main(["sweep", "--gmin", "3", "--gmax", "3", "--kinds", "open"]) == EXIT_USAGE


def test_main_fail_and_inconclusive(capsys):
    assert main(["verify", "tau-surjectivity", "--genus", "4", "--k", "2",
                 "--surface", "bordered"]) == EXIT_FAIL
    assert main(["verify", "tau-surjectivity", "--genus", "4", "--k", "1",
                 "--budget", "3"]) == EXIT_INCONCLUSIVE


def test_record_timing_flag(tmp_path):
    out = tmp_path / "b.json"
    main(["verify", "bcj-b2", "--genus", "4", "--record-timing", "--json", str(out)])
    assert load(out).elapsed_ms > 0


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# small budget\nbudget = 3  # too small\n\nmirror_twists = yes\n")
    assert read_config(cfg) == {"budget": "3", "mirror_twists": "yes"}
    args = ["--config", str(cfg), "verify", "tau-surjectivity", "--genus", "4"]
    assert main(args) == EXIT_INCONCLUSIVE
    # flags override the file
    assert main(args + ["--budget", "50000"]) == EXIT_PASS
    assert main(["--config", str(cfg), "verify", "lantern"]) == EXIT_PASS
    assert '"mirror": "yes"' in capsys.readouterr().out
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert main(["--config", str(bad), "verify", "lantern"]) == EXIT_USAGE
    bad.write_text("just words\n")
    assert main(["--config", str(bad), "verify", "lantern"]) == EXIT_USAGE


def test_sweep_jobs_enumeration():
    spec = SweepSpec(3, 4)
    jobs = sweep_jobs(spec)
    assert len(jobs) == 9
    assert [(p.genus, p.k) for _, p in jobs] == [(3, 1)] * 3 + [(4, 1)] * 3 + [(4, 2)] * 3
    with pytest.raises(UsageError):
        SweepSpec(3, 4, kinds=())
    with pytest.raises(UsageError):
        SweepSpec(3, 9)
    spec = SweepSpec(3, 5, k_policy=2, kinds=("bordered",), propositions=PROPOSITIONS)
    names = [p for p, _ in sweep_jobs(spec)]
    assert names.count("lantern") == 1 and names.count("factorization-3.3") == 1


def test_sweep_is_byte_identical(tmp_path, capsys):
    runs = []
    for name in ("one", "two"):
        out = tmp_path / name
        code = main(["sweep", "--gmin", "3", "--gmax", "4", "--out", str(out)])
        assert code == EXIT_FAIL  # genus 4, k=2 with a boundary is not saturated
        runs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert runs[0] == runs[1] and len(runs[0]) == 9
    summary = capsys.readouterr().out
    assert "pass=7 fail=2 inconclusive=0" in summary


def test_parallel_sweep_matches_serial():
    spec = SweepSpec(3, 3, propositions=("tau-surjectivity", "bcj-b2", "lantern"))
    serial = [c.with_elapsed(0) for c in sweep(spec)]
    parallel = [c.with_elapsed(0) for c in sweep(spec, jobs=2)]
    assert serial == parallel


def test_certificate_filename():
    cert = run("tau-surjectivity", SurfaceParams(3, 1, "punctured"))
    assert certificate_filename(cert) == "tau-surjectivity_g3_k1_punctured.json"
    assert certificate_filename(run("lantern")) == "lantern.json"


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "torelli_cert.cli", "--version"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and __version__ in out.stdout
