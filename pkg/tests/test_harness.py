import json

import numpy as np
import pytest

from phasewin import instance_io
from phasewin.harness import cli
from phasewin.harness.plotting import render_curves
from phasewin.harness.runner import FIELDS, build_instance, read_results, rows_to_csv, run_experiment, write_results
from phasewin.harness.spec import AlgorithmSpec, ExperimentSpec, SpecError, derive_seed, parse_spec
from phasewin.harness.verify import battery, verify

SPEC = """\
[experiment]
schema = 1
name = small
family = coverage
m = 10, 14
k = 4
replicates = 2
master_seed = 5
algorithms = greedy, lazy_greedy, pw-lg

[algorithm pw-lg]
base = phasewin
policy = LG
theta = 0.3, 0.2
"""

GOLDEN_HEADER = ("schema_version,instance_id,family,algorithm,seed,m,k,steps,f_value,"
                 "insertion_auc,mec,ac_ratio,early_exit_fraction,phases,runtime_note")


def test_parse_spec_fields():
    spec = parse_spec(SPEC)
    assert spec.m == [10, 14] and spec.k == ["4"] and spec.replicates == 2
    pw = spec.algorithms[2]
    assert pw.base == "phasewin" and pw.settings == {"policy": "LG", "theta": (0.3, 0.2)}
    cfg = spec.phasewin_config(pw, 50, 10, 1)
    assert cfg.window_size == 16 and cfg.theta == (0.3, 0.2)


def test_spec_round_trips_through_ini_and_json():
    spec = parse_spec(SPEC)
    assert parse_spec(spec.dumps()).to_dict() == spec.to_dict()
    assert parse_spec(json.dumps(spec.to_dict())).to_dict() == spec.to_dict()


@pytest.mark.parametrize("text, line", [
    ("[experiment]\nschema = 2\nm = 5\n", 2),
    ("[experiment]\nschema = 1\nm = five\n", 3),
    ("[experiment]\nschema = 1\nm = 5\nfamily = nope\n", 1),
    ("[experiment]\nschema = 1\nm = 5\nalgorithms = x\n\n[algorithm x]\nbase = phasewin\nrho_sel = 2\n", 6),
])
def test_spec_errors_name_the_line(text, line):
    with pytest.raises(SpecError, match=f"line {line}"):
        parse_spec(text)


def test_spec_errors_without_line():
    with pytest.raises(SpecError):
        parse_spec("no sections here")
    with pytest.raises(SpecError):
        parse_spec('{"schema": 1, "m": [5], "algorithms": [{"name": "greedy", "policy": "LG"}]}')


def test_seed_splitting_is_stable():
    a = parse_spec(SPEC)
    b = parse_spec(SPEC)
    b.algorithms.append(AlgorithmSpec("brute_force", "brute_force"))
    assert a.run_seed("coverage-m10-k4-r0", "greedy") == b.run_seed("coverage-m10-k4-r0", "greedy")
    assert derive_seed(0, "x") != derive_seed(1, "x")
    assert derive_seed(3, "a", 1) == derive_seed(3, "a", 1)


def test_run_experiment_order_and_csv_golden():
    spec = parse_spec(SPEC)
    recs = run_experiment(spec)
    assert len(recs) == 2 * 2 * 3
    assert [r.row["algorithm"] for r in recs[:3]] == ["greedy", "lazy_greedy", "pw-lg"]
    csv = rows_to_csv(recs)
    assert csv.split("\r\n")[0] == GOLDEN_HEADER
    assert tuple(GOLDEN_HEADER.split(",")) == FIELDS
    greedy_row = next(r.row for r in recs if r.row["algorithm"] == "greedy")
    assert greedy_row["phases"] is None and ",NA," in csv


def test_parallel_emission_matches_serial():
    spec = parse_spec(SPEC)
    assert rows_to_csv(run_experiment(spec, workers=4)) == rows_to_csv(run_experiment(spec))


def test_write_and_read_results(tmp_path):
    spec = parse_spec(SPEC)
    recs = run_experiment(spec)
    paths = write_results(recs, tmp_path, spec)
    assert {p.name for p in paths.values()} == {"results.csv", "results.json", "curves.json", "meta.json"}
    assert "created" in json.loads(paths["meta"].read_text())
    assert "created" not in paths["csv"].read_text()
    back = read_results(tmp_path)
    assert [r.order for r in back] == [r.order for r in recs]


def test_render_counts(tmp_path):
    recs = run_experiment(parse_spec(SPEC))
    paths = render_curves(recs, tmp_path, max_instances=3)
    names = sorted(p.name for p in paths)
    assert len(names) == 4 and "mec_vs_m.svg" in names
    text = (tmp_path / "mec_vs_m.svg").read_text()
    assert text.startswith("<?xml") and "slope" in text
    one = [r for r in recs if r.row["instance_id"] == recs[0].row["instance_id"]]
    curve = render_curves(one, tmp_path / "one")
    assert len(curve) == 1
    assert curve[0].read_text().count("MEC ") == 3


def test_render_empty_warns(tmp_path, caplog):
    assert render_curves([], tmp_path / "none") == []
    assert "no results" in caplog.text
    assert not (tmp_path / "none").exists()


def test_svg_output_is_reproducible(tmp_path):
    recs = run_experiment(parse_spec(SPEC))
    a = render_curves(recs, tmp_path / "a", max_instances=1)
    b = render_curves(recs, tmp_path / "b", max_instances=1)
    assert [p.read_bytes() for p in a] == [p.read_bytes() for p in b]


@pytest.mark.parametrize("family", ["surrogate", "coverage", "facility", "modular", "supermodular"])
def test_instance_round_trip(family, tmp_path):
    inst = build_instance(family, 7, 12)
    back = instance_io.load(instance_io.save(inst, tmp_path / "i.txt"))
    rng = np.random.default_rng(0)
    for _ in range(10):
        s = tuple(np.flatnonzero(rng.random(12) < 0.5))
        assert back(s) == inst(s)
    assert back.family == inst.family and back.m == inst.m


def test_instance_format_errors():
    with pytest.raises(instance_io.InstanceFormatError):
        instance_io.loads("schema: 9\nfamily: modular\n")
    with pytest.raises(instance_io.InstanceFormatError):
        instance_io.loads("schema: 1\nfamily: modular\nm: 2\n")
    with pytest.raises(instance_io.InstanceFormatError):
        instance_io.loads("schema: 1\nfamily: modular\n@array weights float64 3\n1.0 2.0\n")


def test_battery_is_verified():
    items = list(battery(12, seed=1))
    assert len(items) == 12
    assert all(m <= 12 and k <= 5 for _, _, m, k in items)


def test_verify_unknown_suite():
    with pytest.raises(KeyError):
        verify("bogus")


# ---------------------------------------------------------------- CLI

def test_cli_run_and_render(tmp_path, capsys):
    out = tmp_path / "r"
    code = cli.main(["run", "--family", "coverage", "--m", "12", "20", "--k", "5", "--seed", "3",
                     "--out", str(out), "--plots", "--policy", "T2", "--no-anneal"])
    assert code == 0
    assert (out / "results.csv").exists() and (out / "mec_vs_m.svg").exists()
    assert cli.main(["render", "--results", str(out), "--out", str(tmp_path / "fig")]) == 0
    assert list((tmp_path / "fig").glob("*.svg"))


def test_cli_run_from_spec_is_deterministic(tmp_path):
    spec = tmp_path / "s.ini"
    spec.write_text(SPEC)
    for d in ("a", "b"):
        assert cli.main(["run", "--spec", str(spec), "--out", str(tmp_path / d)]) == 0
    assert (tmp_path / "a/results.csv").read_bytes() == (tmp_path / "b/results.csv").read_bytes()


def test_cli_gen_instance_and_run_file(tmp_path):
    path = tmp_path / "inst.txt"
    assert cli.main(["gen-instance", "--family", "facility", "--m", "9", "--seed", "2",
                     "--out", str(path)]) == 0
    assert cli.main(["run", "--instance", str(path), "--algo", "greedy", "brute_force", "--k", "3",
                     "--out", str(tmp_path / "r")]) == 0
    rows = json.loads((tmp_path / "r/results.json").read_text())
    assert rows[0]["f_value"] == rows[1]["f_value"] or rows[1]["f_value"] >= rows[0]["f_value"]


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[experiment]\nschema = 1\nm = 5\nfamily = nope\n")
    assert cli.main(["run", "--spec", str(bad), "--out", str(tmp_path / "x")]) == 2
    assert "line 1" in capsys.readouterr().err
    broken = tmp_path / "broken.txt"
    broken.write_text("schema: 1\nfamily: nothing\n")
    assert cli.main(["run", "--instance", str(broken)]) == 2
    assert cli.main(["run", "--spec", str(tmp_path / "missing.ini")]) == 1
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "nonsense"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["run", "--policy", "XX"])
    assert exc.value.code == 2


def test_cli_verify_passes(capsys):
    assert cli.main(["verify", "accounting"]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_cli_verify_reports_failure(monkeypatch, capsys):
    from phasewin.harness.verify import Check
    monkeypatch.setattr(cli, "verify", lambda s: [Check("forced", False, "x")])
    assert cli.main(["verify", "approx"]) == 1
    assert "FAIL  forced" in capsys.readouterr().out
