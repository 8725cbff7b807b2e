import json
import math
import re
from pathlib import Path

import pytest
import yaml

from bioevent import cli
from bioevent.adapters import AdapterConfig, adapt
from bioevent.core import Corpus, GroupLabel, load_corpus, save_corpus
from bioevent.pipeline import manifest_from_corpus
from bioevent.shift import group_distributions, jsd_shift, read_shift_csv
from bioevent.synthetic import event_documents, make_corpus

FIX = Path(__file__).parent / "fixtures"


def run(*argv):
    return cli.main([str(a) for a in argv])


def help_text(command, capsys):
    with pytest.raises(SystemExit):
        cli.main([command, "--help"])
    return capsys.readouterr().out


@pytest.mark.parametrize("command", sorted(cli.OPTIONS))
def test_help_lists_every_flag(command, capsys):
    text = help_text(command, capsys)
    declared = {f for f, _, _, _ in cli.OPTIONS[command]}
    shown = set(re.findall(r"(?<![\w-])(--[a-z][a-z-]*)", text)) - {"--help"}
    assert shown == declared
    parser = cli.build_parser()
    sub = next(a for a in parser._actions if a.dest == "command").choices[command]
    actual = {s for a in sub._actions for s in a.option_strings if s.startswith("--")} - {"--help"}
    assert actual == declared
    assert all(a.help for a in sub._actions)


def test_missing_required_is_usage_error(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["shift", "--out", str(tmp_path)])
    assert exc.value.code == 2


def test_convert_gum(tmp_path):
    out = tmp_path / "gum.jsonl"
    assert run("convert", "--input", FIX / "gum_sample.conllu", "--format", "gum", "--out", out) == 0
    assert len(load_corpus(out)) >= 1
    cfg = yaml.safe_load((tmp_path / cli.CONFIG_NAME).read_text())
    assert cfg["convert"]["format"] == "gum" and cfg["provenance"]["inputs"]


def test_convert_corrupt_reports_line(tmp_path, capsys):
    good = tmp_path / "c.jsonl"
    save_corpus(make_corpus(2, seed=1, name="c"), good)
    lines = good.read_text().splitlines()
    bad = tmp_path / "bad.jsonl"
    bad.write_text(lines[0] + "\n{not json\n")
    assert run("convert", "--input", bad, "--format", "jsonl", "--out", tmp_path / "o.jsonl") == 3
    assert ":2:" in capsys.readouterr().err


def test_convert_ontonotes_matches_adapter(tmp_path):
    src = FIX / "ontonotes_sample.gold_conll"
    out = tmp_path / "onto.jsonl"
    assert run("convert", "--input", src, "--format", "ontonotes", "--out", out,
               "--person-filter", "--light-verb-rewrite") == 0
    oracle, _ = adapt(src, AdapterConfig("ontonotes", True, True))
    got = load_corpus(out)
    assert sum(len(d.events) for d in got) == sum(len(d.events) for d in oracle)
    assert sum(len(d.links) for d in got) == sum(len(d.links) for d in oracle) > 0


def test_stats_by_name(tmp_path):
    data = tmp_path / "corpora"
    save_corpus(make_corpus(4, seed=1, name="wikibio"), data / "wikibio.jsonl")
    save_corpus(make_corpus(4, seed=2, name="gum"), data / "gum.jsonl")
    assert run("stats", "--corpora", "wikibio,gum", "--corpus-dir", data, "--basis", "lemma",
               "--out", tmp_path / "s") == 0
    rows = (tmp_path / "s" / "jsd_matrix.csv").read_text().splitlines()
    assert rows[0] == "basis=LEMMA_UNIGRAM,wikibio,gum"
    assert (tmp_path / "s" / "profiles.csv").exists()


def test_iaa_identical(tmp_path):
    save_corpus(make_corpus(3, seed=4, name="a"), tmp_path / "a.jsonl")
    assert run("iaa", "--a", tmp_path / "a.jsonl", "--b", tmp_path / "a.jsonl", "--layers", "entity,event",
               "--out", tmp_path / "o") == 0
    reports = json.loads((tmp_path / "o" / "iaa.json").read_text())
    assert [r["kappa"] for r in reports] == [1.0, 1.0]


@pytest.fixture
def train_data(tmp_path):
    data = tmp_path / "corpora"
    save_corpus(make_corpus(20, seed=7, name="wikibio"), data / "wikibio.jsonl")
    save_corpus(make_corpus(10, seed=8, name="timebank"), data / "timebank.jsonl")
    return data


def test_train_preset_mock(tmp_path, train_data):
    out = tmp_path / "run"
    assert run("--seed", 3, "train", "--preset", "event/timebank+wikibio", "--mock-classifier",
               "--wikibio", train_data / "wikibio.jsonl", "--corpus-dir", train_data,
               "--split", "30,30,30", "--out", out) == 0
    entry = json.loads((out / "run_log.jsonl").read_text().splitlines()[-1])
    assert entry["preset"] == "event/timebank+wikibio" and entry["seed"] == 3
    scores = entry["report"]
    assert all(0 <= scores[k] <= 1 for k in ("f_train", "f_dev", "f_test"))
    assert scores["f_train"] == 1.0
    assert run("eval", "--model", out / "model", "--corpus", train_data / "wikibio.jsonl",
               "--out", tmp_path / "ev") == 0
    assert 0 < json.loads((tmp_path / "ev" / "eval.json").read_text())["f1"] <= 1


def test_train_insufficient_data_exit_code(tmp_path, train_data):
    assert run("train", "--mock-classifier", "--wikibio", train_data / "wikibio.jsonl",
               "--out", tmp_path / "r") == 5  # the standard event split needs 1,691 sentences


def test_list_presets(capsys):
    assert run("train", "--list-presets") == 0
    names = [line.split("\t")[0] for line in capsys.readouterr().out.splitlines()]
    assert "entity/onto" in names and "event/timebank+wikibio@15" in names


def _groups_corpus(path):
    tw, tm = GroupLabel.from_code("TW"), GroupLabel.from_code("TM")
    docs = event_documents(tw, {"marry": 0.4, "write": 0.4, "divorce": 0.2}, 8, (3, 6), seed=1) + \
        event_documents(tm, {"elect": 0.3, "write": 0.5, "found": 0.2}, 8, (3, 6), seed=2)
    save_corpus(Corpus("groups", tuple(docs)), path)
    return docs


def test_shift_matches_module(tmp_path):
    docs = _groups_corpus(tmp_path / "g.jsonl")
    assert run("shift", "--corpus", tmp_path / "g.jsonl", "--groups", "TW,TM", "--top-k", 20,
               "--out", tmp_path / "s") == 0
    d = group_distributions(docs)
    oracle = {c.type: c.delta for c in jsd_shift(d["TW"], d["TM"]).contributions}
    rows = read_shift_csv(tmp_path / "s" / "TW__vs__TM.csv")
    assert {r["type"]: r["delta"] for r in rows} == pytest.approx(oracle, abs=1e-15)
    assert (tmp_path / "s" / "TW__vs__TM.svg").exists()


def test_config_precedence_and_rerun(tmp_path):
    _groups_corpus(tmp_path / "g.jsonl")
    conf = tmp_path / "c.yaml"
    conf.write_text(yaml.safe_dump({"seed": 9, "shift": {"corpus": str(tmp_path / "g.jsonl"), "groups": "TW,TM",
                                                         "top_k": 3, "out": str(tmp_path / "a")}}))
    assert run("--config", conf, "shift", "--top-k", 5) == 0
    echoed = yaml.safe_load((tmp_path / "a" / cli.CONFIG_NAME).read_text())
    assert echoed["shift"]["top_k"] == 5 and echoed["seed"] == 9 and echoed["shift"]["surface"] is False
    # the echoed file alone reproduces the run
    echoed["shift"]["out"] = str(tmp_path / "b")
    conf2 = tmp_path / "c2.yaml"
    conf2.write_text(yaml.safe_dump(echoed))
    assert run("--config", conf2, "shift") == 0
    for name in ("TW__vs__TM.csv", "TW__vs__TM.svg", "manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_config_unknown_key(tmp_path):
    conf = tmp_path / "c.yaml"
    conf.write_text("shift:\n  bogus: 1\n")
    assert run("--config", conf, "shift", "--corpus", "x", "--out", tmp_path) == 2


def test_pipeline_oracle_and_strict(tmp_path):
    gold = make_corpus(6, seed=5)
    save_corpus(gold, tmp_path / "gold.jsonl")
    manifest = manifest_from_corpus(gold, tmp_path / "in")
    assert run("pipeline", "--manifest", manifest, "--oracle", tmp_path / "gold.jsonl", "--out", tmp_path / "o") == 0
    report = json.loads((tmp_path / "o" / "run_report.json").read_text())
    assert report["events"] == sum(len(d.events) for d in gold)
    # a missing text file is quarantined: exit 0 normally, 1 under --strict
    lines = manifest.read_text().splitlines()
    rec = json.loads(lines[0])
    rec["text_path"] = "missing.txt"
    broken = tmp_path / "broken.jsonl"
    broken.write_text("\n".join([json.dumps(rec)] + lines[1:]) + "\n")
    broken_rel = tmp_path / "in" / "broken.jsonl"
    broken_rel.write_text(broken.read_text())
    args = ["pipeline", "--manifest", broken_rel, "--oracle", tmp_path / "gold.jsonl"]
    assert run(*args, "--out", tmp_path / "p1") == 0
    assert run(*args, "--out", tmp_path / "p2", "--strict") == 1


def test_pipeline_rebuild_required_exit(tmp_path):
    gold = make_corpus(2, seed=5)
    save_corpus(gold, tmp_path / "gold.jsonl")
    manifest = manifest_from_corpus(gold, tmp_path / "in")
    ck = tmp_path / "ck.jsonl"
    ck.write_text('{"header": "not ours"}\n')
    assert run("pipeline", "--manifest", manifest, "--oracle", tmp_path / "gold.jsonl", "--checkpoint", ck,
               "--out", tmp_path / "o") == 7


def test_ingest_replay(tmp_path):
    out = tmp_path / "ing"
    assert run("ingest", "--replay", FIX / "cassettes", "--page-size", 3, "--out", out) == 0
    report = json.loads((out / "ingest_report.json").read_text())
    assert report["reconciles"] and report["partition"]["total"] == 7
    assert len((out / "manifest.jsonl").read_text().splitlines()) == 3


def test_ingest_unrecorded_is_network_error(tmp_path):
    assert run("ingest", "--replay", FIX / "cassettes", "--page-size", 10, "--out", tmp_path / "x") == 6
