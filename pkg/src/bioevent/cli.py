"""Command-line driver: ``bioevent <command> [options]``.

Option values come from, in increasing priority: built-in defaults, the
command's section of a YAML ``--config`` file, and command-line flags. The
merged (effective) config is written to every output directory, and feeding
that file back through ``--config`` reruns the command.

Exit codes: 0 success, 1 other failure (including ``--strict`` quarantine),
2 usage error, 3 corpus parse error, 4 validation failure, 5 insufficient
data, 6 network/remote failure, 7 checkpoint rebuild required.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from pathlib import Path

import yaml

from . import __version__
from .errors import BioEventError

log = logging.getLogger("bioevent")

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2
CONFIG_NAME = "effective_config.yaml"
REQUIRED = object()


def _list(value):
    if value is None or isinstance(value, list):
        return value
    return [v.strip() for v in str(value).split(",") if v.strip()]


# command -> [(flag, default, help, argparse kwargs)]
OPTIONS = {
    "convert": [
        ("--input", REQUIRED, "source file or directory", {}),
        ("--format", REQUIRED, "source format: ontonotes, gum, timeml, newsreader, litbank, jsonl or tsv", {}),
        ("--out", REQUIRED, "output corpus file (.jsonl or .tsv)", {}),
        ("--name", None, "corpus name (default: input stem)", {}),
        ("--person-filter", False, "drop documents without a PERSON coreference chain", {"action": "store_true"}),
        ("--light-verb-rewrite", False, "move events from light/copular verbs to their complements",
         {"action": "store_true"}),
        ("--lexicon", None, "light/copular verb list replacing the built-in one", {}),
    ],
    "stats": [
        ("--corpora", REQUIRED, "comma list of corpus paths or names (names resolve in --corpus-dir); "
                                "name=path sets the display name", {}),
        ("--corpus-dir", ".", "directory holding <name>.jsonl / <name>.tsv corpora", {}),
        ("--basis", "lemma", "JSD basis: lemma, surface or event", {}),
        ("--lemma-fallback", "lemmatizer", "lemma for unlemmatized tokens: lemmatizer or surface", {}),
        ("--top-n", 10, "event lemmas listed per profile", {"type": int}),
        ("--out", REQUIRED, "output directory", {}),
    ],
    "iaa": [
        ("--a", REQUIRED, "first annotator's corpus", {}),
        ("--b", REQUIRED, "second annotator's corpus", {}),
        ("--layers", "entity,event,link,cont_mod", "comma list of layers", {}),
        ("--out", REQUIRED, "output directory", {}),
    ],
    "train": [
        ("--preset", None, "named experiment, e.g. event/timebank+wikibio (see --list-presets)", {}),
        ("--list-presets", False, "print preset names and exit", {"action": "store_true"}),
        ("--task", "event", "entity or event (taken from the preset when one is given)", {}),
        ("--wikibio", None, "WikiBio corpus; dev/test (and train without --train) are split from it", {}),
        ("--corpus-dir", ".", "directory holding the external corpora a preset names", {}),
        ("--train", None, "explicit training corpus (no preset)", {}),
        ("--dev", None, "explicit dev corpus (no preset)", {}),
        ("--test", None, "explicit test corpus (no preset)", {}),
        ("--split", None, "train,dev,test unit counts overriding the standard split", {}),
        ("--epochs", None, "training epochs (default: preset value, else 5)", {"type": int}),
        ("--learning-rate", None, "optimizer learning rate (default: classifier's own)", {"type": float}),
        ("--n-runs", 1, "independent runs averaged in the report", {"type": int}),
        ("--mock-classifier", False, "use the memorizing mock instead of the encoder", {"action": "store_true"}),
        ("--pretrained", None, "pretrained encoder name or path (default: train from scratch)", {}),
        ("--max-sequence-length", 128, "chunk length in tokens", {"type": int}),
        ("--batching", "ONE_BATCH_PER_DOCUMENT", "ONE_BATCH_PER_DOCUMENT or FIXED", {}),
        ("--out", REQUIRED, "output directory (run_log.jsonl, eval_report.json, model/)", {}),
    ],
    "eval": [
        ("--model", REQUIRED, "directory written by train", {}),
        ("--corpus", REQUIRED, "gold corpus to score", {}),
        ("--task", "event", "entity or event", {}),
        ("--max-sequence-length", 128, "chunk length in tokens", {"type": int}),
        ("--out", REQUIRED, "output directory", {}),
    ],
    "pipeline": [
        ("--manifest", REQUIRED, "manifest.jsonl of biographies", {}),
        ("--entity-model", None, "entity classifier directory", {}),
        ("--event-model", None, "event classifier directory", {}),
        ("--oracle", None, "gold corpus replayed by both stages instead of trained models", {}),
        ("--gold", None, "gold corpus for mention recall in the report", {}),
        ("--checkpoint", None, "checkpoint file (default: <out>/checkpoint.jsonl)", {}),
        ("--workers", 1, "worker threads (used only with reentrant models)", {"type": int}),
        ("--strict", False, "exit nonzero if any document is quarantined", {"action": "store_true"}),
        ("--out", REQUIRED, "output directory", {}),
    ],
    "ingest": [
        ("--out", REQUIRED, "output directory (writers.jsonl, manifest.jsonl, texts/, ingest_report.json)", {}),
        ("--cache-dir", None, "article cache (default: $BIOEVENT_CACHE_DIR or <out>/cache)", {}),
        ("--page-size", 5000, "SPARQL rows per page", {"type": int}),
        ("--max-pages", None, "stop after this many pages (resumable)", {"type": int}),
        ("--year-min", 1808, "earliest birth year kept", {"type": int}),
        ("--western", None, "Western country id list replacing the built-in one", {}),
        ("--minorities", None, "minority ethnic-group id list replacing the built-in one", {}),
        ("--record", None, "store every HTTP response in this cassette directory", {}),
        ("--replay", None, "serve HTTP responses from this cassette directory only", {}),
    ],
    "shift": [
        ("--corpus", REQUIRED, "annotated corpus whose documents carry group labels", {}),
        ("--groups", "TW,TM,WM,WW", "comma list of group codes", {}),
        ("--focal", None, "compare this group with each other one (default: first of --groups, "
                          "'all' for every pair)", {}),
        ("--top-k", 20, "types per side in each plot", {"type": int}),
        ("--surface", False, "use lowercased surface forms instead of lemmas as event types",
         {"action": "store_true"}),
        ("--out", REQUIRED, "output directory", {}),
    ],
}

HELP = {
    "convert": "convert an external corpus to the canonical format",
    "stats": "corpus profiles and pairwise JSD matrix",
    "iaa": "inter-annotator agreement (Cohen's kappa) per layer",
    "train": "train and score a token classifier",
    "eval": "score a trained classifier on a gold corpus",
    "pipeline": "two-stage annotation of a biography manifest (resumable)",
    "ingest": "harvest writers from Wikidata and their Wikipedia biographies",
    "shift": "event distributions per group and JSD word shifts",
}


def _dest(flag):
    return flag.lstrip("-").replace("-", "_")


def defaults(command) -> dict:
    return {_dest(f): (None if d is REQUIRED else d) for f, d, _, _ in OPTIONS[command]}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bioevent",
                                description="Biographical event detection and intersectional word shifts.",
                                epilog="exit codes: 0 ok, 1 failure, 2 usage, 3 parse, 4 validation, "
                                       "5 insufficient data, 6 network, 7 rebuild required")
    p.add_argument("--version", action="version", version=f"bioevent {__version__}")
    p.add_argument("--config", help="YAML file with one section per command (flags override it)")
    p.add_argument("--seed", type=int, default=None, help="random seed (default: 0)")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")
    for command, opts in OPTIONS.items():
        sp = sub.add_parser(command, help=HELP[command], description=HELP[command])
        for flag, default, text, kw in opts:
            if default is REQUIRED:
                text += " (required)"
            elif default not in (None, False):
                text += f" (default: {default})"
            sp.add_argument(flag, default=None, help=text, **kw)
    return p


def effective_config(args, parser=None) -> dict:
    """Defaults < config file section < flags."""
    cfg = defaults(args.command)
    seed = 0
    if args.config:
        data = yaml.safe_load(Path(args.config).read_text("utf-8")) or {}
        section = data.get(args.command) or {}
        unknown = sorted(set(section) - set(cfg))
        if unknown:
            raise ValueError(f"unknown keys in [{args.command}] of {args.config}: {unknown}")
        cfg.update(section)
        seed = data.get("seed", seed)
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    if args.seed is not None:
        seed = args.seed
    missing = [f for f, d, _, _ in OPTIONS[args.command] if d is REQUIRED and cfg[_dest(f)] in (None, "")]
    if missing and not (args.command == "train" and cfg.get("list_presets")):
        msg = f"{args.command}: missing required option(s) {', '.join(missing)}"
        if parser is not None:
            parser.error(msg)
        raise ValueError(msg)
    return {"command": args.command, "seed": int(seed), args.command: cfg}


def _digest_path(path) -> str:
    path = Path(path)
    h = hashlib.sha256()
    files = sorted(p for p in path.rglob("*") if p.is_file()) if path.is_dir() else [path]
    for f in files:
        h.update(str(f.relative_to(path) if path.is_dir() else f.name).encode())
        h.update(f.read_bytes())
    return h.hexdigest()


def echo_config(config: dict, out_dir, inputs=()) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = dict(config)
    doc["provenance"] = {"version": __version__,
                         "inputs": {str(p): _digest_path(p) for p in inputs if p and Path(p).exists()}}
    path = out / CONFIG_NAME
    path.write_text(yaml.safe_dump(doc, sort_keys=True), encoding="utf-8")
    return path


def _load(path, **kw):
    from .core.io import load_corpus

    fmt = "tsv" if str(path).endswith(".tsv") else "jsonl"
    return load_corpus(path, fmt, **kw)


def _resolve_corpus(entry, corpus_dir):
    name, _, path = entry.partition("=")
    if not path:
        path, name = name, None
    p = Path(path)
    if not p.exists():
        for cand in (Path(corpus_dir) / f"{path}.jsonl", Path(corpus_dir) / f"{path}.tsv", Path(corpus_dir) / path):
            if cand.exists():
                p, name = cand, name or path
                break
        else:
            raise FileNotFoundError(f"corpus {path!r} not found (looked in {corpus_dir})")
    return name, p


def cmd_convert(c, seed):
    from .adapters import AdapterConfig, SOURCE_READERS, adapt
    from .core.io import save_corpus
    from .core.lexicon import LightVerbLexicon, default_lexicon

    out = Path(c["out"])
    lexicon = LightVerbLexicon.load(c["lexicon"]) if c["lexicon"] else default_lexicon()
    if c["format"] in SOURCE_READERS:
        cfg = AdapterConfig(c["format"], c["person_filter"], c["light_verb_rewrite"], lexicon, seed)
        corpus, stats = adapt(c["input"], cfg, c["name"])
        extra = {"read": stats.read, "kept": stats.kept, "no_person": len(stats.no_person)}
    else:
        if c["person_filter"] or c["light_verb_rewrite"]:
            raise ValueError("--person-filter/--light-verb-rewrite apply to external formats only")
        corpus = _load(c["input"], name=c["name"], lexicon=lexicon) if c["format"] in ("jsonl", "tsv") else None
        if corpus is None:
            raise ValueError(f"unknown format {c['format']!r}")
        extra = {"read": len(corpus), "kept": len(corpus), "no_person": 0}
    path = save_corpus(corpus, out, "tsv" if out.suffix == ".tsv" else "jsonl")
    from .core.model import count_corpus

    counts = count_corpus(corpus)
    summary = {"output": str(path), **extra, "events": counts.events, "links": counts.links,
               "cont_mods": counts.cont_mods, "mentions": counts.mentions}
    print(json.dumps(summary, sort_keys=True))
    return summary, path.parent, [c["input"]]


def cmd_stats(c, seed):
    from .metrics import corpus_profile, jsd_matrix, write_profiles_csv

    entries = [_resolve_corpus(e, c["corpus_dir"]) for e in _list(c["corpora"])]
    corpora = []
    for name, path in entries:
        corpus = _load(path)
        if name:
            corpus = type(corpus)(name, corpus.documents, corpus.provenance)
        corpora.append(corpus)
    out = Path(c["out"])
    out.mkdir(parents=True, exist_ok=True)
    profiles = [corpus_profile(x, c["top_n"], c["lemma_fallback"]) for x in corpora]
    write_profiles_csv(profiles, out / "profiles.csv")
    summary = {"profiles": "profiles.csv"}
    if len(corpora) > 1:
        m = jsd_matrix(corpora, c["basis"], c["lemma_fallback"])
        m.to_csv(out / "jsd_matrix.csv")
        summary["jsd_matrix"] = "jsd_matrix.csv"
        summary["order"] = {n: m.row_order(n) for n in m.names}
    print(json.dumps(summary, sort_keys=True))
    return summary, out, [p for _, p in entries]


def cmd_iaa(c, seed):
    from .metrics import pairwise_iaa

    a, b = _load(c["a"], validate=False), _load(c["b"], validate=False)
    reports = []
    for layer in _list(c["layers"]):
        r = pairwise_iaa(a.documents, b.documents, layer.upper(), (a.name, b.name))
        reports.append({"layer": r.layer.value, "kappa": None if r.undefined else r.kappa,
                        "undefined": r.undefined, "n_items": r.n_items})
    out = Path(c["out"])
    out.mkdir(parents=True, exist_ok=True)
    (out / "iaa.json").write_text(json.dumps(reports, indent=2) + "\n", encoding="utf-8")
    print(json.dumps(reports))
    return reports, out, [c["a"], c["b"]]


def _split_spec(task, override):
    from .tagger import SPLIT_PRESETS, SplitSpec

    spec = SPLIT_PRESETS[task.value.lower()]
    if override:
        tr, dv, te = (int(x) for x in _list(override))
        spec = SplitSpec(spec.unit, tr, dv, te, spec.event_bearing_only)
    return spec


def _classifier_factory(c, made):
    from .tagger import MemorizingClassifier

    def factory(seed):
        if c["mock_classifier"]:
            clf = MemorizingClassifier(seed=seed)
        else:
            from .tagger.encoder import EncoderClassifier

            clf = EncoderClassifier(c["pretrained"])
        made.append(clf)
        return clf

    return factory


def cmd_train(c, seed):
    from .tagger import (
        PRESETS, Batching, ChunkingSpec, Task, TrainConfig, build_preset_training, build_splits, get_preset,
        run_experiment,
    )
    from .tagger.presets import ALIASES

    if c["list_presets"]:
        for name, p in sorted(PRESETS.items()):
            print(f"{name}\t{p.task.value}\tepochs={p.epochs}\treference={list(p.reference)}")
        return None, None, []
    preset = get_preset(c["preset"]) if c["preset"] else None
    task = preset.task if preset else Task(c["task"].upper())
    epochs = c["epochs"] or (preset.epochs if preset else 5)
    inputs = []
    if c["train"] or c["dev"] or c["test"]:
        if preset or not (c["train"] and c["dev"] and c["test"]):
            raise ValueError("--train/--dev/--test go together and exclude --preset")
        training, dev, test = (_load(c[k]) for k in ("train", "dev", "test"))
        inputs += [c["train"], c["dev"], c["test"]]
    else:
        if not c["wikibio"]:
            raise ValueError("give --wikibio (for the standard splits) or --train/--dev/--test")
        wikibio = _load(c["wikibio"])
        inputs.append(c["wikibio"])
        wb_train, dev, test = build_splits(wikibio, _split_spec(task, c["split"]), seed)
        training = wb_train
        if preset is not None and preset.members:
            corpora = {}
            for m in preset.members:
                name, path = _resolve_corpus(ALIASES[m], c["corpus_dir"])
                corpora[name] = _load(path)
                inputs.append(path)
            training = build_preset_training(preset, corpora, wb_train, seed)
    chunking = ChunkingSpec(c["max_sequence_length"], Batching(c["batching"]))
    config = TrainConfig(task, epochs, seed, c["learning_rate"])
    out = Path(c["out"])
    out.mkdir(parents=True, exist_ok=True)
    made = []
    report = run_experiment(training, dev, test, config, _classifier_factory(c, made), chunking=chunking,
                            n_runs=max(1, c["n_runs"]), run_log=out / "run_log.jsonl",
                            preset=preset.name if preset else None)
    if hasattr(made[-1], "save"):
        made[-1].save(out / "model")
    summary = report.to_dict()
    if preset:
        summary["reference"] = dict(zip(("f_train", "f_dev", "f_test"), preset.reference))
    (out / "eval_report.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(json.dumps({"preset": preset.name if preset else None, "f_train": report.f_train,
                      "f_dev": report.f_dev, "f_test": report.f_test}))
    return summary, out, inputs


def cmd_eval(c, seed):
    from .tagger import ChunkingSpec, Task, evaluate_f1, load_classifier, per_label_scores, predict_corpus

    task = Task(c["task"].upper())
    clf = load_classifier(c["model"])
    corpus = _load(c["corpus"])
    gold, pred = predict_corpus(clf, corpus, task, ChunkingSpec(c["max_sequence_length"]))
    score = evaluate_f1(gold, pred, task)
    result = {"task": task.value, "corpus": corpus.name, **score.to_dict(),
              "per_label": {k: v.to_dict() for k, v in per_label_scores(gold, pred, task).items()}}
    out = Path(c["out"])
    out.mkdir(parents=True, exist_ok=True)
    (out / "eval.json").write_text(json.dumps(result, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(json.dumps({"task": task.value, "f1": score.f1}))
    return result, out, [c["model"], c["corpus"]]


class QuarantineError(BioEventError):
    """Raised under ``--strict`` when any document was quarantined."""


def cmd_pipeline(c, seed):
    from .pipeline import PipelineModels, run_corpus_pipeline
    from .tagger import GoldReplayClassifier, Task, load_classifier

    inputs = [c["manifest"]]
    if c["oracle"]:
        gold_corpus = _load(c["oracle"])
        models = PipelineModels(GoldReplayClassifier(gold_corpus, Task.ENTITY),
                                GoldReplayClassifier(gold_corpus, Task.EVENT))
        inputs.append(c["oracle"])
    else:
        if not (c["entity_model"] and c["event_model"]):
            raise ValueError("give --entity-model and --event-model, or --oracle")
        models = PipelineModels(load_classifier(c["entity_model"]), load_classifier(c["event_model"]))
        inputs += [c["entity_model"], c["event_model"]]
    gold = _load(c["gold"]) if c["gold"] else None
    out = Path(c["out"])
    out.mkdir(parents=True, exist_ok=True)
    run = run_corpus_pipeline(c["manifest"], models, c["checkpoint"] or out / "checkpoint.jsonl", out,
                              workers=c["workers"], gold=gold)
    q = run.quarantined
    print(json.dumps({"documents": run.report["documents"], "events": run.report["events"],
                      "quarantined": [e["id"] for e in q]}, sort_keys=True))
    if q:
        log.warning("%d document(s) quarantined; see run_report.json", len(q))
        if c["strict"]:
            echo_config(CURRENT["config"], out, inputs)
            raise QuarantineError(f"{len(q)} document(s) quarantined")
    return run.report, out, inputs


def cmd_ingest(c, seed):
    from .ingest import (
        GroupingConfig, HttpTransport, RecordingTransport, ReplayTransport, build_manifest, harvest_writers,
        partition_records,
    )

    if c["replay"]:
        transport = ReplayTransport(c["replay"])
    else:
        transport = HttpTransport.from_env()
        if c["record"]:
            transport = RecordingTransport(transport, c["record"])
    config = GroupingConfig.load(c["western"], c["minorities"], c["year_min"])
    out = Path(c["out"])
    records = harvest_writers(transport, config, out / "writers.jsonl", page_size=c["page_size"],
                              max_pages=c["max_pages"])
    state = json.loads((out / "writers.jsonl.cursor").read_text("utf-8"))
    if not state["done"]:
        print(json.dumps({"records": len(records), "next_offset": state["offset"], "done": False}))
        return {"records": len(records), "done": False}, out, []
    part = partition_records(records, config)
    cache = c["cache_dir"] or os.environ.get("BIOEVENT_CACHE_DIR") or out / "cache"
    report = build_manifest(part, transport, cache, out, config)
    print(json.dumps(report["partition"], sort_keys=True))
    return report, out, [p for p in (c["western"], c["minorities"]) if p]


def cmd_shift(c, seed):
    from .shift import emit_report, focal_pairs, group_distributions, jsd_shift

    corpus = _load(c["corpus"], validate=False)
    dists = group_distributions(corpus, "surface" if c["surface"] else "lemma")
    groups = [g.upper() for g in _list(c["groups"])]
    missing = [g for g in groups if g not in dists]
    if missing:
        raise ValueError(f"groups {missing} have no documents in {c['corpus']}")
    focal = c["focal"] or groups[0]
    pairs = focal_pairs(groups, None if focal == "all" else focal.upper())
    results = [jsd_shift(dists[a], dists[b]) for a, b in pairs]
    manifest = emit_report(results, c["out"], {g: dists[g] for g in groups}, c["top_k"])
    print(json.dumps({p["plot"]: round(p["total_jsd"], 6) for p in manifest["pairs"]}, sort_keys=True))
    return manifest, c["out"], [c["corpus"]]


COMMANDS = {"convert": cmd_convert, "stats": cmd_stats, "iaa": cmd_iaa, "train": cmd_train, "eval": cmd_eval,
            "pipeline": cmd_pipeline, "ingest": cmd_ingest, "shift": cmd_shift}
CURRENT = {}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = effective_config(args, parser)
    except (OSError, ValueError, yaml.YAMLError) as exc:
        print(f"bioevent: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    CURRENT["config"] = config
    try:
        _, out_dir, inputs = COMMANDS[args.command](config[args.command], config["seed"])
    except BioEventError as exc:
        print(f"bioevent: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError, KeyError) as exc:
        print(f"bioevent: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    if out_dir is not None:
        echo_config(config, out_dir, inputs)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
