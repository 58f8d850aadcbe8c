"""Command-line entry point exposing the pipeline as subcommands.

Data flows between commands as files (JSONL for per-clip records, JSON
for models and manifests); logs go to stderr.  Every command exits 0
only when it fully succeeded, and prints a single "error: ..." line on
stderr otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .circumplex import (
    AffectPoint,
    QualifiedEmotion,
    corpus_distribution,
    emotion_record,
    load_distribution,
    qualify_corpus,
    save_distribution,
)
from .config import PipelineConfig, load_config
from .dataset import (
    assemble,
    assemble_without_affect,
    read_records_jsonl,
    stats_table,
    subset_stats,
    write_records_jsonl,
)
from .dsp.features import (
    extract_features,
    read_features_jsonl,
    write_features_csv,
    write_features_jsonl,
)
from .dsp.wavio import load_wav
from .events import build_corpus_timelines, read_timelines_jsonl, write_timelines_jsonl
from .jsonio import dump_jsonl, load_jsonl
from .prompting.batch import generate_corpus
from .prompting.client import HttpChatBackend, LlmClient, MockChatBackend
from .prompting.templates import EMOTION_VARIANTS, VARIANTS, render_prompt
from .regression.evaluate import evaluate_trials
from .regression.model import (
    join_features_labels,
    load_labels_csv,
    load_model,
    predict_affect,
    save_model,
    train_ser,
)


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _wav_paths(root: Path) -> list[Path]:
    if not root.is_dir():
        raise ValueError(f"not a directory: {root}")
    return sorted(p for p in root.rglob("*") if p.is_file() and p.suffix.lower() == ".wav")


def _clip_id(root: Path, path: Path) -> str:
    return path.relative_to(root).with_suffix("").as_posix()


def cmd_extract_features(args, cfg: PipelineConfig) -> int:
    root = Path(args.audio_dir)
    paths = _wav_paths(root)
    if not paths:
        raise ValueError(f"no .wav files under {root}")
    ids = [_clip_id(root, p) for p in paths]
    dupes = {i for i in ids if ids.count(i) > 1}
    if dupes:
        raise ValueError(f"duplicate clip ids after extension stripping: {sorted(dupes)}")

    def one(path: Path) -> tuple:
        return extract_features(load_wav(path), cfg.dsp, _clip_id(root, path))

    if args.jobs == 1:
        vectors = [one(p) for p in paths]
    else:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            vectors = list(pool.map(one, paths))
    write_features_jsonl(vectors, args.out)
    if args.csv:
        write_features_csv(vectors, args.csv)
    _log(f"extracted {len(vectors)} clips -> {args.out}")
    return 0


def cmd_train_ser(args, cfg: PipelineConfig) -> int:
    dataset = join_features_labels(
        read_features_jsonl(args.features), load_labels_csv(args.labels)
    )
    model = train_ser(dataset, grid=cfg.grid, folds=cfg.folds)
    save_model(model, args.out)
    chosen = model.config
    print(f"clips: {chosen['n_clips']}  folds: {chosen['folds']}  k_pca: {chosen['k_pca']}")
    for target in ("valence", "arousal"):
        p = chosen["params"][target]
        print(
            f"{target}: kernel={p['kernel']} C={p['c']} gamma={p['gamma']} "
            f"epsilon={p['epsilon']} cv_mse={chosen['cv_mse'][target]:.4f}"
        )
    _log(f"model -> {args.out}")
    return 0


def cmd_eval_ser(args, cfg: PipelineConfig) -> int:
    dataset = join_features_labels(
        read_features_jsonl(args.features), load_labels_csv(args.labels)
    )
    trials = args.trials if args.trials is not None else cfg.trials.count
    seed = args.seed if args.seed is not None else cfg.trials.base_seed
    search_each = (
        cfg.trials.search_each_trial
        if args.search_each_trial is None
        else args.search_each_trial
    )
    stats = evaluate_trials(
        dataset,
        n_trials=trials,
        base_seed=seed,
        grid=cfg.grid,
        folds=cfg.folds,
        search_each_trial=search_each,
        jobs=args.jobs,
    )
    print(f"{'':10s}{'R^2 (SD)':>18s}{'MSE (SD)':>18s}")
    for target in ("valence", "arousal"):
        r2m, r2s = stats.mean[f"r2_{target}"], stats.sd[f"r2_{target}"]
        msem, mses = stats.mean[f"mse_{target}"], stats.sd[f"mse_{target}"]
        print(
            f"{target.capitalize():10s}"
            f"{f'{r2m:.3f} ({r2s:.3f})':>18s}"
            f"{f'{msem:.3f} ({mses:.3f})':>18s}"
        )
    _log(f"{trials} trial(s), base seed {seed}")
    return 0


def cmd_predict_affect(args, cfg: PipelineConfig) -> int:
    model = load_model(args.model)
    features = read_features_jsonl(args.features)
    X = np.vstack([f.values for f in features])
    valence, arousal = predict_affect(model, X)
    rows = sorted(
        (
            {"clip_id": f.clip_id, "valence": float(v), "arousal": float(a)}
            for f, v, a in zip(features, valence, arousal)
        ),
        key=lambda r: r["clip_id"],
    )
    dump_jsonl(rows, args.out)
    _log(f"predicted affect for {len(rows)} clips -> {args.out}")
    return 0


def cmd_label_emotions(args, cfg: PipelineConfig) -> int:
    rows = sorted(load_jsonl(args.affects), key=lambda r: r["clip_id"])
    points = [AffectPoint(r["valence"], r["arousal"]) for r in rows]
    distribution = (
        load_distribution(args.distribution_in)
        if args.distribution_in
        else corpus_distribution(points)
    )
    labels = qualify_corpus(points, distribution)
    dump_jsonl(
        (emotion_record(r["clip_id"], a, q) for r, a, q in zip(rows, points, labels)),
        args.out,
    )
    if args.distribution_out:
        save_distribution(distribution, args.distribution_out)
    _log(f"labeled {len(rows)} clips -> {args.out}")
    return 0


def cmd_build_events(args, cfg: PipelineConfig) -> int:
    timelines = build_corpus_timelines(args.tsv, args.ontology, strict=not args.lenient)
    write_timelines_jsonl(timelines, args.out)
    _log(f"built {len(timelines)} timelines -> {args.out}")
    return 0


def _read_emotions(path: str) -> tuple[dict[str, AffectPoint], dict[str, QualifiedEmotion]]:
    affects, qualified = {}, {}
    for r in load_jsonl(path):
        cid = r["clip_id"]
        affects[cid] = AffectPoint(r["valence"], r["arousal"])
        qualified[cid] = QualifiedEmotion(
            r["emotion"], r["qualifier"], r["magnitude"], r["percentile"], r["text"]
        )
    return affects, qualified


def cmd_gen_captions(args, cfg: PipelineConfig) -> int:
    timelines = read_timelines_jsonl(args.events)
    affects: dict[str, AffectPoint] = {}
    qualified: dict[str, QualifiedEmotion] = {}
    if args.emotions:
        affects, qualified = _read_emotions(args.emotions)
    elif args.variant in EMOTION_VARIANTS:
        raise ValueError(f"variant {args.variant} requires --emotions")
    unqualified = args.unqualified_mood or cfg.unqualified_mood

    if args.dry_run:
        for clip_id in sorted(timelines):
            emotion = qualified.get(clip_id)
            if args.variant == "emotion_rewrite":
                exchange = render_prompt(
                    args.variant,
                    timelines[clip_id],
                    emotion,
                    prior_caption="<scene-focused caption>",
                    unqualified_mood=unqualified,
                )
            else:
                exchange = render_prompt(
                    args.variant, timelines[clip_id], emotion, unqualified_mood=unqualified
                )
            print(f"# clip: {clip_id}")
            for m in exchange.messages:
                print(f"[{m.role}]")
                print(m.content)
            print()
        return 0

    backend = (
        MockChatBackend() if cfg.llm.endpoint == "mock" else HttpChatBackend(cfg.llm.endpoint)
    )
    client = LlmClient(cfg.llm, backend)
    results, manifest = generate_corpus(
        timelines,
        qualified if args.emotions else None,
        args.variant,
        client,
        jobs=args.jobs,
        fail_fast=args.fail_fast,
        unqualified_mood=unqualified,
    )
    if args.emotions:
        records, skipped = assemble(timelines, affects, qualified, results, args.variant)
    else:
        records, skipped = assemble_without_affect(timelines, results, args.variant)
    write_records_jsonl(records, args.out)
    manifest_path = args.manifest or f"{args.out}.manifest.json"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest.to_dict(), fh, ensure_ascii=False, indent=1)
        fh.write("\n")
    _log(
        f"{manifest.requested} requested: {manifest.cached} cached, "
        f"{manifest.fetched} fetched, {manifest.failed} failed, "
        f"{manifest.flagged} flagged ({skipped} skipped in join) -> {args.out}"
    )
    if manifest.failed:
        raise ValueError(f"{manifest.failed} clip(s) failed; see {manifest_path}")
    return 0


def cmd_stats(args, cfg: PipelineConfig) -> int:
    all_stats = [subset_stats(read_records_jsonl(path)) for path in args.records]
    if args.json:
        print(json.dumps([s.to_dict() for s in all_stats], ensure_ascii=False, indent=1))
    else:
        print(stats_table(all_stats))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moodcap",
        description="Emotion-augmented audio caption data generation pipeline.",
    )
    parser.add_argument("--config", help="YAML config file (defaults are built in)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract-features", help="72-value feature vectors for a WAV tree")
    p.add_argument("audio_dir")
    p.add_argument("--out", required=True)
    p.add_argument("--csv", help="also write a 73-column CSV")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_extract_features)

    p = sub.add_parser("train-ser", help="grid-search and fit the affect model")
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_ser)

    p = sub.add_parser("eval-ser", help="shuffled train/test trials, mean/sd report")
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument(
        "--search-each-trial",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="re-run the grid search inside every trial (default: config setting)",
    )
    p.set_defaults(func=cmd_eval_ser)

    p = sub.add_parser("predict-affect", help="per-clip valence/arousal predictions")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict_affect)

    p = sub.add_parser("label-emotions", help="qualified emotion labels for affect points")
    p.add_argument("--affects", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--distribution-in", help="reuse a saved magnitude distribution")
    p.add_argument("--distribution-out", help="save the magnitude distribution")
    p.set_defaults(func=cmd_label_emotions)

    p = sub.add_parser("build-events", help="strong labels + ontology -> event timelines")
    p.add_argument("--tsv", required=True)
    p.add_argument("--ontology", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lenient", action="store_true", help="skip bad rows / unknown ids")
    p.set_defaults(func=cmd_build_events)

    p = sub.add_parser("gen-captions", help="LLM captions for one prompt variant")
    p.add_argument("--events", required=True)
    p.add_argument("--emotions", help="emotion JSONL (required for emotion variants)")
    p.add_argument("--variant", required=True, choices=VARIANTS)
    p.add_argument("--out", required=True)
    p.add_argument("--manifest", help="manifest path (default: <out>.manifest.json)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--dry-run", action="store_true", help="print prompts, no requests")
    p.add_argument("--fail-fast", action="store_true")
    p.add_argument("--unqualified-mood", action="store_true",
                   help="send bare emotion names without intensity qualifiers")
    p.set_defaults(func=cmd_gen_captions)

    p = sub.add_parser("stats", help="word-count and flag statistics per subset")
    p.add_argument("records", nargs="+")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except Exception as exc:  # one-line machine-parseable failure
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
