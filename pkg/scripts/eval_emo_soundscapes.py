#!/usr/bin/env python3
"""Prepare and score a real soundscape corpus with affect ratings.

Point this at a directory tree of WAV clips plus two rating CSVs (one
valence, one arousal; rows of "clip name, score in [-1, 1]", header
optional).  The script extracts the 72-value feature vector for every
rated clip, writes features.jsonl and labels.csv into --out-dir, and
unless --prepare-only is given runs the shuffled-split trial evaluation
and prints mean R^2 and MSE per target.  The test suite picks a
prepared directory up through the MOODCAP_EMO_SOUNDSCAPES environment
variable.
"""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from moodcap.config import load_config
from moodcap.dsp.features import extract_features, read_features_jsonl, write_features_jsonl
from moodcap.dsp.wavio import load_wav
from moodcap.regression.evaluate import evaluate_trials
from moodcap.regression.model import join_features_labels, load_labels_csv


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--audio-dir", required=True, help="root of the WAV tree")
    parser.add_argument("--valence-csv", required=True)
    parser.add_argument("--arousal-csv", required=True)
    parser.add_argument("--out-dir", required=True,
                        help="where features.jsonl and labels.csv are written")
    parser.add_argument("--config", help="YAML pipeline config (defaults built in)")
    parser.add_argument("--prepare-only", action="store_true",
                        help="stop after writing features and labels")
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=4)
    parser.add_argument("--search-each-trial", action="store_true",
                        help="re-run the grid search inside every trial (slow)")
    return parser.parse_args()


def read_ratings(path: str | Path) -> dict[str, float]:
    """Clip stem -> score.  Non-numeric rows (headers) are skipped."""
    table: dict[str, float] = {}
    with open(path, newline="", encoding="utf-8-sig") as fh:
        for row in csv.reader(fh):
            if len(row) < 2 or not row[0].strip():
                continue
            try:
                score = float(row[-1])
            except ValueError:
                continue
            stem = Path(row[0].strip()).stem
            if stem in table:
                raise SystemExit(f"duplicate clip name {stem!r} in {path}")
            table[stem] = score
    if not table:
        raise SystemExit(f"no numeric rating rows in {path}")
    return table


def main() -> None:
    args = parse_args()
    cfg = load_config(args.config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    valence = read_ratings(args.valence_csv)
    arousal = read_ratings(args.arousal_csv)
    rated = set(valence) & set(arousal)
    one_sided = (set(valence) | set(arousal)) - rated
    if one_sided:
        print(f"skipping {len(one_sided)} clip(s) rated on only one axis", file=sys.stderr)

    wavs = sorted(
        p for p in Path(args.audio_dir).rglob("*")
        if p.is_file() and p.suffix.lower() == ".wav" and p.stem in rated
    )
    if not wavs:
        raise SystemExit(f"no rated .wav files under {args.audio_dir}")
    stems = [p.stem for p in wavs]
    dupes = {s for s in stems if stems.count(s) > 1}
    if dupes:
        raise SystemExit(f"duplicate clip names in the audio tree: {sorted(dupes)[:5]}")
    unmatched = rated - set(stems)
    if unmatched:
        print(f"{len(unmatched)} rated clip(s) have no audio file", file=sys.stderr)

    print(f"extracting features for {len(wavs)} clips...", file=sys.stderr)
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        vectors = list(
            pool.map(lambda p: extract_features(load_wav(p), cfg.dsp, p.stem), wavs)
        )
    write_features_jsonl(vectors, out_dir / "features.jsonl")

    with open(out_dir / "labels.csv", "w", encoding="utf-8") as fh:
        fh.write("filename,valence,arousal\n")
        for stem in sorted(set(stems)):
            fh.write(f"{stem},{valence[stem]},{arousal[stem]}\n")
    print(f"wrote features.jsonl and labels.csv under {out_dir}", file=sys.stderr)

    if args.prepare_only:
        print(f"export MOODCAP_EMO_SOUNDSCAPES={out_dir} to use these in the test suite")
        return

    dataset = join_features_labels(
        read_features_jsonl(out_dir / "features.jsonl"),
        load_labels_csv(out_dir / "labels.csv"),
    )
    stats = evaluate_trials(
        dataset,
        n_trials=args.trials,
        base_seed=args.seed,
        grid=cfg.grid,
        folds=cfg.folds,
        search_each_trial=args.search_each_trial,
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


if __name__ == "__main__":
    main()
