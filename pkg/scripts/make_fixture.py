#!/usr/bin/env python3
"""Regenerate the bundled offline fixture under fixtures/.

Ten synthetic 3-second WAV clips (16 kHz, 16-bit PCM) made of seeded
sine-plus-noise mixtures, with affect labels derived from the synthesis
parameters (arousal tracks signal energy, valence drops with the noise
share), a strong-label TSV whose rows reference a small ontology, and a
pipeline config sized for fast offline runs.  Everything is derived
from fixed seeds and tables, so rerunning this script is a no-op diff.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from moodcap.dsp.wavio import Waveform, write_wav

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"
SAMPLE_RATE = 16_000
DURATION_S = 3.0

# (tone Hz, tone amplitude, noise amplitude, second-harmonic amplitude)
CLIP_PARAMS = [
    (220.0, 0.45, 0.02, 0.20),
    (330.0, 0.40, 0.05, 0.15),
    (440.0, 0.35, 0.10, 0.10),
    (550.0, 0.30, 0.15, 0.08),
    (660.0, 0.25, 0.20, 0.05),
    (880.0, 0.20, 0.25, 0.04),
    (1200.0, 0.15, 0.30, 0.03),
    (1760.0, 0.12, 0.35, 0.02),
    (2000.0, 0.08, 0.40, 0.01),
    (2500.0, 0.05, 0.45, 0.00),
]

ONTOLOGY = [
    {"id": "/m/0ngt1", "name": "Thunder"},
    {"id": "/m/0838f", "name": "Rain on surface"},
    {"id": "/m/03m9d0z", "name": "Wind"},
    {"id": "/m/07pjwq1", "name": "Rustle"},
    {"id": "/m/020bb7", "name": "Bird vocalization, bird call, bird song"},
    {"id": "/m/0jbk", "name": "Animal"},
    {"id": "/m/012xff", "name": "Vehicle horn, car horn, honking"},
    {"id": "/m/06mb1", "name": "Speech"},
    {"id": "/m/04rlf", "name": "Music"},
    {"id": "/m/0dgw9r", "name": "Footsteps"},
    {"id": "/m/09x0r", "name": "Stream"},
    {"id": "/m/03kmc9", "name": "Siren"},
]

# clip index -> [(onset, offset, ontology id)]; clip_03 reproduces the
# overlapping-thunder layout whose timeline is ['Thunder', 'Rain on surface']
STRONG_LABELS: dict[int, list[tuple[float, float, str]]] = {
    0: [(0.0, 3.0, "/m/04rlf")],
    1: [(0.0, 1.5, "/m/06mb1"), (1.0, 3.0, "/m/0dgw9r")],
    2: [(0.2, 2.0, "/m/03m9d0z"), (0.2, 2.5, "/m/07pjwq1"), (1.8, 3.0, "/m/020bb7")],
    3: [(0.0, 2.1, "/m/0ngt1"), (1.2, 5.3, "/m/0838f"), (4.0, 6.0, "/m/0ngt1")],
    4: [(0.0, 3.0, "/m/09x0r"), (0.5, 1.0, "/m/020bb7"), (1.5, 2.0, "/m/020bb7")],
    5: [(0.3, 0.9, "/m/012xff"), (0.3, 2.9, "/m/03kmc9")],
    6: [(0.0, 2.0, "/m/0jbk"), (2.0, 3.0, "/m/0jbk")],
    7: [(0.1, 1.1, "/m/0dgw9r"), (0.1, 1.1, "/m/06mb1"), (2.0, 2.8, "/m/012xff")],
    8: [(0.0, 3.0, "/m/03m9d0z"), (0.0, 3.0, "/m/09x0r")],
    9: [(0.5, 2.5, "/m/04rlf"), (0.0, 0.4, "/m/06mb1")],
}

CONFIG_YAML = """\
# Offline pipeline settings sized for the 10-clip fixture.
dsp:
  sample_rate: 22050
  frame_len: 1024
  hop: 512
grid:
  c: [1.0, 10.0]
  gamma: [scale]
  kernels: [rbf, linear]
  k_pca: [2, 4]
  epsilon: 0.1
  folds: 3
trials:
  count: 1
  base_seed: 7
llm:
  endpoint: mock
  model: mock-model
  temperature: 1.0
  cache_dir: cache
"""


def synthesize(index: int) -> Waveform:
    f0, a_tone, a_noise, a_h2 = CLIP_PARAMS[index]
    rng = np.random.default_rng(1000 + index)
    t = np.arange(int(SAMPLE_RATE * DURATION_S)) / SAMPLE_RATE
    x = (
        a_tone * np.sin(2 * np.pi * f0 * t)
        + a_h2 * np.sin(2 * np.pi * 2 * f0 * t + 0.7)
        + a_noise * rng.uniform(-1.0, 1.0, t.size)
    )
    return Waveform(np.clip(x, -1.0, 1.0), SAMPLE_RATE)


def labels_for(index: int) -> tuple[float, float]:
    _, a_tone, a_noise, a_h2 = CLIP_PARAMS[index]
    energy = np.sqrt((a_tone**2 + a_h2**2) / 2 + a_noise**2 / 3)
    arousal = float(np.clip(2.5 * energy - 0.6, -0.95, 0.95))
    valence = float(np.clip(0.9 - 1.8 * a_noise / (a_tone + a_noise), -0.95, 0.95))
    return round(valence, 4), round(arousal, 4)


def main() -> None:
    audio_dir = FIXTURES / "audio"
    audio_dir.mkdir(parents=True, exist_ok=True)

    label_lines = ["filename,valence,arousal"]
    for i in range(len(CLIP_PARAMS)):
        name = f"clip_{i:02d}"
        clip = synthesize(i)
        write_wav(audio_dir / f"{name}.wav", clip.samples, clip.sample_rate, bits=16)
        valence, arousal = labels_for(i)
        label_lines.append(f"{name}.wav,{valence},{arousal}")
    (FIXTURES / "labels.csv").write_text("\n".join(label_lines) + "\n", encoding="utf-8")

    tsv_lines = ["segment_id\tstart_time_seconds\tend_time_seconds\tlabel"]
    for i in sorted(STRONG_LABELS):
        for onset, offset, mid in STRONG_LABELS[i]:
            tsv_lines.append(f"clip_{i:02d}\t{onset}\t{offset}\t{mid}")
    (FIXTURES / "strong_labels.tsv").write_text("\n".join(tsv_lines) + "\n", encoding="utf-8")

    import json

    (FIXTURES / "ontology.json").write_text(
        json.dumps(ONTOLOGY, indent=1, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    (FIXTURES / "config.yaml").write_text(CONFIG_YAML, encoding="utf-8")
    print(f"fixture written under {FIXTURES}")


if __name__ == "__main__":
    main()
