"""Per-frame acoustic features and the 72-value clip summary vector.

Each frame yields 36 named features, in this fixed order:

    mfcc_00 .. mfcc_12            13 MFCCs (log-mel cepstrum, DCT-II ortho)
    delta_mfcc_00 .. delta_mfcc_12  regression-slope deltas of the MFCCs
    zcr                           zero-crossing rate, [0, 1]
    spectral_centroid             magnitude-weighted mean frequency, Hz
    spectral_bandwidth            magnitude-weighted frequency std, Hz
    spectral_contrast             mean octave-band peak/valley dB spread
    spectral_flatness             geometric/arithmetic power mean, [0, 1]
    spectral_rolloff              85% cumulative-energy frequency, Hz
    loudness                      frame power in dB (floored at -80 dB)
    delta_loudness                regression-slope delta of loudness
    rms                           root-mean-square amplitude
    delta_rms                     regression-slope delta of rms

The clip-level vector is the per-feature mean over frames followed by the
per-feature (population) standard deviation: 72 values.  Zero-crossing
rate, rms, and loudness are computed on the raw time-domain frame; every
spectral feature sees the Hann-windowed frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.fft import dct

from ..jsonio import dump_jsonl, load_jsonl
from .wavio import Waveform

FEATURE_NAMES: tuple[str, ...] = (
    tuple(f"mfcc_{i:02d}" for i in range(13))
    + tuple(f"delta_mfcc_{i:02d}" for i in range(13))
    + (
        "zcr",
        "spectral_centroid",
        "spectral_bandwidth",
        "spectral_contrast",
        "spectral_flatness",
        "spectral_rolloff",
        "loudness",
        "delta_loudness",
        "rms",
        "delta_rms",
    )
)

VECTOR_NAMES: tuple[str, ...] = tuple(f"mean_{n}" for n in FEATURE_NAMES) + tuple(
    f"std_{n}" for n in FEATURE_NAMES
)

N_FEATURES = len(FEATURE_NAMES)  # 36
N_VECTOR = 2 * N_FEATURES  # 72

POWER_FLOOR = 1e-10  # log floor for mel bands / flatness / contrast
LOUDNESS_FLOOR_DB = -80.0


@dataclass(frozen=True)
class DspConfig:
    """Analysis settings; defaults are standard MIR choices and overridable."""

    sample_rate: int = 22050
    frame_len: int = 2048
    hop: int = 512
    n_mels: int = 64
    n_mfcc: int = 13
    fmin: float = 0.0
    fmax: float | None = None  # None means Nyquist
    delta_width: int = 9
    contrast_fmin: float = 200.0
    contrast_bands: int = 6
    contrast_quantile: float = 0.02

    def __post_init__(self):
        if self.frame_len < 2 or self.hop < 1:
            raise ValueError("frame_len must be >= 2 and hop >= 1")
        if self.delta_width < 3 or self.delta_width % 2 == 0:
            raise ValueError("delta_width must be odd and >= 3")
        nyquist = self.sample_rate / 2.0
        if self.fmax is not None and self.fmax > nyquist:
            raise ValueError(f"fmax {self.fmax} exceeds Nyquist {nyquist}")

    @property
    def mel_fmax(self) -> float:
        return self.sample_rate / 2.0 if self.fmax is None else self.fmax


@dataclass
class FeatureVector:
    """72 summary statistics for one clip, ordered as in VECTOR_NAMES."""

    clip_id: str
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (N_VECTOR,):
            raise ValueError(f"expected {N_VECTOR} values, got shape {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"non-finite feature values for clip {self.clip_id!r}")


def frame_signal(samples: np.ndarray | Waveform, frame_len: int, hop: int) -> np.ndarray:
    """Slice a signal into overlapping frames, shape (n_frames, frame_len).

    A signal shorter than one frame yields a single zero-padded frame;
    otherwise only complete frames are kept: floor((len-frame_len)/hop)+1.
    """
    if frame_len < 2 or hop < 1:
        raise ValueError("frame_len must be >= 2 and hop >= 1")
    if isinstance(samples, Waveform):
        samples = samples.samples
    samples = np.asarray(samples, dtype=np.float64)
    n = samples.size
    if n < frame_len:
        frame = np.zeros(frame_len)
        frame[:n] = samples
        return frame[None, :]
    n_frames = (n - frame_len) // hop + 1
    starts = np.arange(n_frames) * hop
    idx = starts[:, None] + np.arange(frame_len)[None, :]
    return samples[idx]


def resample_linear(samples: np.ndarray, sr_in: int, sr_out: int) -> np.ndarray:
    if sr_in == sr_out:
        return np.asarray(samples, dtype=np.float64)
    samples = np.asarray(samples, dtype=np.float64)
    n_out = max(1, int(round(samples.size * sr_out / sr_in)))
    t_out = np.arange(n_out) * (sr_in / sr_out)
    return np.interp(t_out, np.arange(samples.size), samples)


def _hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def _mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int, n_fft: int, sample_rate: int, fmin: float, fmax: float) -> np.ndarray:
    """Triangular mel filters evaluated at FFT bin frequencies, (n_mels, n_bins)."""
    bin_freqs = np.fft.rfftfreq(n_fft, d=1.0 / sample_rate)
    edges = _mel_to_hz(np.linspace(_hz_to_mel(fmin), _hz_to_mel(fmax), n_mels + 2))
    fb = np.zeros((n_mels, bin_freqs.size))
    for m in range(n_mels):
        lo, mid, hi = edges[m], edges[m + 1], edges[m + 2]
        up = (bin_freqs - lo) / max(mid - lo, 1e-12)
        down = (hi - bin_freqs) / max(hi - mid, 1e-12)
        fb[m] = np.maximum(0.0, np.minimum(up, down))
    return fb


def power_spectra(frames: np.ndarray) -> np.ndarray:
    """Hann-windowed power spectra, one row per frame."""
    window = np.hanning(frames.shape[1])
    return np.abs(np.fft.rfft(frames * window, axis=1)) ** 2


def mfcc(frames: np.ndarray, cfg: DspConfig) -> np.ndarray:
    """Per-frame cepstra: power spectrum -> mel bank -> log -> DCT-II (ortho).

    Silent mel bands are floored at POWER_FLOOR before the log, so an
    all-zero frame maps to the DCT of a constant log-floor vector.
    """
    power = power_spectra(frames)
    fb = mel_filterbank(cfg.n_mels, cfg.frame_len, cfg.sample_rate, cfg.fmin, cfg.mel_fmax)
    mel_energy = np.maximum(power @ fb.T, POWER_FLOOR)
    return dct(np.log(mel_energy), type=2, axis=1, norm="ortho")[:, : cfg.n_mfcc]


def delta(seq: np.ndarray, width: int = 9) -> np.ndarray:
    """Local linear-regression slope over a centered window of `width` frames.

    Edge frames are handled by edge replication; output length equals input.
    Works on (n_frames,) or (n_frames, d) input.
    """
    if width < 3 or width % 2 == 0:
        raise ValueError("width must be odd and >= 3")
    seq = np.asarray(seq, dtype=np.float64)
    if seq.size == 0:
        raise ValueError("empty sequence")
    squeeze = seq.ndim == 1
    if squeeze:
        seq = seq[:, None]
    half = width // 2
    padded = np.pad(seq, ((half, half), (0, 0)), mode="edge")
    offsets = np.arange(-half, half + 1)
    denom = float(np.sum(offsets**2))
    out = np.zeros_like(seq)
    for k, n in enumerate(offsets):
        out += n * padded[k : k + seq.shape[0]]
    out /= denom
    return out[:, 0] if squeeze else out


def _zero_crossing_rate(frames: np.ndarray) -> np.ndarray:
    nonneg = frames >= 0.0
    changes = np.count_nonzero(nonneg[:, 1:] != nonneg[:, :-1], axis=1)
    return changes / (frames.shape[1] - 1)


def _spectral_contrast(power: np.ndarray, bin_freqs: np.ndarray, cfg: DspConfig) -> np.ndarray:
    """Scalar contrast per frame: octave-band (peak dB - valley dB), band-averaged.

    Bands are [0, f0], [f0, 2 f0], ... doubling up to Nyquist; peak/valley are
    means of the top/bottom quantile of each band's power bins.
    """
    nyquist = bin_freqs[-1]
    edges = [0.0]
    f = cfg.contrast_fmin
    for _ in range(cfg.contrast_bands - 1):
        edges.append(min(f, nyquist))
        f *= 2.0
    edges.append(nyquist)

    contrasts = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (bin_freqs >= lo) & (bin_freqs <= hi)
        if not np.any(sel):
            continue
        band = np.sort(np.maximum(power[:, sel], POWER_FLOOR), axis=1)
        k = max(1, int(round(cfg.contrast_quantile * band.shape[1])))
        valley = 10.0 * np.log10(band[:, :k].mean(axis=1))
        peak = 10.0 * np.log10(band[:, -k:].mean(axis=1))
        contrasts.append(peak - valley)
    return np.mean(contrasts, axis=0)


def spectral_descriptors(frames: np.ndarray, cfg: DspConfig) -> dict[str, np.ndarray]:
    """Per-frame scalar descriptors; zcr/rms/loudness use the raw frame.

    All-zero frames take documented sentinels: zcr 0, rms 0, flatness 1,
    centroid/bandwidth/rolloff 0, loudness at the -80 dB floor.
    """
    power = power_spectra(frames)
    bin_freqs = np.fft.rfftfreq(cfg.frame_len, d=1.0 / cfg.sample_rate)

    mean_power = np.mean(frames**2, axis=1)
    rms = np.sqrt(mean_power)
    loudness = 10.0 * np.log10(mean_power + 10.0 ** (LOUDNESS_FLOOR_DB / 10.0))

    mag = np.sqrt(power)
    mag_sum = mag.sum(axis=1)
    safe = np.where(mag_sum > 0.0, mag_sum, 1.0)
    centroid = np.where(mag_sum > 0.0, (mag * bin_freqs).sum(axis=1) / safe, 0.0)
    spread = (bin_freqs[None, :] - centroid[:, None]) ** 2
    bandwidth = np.where(mag_sum > 0.0, np.sqrt((mag * spread).sum(axis=1) / safe), 0.0)

    floored = np.maximum(power, POWER_FLOOR)
    flatness = np.exp(np.mean(np.log(floored), axis=1)) / np.mean(floored, axis=1)

    total = power.sum(axis=1)
    cum = np.cumsum(power, axis=1)
    thresh = 0.85 * total
    # lowest bin where cumulative energy reaches 85% of the total
    reached = cum >= thresh[:, None] - 1e-300
    first = np.argmax(reached, axis=1)
    rolloff = np.where(total > 0.0, bin_freqs[first], 0.0)

    return {
        "zcr": _zero_crossing_rate(frames),
        "spectral_centroid": centroid,
        "spectral_bandwidth": bandwidth,
        "spectral_contrast": _spectral_contrast(power, bin_freqs, cfg),
        "spectral_flatness": flatness,
        "spectral_rolloff": rolloff,
        "loudness": loudness,
        "rms": rms,
    }


def frame_features(w: Waveform, cfg: DspConfig) -> np.ndarray:
    """The (n_frames, 36) per-frame feature matrix in FEATURE_NAMES order."""
    samples = resample_linear(w.samples, w.sample_rate, cfg.sample_rate)
    frames = frame_signal(samples, cfg.frame_len, cfg.hop)
    ceps = mfcc(frames, cfg)
    desc = spectral_descriptors(frames, cfg)
    cols = [
        ceps,
        delta(ceps, cfg.delta_width),
        desc["zcr"][:, None],
        desc["spectral_centroid"][:, None],
        desc["spectral_bandwidth"][:, None],
        desc["spectral_contrast"][:, None],
        desc["spectral_flatness"][:, None],
        desc["spectral_rolloff"][:, None],
        desc["loudness"][:, None],
        delta(desc["loudness"], cfg.delta_width)[:, None],
        desc["rms"][:, None],
        delta(desc["rms"], cfg.delta_width)[:, None],
    ]
    return np.hstack(cols)


def extract_features(w: Waveform, cfg: DspConfig = DspConfig(), clip_id: str = "") -> FeatureVector:
    """Summarize a waveform into the 72-value vector [means | stds]."""
    if len(w) == 0:
        raise ValueError("cannot extract features from empty audio")
    feats = frame_features(w, cfg)
    return FeatureVector(clip_id, np.concatenate([feats.mean(axis=0), feats.std(axis=0)]))


def write_features_jsonl(features: list[FeatureVector], path: str | Path) -> None:
    dump_jsonl(
        ({"clip_id": f.clip_id, "features": f.values.tolist()} for f in features), path
    )


def read_features_jsonl(path: str | Path) -> list[FeatureVector]:
    return [FeatureVector(obj["clip_id"], np.array(obj["features"])) for obj in load_jsonl(path)]


def write_features_csv(features: list[FeatureVector], path: str | Path) -> None:
    """CSV with a 73-column header: clip_id plus the 72 named statistics."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(("clip_id",) + VECTOR_NAMES) + "\n")
        for f in features:
            fh.write(",".join([f.clip_id] + [repr(v) for v in f.values.tolist()]) + "\n")
