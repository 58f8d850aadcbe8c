"""Minimal PCM WAV decoding and encoding.

Reads 8/16/24/32-bit integer and 32-bit float RIFF/WAVE files (plus the
WAVE_FORMAT_EXTENSIBLE wrapper around either), mono or multichannel.
Multichannel audio is downmixed by channel mean; integer samples are
scaled by 2^(bits-1) so everything lands in [-1, 1].
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE


class WavError(ValueError):
    """Unreadable, unsupported, or empty WAV input."""


@dataclass
class Waveform:
    """Mono audio: float samples in [-1, 1] at a positive sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise WavError("waveform samples must be one-dimensional")
        if self.sample_rate <= 0:
            raise WavError(f"sample rate must be positive, got {self.sample_rate}")
        if self.samples.size and not np.all(np.isfinite(self.samples)):
            raise WavError("waveform contains non-finite samples")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


def _parse_fmt(payload: bytes) -> tuple[int, int, int]:
    """Return (format tag, channels, bits per sample) from an fmt chunk."""
    if len(payload) < 16:
        raise WavError("fmt chunk too short")
    tag, channels, _rate, _byte_rate, _align, bits = struct.unpack("<HHIIHH", payload[:16])
    if tag == WAVE_FORMAT_EXTENSIBLE:
        # Actual codec lives in the first two bytes of the SubFormat GUID.
        if len(payload) < 40:
            raise WavError("extensible fmt chunk too short")
        tag = struct.unpack("<H", payload[24:26])[0]
    return tag, channels, bits


def _decode(data: bytes, tag: int, bits: int) -> np.ndarray:
    if tag == WAVE_FORMAT_IEEE_FLOAT:
        if bits != 32:
            raise WavError(f"unsupported float depth: {bits}-bit")
        return np.clip(np.frombuffer(data, dtype="<f4").astype(np.float64), -1.0, 1.0)
    if tag != WAVE_FORMAT_PCM:
        raise WavError(f"unsupported WAV format tag 0x{tag:04x}")
    if bits == 8:
        return (np.frombuffer(data, dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
    if bits == 16:
        return np.frombuffer(data, dtype="<i2").astype(np.float64) / 32768.0
    if bits == 24:
        raw = np.frombuffer(data, dtype=np.uint8)
        if raw.size % 3:
            raise WavError("24-bit data chunk is not a whole number of samples")
        raw = raw.reshape(-1, 3).astype(np.int64)
        vals = raw[:, 0] | (raw[:, 1] << 8) | (raw[:, 2] << 16)
        vals -= (vals >> 23) << 24  # sign extension
        return vals.astype(np.float64) / float(1 << 23)
    if bits == 32:
        return np.frombuffer(data, dtype="<i4").astype(np.float64) / float(1 << 31)
    raise WavError(f"unsupported PCM depth: {bits}-bit")


def load_wav(path: str | Path) -> Waveform:
    """Decode a PCM WAV file to a normalized mono waveform.

    Raises :class:`WavError` for unreadable files, unsupported encodings,
    or zero-length audio.
    """
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise WavError(f"cannot read {path}: {exc}") from exc
    if len(blob) < 12 or blob[:4] != b"RIFF" or blob[8:12] != b"WAVE":
        raise WavError(f"{path} is not a RIFF/WAVE file")

    fmt = None
    data = None
    rate = None
    pos = 12
    while pos + 8 <= len(blob):
        cid = blob[pos : pos + 4]
        size = struct.unpack("<I", blob[pos + 4 : pos + 8])[0]
        payload = blob[pos + 8 : pos + 8 + size]
        if cid == b"fmt ":
            fmt = _parse_fmt(payload)
            rate = struct.unpack("<I", payload[4:8])[0]
        elif cid == b"data":
            data = payload
        pos += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt is None:
        raise WavError(f"{path}: missing fmt chunk")
    if data is None:
        raise WavError(f"{path}: missing data chunk")
    tag, channels, bits = fmt
    if channels < 1:
        raise WavError(f"{path}: invalid channel count {channels}")

    samples = _decode(data, tag, bits)
    if samples.size == 0:
        raise WavError(f"{path}: zero-length audio")
    if channels > 1:
        if samples.size % channels:
            raise WavError(f"{path}: data not divisible into {channels} channels")
        samples = samples.reshape(-1, channels).mean(axis=1)
    return Waveform(samples, rate)


def write_wav(path: str | Path, samples: np.ndarray, sample_rate: int, bits: int = 16) -> None:
    """Write mono float samples in [-1, 1] as 16-bit PCM or 32-bit float WAV."""
    samples = np.asarray(samples, dtype=np.float64)
    if bits == 16:
        tag, sampwidth = WAVE_FORMAT_PCM, 2
        payload = np.clip(np.round(samples * 32768.0), -32768, 32767).astype("<i2").tobytes()
    elif bits == 32:
        tag, sampwidth = WAVE_FORMAT_IEEE_FLOAT, 4
        payload = samples.astype("<f4").tobytes()
    else:
        raise WavError(f"writer supports 16-bit PCM and 32-bit float, not {bits}-bit")
    fmt = struct.pack("<HHIIHH", tag, 1, sample_rate, sample_rate * sampwidth, sampwidth, 8 * sampwidth)
    with open(path, "wb") as fh:
        fh.write(b"RIFF")
        fh.write(struct.pack("<I", 4 + 8 + len(fmt) + 8 + len(payload)))
        fh.write(b"WAVE")
        fh.write(b"fmt " + struct.pack("<I", len(fmt)) + fmt)
        fh.write(b"data" + struct.pack("<I", len(payload)) + payload)
