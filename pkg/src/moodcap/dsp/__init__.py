from .features import (
    DspConfig,
    FeatureVector,
    FEATURE_NAMES,
    VECTOR_NAMES,
    delta,
    extract_features,
    frame_signal,
    mfcc,
    read_features_jsonl,
    spectral_descriptors,
    write_features_csv,
    write_features_jsonl,
)
from .wavio import Waveform, WavError, load_wav, write_wav

__all__ = [
    "DspConfig",
    "FeatureVector",
    "FEATURE_NAMES",
    "VECTOR_NAMES",
    "Waveform",
    "WavError",
    "delta",
    "extract_features",
    "frame_signal",
    "load_wav",
    "mfcc",
    "read_features_jsonl",
    "spectral_descriptors",
    "write_features_csv",
    "write_features_jsonl",
    "write_wav",
]
