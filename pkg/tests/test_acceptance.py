"""Whole-pipeline acceptance suite.

Each class restates one external guarantee of the package against an
independent oracle: exhaustive cosine comparison for the affect
sectors, a brute-force feasible-point grid for the SVR dual, a fresh
SVD for the PCA, a hand-rolled cross-validation loop plus call spies
for the grid search, scripted backend faults for the caption batch,
and byte comparison for the end-to-end artifact chain.  Two classes
consume optional real-data directories named by environment variables
and skip when those are absent.
"""

import json
import math
import os
import re
import time
from pathlib import Path

import numpy as np
import pytest

import moodcap.regression.gridsearch as gs
from moodcap.circumplex import (
    EMOTION_AXES,
    AffectPoint,
    MagnitudeDistribution,
    nearest_emotion,
    percentile_of,
    projection_magnitude,
    qualify,
)
from moodcap.cli import main
from moodcap.dsp.features import (
    VECTOR_NAMES,
    DspConfig,
    extract_features,
    read_features_jsonl,
)
from moodcap.dsp.wavio import Waveform
from moodcap.events import EventTimeline, build_corpus_timelines, write_timelines_jsonl
from moodcap.prompting.batch import generate_corpus
from moodcap.prompting.client import (
    CompletionError,
    LlmClient,
    LlmConfig,
    MockChatBackend,
    TransientBackendError,
    mock_caption,
)
from moodcap.prompting.templates import (
    EMOTION_ADDON_INSTRUCTION,
    EMOTION_REWRITE_INSTRUCTION,
    SCENE_FOCUSED_INSTRUCTION,
    WAVCAPS_INSTRUCTION,
    render_prompt,
)
from moodcap.regression.evaluate import evaluate_trials
from moodcap.regression.gridsearch import CvCell, SearchGrid, grid_search_cv, kfold_indices
from moodcap.regression.model import join_features_labels, load_labels_csv
from moodcap.regression.pca import fit_scaler, pca_fit, pca_transform
from moodcap.regression.svr import (
    SvrParams,
    kernel_matrix,
    resolve_gamma,
    smo_solve,
    svr_fit,
    svr_predict,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

EMO_SOUNDSCAPES_ENV = "MOODCAP_EMO_SOUNDSCAPES"
EMOTIONCAPS_ENV = "MOODCAP_EMOTIONCAPS_DIR"


# --- 1. affect sectors against exhaustive recomputation -----------------


class TestSectorOracle:
    def test_nearest_axis_matches_exhaustive_cosine(self):
        start = time.perf_counter()
        angles = np.deg2rad(np.arange(360.0))
        points = np.column_stack([np.cos(angles), np.sin(angles)])
        rng = np.random.default_rng(1234)
        points = np.vstack([points, rng.uniform(-1.0, 1.0, size=(1000, 2))])

        for v, a in points:
            p = AffectPoint(float(v), float(a))
            got = nearest_emotion(p)
            vec = np.array([p.valence, p.arousal])
            norm = np.linalg.norm(vec)
            if norm == 0.0:
                assert got is None
                continue
            cosines = [float(vec @ ax.unit_vector) / norm for ax in EMOTION_AXES]
            assert got is EMOTION_AXES[int(np.argmax(cosines))]
            magnitude = projection_magnitude(p, got)
            assert abs(magnitude - float(vec @ got.unit_vector)) <= 1e-12
        assert time.perf_counter() - start < 1.0


# --- 2. intensity qualifier bands ----------------------------------------


class TestQualifierBands:
    def test_band_counts_on_uniform_magnitude_ladder(self):
        magnitudes = [0.01 * i for i in range(1, 101)]
        dist = MagnitudeDistribution(np.array(magnitudes))
        axis = EMOTION_AXES[0]
        counts = {"neutral": 0, "slightly": 0, "plain": 0, "highly": 0}
        for m in magnitudes:
            q = qualify(axis, percentile_of(dist, m), m)
            counts[q.qualifier] += 1
        assert counts == {"neutral": 14, "slightly": 35, "plain": 35, "highly": 16}

    def test_band_boundaries_are_half_open(self):
        axis = EMOTION_AXES[0]
        assert qualify(axis, 0.15).qualifier == "slightly"
        assert qualify(axis, 0.50).qualifier == "plain"
        assert qualify(axis, 0.85).qualifier == "highly"
        assert qualify(axis, 1.00).qualifier == "highly"


# --- 3. SVR dual optimality against a brute-force feasible grid ----------


def dual_objective(K, y, epsilon, beta):
    """Value the solver maximizes, written in the beta = a - a* form."""
    return float(-(0.5 * beta @ K @ beta + epsilon * np.abs(beta).sum() - y @ beta))


def brute_force_dual_max(K, y, c, epsilon, points=21):
    """Best dual value over a lattice of feasible beta vectors.

    The lattice spans the first n-1 coordinates; the last one is forced
    by the equality constraint and rows pushed outside the box drop out.
    """
    n = y.size
    axes = np.meshgrid(*([np.linspace(-c, c, points)] * (n - 1)), indexing="ij")
    head = np.stack([m.ravel() for m in axes], axis=1)
    tail = -head.sum(axis=1, keepdims=True)
    B = np.hstack([head, tail])
    B = B[np.abs(B[:, -1]) <= c + 1e-12]
    quad = 0.5 * np.einsum("ij,jk,ik->i", B, K, B)
    values = -(quad + epsilon * np.abs(B).sum(axis=1) - B @ y)
    return float(values.max())


def assert_kkt(K, y, c, epsilon, beta, bias, tol):
    residual = y - (K @ beta + bias)
    assert abs(float(beta.sum())) <= 1e-9 * max(1.0, c)
    for b, r in zip(beta, residual):
        assert abs(b) <= c + 1e-12
        if abs(b) <= 1e-10:
            assert abs(r) <= epsilon + tol
        elif b >= c - 1e-10:
            assert r >= epsilon - tol
        elif b <= -c + 1e-10:
            assert r <= -epsilon + tol
        elif b > 0:
            assert abs(r - epsilon) <= tol
        else:
            assert abs(r + epsilon) <= tol


class TestSvrOptimality:
    def test_seeded_problems_and_line_fit(self):
        start = time.perf_counter()
        kernels = ("rbf", "linear", "poly")
        c, epsilon = 1.0, 0.1
        for seed in range(20):
            rng = np.random.default_rng(seed)
            n = 2 + seed % 3
            X = rng.uniform(-1.0, 1.0, size=(n, 2))
            y = rng.uniform(-1.0, 1.0, size=n)
            kernel = kernels[seed % 3]
            gamma = resolve_gamma(SvrParams(c=c, gamma="scale", kernel=kernel), X)
            K = kernel_matrix(kernel, gamma, X, X)

            beta, bias, _ = smo_solve(K, y, c, epsilon, tol=1e-6)
            ours = dual_objective(K, y, epsilon, beta)
            theirs = brute_force_dual_max(K, y, c, epsilon)
            assert ours >= theirs - 1e-3, f"seed {seed}: {ours} < {theirs}"
            assert_kkt(K, y, c, epsilon, beta, bias, tol=1e-3)

        x = np.linspace(-1.0, 1.0, 25).reshape(-1, 1)
        target = 2.0 * x[:, 0] + 1.0
        params = SvrParams(c=100.0, gamma="scale", kernel="linear", epsilon=0.01)
        model = svr_fit(x, target, params)
        error = np.abs(svr_predict(model, x) - target)
        assert float(error.max()) <= 0.01 + 1e-3
        assert time.perf_counter() - start < 10.0


# --- 4. PCA against an independent SVD -----------------------------------


class TestPcaOracle:
    def test_twenty_seeded_matrices(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            X = rng.normal(size=(30, 72)) * rng.uniform(0.5, 2.0, size=72)

            centered = X - X.mean(axis=0)
            _, s, vt = np.linalg.svd(centered, full_matrices=False)
            oracle_var = s**2 / (X.shape[0] - 1)

            top = pca_fit(X, 10)
            for i in range(10):
                row = top.components[i]
                ref = vt[i] if float(vt[i] @ row) >= 0 else -vt[i]
                np.testing.assert_allclose(row, ref, atol=1e-6)
            np.testing.assert_allclose(top.explained_variance, oracle_var[:10], rtol=1e-9)

            full = pca_fit(X, 29)
            ev = full.explained_variance
            assert np.all(np.diff(ev) <= 1e-12) and np.all(ev >= 0)
            rebuilt = pca_transform(full, X) @ full.components + full.mean
            assert float(np.abs(rebuilt - X).max()) < 1e-8


# --- 5. grid-search audit: selection argmin and fold hygiene --------------


def audit_dataset():
    rng = np.random.default_rng(5)
    latent = rng.normal(size=(30, 2))
    mixing = rng.normal(size=(2, 6))
    X = latent @ mixing + 0.01 * rng.normal(size=(30, 6))
    y = latent[:, 0] - 0.5 * latent[:, 1] + 0.01 * rng.normal(size=30)
    return X, y


AUDIT_GRID = SearchGrid(
    c_list=(1.0, 10.0),
    gamma_list=("scale",),
    kernel_list=("rbf",),
    k_pca_list=(2, 3),
    epsilon=0.1,
)


class TestGridSearchAudit:
    def recompute_cell(self, X, y, cell, splits):
        params = SvrParams(
            c=cell.c, gamma=cell.gamma, kernel=cell.kernel, epsilon=AUDIT_GRID.epsilon
        )
        mses = []
        for train_idx, val_idx in splits:
            scaler = fit_scaler(X[train_idx])
            pca = pca_fit(scaler.transform(X[train_idx]), cell.k_pca)
            Zt = pca_transform(pca, scaler.transform(X[train_idx]))
            Zv = pca_transform(pca, scaler.transform(X[val_idx]))
            model = svr_fit(Zt, y[train_idx], params)
            mses.append(float(np.mean((svr_predict(model, Zv) - y[val_idx]) ** 2)))
        return mses

    def test_selected_cell_is_argmin_of_recomputed_table(self):
        X, y = audit_dataset()
        folds = 3
        result = grid_search_cv(X, y, AUDIT_GRID, folds)
        assert len(result.table) == 4  # 2 C values x 2 widths x 1 kernel/gamma

        all_idx = np.arange(len(y))
        splits = [
            (np.setdiff1d(all_idx, val), val) for val in kfold_indices(len(y), folds)
        ]
        recomputed = []
        for cell in result.table:
            assert cell.feasible
            mses = self.recompute_cell(X, y, cell, splits)
            np.testing.assert_allclose(cell.fold_mses, mses, rtol=1e-9)
            np.testing.assert_allclose(cell.mean_mse, np.mean(mses), rtol=1e-9)
            recomputed.append((float(np.mean(mses)), cell.k_pca, cell.c))

        best = min(recomputed)
        assert (result.best_k, result.best_params.c) == (best[1], best[2])

    def test_no_validation_row_enters_any_fit(self, monkeypatch):
        X, y = audit_dataset()
        X = X.copy()
        X[0, 0] = 1e6  # marker riding in fold 0's validation split
        folds = 3
        splits = [
            (np.setdiff1d(np.arange(len(y)), val), val)
            for val in kfold_indices(len(y), folds)
        ]
        assert 0 in splits[0][1]

        scaler_inputs, pca_inputs = [], []
        real_scaler, real_pca = gs.fit_scaler, gs.pca_fit

        def spy_scaler(M):
            scaler_inputs.append(np.array(M))
            return real_scaler(M)

        def spy_pca(M, k):
            pca_inputs.append(np.array(M))
            return real_pca(M, k)

        monkeypatch.setattr(gs, "fit_scaler", spy_scaler)
        monkeypatch.setattr(gs, "pca_fit", spy_pca)
        grid_search_cv(X, y, AUDIT_GRID, folds)

        n_widths = len(AUDIT_GRID.k_pca_list)
        assert len(scaler_inputs) == n_widths * folds
        assert len(pca_inputs) == n_widths * folds
        fold_order = [f for _ in range(n_widths) for f in range(folds)]
        for seen_raw, seen_std, fold in zip(scaler_inputs, pca_inputs, fold_order):
            train_idx = splits[fold][0]
            assert np.array_equal(seen_raw, X[train_idx])
            assert (1e6 in seen_raw) == (fold != 0)
            expected_std = real_scaler(X[train_idx]).transform(X[train_idx])
            assert np.array_equal(seen_std, expected_std)


# --- 6. real-corpus regression quality (optional data) --------------------


@pytest.mark.skipif(
    EMO_SOUNDSCAPES_ENV not in os.environ,
    reason=f"set {EMO_SOUNDSCAPES_ENV} to a directory holding features.jsonl and "
    "labels.csv built by scripts/eval_emo_soundscapes.py",
)
class TestRealCorpusRegression:
    def test_hundred_trial_r2_thresholds(self):
        root = Path(os.environ[EMO_SOUNDSCAPES_ENV])
        features, labels = root / "features.jsonl", root / "labels.csv"
        if not features.exists() or not labels.exists():
            pytest.fail(
                f"{EMO_SOUNDSCAPES_ENV} is set but {features} or {labels} is missing; "
                "run scripts/eval_emo_soundscapes.py --prepare-only first"
            )
        dataset = join_features_labels(read_features_jsonl(features), load_labels_csv(labels))
        stats = evaluate_trials(
            dataset,
            n_trials=100,
            base_seed=0,
            grid=SearchGrid(),
            folds=5,
            search_each_trial=False,
            jobs=int(os.environ.get("MOODCAP_JOBS", "4")),
        )
        assert stats.mean["r2_arousal"] >= 0.85
        assert stats.mean["r2_valence"] >= 0.60


# --- 7. event timelines: golden clip and order independence ---------------


class TestEventTimelines:
    def test_fixture_golden_clip(self):
        timelines = build_corpus_timelines(
            FIXTURES / "strong_labels.tsv", FIXTURES / "ontology.json"
        )
        storm = timelines["clip_03"]
        assert storm.events == ("Thunder", "Rain on surface")
        assert storm.onsets == (0.0, 1.2)

    def test_row_permutation_leaves_output_bytes_unchanged(self, tmp_path):
        lines = (FIXTURES / "strong_labels.tsv").read_text().splitlines(keepends=True)
        header, rows = lines[0], lines[1:]

        reference = tmp_path / "reference.jsonl"
        write_timelines_jsonl(
            build_corpus_timelines(FIXTURES / "strong_labels.tsv", FIXTURES / "ontology.json"),
            reference,
        )
        for seed in range(5):
            shuffled = rows[:]
            np.random.default_rng(seed).shuffle(shuffled)
            tsv = tmp_path / f"shuffled_{seed}.tsv"
            tsv.write_text(header + "".join(shuffled))
            out = tmp_path / f"shuffled_{seed}.jsonl"
            write_timelines_jsonl(
                build_corpus_timelines(tsv, FIXTURES / "ontology.json"), out
            )
            assert out.read_bytes() == reference.read_bytes()


# --- 8. prompt instruction goldens and exchange shapes ---------------------


class TestPromptGoldens:
    def test_instruction_strings_frozen(self):
        assert WAVCAPS_INSTRUCTION == (
            "I will give you a number of lists containing sound events occurred "
            "sequentially in time. Process each individually. Write a one-sentence "
            "audio caption to describe these sounds. Make sure you are using "
            "grammatical subject-verb-object sentences. Directly describe the sounds "
            'and avoid using the word "heard". The caption should be less than 20 words.'
        )
        assert SCENE_FOCUSED_INSTRUCTION == (
            "I will provide a list containing chronological sound events of an "
            "auditory scene. Write a one-sentence audio caption to describe the "
            "scene. Make sure to use an active voice. Describe the scene without "
            "simply listing the sounds. The caption should be less than 20 words."
        )
        assert EMOTION_ADDON_INSTRUCTION == (
            "I will also provide a mood. Please emphasize this mood in your caption."
        )
        assert EMOTION_REWRITE_INSTRUCTION == (
            "I will give you a sentence describing a sound scene, and a mood. "
            "Please rewrite the sentence, emphasizing the indicated mood."
        )

    def test_rewrite_exchange_has_three_messages(self):
        timeline = EventTimeline("clip_03", ("Thunder", "Rain on surface"), (0.0, 1.2))
        emotion = qualify(nearest_emotion(AffectPoint(0.8, 0.0)), 0.9)
        exchange = render_prompt(
            "emotion_rewrite",
            timeline,
            emotion,
            prior_caption="Thunder rolls over steady rain.",
        )
        assert [m.role for m in exchange.messages] == ["user", "assistant", "user"]


# --- 9. batch robustness under scripted faults -----------------------------


class TestBatchRobustness:
    @staticmethod
    def corpus(n=50):
        return {
            f"clip_{i:02d}": EventTimeline(
                f"clip_{i:02d}", (f"Marker{i:02d} sound",), (0.0,)
            )
            for i in range(n)
        }

    def test_fifty_clip_run_with_faults_then_cached_rerun(self, tmp_path):
        transient_left = {"Marker07": 1, "Marker21": 1}

        def script(messages):
            text = messages[-1].content
            if "Marker33" in text:
                raise CompletionError("backend rejects this clip", status=400)
            for marker in list(transient_left):
                if marker in text and transient_left[marker] > 0:
                    transient_left[marker] -= 1
                    raise TransientBackendError("blip", 503)
            return mock_caption(messages)

        backend = MockChatBackend(script=script)
        client = LlmClient(
            LlmConfig(cache_dir=tmp_path / "cache", max_attempts=3, backoff_base=0.01),
            backend,
            sleep=lambda s: None,
        )
        timelines = self.corpus()

        results, manifest = generate_corpus(timelines, None, "wavcaps", client)
        assert manifest.requested == 50
        assert manifest.failed == 1
        assert manifest.fetched == 49
        assert manifest.cached == 0
        assert len(results) == 49
        assert len(backend.calls) == 52  # one per clip plus the two recovered blips
        assert transient_left == {"Marker07": 0, "Marker21": 0}

        calls_before = len(backend.calls)
        _, rerun = generate_corpus(timelines, None, "wavcaps", client)
        assert rerun.cached == 49
        assert rerun.fetched == 0
        assert rerun.failed == 1
        new_calls = backend.calls[calls_before:]
        assert new_calls and all("Marker33" in text for text in new_calls)

        ok_ids = [r.clip_id for r in results]
        calls_before = len(backend.calls)
        _, quiet = generate_corpus(timelines, None, "wavcaps", client, clip_ids=ok_ids)
        assert quiet.cached == 49
        assert quiet.failed == 0
        assert len(backend.calls) == calls_before  # zero network traffic


# --- 10. DSP invariants -----------------------------------------------------


def feature_kinds():
    """Partition the 72 vector slots by how a gain change must move them."""
    invariant, scaled, shifted_means = [], [], []
    for i, name in enumerate(VECTOR_NAMES):
        stat, base = name.split("_", 1)
        if base in ("rms", "delta_rms"):
            scaled.append(i)
        elif base in ("mfcc_00", "loudness"):
            (shifted_means if stat == "mean" else invariant).append(i)
        else:
            invariant.append(i)
    return invariant, scaled, shifted_means


class TestDspInvariants:
    def test_gain_invariance_on_fifty_seeded_signals(self):
        cfg = DspConfig()
        invariant, scaled, shifted_means = feature_kinds()
        assert len(invariant) + len(scaled) + len(shifted_means) == 72
        name_by_index = dict(enumerate(VECTOR_NAMES))

        for seed in range(50):
            rng = np.random.default_rng(seed)
            samples = rng.normal(0.0, 0.2, size=cfg.sample_rate)
            gain = float(rng.choice([0.25, 0.5, 2.0, 4.0, 1.7, 0.31]))

            base = extract_features(Waveform(samples, cfg.sample_rate), cfg).values
            louder = extract_features(Waveform(samples * gain, cfg.sample_rate), cfg).values
            assert base.shape == louder.shape == (72,)

            for i in invariant:
                assert math.isclose(
                    louder[i], base[i], rel_tol=1e-5, abs_tol=1e-5
                ), name_by_index[i]
            for i in scaled:
                assert math.isclose(louder[i], base[i] * gain, rel_tol=1e-5), (
                    name_by_index[i]
                )
            # constant per-frame offsets: sqrt(n_mels)*ln(g^2) on the first
            # cepstral slot, 10*log10(g^2) on the power in dB
            for i in shifted_means:
                if "mfcc" in name_by_index[i]:
                    shift = math.sqrt(cfg.n_mels) * math.log(gain**2)
                else:
                    shift = 10.0 * math.log10(gain**2)
                assert math.isclose(louder[i], base[i] + shift, abs_tol=1e-4), (
                    name_by_index[i]
                )

    def test_silence_is_finite(self):
        cfg = DspConfig()
        vec = extract_features(Waveform(np.zeros(cfg.sample_rate), cfg.sample_rate), cfg)
        assert vec.values.shape == (72,)
        assert np.all(np.isfinite(vec.values))

    def test_six_second_sine_zero_crossings(self):
        cfg = DspConfig()
        freq = 440.0
        t = np.arange(6 * cfg.sample_rate) / cfg.sample_rate
        vec = extract_features(
            Waveform(0.5 * np.sin(2 * np.pi * freq * t), cfg.sample_rate), cfg
        )
        zcr_mean = vec.values[VECTOR_NAMES.index("mean_zcr")]
        expected = 2 * freq / cfg.sample_rate
        assert abs(zcr_mean - expected) <= 0.05 * expected


# --- 11/12. end-to-end chain: determinism and word-count statistics --------


E2E_CONFIG = """\
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
llm:
  endpoint: mock
  model: mock-model
  temperature: 1.0
  cache_dir: cache
"""

CHAIN_ARTIFACTS = (
    "features.jsonl",
    "model.json",
    "affects.jsonl",
    "emotions.jsonl",
    "events.jsonl",
    "captions.jsonl",
    "captions.jsonl.manifest.json",
)


def run_chain(root: Path, jobs: int) -> dict[str, Path]:
    root.mkdir(parents=True, exist_ok=True)
    config = root / "config.yaml"
    config.write_text(E2E_CONFIG)
    art = {name: root / name for name in CHAIN_ARTIFACTS}

    def run(*argv):
        rc = main(["--config", str(config), *map(str, argv)])
        assert rc == 0, f"command failed: {argv}"

    run("extract-features", FIXTURES / "audio",
        "--out", art["features.jsonl"], "--jobs", jobs)
    run("train-ser", "--features", art["features.jsonl"],
        "--labels", FIXTURES / "labels.csv", "--out", art["model.json"])
    run("predict-affect", "--model", art["model.json"],
        "--features", art["features.jsonl"], "--out", art["affects.jsonl"])
    run("label-emotions", "--affects", art["affects.jsonl"],
        "--out", art["emotions.jsonl"])
    run("build-events", "--tsv", FIXTURES / "strong_labels.tsv",
        "--ontology", FIXTURES / "ontology.json", "--out", art["events.jsonl"])
    run("gen-captions", "--events", art["events.jsonl"],
        "--emotions", art["emotions.jsonl"], "--variant", "emotion_addon",
        "--out", art["captions.jsonl"], "--jobs", jobs)
    return art


@pytest.fixture(scope="module")
def chains(tmp_path_factory):
    base = tmp_path_factory.mktemp("e2e")
    start = time.perf_counter()
    runs = {
        "first": run_chain(base / "first", jobs=1),
        "second": run_chain(base / "second", jobs=1),
        "parallel": run_chain(base / "parallel", jobs=8),
    }
    runs["elapsed"] = time.perf_counter() - start
    return runs


class TestEndToEndDeterminism:
    def test_second_run_byte_identical(self, chains):
        for name in CHAIN_ARTIFACTS:
            a = chains["first"][name].read_bytes()
            b = chains["second"][name].read_bytes()
            assert a == b, f"{name} differs between identical runs"

    def test_parallel_run_byte_identical(self, chains):
        for name in CHAIN_ARTIFACTS:
            a = chains["first"][name].read_bytes()
            c = chains["parallel"][name].read_bytes()
            assert a == c, f"{name} differs between --jobs 1 and --jobs 8"

    def test_runtime_budget(self, chains):
        assert chains["elapsed"] < 60.0


PUBLISHED_MEAN_WORDS = {
    "wavcaps": 12.61,
    "scene_focused": 14.04,
    "emotion_addon": 18.35,
    "emotion_rewrite": 18.65,
}


class TestWordCountStats:
    def test_mock_run_mean_matches_independent_count(self, chains, capsys):
        rc = main(["stats", str(chains["first"]["captions.jsonl"]), "--json"])
        assert rc == 0
        reported = json.loads(capsys.readouterr().out)[0]

        captions = [
            json.loads(line)["caption"]
            for line in chains["first"]["captions.jsonl"].read_text().splitlines()
        ]
        counts = [len(re.findall(r"\S+", c)) for c in captions]
        assert reported["clip_count"] == len(counts)
        assert reported["mean_words"] == sum(counts) / len(counts)

    @pytest.mark.skipif(
        EMOTIONCAPS_ENV not in os.environ,
        reason=f"set {EMOTIONCAPS_ENV} to a directory holding <variant>.json caption lists",
    )
    def test_published_subsets_match_reported_means(self):
        root = Path(os.environ[EMOTIONCAPS_ENV])
        checked = 0
        for variant, published in PUBLISHED_MEAN_WORDS.items():
            path = root / f"{variant}.json"
            if not path.exists():
                continue
            entries = json.loads(path.read_text())
            counts = [
                len((e["caption"] if isinstance(e, dict) else e).split())
                for e in entries
            ]
            mean = sum(counts) / len(counts)
            assert abs(mean - published) <= 0.01 + 1e-9, (
                f"{variant}: mean {mean:.4f} vs published {published}"
            )
            checked += 1
        if checked == 0:
            pytest.fail(
                f"{EMOTIONCAPS_ENV} is set but contains none of "
                f"{sorted(PUBLISHED_MEAN_WORDS)} as .json files"
            )
