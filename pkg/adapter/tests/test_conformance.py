"""Adapter conformance: everything the adapter emits must be consumable by
the profiler package with no knowledge of the runtime used. The profiler's
reader, summarizer, CLI, and vocabulary loader act as the validators."""

import json

import numpy as np
import pytest

from edprof import metrics as ed_metrics
from edprof import multilingual as ed_multilingual
from edprof import streamio as ed_streamio
from edprof.cli import main as edprof_main

from edadapter import AdapterConfig, AdapterError, capture_generation, export_vocab
from edadapter.capture import Runtime, load_runtime
from edadapter.cli import main as edadapter_main


@pytest.fixture(scope="module")
def runtime(tiny_model_dir):
    return load_runtime(str(tiny_model_dir))


def capture(tiny_model_dir, out_dir, runtime, *, prompt="w1 w5 w9", n=60, seed=7,
            temperature=0.9, **kwargs):
    config = AdapterConfig(
        model_ref=str(tiny_model_dir),
        temperature=temperature,
        max_new_tokens=n,
        seed=seed,
        out_dir=out_dir,
        **kwargs,
    )
    return capture_generation(
        config, prompt, generation_id=f"test-{seed}",
        stream_path=out_dir / "streams" / f"{seed}.edls", runtime=runtime,
    )


def test_capture_validates_under_profiler_reader(tiny_model_dir, tmp_path, runtime):
    result = capture(tiny_model_dir, tmp_path, runtime, n=60)
    assert result.length == 60  # >= 50 tokens per the conformance bar
    # full read: parses header, every record, and verifies the checksum
    header, records = ed_streamio.read_stream_path(result.stream_path)
    assert header.vocab_size == runtime.vocab_size
    assert header.value_kind is ed_streamio.ValueKind.RAW_LOGITS
    assert len(records) == 60
    assert [r.sampled_token_id for r in records] == result.sampled_token_ids
    # and the one-pass summary accepts it too
    summary = ed_streamio.summarize_stream_path(result.stream_path, 0.9)
    assert summary.length == 60
    assert 0.0 <= summary.ed_mean <= 1.0


def test_profiler_entropy_matches_adapter_oracle(tiny_model_dir, tmp_path, runtime):
    temperature = 1.3
    result = capture(tiny_model_dir, tmp_path, runtime, n=50, temperature=temperature)
    _, records = ed_streamio.read_stream_path(result.stream_path)
    recomputed = [
        ed_metrics.entropy_from_logits(r.values, temperature) for r in records
    ]
    np.testing.assert_allclose(recomputed, result.oracle_entropies, atol=1e-4)
    # the sidecar carries the same oracle values
    sidecar = json.loads(result.sidecar_path.read_text())
    np.testing.assert_allclose(
        sidecar["oracle_entropies_nats"], result.oracle_entropies, atol=0
    )


def test_empty_prompt_is_exactly_bos(tiny_model_dir, tmp_path, runtime):
    result = capture(tiny_model_dir, tmp_path, runtime, prompt="", n=5, seed=3)
    assert result.prompt_token_ids == [runtime.tokenizer.bos_token_id]


def test_chat_template_flag_errors_without_template(tiny_model_dir, tmp_path, runtime):
    with pytest.raises(AdapterError):
        capture(tiny_model_dir, tmp_path, runtime, n=5, chat_template=True)


def test_capture_deterministic(tiny_model_dir, tmp_path, runtime):
    a = capture(tiny_model_dir, tmp_path / "a", runtime, n=20, seed=11)
    b = capture(tiny_model_dir, tmp_path / "b", runtime, n=20, seed=11)
    assert a.stream_path.read_bytes() == b.stream_path.read_bytes()
    c = capture(tiny_model_dir, tmp_path / "c", runtime, n=20, seed=12)
    assert a.stream_path.read_bytes() != c.stream_path.read_bytes()


def test_vocab_mismatch_aborts_without_partial_file(tiny_model_dir, tmp_path, runtime):
    class LyingTokenizer:
        bos_token_id = runtime.tokenizer.bos_token_id
        eos_token_id = runtime.tokenizer.eos_token_id

        def __len__(self):
            return runtime.vocab_size + 5

        def encode(self, text, add_special_tokens=True):
            return runtime.tokenizer.encode(
                text, add_special_tokens=add_special_tokens
            )

    bad = Runtime(model=runtime.model, tokenizer=LyingTokenizer())
    with pytest.raises(AdapterError, match="logits"):
        capture(tiny_model_dir, tmp_path, runtime=bad, n=5)
    assert not (tmp_path / "streams" / "7.edls").exists()
    assert not (tmp_path / "streams" / "7.edls.tmp").exists()


def test_context_overflow_rejected(tiny_model_dir, tmp_path, runtime):
    with pytest.raises(AdapterError, match="context"):
        capture(tiny_model_dir, tmp_path, runtime, n=10_000)


def test_exported_vocab_loads_in_profiler(tiny_model_dir, tmp_path, runtime):
    out = tmp_path / "vocab.tsv"
    count = export_vocab(str(tiny_model_dir), out, runtime=runtime)
    profile = ed_multilingual.load_vocab_file(out)
    assert profile.vocab_size == count == runtime.vocab_size
    by_id = {e.token_id: e.text for e in profile.entries}
    assert by_id[0] == "<bos>"  # special tokens present with marker text
    assert by_id[3] == "w0"
    # deterministic output
    first = out.read_bytes()
    export_vocab(str(tiny_model_dir), out, runtime=runtime)
    assert out.read_bytes() == first


def test_manifest_pipeline_through_both_clis(tiny_model_dir, tmp_path):
    # profiler generates the prompt manifest, adapter captures it, profiler
    # summarizes and runs the battery on the result: three surfaces, one
    # set of file formats
    suite = tmp_path / "suite"
    rc = edprof_main(
        ["prompts", "--out", str(suite), "--seed", "4",
         "--categories", "empty,neutral_stub,random_ascii",
         "--temperatures", "0.8,1.2", "--budget", "30"]
    )
    assert rc == 0
    run = tmp_path / "run"
    rc = edadapter_main(
        ["capture-manifest", "--model", str(tiny_model_dir),
         "--manifest", str(suite / "manifest.jsonl"), "--out", str(run),
         "--max-new-tokens", "12", "--model-name", "tiny-fixture"]
    )
    assert rc == 0
    rc = edprof_main(
        ["summarize", "--manifest", str(run / "manifest.jsonl"), "--out", str(run)]
    )
    assert rc == 0
    lines = (run / "summaries.jsonl").read_text().splitlines()
    rows = [json.loads(l) for l in lines]
    assert len(rows) == 3 * 2
    assert all(r["status"] == "ok" for r in rows)
    assert all(r["model_name"] == "tiny-fixture" for r in rows)
    assert all(r["length"] == 12 for r in rows)
    rc = edprof_main(
        ["battery", "--manifest", str(run / "manifest.jsonl"), "--out", str(run)]
    )
    assert rc == 0
    payload = json.loads((run / "battery.json").read_text())
    assert payload["input_count"] == 6


def test_single_capture_cli(tiny_model_dir, tmp_path):
    rc = edadapter_main(
        ["capture", "--model", str(tiny_model_dir), "--prompt", "w3 w4",
         "--out", str(tmp_path), "--max-new-tokens", "8", "--seed", "2"]
    )
    assert rc == 0
    header, records = ed_streamio.read_stream_path(
        tmp_path / "streams" / "000000.edls"
    )
    assert len(records) == 8
