from pathlib import Path

import pytest
import yaml

from quote_first_pipeline.config import DEFAULT_SEED, DEFAULT_TEST_SIZE, PipelineConfig, load_config
from quote_first_pipeline.errors import ConfigError


def _write(tmp_path, data):
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump(data, sort_keys=False), encoding="utf-8")
    return path


def _full(tmp_path):
    return {
        "corpus": {"path": "data/hotpot.jsonl", "format": "flat-jsonl"},
        "split": {"test_size": 3, "seed": 7},
        "output_dir": "out",
        "endpoints": {
            "teacher": {"model": "gpt-4o", "base_url": "https://api.example.test/v1", "credential_env": "OPENAI_API_KEY"},
            "quoter": {"model": "quoter-3b", "replay": "quoter.json", "parallelism": 2},
            "base": [
                {"model": "llama3.2:1b", "base_url": "http://localhost:11434/v1"},
                {"model": "llama3.2:3b", "base_url": "http://localhost:11434/v1"},
            ],
        },
        "judge": {"kind": "oracle"},
    }


def test_load_config_resolves_paths_against_config_dir(tmp_path):
    config = load_config(_write(tmp_path, _full(tmp_path)))
    assert config.corpus_path == tmp_path / "data/hotpot.jsonl"
    assert config.output_dir == tmp_path / "out"
    assert config.gold_dir == tmp_path / "out" / "gold"
    assert config.quoter.replay == str(tmp_path / "quoter.json")
    assert [ep.name for ep in config.base_models] == ["base[0]", "base[1]"]
    assert config.test_size == 3 and config.seed == 7


def test_defaults():
    config = PipelineConfig()
    assert config.test_size == DEFAULT_TEST_SIZE
    assert config.seed == DEFAULT_SEED
    assert config.parse_mode == "lenient"
    assert config.judge.kind == "oracle"


@pytest.mark.parametrize(
    "patch",
    [
        {"colour": "blue"},
        {"parse_mode": "sloppy"},
        {"judge": {"kind": "human"}},
        {"judge": {"kind": "llm"}},
        {"split": {"test_size": -1}},
        {"split": {"test_size": "many"}},
        {"endpoints": {"base": {"model": "x"}}},
        {"endpoints": {"quoter": {"model": "x"}}},
        {"endpoints": {"quoter": {"model": "x", "replay": "q.json", "flavour": 1}}},
        {"eval": {"predictions": ["a.jsonl"], "labels": ["a", "b"]}},
        {"eval": {"predictions": ["a.jsonl", "b.jsonl"], "labels": ["v1", "v1"]}},
    ],
)
def test_invalid_configs_are_rejected(tmp_path, patch):
    data = {**_full(tmp_path), **patch}
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, data))


def test_missing_or_malformed_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("corpus: [unclosed", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_require_names_the_stage():
    with pytest.raises(ConfigError, match="distill"):
        PipelineConfig().require("teacher", "distill")


def test_overrides_apply_to_every_endpoint(tmp_path):
    config = load_config(_write(tmp_path, _full(tmp_path)))
    updated = config.with_overrides(parallelism=8, parse_mode="strict", cache_dir="/tmp/cache")
    assert updated.teacher.parallelism == 8
    assert updated.quoter.parallelism == 8
    assert all(ep.parallelism == 8 for ep in updated.base_models)
    assert updated.parse_mode == "strict"
    assert updated.cache_dir == Path("/tmp/cache")
    assert config.quoter.parallelism == 2


def test_digest_is_stable_and_sensitive(tmp_path):
    path = _write(tmp_path, _full(tmp_path))
    first, second = load_config(path), load_config(path)
    assert first.digest() == second.digest()
    assert first.with_overrides(parse_mode="strict").digest() != first.digest()
