"""YAML experiment configs: strict schema, defaults, hashing."""

import numpy as np
import pytest

from taskbandit import LinearDrift, PiecewiseDrift, load_config, parse_config_text
from taskbandit.config import rehash
from taskbandit.errors import ConfigError

MINIMAL = """
run:
  tasks: 40
  steps: 10
  batch_size: 8
  rollouts: 16
  seed: 3
strategy:
  name: bots
"""


class TestParsing:
    def test_minimal_defaults(self):
        exp = parse_config_text(MINIMAL)
        run = exp.run
        assert run.task_count == 40
        assert run.strategy_name == "bots"
        assert run.forget == 0.1 and run.mix == 0.1
        assert run.plugin == "interpolation"
        assert run.pinned_zero_frac == 0.3 and run.pinned_one_frac == 0.2
        assert isinstance(run.drift, LinearDrift)
        assert (run.drift.start, run.drift.end, run.drift.steps) == (0.0, 1.0, 10)
        assert exp.checkpoint_interval == 25
        assert exp.tau == (0.5,) and exp.beta == (0.5,)

    def test_strategy_overrides(self):
        exp = parse_config_text(MINIMAL + """
  forget: 0.25
  mix: 0.0
  sample_posterior: false
  p_star: 0.6
""")
        assert exp.run.forget == 0.25
        assert exp.run.mix == 0.0
        assert exp.run.sample_posterior is False
        assert exp.run.p_star == 0.6

    def test_piecewise_drift(self):
        exp = parse_config_text(MINIMAL + """
learner:
  link: logistic
  drift:
    kind: piecewise
    breaks: [4, 8]
    values: [0.1, 0.5, 0.9]
""")
        assert exp.run.link == "logistic"
        assert isinstance(exp.run.drift, PiecewiseDrift)
        assert exp.run.drift.breaks == (4, 8)

    def test_seed_override_wins(self):
        exp = parse_config_text(MINIMAL, seed_override=99)
        assert exp.run.seed == 99

    def test_unknown_key_fails_closed(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config_text(MINIMAL + "\n  warmth: 3\n")
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config_text(MINIMAL.replace("seed: 3", "seed: 3\n  extra: 1"))

    def test_unknown_section_fails(self):
        with pytest.raises(ConfigError):
            parse_config_text(MINIMAL + "\nnotasection:\n  a: 1\n")

    def test_seed_mandatory(self):
        text = MINIMAL.replace("  seed: 3\n", "")
        with pytest.raises(ConfigError, match="run.seed is mandatory"):
            parse_config_text(text)

    def test_bool_is_not_an_int(self):
        with pytest.raises(ConfigError):
            parse_config_text(MINIMAL.replace("tasks: 40", "tasks: true"))

    def test_unknown_strategy_name(self):
        with pytest.raises(ConfigError):
            parse_config_text(MINIMAL.replace("name: bots", "name: ucb"))

    def test_not_yaml(self):
        with pytest.raises(ConfigError):
            parse_config_text("run: [unclosed")


class TestFileInputs:
    def test_profile_file(self, tmp_path):
        table = np.column_stack([np.linspace(0.1, 0.4, 40),
                                 np.linspace(0.5, 0.9, 40)])
        path = tmp_path / "profile.txt"
        np.savetxt(path, table)
        exp = parse_config_text(MINIMAL + f"""
profile:
  kind: file
  path: {path.name}
""", base_dir=tmp_path)
        assert exp.run.profile_weak is not None
        assert exp.run.pinned_zero_frac == 0.0
        assert exp.resolved["profile"]["file_sha256"] is not None

    def test_profile_row_count_must_match(self, tmp_path):
        table = np.column_stack([np.linspace(0.1, 0.4, 7),
                                 np.linspace(0.5, 0.9, 7)])
        path = tmp_path / "profile.txt"
        np.savetxt(path, table)
        with pytest.raises(ConfigError):
            parse_config_text(MINIMAL + f"""
profile:
  kind: file
  path: {path.name}
""", base_dir=tmp_path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_config_text(MINIMAL + """
profile:
  kind: file
  path: nowhere.txt
""", base_dir=tmp_path)

    def test_kernel_requires_embeddings(self):
        with pytest.raises(ConfigError):
            parse_config_text(MINIMAL + "\nplugin:\n  kind: kernel\n")

    def test_kernel_with_embeddings(self, tmp_path):
        emb = np.random.default_rng(1).normal(size=(40, 4))
        path = tmp_path / "emb.txt"
        np.savetxt(path, emb)
        exp = parse_config_text(MINIMAL + f"""
plugin:
  kind: kernel
  temperature: 0.7
  embeddings: {path.name}
""", base_dir=tmp_path)
        assert exp.run.plugin == "kernel"
        assert exp.run.embeddings.shape == (40, 4)
        assert exp.run.temperature == 0.7


class TestHashing:
    def test_equal_documents_equal_hash(self):
        assert parse_config_text(MINIMAL).config_hash == \
            parse_config_text(MINIMAL).config_hash

    def test_any_knob_changes_hash(self):
        base = parse_config_text(MINIMAL).config_hash
        assert parse_config_text(MINIMAL.replace("seed: 3", "seed: 4")).config_hash != base
        assert parse_config_text(MINIMAL + "\n  p_star: 0.6\n").config_hash != base

    def test_rehash_tracks_overrides(self):
        from dataclasses import replace

        exp = parse_config_text(MINIMAL)
        same = rehash(exp, exp.run)
        assert same.config_hash == exp.config_hash
        bumped = rehash(exp, replace(exp.run, seed=exp.run.seed + 1))
        assert bumped.config_hash != exp.config_hash
        assert bumped.resolved["run"]["seed"] == exp.run.seed + 1
        # the original stays untouched
        assert exp.resolved["run"]["seed"] == exp.run.seed

    def test_load_config_reads_file(self, tmp_path):
        path = tmp_path / "exp.yaml"
        path.write_text(MINIMAL)
        exp = load_config(path)
        assert exp.run.task_count == 40
