import json

import pytest

from glasso_prune.config import (
    ExperimentConfig,
    parse_config,
    parse_config_text,
    write_config,
)
from glasso_prune.errors import ConfigError
from glasso_prune.regularization import Mode

MINIMAL = """
dataset = synth
layer_sizes = 8,16,3
mode = glasso_out
"""

FULL = """
# reference-style experiment
dataset = synth
synth_classes = 3
synth_dim = 8
synth_per_class = 50
synth_separation = 4.0
data_seed = 7
split_fractions = 0.8,0.1,0.1
layer_sizes = 8,16,16,3
mode = glasso_in
alpha = 0.02
beta_coupling = true
epochs = 5
batch_size = 32
learning_rate = 0.05
momentum = 0.8
lr_decay = 0.95
seed = 3
theta = 0.02
output_dir = out
emit_bundle = true
"""


def test_minimal_parses_with_defaults():
    cfg = parse_config_text(MINIMAL)
    assert cfg.dataset == "synth"
    assert cfg.layer_sizes == [8, 16, 3]
    assert cfg.mode == "glasso_out"
    assert cfg.alpha == 0.0
    assert cfg.theta == 1e-2
    assert cfg.epochs == 20
    assert cfg.batch_size == 128
    assert cfg.learning_rate == 0.1
    assert cfg.momentum == 0.9
    assert cfg.emit_history is True
    assert cfg.emit_model is True
    assert cfg.emit_bundle is False


def test_full_kv_file():
    cfg = parse_config_text(FULL)
    assert cfg.synth_classes == 3
    assert cfg.split_fractions == [0.8, 0.1, 0.1]
    assert cfg.mode == "glasso_in"
    assert cfg.beta_coupling is True
    assert cfg.lr_decay == 0.95
    assert cfg.output_dir == "out"


def test_comments_and_blank_lines_skipped():
    cfg = parse_config_text("# top\n\n" + MINIMAL + "\n# tail\n")
    assert cfg.layer_sizes == [8, 16, 3]


def test_unknown_key_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config_text(MINIMAL + "banana = 3\n")
    assert "banana" in str(err.value)


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config_text(MINIMAL + "mode = l2\n")
    assert "mode" in str(err.value)


def test_missing_required_key():
    with pytest.raises(ConfigError) as err:
        parse_config_text("dataset = synth\nmode = glasso_out\n")
    assert "layer_sizes" in str(err.value)


def test_bad_value_names_key():
    with pytest.raises(ConfigError) as err:
        parse_config_text(MINIMAL + "epochs = soon\n")
    assert "epochs" in str(err.value)


def test_malformed_line_names_line_number():
    with pytest.raises(ConfigError) as err:
        parse_config_text("dataset = synth\nnonsense without equals\n", name="f.cfg")
    assert "f.cfg:2" in str(err.value)


def test_negative_alpha_names_key():
    with pytest.raises(ConfigError) as err:
        parse_config_text(MINIMAL + "alpha = -0.5\n")
    assert "alpha" in str(err.value)


def test_l2_mode_with_alpha_rejected():
    with pytest.raises(ConfigError):
        parse_config_text("dataset = synth\nlayer_sizes = 8,16,3\nmode = l2\nalpha = 0.1\n")


def test_bad_mode_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config_text("dataset = synth\nlayer_sizes = 8,16,3\nmode = ridge\n")
    assert "mode" in str(err.value)


def test_nonpositive_theta_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config_text(MINIMAL + "theta = 0\n")
    assert "theta" in str(err.value)


def test_short_layer_sizes_rejected():
    with pytest.raises(ConfigError):
        parse_config_text("dataset = synth\nlayer_sizes = 8,3\nmode = glasso_out\n")


def test_idx_requires_paths():
    with pytest.raises(ConfigError) as err:
        parse_config_text("dataset = idx\nlayer_sizes = 8,16,3\nmode = glasso_out\n")
    assert "idx_images" in str(err.value)


def test_csv_requires_paths():
    with pytest.raises(ConfigError):
        parse_config_text("dataset = csv\nlayer_sizes = 8,16,3\nmode = glasso_out\n")


def test_split_fractions_need_three_values():
    with pytest.raises(ConfigError) as err:
        parse_config_text(MINIMAL + "split_fractions = 0.9,0.1\n")
    assert "split_fractions" in str(err.value)


def test_json_config_accepted():
    doc = {
        "dataset": "synth",
        "layer_sizes": [8, 16, 3],
        "mode": "glasso_out",
        "alpha": 0.05,
        "epochs": 2,
    }
    cfg = parse_config_text(json.dumps(doc))
    assert cfg.layer_sizes == [8, 16, 3]
    assert cfg.alpha == 0.05


def test_json_rejects_non_object():
    with pytest.raises(ConfigError):
        parse_config_text("[1, 2, 3]")


def test_json_invalid_syntax():
    with pytest.raises(ConfigError):
        parse_config_text("{not json")


def test_json_unknown_key():
    with pytest.raises(ConfigError) as err:
        parse_config_text(json.dumps({"dataset": "synth", "widgets": 1}))
    assert "widgets" in str(err.value)


def test_beta_coupling_propagates_to_train_config():
    cfg = parse_config_text(MINIMAL + "alpha = 0.2\nbeta_coupling = true\n")
    tc = cfg.train_config()
    assert tc.spec.beta == pytest.approx(0.02, abs=1e-15)
    assert tc.spec.mode is Mode.GLASSO_OUT


def test_regularizer_spec_roundtrip():
    cfg = parse_config_text(MINIMAL + "alpha = 0.3\nbeta = 0.01\nepsilon_norm = 1e-10\n")
    spec = cfg.regularizer_spec()
    assert spec.alpha == 0.3
    assert spec.beta == 0.01
    assert spec.epsilon_norm == 1e-10


def test_load_splits_respects_fractions():
    cfg = parse_config_text(
        "dataset = synth\nsynth_classes = 2\nsynth_dim = 4\nsynth_per_class = 50\n"
        "layer_sizes = 4,8,2\nmode = glasso_out\nsplit_fractions = 0.8,0.1,0.1\n"
    )
    tr, va, te = cfg.load_splits()
    assert (tr.n, va.n, te.n) == (80, 10, 10)
    assert tr.dim == 4


def test_parse_config_file_and_write_roundtrip(tmp_path):
    src = tmp_path / "exp.cfg"
    src.write_text(FULL)
    cfg = parse_config(src)
    back = tmp_path / "echo.cfg"
    write_config(cfg, back)
    assert parse_config(back) == cfg


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "absent.cfg")


def test_to_dict_is_complete():
    cfg = parse_config_text(FULL)
    doc = cfg.to_dict()
    assert ExperimentConfig(**doc) == cfg
