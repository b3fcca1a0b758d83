"""Model construction, resolution contracts, determinism, checkpoints."""
import numpy as np
import pytest

from transkit.models import (
    ConfigError, ModelConfig, TASK_DEFAULT_IN, TASK_OUT_CHANNELS, TASKS,
    build_model, count_params, forward,
)
from transkit.models.checkpoint import (
    CheckpointError, load_checkpoint, save_checkpoint,
)
from transkit.nn.layers import softmax


def _toy(task, **kw):
    return build_model(ModelConfig(task=task, width=4, hidden=6, **kw))


def _rand_input(task, frames=12, seed=0):
    bins, ch = TASK_DEFAULT_IN[task]
    rng = np.random.default_rng(seed)
    if task in ("chord", "beat"):
        return rng.uniform(0, 1, (frames, bins))
    return rng.uniform(0, 1, (frames, bins, ch))


@pytest.mark.parametrize("task", TASKS)
def test_output_shape_contract(task):
    model = _toy(task)
    x = _rand_input(task)
    y = model.net.activate(model.net.forward_logits(x))
    if task in ("music", "multi_instrument"):
        assert y.shape == (12, 352, TASK_OUT_CHANNELS[task])
    elif task == "vocal_pitch":
        assert y.shape == (12, 352)
    else:
        assert y.shape == (12, TASK_OUT_CHANNELS[task])
    assert np.isfinite(y).all()


def test_chord_rows_are_distributions():
    model = _toy("chord")
    y = model.net.activate(model.net.forward_logits(_rand_input("chord")))
    np.testing.assert_allclose(y.sum(axis=1), 1.0, rtol=1e-12)
    assert (y >= 0).all()


def test_sigmoid_outputs_in_unit_interval():
    model = _toy("music")
    y = model.net.activate(model.net.forward_logits(_rand_input("music")))
    assert y.min() >= 0.0 and y.max() <= 1.0


def _flat_params(model):
    return {name: layer.p[k] for name, layer, k in model.net.named_params()}


def test_build_is_deterministic():
    a = _flat_params(_toy("drum"))
    b = _flat_params(_toy("drum"))
    assert a.keys() == b.keys()
    for name in a:
        assert (a[name] == b[name]).all()


def test_different_seed_changes_weights():
    a = _flat_params(_toy("drum", seed=0))
    b = _flat_params(_toy("drum", seed=1))
    assert max(np.abs(a[n] - b[n]).max() for n in a) > 0


def test_config_derives_task_defaults():
    c = ModelConfig(task="chord")
    assert c.out_channels == 25
    assert (c.in_bins, c.in_channels) == (24, 1)


def test_config_rejects_wrong_out_channels():
    with pytest.raises(ConfigError):
        ModelConfig(task="drum", out_channels=5)
    with pytest.raises(ConfigError):
        ModelConfig(task="nope")


def test_config_round_trips_through_dict():
    c = ModelConfig(task="beat", hidden=10, seed=3)
    assert ModelConfig.from_dict(c.to_dict()) == c


def test_count_params_matches_closed_form_for_beat_net():
    # BiLSTM(d,h): 2 * (4h(d+h) + 4h); two stacked layers, attention off,
    # then Dense(2h, 2).
    d, h = 130, 6
    model = build_model(ModelConfig(task="beat", hidden=h, attention=False))
    lstm1 = 2 * (4 * h * (d + h) + 4 * h)
    lstm2 = 2 * (4 * h * (2 * h + h) + 4 * h)
    dense = 2 * h * 2 + 2
    assert count_params(model) == lstm1 + lstm2 + dense


def test_forward_rejects_wrong_bins():
    from transkit.models import ContractError
    model = _toy("music")
    with pytest.raises(ContractError):
        forward(model, np.zeros((10, 100, 3)))


def test_checkpoint_round_trip_bit_exact():
    model = _toy("drum")
    x = _rand_input("drum")
    y0 = model.net.forward_logits(x)
    model.metadata["note"] = "fixture"
    back = load_checkpoint(save_checkpoint(model))
    assert back.config == model.config
    assert back.metadata["note"] == "fixture"
    y1 = back.net.forward_logits(x)
    assert (y0 == y1).all()


def test_checkpoint_rejects_bad_magic_and_truncation():
    blob = save_checkpoint(_toy("chord"))
    with pytest.raises(CheckpointError):
        load_checkpoint(b"XXXX" + blob[4:])
    with pytest.raises(CheckpointError):
        load_checkpoint(blob[: len(blob) // 2])


def test_softmax_rows():
    x = np.array([[1.0, 2.0, 3.0], [0.0, 0.0, 0.0]])
    s = softmax(x, axis=-1)
    np.testing.assert_allclose(s.sum(axis=1), 1.0)
    assert s[1, 0] == pytest.approx(1 / 3)
