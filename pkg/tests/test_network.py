import pathlib
import struct

import numpy as np
import pytest

from conftest import BRIGHTNESS_ARCH, make_face
from electorate.constants import MODEL_MAGIC, MODEL_VERSION, Architecture, Gender
from electorate.exceptions import CorruptModel, EmptyBatchError, NonFiniteLoss, ShapeMismatch
from electorate.models import NetworkParams, TrainConfig
from electorate.models.network import expected_shapes
from electorate.network import (
    classify,
    decode_params,
    encode_params,
    evaluate,
    forward,
    init_params,
    layers,
    load_model,
    loss_and_gradients,
    predict,
    save_model,
    train,
)

SMALL = Architecture(conv1_channels=2, conv2_channels=2)


def faces(genders: str, seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    return [make_face(i, Gender.MALE if g == "m" else Gender.FEMALE, rng) for i, g in enumerate(genders)]


def labels(genders: str) -> list:
    return [Gender.MALE if g == "m" else Gender.FEMALE for g in genders]


def test_forward_shapes() -> None:
    params = init_params(SMALL, seed=1)
    probabilities = forward(params, faces("mfmf"))
    assert probabilities.shape == (4, 2), "Output shape is wrong."
    assert np.allclose(probabilities.sum(axis=1), 1.0), "Probabilities do not sum to one."
    assert forward(params, []).shape == (0, 2), "Empty batch did not give an empty output."
    with pytest.raises(ShapeMismatch):
        forward(params, np.zeros((2, 28, 28, 1)))


def test_parameter_shapes() -> None:
    params = init_params()
    assert params.conv1_w.shape == (8, 3, 5, 5), "First kernels are wrong."
    assert params.conv2_w.shape == (16, 8, 5, 5), "Second kernels are wrong."
    assert params.fc_w.shape == (2, 16 * 7 * 7), "Affine weights are wrong."
    assert not params.conv1_b.any() and not params.fc_b.any(), "Biases do not start at zero."
    assert init_params(seed=3) == init_params(seed=3), "Seeded initialization is not repeatable."
    with pytest.raises(ShapeMismatch):
        NetworkParams.from_arrays(SMALL, [a[..., :1] for a in params.arrays()])


def test_gradients_match_finite_differences() -> None:
    params = init_params(SMALL, seed=7)
    # Keep pre-activations of blank patches away from the ReLU kink.
    params.conv1_b[:] = [0.1, -0.07]
    params.conv2_b[:] = [0.05, 0.12]
    batch = faces("mfmf", seed=2)
    target = labels("mfmf")
    _, grads = loss_and_gradients(params, batch, target)
    step = 1e-5
    for (name, values), analytic in zip(params.items(), grads.arrays()):
        numeric = np.zeros_like(values)
        for index in np.ndindex(values.shape):
            saved = values[index]
            values[index] = saved + step
            up, _ = loss_and_gradients(params, batch, target)
            values[index] = saved - step
            down, _ = loss_and_gradients(params, batch, target)
            values[index] = saved
            numeric[index] = (up - down) / (2 * step)
        scale = max(np.linalg.norm(numeric) + np.linalg.norm(analytic), 1e-12)
        error = np.linalg.norm(numeric - analytic) / scale
        assert error < 1e-4, f"{name} gradient is off by {error:.2e}."


def test_hand_set_network_separates_synthetic_faces(brightness_model: NetworkParams) -> None:
    batch = faces("mmffmf", seed=5)
    assert predict(brightness_model, batch).tolist() == [0, 0, 1, 1, 0, 1], "Faces were misclassified."
    threaded, probabilities = classify(brightness_model, batch, jobs=3, chunk_size=2)
    assert threaded.tolist() == [0, 0, 1, 1, 0, 1], "Threaded classification differs."
    assert probabilities[0, 0] > 0.99, "Male face is not confidently male."
    empty, empty_probs = classify(brightness_model, [])
    assert empty.size == 0 and empty_probs.shape == (0, 2), "Empty batch produced predictions."


def test_ties_go_to_male() -> None:
    params = NetworkParams.zeros(BRIGHTNESS_ARCH)
    assert predict(params, faces("mf")).tolist() == [0, 0], "Ties did not go to male."


def test_training_is_deterministic() -> None:
    batch, target = faces("mfmfmf"), labels("mfmfmf")
    config = TrainConfig(learning_rate=0.05, batch_size=2, epochs=2, seed=11)
    first = train(batch, target, config, arch=SMALL)
    second = train(batch, target, config, arch=SMALL)
    assert first.params == second.params, "Same seed gave different parameters."
    assert first.loss_trace == second.loss_trace, "Same seed gave a different loss trace."
    assert len(first.loss_trace) == 2, "Loss trace does not have one entry per epoch."
    other = train(batch, target, TrainConfig(learning_rate=0.05, batch_size=2, epochs=2, seed=12), arch=SMALL)
    assert other.params != first.params, "Seed had no effect."


def test_zero_learning_rate_keeps_parameters() -> None:
    initial = init_params(SMALL, seed=4)
    result = train(faces("mf"), labels("mf"), TrainConfig(learning_rate=0.0, epochs=3), initial=initial)
    assert result.params == initial, "Parameters moved with a zero learning rate."
    assert result.params is not initial, "Training worked on the caller's parameters."


def test_non_finite_loss_is_reported() -> None:
    initial = init_params(SMALL, seed=4)
    initial.fc_w[0, 0] = np.nan
    with pytest.raises(NonFiniteLoss) as info:
        train(faces("mf"), labels("mf"), TrainConfig(epochs=1), initial=initial)
    assert "epoch=0" in str(info.value), "Epoch is missing from the error."


def test_empty_training_set() -> None:
    with pytest.raises(EmptyBatchError):
        train([], [], arch=SMALL)
    with pytest.raises(EmptyBatchError):
        loss_and_gradients(init_params(SMALL), [], [])
    with pytest.raises(ShapeMismatch):
        train(faces("mf"), labels("m"), arch=SMALL)


def test_evaluate(brightness_model: NetworkParams) -> None:
    metrics = evaluate(brightness_model, faces("mmmff"), labels("mmfff"))
    assert (metrics.tp, metrics.fp, metrics.fn, metrics.tn) == (2, 1, 0, 2), "Confusion matrix is wrong."
    assert metrics.precision == pytest.approx(2 / 3), "Precision is wrong."
    assert metrics.recall == 1.0 and metrics.f1 == pytest.approx(0.8), "Recall or F1 is wrong."
    assert metrics.accuracy == pytest.approx(0.8), "Accuracy is wrong."
    female = evaluate(brightness_model, faces("mmmff"), labels("mmfff"), positive_class=Gender.FEMALE)
    assert (female.tp, female.fn) == (2, 1), "Female-positive counts are wrong."
    with pytest.raises(EmptyBatchError):
        evaluate(brightness_model, [], [])


@pytest.mark.asyncio
async def test_model_file_roundtrip(tmp_path: pathlib.Path) -> None:
    params = init_params(SMALL, seed=9)
    path = await save_model(params, tmp_path / "model.elcnn")
    assert path.read_bytes()[: len(MODEL_MAGIC)] == MODEL_MAGIC, "Magic is missing."
    loaded = await load_model(path)
    assert loaded == params and loaded.arch == SMALL, "Model did not survive saving."


def test_corrupt_models() -> None:
    params = init_params(SMALL, seed=9)
    data = encode_params(params)
    with pytest.raises(CorruptModel):
        decode_params(b"JUNK!" + data[5:])
    with pytest.raises(CorruptModel):
        decode_params(data[:-8])
    with pytest.raises(CorruptModel):
        decode_params(data[:8])
    with pytest.raises(CorruptModel):
        decode_params(data[:5] + b"\x09\x00" + data[7:])
    broken = params.copy()
    broken.fc_b[1] = np.inf
    with pytest.raises(CorruptModel):
        decode_params(encode_params(broken))


@pytest.mark.slow
def test_learns_synthetic_faces() -> None:
    rng = np.random.default_rng(2016)
    genders = rng.integers(0, 2, size=2500)
    batch = [make_face(i, Gender.from_index(int(g)), rng) for i, g in enumerate(genders)]
    result = train(batch[:2000], genders[:2000], TrainConfig(epochs=5, seed=1))
    assert result.loss_trace[-1] < result.loss_trace[0], "Training loss did not fall."
    metrics = evaluate(result.params, batch[2000:], genders[2000:])
    assert metrics.accuracy >= 0.98, f"Validation accuracy is {metrics.accuracy:.3f}."


def direct_convolution(x: np.ndarray, weights: np.ndarray, bias: np.ndarray, padding: int) -> np.ndarray:
    padded = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    n, channels, height, width = x.shape
    filters, _, kernel, _ = weights.shape
    out_h, out_w = height + 2 * padding - kernel + 1, width + 2 * padding - kernel + 1
    out = np.zeros((n, filters, out_h, out_w))
    for sample in range(n):
        for o in range(filters):
            for i in range(out_h):
                for j in range(out_w):
                    total = bias[o]
                    for c in range(channels):
                        for ki in range(kernel):
                            for kj in range(kernel):
                                total += padded[sample, c, i + ki, j + kj] * weights[o, c, ki, kj]
                    out[sample, o, i, j] = total
    return out


@pytest.mark.parametrize(("kernel", "padding", "size"), [(5, 2, 8), (3, 1, 6), (3, 0, 7), (1, 0, 4)])
def test_convolution_matches_direct_loops(kernel: int, padding: int, size: int) -> None:
    rng = np.random.default_rng(kernel * 10 + size)
    x = rng.normal(size=(2, 3, size, size))
    weights = rng.normal(size=(4, 3, kernel, kernel))
    bias = rng.normal(size=4)
    out, _ = layers.conv_forward(x, weights, bias, padding)
    expected = direct_convolution(x, weights, bias, padding)
    assert out.shape == expected.shape, "Output shape is wrong."
    assert np.max(np.abs(out - expected)) < 1e-10, "Convolution differs from the direct sum."


def test_maxpool_matches_window_maxima() -> None:
    rng = np.random.default_rng(21)
    x = rng.normal(size=(2, 3, 6, 8))
    x[0, 0, 0:2, 0:2] = 1.5
    pooled, argmax = layers.maxpool_forward(x)
    assert pooled.shape == (2, 3, 3, 4), "Pooled shape is wrong."
    for n, c, i, j in np.ndindex(pooled.shape):
        window = x[n, c, 2 * i : 2 * i + 2, 2 * j : 2 * j + 2]
        assert pooled[n, c, i, j] == window.max(), f"Window {(n, c, i, j)} lost its maximum."
        assert window.reshape(-1)[argmax[n, c, i, j]] == window.max(), f"Window {(n, c, i, j)} points elsewhere."
    assert argmax[0, 0, 0, 0] == 0, "Tied window did not pick the first maximum."


def test_softmax_sums_to_one() -> None:
    rng = np.random.default_rng(5)
    logits = np.concatenate([rng.normal(size=(50, 2)), rng.normal(scale=300.0, size=(50, 2))])
    probabilities = layers.softmax(logits)
    assert np.all(probabilities >= 0.0), "Negative probability."
    assert np.max(np.abs(probabilities.sum(axis=1) - 1.0)) < 1e-12, "Rows do not sum to one."
    network = forward(init_params(SMALL, seed=2), faces("mfmfmm"))
    assert np.max(np.abs(network.sum(axis=1) - 1.0)) < 1e-12, "Network outputs do not sum to one."


@pytest.mark.parametrize(
    "arch",
    [
        Architecture(conv1_channels=2, conv2_channels=2, kernel_size=4, padding=2),
        Architecture(conv1_channels=2, conv2_channels=2, kernel_size=0, padding=0),
        Architecture(conv1_channels=2, conv2_channels=2, kernel_size=5, padding=1),
        Architecture(conv1_channels=2, conv2_channels=2, input_size=30),
        Architecture(conv1_channels=2, conv2_channels=2, classes=3),
    ],
)
def test_unsupported_architecture_is_corrupt(arch: Architecture) -> None:
    payload = sum(int(np.prod(shape)) for shape in expected_shapes(arch).values()) * 8
    data = MODEL_MAGIC + struct.pack("<H", MODEL_VERSION) + struct.pack("<7H", *arch.as_tuple()) + bytes(payload)
    with pytest.raises(CorruptModel) as info:
        decode_params(data, "bogus.elcnn")
    assert "architecture" in str(info.value) and "bogus.elcnn" in str(info.value), "Error does not name the problem."
