import concurrent.futures
import math
import typing as t

import numpy as np

from electorate.constants import DEFAULT_ARCHITECTURE, Architecture, Gender
from electorate.exceptions import EmptyBatchError, NonFiniteLoss, ShapeMismatch
from electorate.logger import get_logger
from electorate.models import EvalMetrics, FaceTensor, NetworkParams, TrainConfig, TrainResult
from electorate.models.network import expected_shapes

from . import layers

__all__: t.Tuple[str, ...] = (
    "to_batch",
    "encode_labels",
    "init_params",
    "forward",
    "loss_and_gradients",
    "train",
    "predict",
    "classify",
    "evaluate",
)

Batch = t.Union[np.ndarray, t.Sequence[FaceTensor]]
Labels = t.Union[np.ndarray, t.Sequence[t.Union[int, Gender]]]


def to_batch(faces: Batch, arch: Architecture = DEFAULT_ARCHITECTURE) -> np.ndarray:
    """Stack faces into a float64 (N, C, H, W) array.

    Parameters
    ----------
    faces: numpy.ndarray | typing.Sequence[FaceTensor]
        Face tensors, or an (N, H, W, C) array.
    arch: electorate.constants.Architecture
        Expected input size and channels.

    Raises
    ------
    electorate.exceptions.ShapeMismatch
        A face is not (H, W, C).
    """
    expected = (arch.input_size, arch.input_size, arch.input_channels)
    if isinstance(faces, np.ndarray):
        array = np.asarray(faces, dtype=np.float64)
    elif len(faces) == 0:
        array = np.empty((0, *expected))
    else:
        array = np.stack([np.asarray(face.data if isinstance(face, FaceTensor) else face) for face in faces])
        array = array.astype(np.float64, copy=False)
    if array.ndim != 4 or array.shape[1:] != expected:
        raise ShapeMismatch(f"Expected a batch of {expected} faces, got {array.shape}")
    return np.ascontiguousarray(array.transpose(0, 3, 1, 2))


def encode_labels(labels: Labels, count: int) -> np.ndarray:
    """Class indices of male/female labels.

    Raises
    ------
    electorate.exceptions.ShapeMismatch
        The label count differs from the batch size or an index is out of range.
    """
    indices = np.array([lab.index if isinstance(lab, Gender) else int(lab) for lab in labels], dtype=np.intp)
    if indices.size != count:
        raise ShapeMismatch(f"{indices.size} labels for {count} examples")
    if indices.size and (indices.min() < 0 or indices.max() > 1):
        raise ShapeMismatch("Labels must be class indices 0 (male) or 1 (female)")
    return indices


def init_params(
    arch: Architecture = DEFAULT_ARCHITECTURE, seed: t.Union[int, np.random.Generator] = 0
) -> NetworkParams:
    """Glorot-uniform weights and zero biases.

    Weights are drawn from ``U(-b, b)`` with ``b = sqrt(6 / (fan_in + fan_out))``, in declaration order.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    area = arch.kernel_size * arch.kernel_size
    fans = {
        "conv1_w": (arch.input_channels * area, arch.conv1_channels * area),
        "conv2_w": (arch.conv1_channels * area, arch.conv2_channels * area),
        "fc_w": (arch.fc_inputs, arch.classes),
    }
    arrays = {}
    for name, shape in expected_shapes(arch).items():
        if name in fans:
            bound = math.sqrt(6.0 / sum(fans[name]))
            arrays[name] = rng.uniform(-bound, bound, size=shape)
        else:
            arrays[name] = np.zeros(shape)
    return NetworkParams(arch=arch, **arrays)


class _Trace(t.NamedTuple):
    x: np.ndarray
    windows1: np.ndarray
    conv1: np.ndarray
    pool1_arg: np.ndarray
    windows2: np.ndarray
    conv2: np.ndarray
    pool2_arg: np.ndarray
    flat: np.ndarray
    logits: np.ndarray


def _forward(params: NetworkParams, x: np.ndarray) -> _Trace:
    padding = params.arch.padding
    conv1, windows1 = layers.conv_forward(x, params.conv1_w, params.conv1_b, padding)
    pooled1, pool1_arg = layers.maxpool_forward(layers.relu_forward(conv1))
    conv2, windows2 = layers.conv_forward(pooled1, params.conv2_w, params.conv2_b, padding)
    pooled2, pool2_arg = layers.maxpool_forward(layers.relu_forward(conv2))
    flat = pooled2.reshape(pooled2.shape[0], -1)
    logits = layers.affine_forward(flat, params.fc_w, params.fc_b)
    return _Trace(x, windows1, conv1, pool1_arg, windows2, conv2, pool2_arg, flat, logits)


def forward(params: NetworkParams, batch: Batch) -> np.ndarray:
    """Class probabilities, one (male, female) row per example.

    Parameters
    ----------
    params: NetworkParams
        The network.
    batch: numpy.ndarray | typing.Sequence[FaceTensor]
        Faces shaped (28, 28, 3).

    Returns
    -------
    numpy.ndarray
        (N, 2) softmax outputs.
    """
    x = to_batch(batch, params.arch)
    if x.shape[0] == 0:
        return np.empty((0, params.arch.classes))
    return layers.softmax(_forward(params, x).logits)


def _backward(params: NetworkParams, trace: _Trace, dlogits: np.ndarray) -> NetworkParams:
    padding = params.arch.padding
    dflat, fc_w, fc_b = layers.affine_backward(dlogits, trace.flat, params.fc_w)
    pooled_shape = (trace.flat.shape[0], params.arch.conv2_channels, params.arch.pooled_size, params.arch.pooled_size)
    drelu2 = layers.maxpool_backward(dflat.reshape(pooled_shape), trace.pool2_arg)
    dconv2 = layers.relu_backward(drelu2, trace.conv2)
    dpooled1, conv2_w, conv2_b = layers.conv_backward(dconv2, trace.windows2, params.conv2_w, padding)
    drelu1 = layers.maxpool_backward(dpooled1, trace.pool1_arg)
    dconv1 = layers.relu_backward(drelu1, trace.conv1)
    _, conv1_w, conv1_b = layers.conv_backward(dconv1, trace.windows1, params.conv1_w, padding)
    return NetworkParams(
        arch=params.arch,
        conv1_w=conv1_w,
        conv1_b=conv1_b,
        conv2_w=conv2_w,
        conv2_b=conv2_b,
        fc_w=fc_w,
        fc_b=fc_b,
    )


def loss_and_gradients(params: NetworkParams, batch: Batch, labels: Labels) -> t.Tuple[float, NetworkParams]:
    """Mean softmax cross-entropy and its exact gradients.

    Parameters
    ----------
    params: NetworkParams
        The network.
    batch: numpy.ndarray | typing.Sequence[FaceTensor]
        Faces shaped (28, 28, 3).
    labels: numpy.ndarray | typing.Sequence[int | Gender]
        Class indices, 0 for male and 1 for female.

    Returns
    -------
    typing.Tuple[float, NetworkParams]
        The loss and gradients shaped like ``params``.

    Raises
    ------
    electorate.exceptions.EmptyBatchError
        The batch has no examples.
    """
    x = to_batch(batch, params.arch)
    if x.shape[0] == 0:
        raise EmptyBatchError("Cannot compute a loss over an empty batch")
    return _loss_and_gradients(params, x, encode_labels(labels, x.shape[0]))


def _loss_and_gradients(params: NetworkParams, x: np.ndarray, y: np.ndarray) -> t.Tuple[float, NetworkParams]:
    trace = _forward(params, x)
    loss, dlogits = layers.cross_entropy(trace.logits, y)
    return loss, _backward(params, trace, dlogits)


def train(
    batch: Batch,
    labels: Labels,
    config: t.Optional[TrainConfig] = None,
    *,
    arch: Architecture = DEFAULT_ARCHITECTURE,
    initial: t.Optional[NetworkParams] = None,
) -> TrainResult:
    """Plain mini-batch SGD.

    One generator seeded with ``config.seed`` draws the initial weights and then one permutation per epoch,
    so a fixed (data order, seed, config) gives bit-identical parameters.

    Parameters
    ----------
    batch: numpy.ndarray | typing.Sequence[FaceTensor]
        Training faces. The trainer does not rebalance them.
    labels: numpy.ndarray | typing.Sequence[int | Gender]
        Class indices.
    config: typing.Optional[TrainConfig]
        Hyperparameters, defaults when omitted.
    arch: electorate.constants.Architecture
        Network shape, ignored when ``initial`` is given.
    initial: typing.Optional[NetworkParams]
        Starting parameters instead of a seeded initialization.

    Returns
    -------
    TrainResult
        Final parameters and the mean mini-batch loss of every epoch.

    Raises
    ------
    electorate.exceptions.EmptyBatchError
        No training examples.
    electorate.exceptions.NonFiniteLoss
        A mini-batch loss or gradient became NaN or infinite.
    """
    logger = get_logger()
    config = config or TrainConfig()
    rng = np.random.default_rng(config.seed)
    params = initial.copy() if initial is not None else init_params(arch, rng)
    x = to_batch(batch, params.arch)
    count = x.shape[0]
    if count == 0:
        raise EmptyBatchError("Cannot train on an empty set")
    y = encode_labels(labels, count)
    trace: t.List[float] = []
    for epoch in range(config.epochs):
        order = rng.permutation(count)
        losses = []
        for number, start in enumerate(range(0, count, config.batch_size)):
            rows = order[start : start + config.batch_size]
            loss, grads = _loss_and_gradients(params, x[rows], y[rows])
            if not math.isfinite(loss) or not grads.is_finite():
                raise NonFiniteLoss(
                    "Training diverged",
                    f"epoch={epoch} batch={number} loss={loss} learning_rate={config.learning_rate}",
                )
            for value, grad in zip(params.arrays(), grads.arrays()):
                value -= config.learning_rate * grad
            losses.append(loss)
        trace.append(float(np.mean(losses)))
        logger.progress("train", epoch + 1, config.epochs)
        logger.debug(f"Epoch {epoch + 1}: mean loss {trace[-1]:.6f}")
    return TrainResult(params=params, loss_trace=trace)


def predict(params: NetworkParams, batch: Batch) -> np.ndarray:
    """Argmax class indices; ties go to index 0 (male)."""
    return forward(params, batch).argmax(axis=1)


def classify(
    params: NetworkParams, batch: Batch, *, jobs: t.Optional[int] = None, chunk_size: int = 256
) -> t.Tuple[np.ndarray, np.ndarray]:
    """Predictions and probabilities for a large batch, optionally spread over threads.

    Returns
    -------
    typing.Tuple[numpy.ndarray, numpy.ndarray]
        (N,) class indices and (N, 2) probabilities, in input order.
    """
    x = to_batch(batch, params.arch).transpose(0, 2, 3, 1)
    chunks = [x[i : i + chunk_size] for i in range(0, x.shape[0], chunk_size)]
    if not chunks:
        return np.empty(0, dtype=np.intp), np.empty((0, params.arch.classes))
    if jobs is None or jobs <= 1:
        parts = [forward(params, chunk) for chunk in chunks]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(lambda chunk: forward(params, chunk), chunks))
    probabilities = np.concatenate(parts)
    return probabilities.argmax(axis=1), probabilities


def evaluate(
    params: NetworkParams,
    batch: Batch,
    labels: Labels,
    *,
    positive_class: Gender = Gender.MALE,
    jobs: t.Optional[int] = None,
) -> EvalMetrics:
    """Precision, recall, F1 and accuracy of argmax predictions.

    Raises
    ------
    electorate.exceptions.EmptyBatchError
        The validation set is empty.
    """
    x = to_batch(batch, params.arch)
    if x.shape[0] == 0:
        raise EmptyBatchError("Cannot evaluate on an empty set")
    truth = encode_labels(labels, x.shape[0]) == positive_class.index
    predicted, _ = classify(params, x.transpose(0, 2, 3, 1), jobs=jobs)
    guessed = predicted == positive_class.index
    return EvalMetrics.from_confusion(
        tp=int(np.count_nonzero(guessed & truth)),
        fp=int(np.count_nonzero(guessed & ~truth)),
        fn=int(np.count_nonzero(~guessed & truth)),
        tn=int(np.count_nonzero(~guessed & ~truth)),
        positive_class=positive_class,
    )
