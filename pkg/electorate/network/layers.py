"""Forward and backward passes of the network's building blocks.

Activations are laid out (batch, channel, row, column).
"""
import typing as t

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

__all__: t.Tuple[str, ...] = (
    "conv_forward",
    "conv_backward",
    "relu_forward",
    "relu_backward",
    "maxpool_forward",
    "maxpool_backward",
    "affine_forward",
    "affine_backward",
    "softmax",
    "cross_entropy",
)


def _windows(x: np.ndarray, kernel: int, padding: int) -> np.ndarray:
    if padding:
        x = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    return sliding_window_view(x, (kernel, kernel), axis=(2, 3))


def conv_forward(
    x: np.ndarray, weights: np.ndarray, bias: np.ndarray, padding: int
) -> t.Tuple[np.ndarray, np.ndarray]:
    """Stride-1 convolution (cross-correlation) with zero padding.

    Parameters
    ----------
    x: numpy.ndarray
        (N, C, H, W) input.
    weights: numpy.ndarray
        (O, C, K, K) kernels.
    bias: numpy.ndarray
        (O,) biases.
    padding: int
        Zero padding on every side.

    Returns
    -------
    typing.Tuple[numpy.ndarray, numpy.ndarray]
        The (N, O, H', W') output and the input windows kept for the backward pass.
    """
    windows = _windows(x, weights.shape[-1], padding)
    out = np.einsum("nchwkl,ockl->nohw", windows, weights, optimize=True)
    return out + bias[None, :, None, None], windows


def conv_backward(
    dout: np.ndarray, windows: np.ndarray, weights: np.ndarray, padding: int
) -> t.Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients of :func:`conv_forward` as ``(dx, dweights, dbias)``."""
    kernel = weights.shape[-1]
    dbias = dout.sum(axis=(0, 2, 3))
    dweights = np.einsum("nchwkl,nohw->ockl", windows, dout, optimize=True)
    flipped = weights[:, :, ::-1, ::-1]
    dx = np.einsum("nohwkl,ockl->nchw", _windows(dout, kernel, kernel - 1 - padding), flipped, optimize=True)
    return dx, dweights, dbias


def relu_forward(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def relu_backward(dout: np.ndarray, x: np.ndarray) -> np.ndarray:
    return dout * (x > 0.0)


def maxpool_forward(x: np.ndarray) -> t.Tuple[np.ndarray, np.ndarray]:
    """2x2 max pooling with stride 2 over even-sized inputs.

    Returns
    -------
    typing.Tuple[numpy.ndarray, numpy.ndarray]
        The pooled output and, per output cell, the index (0..3) of the first maximal input.
    """
    n, c, h, w = x.shape
    cells = x.reshape(n, c, h // 2, 2, w // 2, 2).transpose(0, 1, 2, 4, 3, 5).reshape(n, c, h // 2, w // 2, 4)
    argmax = cells.argmax(axis=-1)
    return np.take_along_axis(cells, argmax[..., None], axis=-1)[..., 0], argmax


def maxpool_backward(dout: np.ndarray, argmax: np.ndarray) -> np.ndarray:
    """Route each output gradient to the input that won its window."""
    n, c, h, w = dout.shape
    cells = np.zeros((n, c, h, w, 4), dtype=dout.dtype)
    np.put_along_axis(cells, argmax[..., None], dout[..., None], axis=-1)
    return cells.reshape(n, c, h, w, 2, 2).transpose(0, 1, 2, 4, 3, 5).reshape(n, c, 2 * h, 2 * w)


def affine_forward(x: np.ndarray, weights: np.ndarray, bias: np.ndarray) -> np.ndarray:
    return x @ weights.T + bias


def affine_backward(
    dout: np.ndarray, x: np.ndarray, weights: np.ndarray
) -> t.Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients of :func:`affine_forward` as ``(dx, dweights, dbias)``."""
    return dout @ weights, dout.T @ x, dout.sum(axis=0)


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return t.cast(np.ndarray, exp / exp.sum(axis=1, keepdims=True))


def cross_entropy(logits: np.ndarray, labels: np.ndarray) -> t.Tuple[float, np.ndarray]:
    """Mean softmax cross-entropy and its gradient with respect to the logits."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_probs = shifted - log_norm
    rows = np.arange(labels.size)
    loss = -float(log_probs[rows, labels].mean())
    dlogits = np.exp(log_probs)
    dlogits[rows, labels] -= 1.0
    return loss, dlogits / labels.size
