"""The 2CONV-1FC gender classifier."""
import typing as t

from . import layers
from .model import (
    classify,
    encode_labels,
    evaluate,
    forward,
    init_params,
    loss_and_gradients,
    predict,
    to_batch,
    train,
)
from .serialization import decode_params, encode_params, load_model, save_model

__all__: t.Tuple[str, ...] = (
    "layers",
    "classify",
    "encode_labels",
    "evaluate",
    "forward",
    "init_params",
    "loss_and_gradients",
    "predict",
    "to_batch",
    "train",
    "decode_params",
    "encode_params",
    "load_model",
    "save_model",
)
