import typing as t

import attrs
import numpy as np

from electorate.constants import DEFAULT_ARCHITECTURE, Architecture, Gender
from electorate.exceptions import ShapeMismatch

from ._base import BaseModel

__all__: t.Tuple[str, ...] = (
    "PARAM_NAMES",
    "NetworkParams",
    "TrainConfig",
    "TrainResult",
    "EvalMetrics",
)

PARAM_NAMES: t.Tuple[str, ...] = ("conv1_w", "conv1_b", "conv2_w", "conv2_b", "fc_w", "fc_b")


def expected_shapes(arch: Architecture) -> t.Dict[str, t.Tuple[int, ...]]:
    """Parameter shapes of the 2CONV-1FC network, in declaration order."""
    k = arch.kernel_size
    return {
        "conv1_w": (arch.conv1_channels, arch.input_channels, k, k),
        "conv1_b": (arch.conv1_channels,),
        "conv2_w": (arch.conv2_channels, arch.conv1_channels, k, k),
        "conv2_b": (arch.conv2_channels,),
        "fc_w": (arch.classes, arch.fc_inputs),
        "fc_b": (arch.classes,),
    }


def _float64(value: t.Any) -> np.ndarray:
    return np.array(value, dtype=np.float64)


@attrs.define(slots=True, kw_only=True, eq=False)
class NetworkParams(BaseModel):
    """Weights and biases of the 2CONV-1FC network.

    Attributes
    ----------
    arch: electorate.constants.Architecture
        Shape constants.
    conv1_w: numpy.ndarray
        (C1, 3, 5, 5) first-layer kernels.
    conv1_b: numpy.ndarray
        (C1,) first-layer biases.
    conv2_w: numpy.ndarray
        (C2, C1, 5, 5) second-layer kernels.
    conv2_b: numpy.ndarray
        (C2,) second-layer biases.
    fc_w: numpy.ndarray
        (2, C2 * 7 * 7) affine weights over the (channel, row, column) flattening.
    fc_b: numpy.ndarray
        (2,) affine biases.
    """

    arch: Architecture = DEFAULT_ARCHITECTURE
    conv1_w: np.ndarray = attrs.field(converter=_float64, repr=False)
    conv1_b: np.ndarray = attrs.field(converter=_float64, repr=False)
    conv2_w: np.ndarray = attrs.field(converter=_float64, repr=False)
    conv2_b: np.ndarray = attrs.field(converter=_float64, repr=False)
    fc_w: np.ndarray = attrs.field(converter=_float64, repr=False)
    fc_b: np.ndarray = attrs.field(converter=_float64, repr=False)

    def __attrs_post_init__(self) -> None:
        for name, shape in expected_shapes(self.arch).items():
            actual = getattr(self, name).shape
            if actual != shape:
                raise ShapeMismatch(f"{name} has shape {actual}, expected {shape}", str(self.arch))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NetworkParams):
            return NotImplemented
        return self.arch == other.arch and all(np.array_equal(a, b) for a, b in zip(self.arrays(), other.arrays()))

    def arrays(self) -> t.List[np.ndarray]:
        """The parameter arrays in declaration order."""
        return [getattr(self, name) for name in PARAM_NAMES]

    def items(self) -> t.Iterator[t.Tuple[str, np.ndarray]]:
        for name in PARAM_NAMES:
            yield name, getattr(self, name)

    @classmethod
    def zeros(cls, arch: Architecture = DEFAULT_ARCHITECTURE) -> "NetworkParams":
        return cls(arch=arch, **{name: np.zeros(shape) for name, shape in expected_shapes(arch).items()})

    @classmethod
    def from_arrays(cls, arch: Architecture, arrays: t.Sequence[np.ndarray]) -> "NetworkParams":
        return cls(arch=arch, **dict(zip(PARAM_NAMES, arrays)))

    def copy(self) -> "NetworkParams":
        return NetworkParams.from_arrays(self.arch, [a.copy() for a in self.arrays()])

    def is_finite(self) -> bool:
        return all(bool(np.all(np.isfinite(a))) for a in self.arrays())

    @property
    def size(self) -> int:
        """Total number of scalar parameters."""
        return sum(int(a.size) for a in self.arrays())


def _positive(instance: t.Any, attribute: "attrs.Attribute[t.Any]", value: t.Union[int, float]) -> None:
    if not value > 0:
        raise ValueError(f"{attribute.name} must be positive, got {value}")


@attrs.define(slots=True, frozen=True, kw_only=True)
class TrainConfig(BaseModel):
    """Hyperparameters of plain mini-batch SGD.

    Attributes
    ----------
    learning_rate: float
        Step size. Zero leaves the parameters unchanged.
    batch_size: int
        Examples per step.
    epochs: int
        Passes over the training set.
    seed: int
        Seeds initialization and shuffling.
    """

    learning_rate: float = attrs.field(default=0.05, converter=float, validator=attrs.validators.ge(0.0))
    batch_size: int = attrs.field(default=64, converter=int, validator=_positive)
    epochs: int = attrs.field(default=10, converter=int, validator=_positive)
    seed: int = attrs.field(default=0, converter=int)


@attrs.define(slots=True, kw_only=True, eq=False)
class TrainResult(BaseModel):
    """Trained parameters and the per-epoch mean training loss.

    Attributes
    ----------
    params: NetworkParams
        Final parameters.
    loss_trace: typing.List[float]
        Mean mini-batch loss of each epoch.
    """

    params: NetworkParams
    loss_trace: t.List[float] = attrs.field(factory=list)


@attrs.define(slots=True, frozen=True, kw_only=True)
class EvalMetrics(BaseModel):
    """Classification metrics from a confusion matrix.

    Attributes
    ----------
    precision: float
        TP / (TP + FP), 0 when nothing was predicted positive.
    recall: float
        TP / (TP + FN), 0 when there are no positives.
    f1: float
        Harmonic mean of precision and recall, 0 when both are 0.
    accuracy: float
        (TP + TN) / total.
    positive_class: electorate.constants.Gender
        The class treated as positive.
    tp: int
    fp: int
    fn: int
    tn: int
    """

    precision: float
    recall: float
    f1: float
    accuracy: float
    positive_class: Gender = Gender.MALE
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @classmethod
    def from_confusion(cls, tp: int, fp: int, fn: int, tn: int, positive_class: Gender = Gender.MALE) -> "EvalMetrics":
        total = tp + fp + fn + tn
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        accuracy = (tp + tn) / total if total else 0.0
        return cls(
            precision=precision,
            recall=recall,
            f1=f1,
            accuracy=accuracy,
            positive_class=positive_class,
            tp=tp,
            fp=fp,
            fn=fn,
            tn=tn,
        )
