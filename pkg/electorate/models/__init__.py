import typing as t

from ._base import BaseModel, to_builtin
from .affinity import AffinityParams, SimOutcome
from .audience import GROUP_NAMES, DestinationRates, GroupPartition
from .config import CandidateStudy, CaseStudyConfig
from .image import BatchResult, FaceBox, FaceTensor, PreprocessWarning, RawProfileImage, Rejection
from .labels import NameLexicon, WeakLabel
from .network import PARAM_NAMES, EvalMetrics, NetworkParams, TrainConfig, TrainResult
from .snapshot import DiffResult, GrowthPoint, Snapshot, as_id_array, to_utc
from .stats import DegenerateTest, GenderComposition, TestOutcome, ZTestResult

__all__: t.Tuple[str, ...] = (
    "BaseModel",
    "to_builtin",
    "AffinityParams",
    "SimOutcome",
    "GROUP_NAMES",
    "DestinationRates",
    "GroupPartition",
    "CandidateStudy",
    "CaseStudyConfig",
    "BatchResult",
    "FaceBox",
    "FaceTensor",
    "PreprocessWarning",
    "RawProfileImage",
    "Rejection",
    "NameLexicon",
    "WeakLabel",
    "PARAM_NAMES",
    "EvalMetrics",
    "NetworkParams",
    "TrainConfig",
    "TrainResult",
    "DiffResult",
    "GrowthPoint",
    "Snapshot",
    "as_id_array",
    "to_utc",
    "DegenerateTest",
    "GenderComposition",
    "TestOutcome",
    "ZTestResult",
)
