import datetime
import pathlib
import typing as t

import attrs
import numpy as np

__all__: t.Tuple[str, ...] = ("BaseModel", "to_builtin")


def to_builtin(value: t.Any) -> t.Any:
    """Convert numpy scalars, arrays, enums, paths and datetimes nested in ``value`` into JSON-ready builtins."""
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, pathlib.PurePath):
        return value.as_posix()
    if isinstance(value, datetime.datetime):
        return value.isoformat()
    if hasattr(value, "value") and hasattr(value, "name") and not isinstance(value, (int, float, str)):
        return value.value
    return value


@attrs.define(slots=True, kw_only=True, eq=True)
class BaseModel(attrs.AttrsInstance):
    """Base model for all records"""

    def to_dict(self) -> t.Dict[str, t.Any]:
        """Convert the model to a JSON-ready dict

        Returns
        -------
        typing.Dict[str, Any]
            The model as a dict.
        """
        return t.cast(t.Dict[str, t.Any], to_builtin(attrs.asdict(self, recurse=True)))

    @classmethod
    def from_payload(cls, payload: t.Dict[str, t.Any]) -> "BaseModel":
        """Create a model from a payload

        Parameters
        ----------
        payload: typing.Dict[str, Any]
            The payload to create the model from.

        Returns
        -------
        BaseModel
            The model created from the payload.
        """
        names = {a.name for a in attrs.fields(cls)}
        return cls(**{k: v for k, v in payload.items() if k in names})
