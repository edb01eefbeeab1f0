"""Scene-graph layout pipeline bindings."""

from ._sglayout import (
    ConfigError,
    DataError,
    Dataset,
    Model,
    NumericalError,
    __version__,
    assign_predicate,
    box_area,
    box_iou,
    union_box,
)

__all__ = [
    "ConfigError",
    "DataError",
    "Dataset",
    "Model",
    "NumericalError",
    "__version__",
    "assign_predicate",
    "box_area",
    "box_iou",
    "union_box",
]
