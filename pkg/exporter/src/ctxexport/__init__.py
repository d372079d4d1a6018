"""Bridge from causal language models to the .cemb embedding format."""

__version__ = "0.1.0"

from .errors import ExportError, ValidationError
from .export import (
    LABEL_RULE,
    ExportReport,
    ExportSpec,
    export_hidden_states,
    export_labels,
    load_model,
)

__all__ = [
    "ExportError",
    "ValidationError",
    "LABEL_RULE",
    "ExportReport",
    "ExportSpec",
    "export_hidden_states",
    "export_labels",
    "load_model",
    "__version__",
]
