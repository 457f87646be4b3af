"""Inference harness emitting NDJSON prediction dumps for fidelity checking."""

from .inference import DumpJob, dump_predictions

__version__ = "0.1.0"

__all__ = ["DumpJob", "dump_predictions", "__version__"]
