"""Biodynamic feedthrough (BDFT) identification and cancellation toolkit.

Thin python layer over the C++ core: multisine perturbation design, synthetic
touch-input trials, frequency-domain identification of second-order
feedthrough models, and model-based cancellation (batch and streaming).
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
