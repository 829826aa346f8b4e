"""Tactile shear field simulation: hydroelastic shear model, baselines,
calibration, batching and the tacshear file formats."""

from ._tacshear import *  # noqa: F401,F403
from ._tacshear import __version__  # noqa: F401
