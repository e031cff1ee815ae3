"""Adversarial rotation attacks and retraining for point-cloud classifiers."""

from ._artpoint import *  # noqa: F401,F403
from ._artpoint import __doc__  # noqa: F401
