"""Stability analysis of leader-following formations with delayed feedback.

The usual entry points are :func:`classify_mode` for the closed-form class
of a single mode, :func:`lambda_max` for its rightmost characteristic root,
:func:`msf_field` for the master stability map over complex coupling
eigenvalues and :func:`integrate` for time-domain checks.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .model import *  # noqa: F401,F403
from .spectrum import *  # noqa: F401,F403
from .acs import *  # noqa: F401,F403
from .bifurcation import *  # noqa: F401,F403
from .msf import *  # noqa: F401,F403
from .simulate import *  # noqa: F401,F403
