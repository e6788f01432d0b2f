"""
Starkemit
~~~~~~~~~
Single-photon emission of a qubit into a coupled-cavity array under
a synthetic force.

:copyright: (c) 2024-present Starkemit Developers
:license: AGPL-3.0, see LICENSE for more information.

"""


__title__ = "starkemit"
__author__ = "Starkemit Developers"
__copyright__ = "Copyright (c) 2024-present Starkemit Developers"
__license__ = "AGPL-3.0"
__version__ = "1.0.0"


from . import utils as utils
from .errors import *
from .kernel_dde import *
from .lattice import *
from .propagator import *
from .semiclassics import *
from .specfun import *
