"""Conditional supremum and infimum with respect to a conditional expectation,
on finite weighted sample spaces, with applications to discrete markets and
measure-preserving permutations."""

from .lattice import *  # noqa: F401,F403
from .lattice import __all__ as _lattice_all
from .filtration import *  # noqa: F401,F403
from .filtration import __all__ as _filtration_all
from .market import *  # noqa: F401,F403
from .market import __all__ as _market_all
from .ergodic import *  # noqa: F401,F403
from .ergodic import __all__ as _ergodic_all

__version__ = "0.1.0"

__all__ = [*_lattice_all, *_filtration_all, *_market_all, *_ergodic_all]
