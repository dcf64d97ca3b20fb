"""Online best reply allocation for resources with polynomial costs."""

from .bounds import lambert_w, psi, xi
from .model import Instance, PolyCost, Request, load_instance, parse_instance
from .offline import empirical_ratio, optimal_bnb, optimal_exhaustive
from .online import TieBreakPolicy, run_online

__version__ = "0.1.0"
