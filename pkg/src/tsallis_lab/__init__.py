"""Exact-arithmetic tools for the axiomatic characterization of Tsallis entropy."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .simplex import (  # noqa: F401
    NestedVector,
    StochasticVector,
    append_zero,
    compose,
    conditional_pair,
    format_vector,
    from_rationals,
    merge_adjacent,
    parse_vector,
    permute,
    uniform,
)
from .values import Alpha, EntropyValue, pow_alpha  # noqa: F401
from .functionals import (  # noqa: F401
    EntropyFunctional,
    closed_form,
    make_tabulated,
    perturb,
    shannon,
    tsallis,
)
