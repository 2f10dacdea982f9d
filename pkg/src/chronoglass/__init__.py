"""chronoglass: generalized transpositions of quantum dynamics.

Submodules:

- ``matcore``: dense linear-algebra primitives (partial traces, vectorization, fixed gates)
- ``channel``: Kraus/Choi channels, supermaps, factorizable maps, dilation tools
- ``gentrans``: generalized and fractional transpositions, compatibility, UBB search
- ``tensors``: dynamics-tensor witnesses and perfect-tensor classification
- ``measures``: diamond norm, non-swappability, leakage and catalyticity measures
- ``cli``: JSON command-line interface (``chronoglass``)
"""

from ._validation import DimensionError
from .channel import ChoiMatrix, FactorizableMap, KrausMap, Superchannel
from .estimators import FractionalTransposer, GeneralizedTransposer, UBBSearch
from .gentrans import (
    GenTransposition,
    PartialGenTransposition,
    fractional_transpose,
    gen_transpose,
    gen_transpose_channel,
    is_compatible_channel,
    prep_compat,
    ubb_search,
)
from .measures import (
    HypothesisError,
    diamond_norm,
    geometric_capacity,
    info_destruction,
    leakage,
    non_catalyticity,
    non_leakage,
    verify_cauloc,
    verify_cauloc2,
    xi_nonswappability,
)
from .tensors import TensorNode, is_perfect_tensor, is_rotationally_perfect

__version__ = "0.1.0"

__all__ = [
    "DimensionError",
    "ChoiMatrix",
    "FactorizableMap",
    "KrausMap",
    "Superchannel",
    "FractionalTransposer",
    "GeneralizedTransposer",
    "UBBSearch",
    "GenTransposition",
    "PartialGenTransposition",
    "fractional_transpose",
    "gen_transpose",
    "gen_transpose_channel",
    "is_compatible_channel",
    "prep_compat",
    "ubb_search",
    "HypothesisError",
    "diamond_norm",
    "geometric_capacity",
    "info_destruction",
    "leakage",
    "non_catalyticity",
    "non_leakage",
    "verify_cauloc",
    "verify_cauloc2",
    "xi_nonswappability",
    "TensorNode",
    "is_perfect_tensor",
    "is_rotationally_perfect",
    "__version__",
]
