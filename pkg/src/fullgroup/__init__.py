"""Exact computation in the full group of the dyadic odometer.

Cylinder sets and product measures, table maps with their uniform metric
and Radon-Nikodym cocycle, step functions into finite permutation groups,
equidecomposition of cylinder sets, and orbit censuses of tuples together
with the explicit conjugation and densification procedures.
"""

from .cylinder import (
    CylinderSet, Lambda, canonicalize, complement, difference, fmt_q, intersect,
    kraft, mu, parse_q, refine, union,
)
from .errors import (
    BudgetError, DepthError, DomainError, NotConjugateError, ObstructionError,
    OverlapError, TypeMismatchError,
)
from .maps import (
    IDENTITY, SWAP, LeafPerm, TableMap, TruncatedMap, apply_prefix, compose,
    du, from_leaf_perm, glue, inverse, odometer, rn_cocycle, support, to_leaf_perm,
)
from .l0 import (
    FiniteGroupSpec, StepFn, contraction, cyclic_block_conjugate, gauge,
    l0_inverse, l0_product, orbit_member, phi_embed, quantize,
)
from .equidecompose import (
    EquidecompResult, equidecompose_onto, pre_three_cycle, prec, three_cycle,
)
from .census import (
    OrbitCensus, TransitiveTupleType, canonical_type, census, conjugate_tuples,
    densify, en_surrogate_check, orbit_partition, psi_embed,
)

__version__ = "0.1.0"
