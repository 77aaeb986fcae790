"""diagramlab: a desk-scale workbench for twisted-diagram representation data.

Subpackages: exact GF(p^k) arithmetic (`gf`), subset/weight combinatorics
(`weights`), the infinite twisted diagram (`diagram`), dense linear algebra
over small fields (`gfmatrix`), the finite-group operator laboratory
(`gamma_lab`), the fact-saturation engine with replayable certificates
(`engine`), and the config/report/CLI layer (`config`, `report`, `cli`).
"""

__version__ = "0.1.0"

from .gf import FieldDescriptor, FieldElem, make_field, frobenius, embed_subfield, subfield_span
from .weights import (
    Character,
    GenericParams,
    OrbitIndexSet,
    WeightTuple,
    char_swap,
    delta,
    delta_orbits,
    default_weight_table,
    special_characters,
    validate_genericity,
    weight_dim,
    weight_tuple,
)
from .diagram import (
    CharacterRegistry,
    CoeffVector,
    LambdaSeq,
    TransportSpec,
    build_registry,
    generate_lambda,
    pi_tilde,
    s_pi_tilde,
    twist_identity_check,
)

__all__ = [
    "__version__",
    "FieldDescriptor", "FieldElem", "make_field", "frobenius",
    "embed_subfield", "subfield_span",
    "Character", "GenericParams", "OrbitIndexSet", "WeightTuple",
    "char_swap", "delta", "delta_orbits", "default_weight_table",
    "special_characters", "validate_genericity", "weight_dim", "weight_tuple",
    "CharacterRegistry", "CoeffVector", "LambdaSeq", "TransportSpec",
    "build_registry", "generate_lambda", "pi_tilde", "s_pi_tilde",
    "twist_identity_check",
]
