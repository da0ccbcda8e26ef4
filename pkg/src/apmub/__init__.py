"""Almost perfect mutually unbiased bases from resolvable block designs.

The pipeline is: finite field -> Latin squares / affine plane -> resolvable
design with mu = 1 -> orthonormal bases via Hadamard scaffolds -> exact audit
of the inner-product spectrum.
"""

from .block_designs import (
    ResolvableDesign,
    arbibd,
    class_count_bound,
    mols_to_rbd,
    mu,
    rbd_to_mols,
    t_bound,
    t_oracle,
    validate,
)
from .constructions import (
    QefParams,
    construct_qef,
    construct_se_s,
    plan,
    qef_pipeline,
    reshape,
    trim_arbibd,
)
from .finite_field import field_new
from .hadamard import dft, paley_i, paley_ii, real_hadamard, sylvester, tensor, verify_scaffold
from .latin_squares import MolsSet, are_orthogonal, macneish_product, mols_for_order, mols_prime_power
from .mub_builder import (
    MubCollection,
    analyze,
    build_bases,
    inner_product,
    predicted_params,
    verify_weighing,
    weighing_from_bases,
)

__version__ = "0.1.0"

__all__ = [
    "ResolvableDesign",
    "arbibd",
    "class_count_bound",
    "mols_to_rbd",
    "mu",
    "rbd_to_mols",
    "t_bound",
    "t_oracle",
    "validate",
    "QefParams",
    "construct_qef",
    "construct_se_s",
    "plan",
    "qef_pipeline",
    "reshape",
    "trim_arbibd",
    "field_new",
    "dft",
    "paley_i",
    "paley_ii",
    "real_hadamard",
    "sylvester",
    "tensor",
    "verify_scaffold",
    "MolsSet",
    "are_orthogonal",
    "macneish_product",
    "mols_for_order",
    "mols_prime_power",
    "MubCollection",
    "analyze",
    "build_bases",
    "inner_product",
    "predicted_params",
    "verify_weighing",
    "weighing_from_bases",
]
