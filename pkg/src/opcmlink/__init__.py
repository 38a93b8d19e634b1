"""Finite ordered partial commutative monoids for reasoning about partial information."""

from .errors import (
    InconsistentLinkage,
    NoAdjointError,
    OpcmError,
    PreconditionError,
    ResourceError,
    StructuralError,
)
from .grothendieck import (
    GrothElem,
    IndexedFamily,
    JoinSemilattice,
    check_completion_props,
    check_functor,
    completion_leq,
    groth_opcm,
    powerset_lattice,
)
from .instances import POST, flat, possibility_of_opcm, possibility_of_set, post_opcm, prefix_opcm
from .morphisms import (
    GaloisConnection,
    Hom,
    LinkingPassage,
    check_extension_inequality,
    check_galois,
    check_hom,
    check_two_routes,
    link,
    preimage_galois,
)
from .opcm import FiniteOpcm, LawReport, check_opcm_laws, product
from .order import Preorder, convex_hull, lift, quotient
from .relational import AttributeSchema, Hierarchy, Relation, extend, natural_join, project
from .valuation import ValuationAlgebra, check_isomorphism_theorem, check_ova_axioms, relational_ova

__all__ = [
    "InconsistentLinkage",
    "NoAdjointError",
    "OpcmError",
    "PreconditionError",
    "ResourceError",
    "StructuralError",
    "GrothElem",
    "IndexedFamily",
    "JoinSemilattice",
    "check_completion_props",
    "check_functor",
    "completion_leq",
    "groth_opcm",
    "powerset_lattice",
    "POST",
    "flat",
    "possibility_of_opcm",
    "possibility_of_set",
    "post_opcm",
    "prefix_opcm",
    "GaloisConnection",
    "Hom",
    "LinkingPassage",
    "check_extension_inequality",
    "check_galois",
    "check_hom",
    "check_two_routes",
    "link",
    "preimage_galois",
    "FiniteOpcm",
    "LawReport",
    "check_opcm_laws",
    "product",
    "Preorder",
    "convex_hull",
    "lift",
    "quotient",
    "AttributeSchema",
    "Hierarchy",
    "Relation",
    "extend",
    "natural_join",
    "project",
    "ValuationAlgebra",
    "check_isomorphism_theorem",
    "check_ova_axioms",
    "relational_ova",
]
