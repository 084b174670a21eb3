"""Equivariant cohomology of flag varieties via GKM moment graphs."""

from .errors import (ConfigurationError, GkmError, InternalError, NotDivisibleError,
                     ResourceLimitError, UsageError, VerificationError)
from .gkm import (FlowUpBasis, GkmClass, GkmReport, billey_localize, decompose, delta,
                  delta_word, flowup_basis, generate_from_top, kk_partial, structure_constants,
                  top_class, verify_gkm, weyl_act)
from .graph import (Edge, MomentGraph, build_bitstring, build_generic, build_quotient, export,
                    moment_graph, reconstruct_edges)
from .poly import AlphaExpansion, Polynomial, alpha_expand, bgg_partial, bgg_partial_word
from .roots import (Coset, Root, RootSystem, WeylElement, apply, bruhat_leq, build_root_system,
                    inversions, minimal_rep, reduced_words)
from .schubert import (ProductReport, SchubertPolynomial, bgg_schubert, grassmannian_schubert,
                       kappa, kappa_parabolic, schubert_coefficients_mod_I,
                       verify_product_identity)

__version__ = "0.1.0"
