"""Exact-arithmetic laboratory for the family-variable polytope."""

from .catalog import (CLASS_REPRESENTATIVES, FacetCatalog, catalog_facets,
                      class_inequality, permutation_orbit)
from .dd import facet_enumeration
from .extended import (MULTIPLIERS, ExtendedModel, audit_printed_rows,
                       build_extended_model, project_with_multipliers,
                       sink_face_points)
from .faces import FaceDescription, order_face, sink_face
from .inequality import (LinearInequality, from_terms, kcluster_inequality,
                         lower_bound, modified_convexity)
from .transforms import lift_facet, restrict_facet
from .verify import (affine_rank, check_coeff_monotonicity,
                     check_monotone_form, dag_points, facet_rank,
                     integer_rank, integral_cluster_points_are_dags, is_facet,
                     verify_validity)

__all__ = [
    "CLASS_REPRESENTATIVES", "FacetCatalog", "catalog_facets",
    "class_inequality", "permutation_orbit", "facet_enumeration",
    "MULTIPLIERS", "ExtendedModel", "audit_printed_rows",
    "build_extended_model", "project_with_multipliers", "sink_face_points",
    "FaceDescription", "order_face", "sink_face",
    "LinearInequality", "from_terms", "kcluster_inequality", "lower_bound",
    "modified_convexity", "lift_facet", "restrict_facet",
    "affine_rank", "check_coeff_monotonicity", "check_monotone_form",
    "dag_points", "facet_rank", "integer_rank",
    "integral_cluster_points_are_dags", "is_facet", "verify_validity",
]
