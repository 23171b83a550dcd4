"""Exact-arithmetic workbench for deformation problems on affine space:
star products, quadratic relation modules, Rees filtrations, tangency
criteria for compactifications, and algebra gluing data on complexes.

Every computation is over the rationals; there is no floating point
anywhere, so equality assertions are exact.
"""

__version__ = "0.1.0"

# Normalization choices, fixed once and stamped into CLI reports.
CONVENTIONS = (
    "starquant-conventions-1: "
    "{f,g} = sum_{i,j} gamma^ij (d_i f)(d_j g) over the full antisymmetric matrix; "
    "B1 = gamma pairing, so f*g - g*f = 2 hbar {f,g} + O(hbar^3); "
    "Schouten bracket normalized so [gamma,gamma](df,dg,dh) = 2 Jacobiator(f,g,h); "
    "hkr_class = signed slot antisymmetrization without averaging, "
    "so hkr(residual at order 2) = 2 [gamma,gamma]; "
    "canonical monomial order is graded lexicographic"
)

from .poly import Poly, HSeries, poly_mul, poly_partial
from .polyvector import (Bivector, PolyVector, JacobiReport, jacobi_check,
                         schouten, schouten_square, transform_bivector)
from .bidiff import BiDiffOp, TriDiffOp, apply_bidiffop, compose_first, compose_second
from .star import (AnsatzSpec, AnsatzTooSmallError, Obstruction, StarProduct,
                   assoc_residual, hkr_class, moyal, star_multiply, star_solve)
from .truncring import TruncNum
from .quadratic import (ContainmentReport, QuadraticData, cubic_relations,
                        dehomogenize, dequant_first_order, homogenize,
                        quad_relations, quant_map)
from .rees import (FilteredPresentation, FiltrationReport, ReesPresentation,
                   ReesReport, filtration_compat_check, rees_from_filtration,
                   verify_rees, weyl_presentation)
from .tangency import (DivisorTangencyReport, TangencyReport,
                       divisor_tangency_check, pn_tangency_check)
from .algebroid import (AlgebroidData, GaugeObstruction, HomCalculus, HomSpace,
                        SCAlgebra, SimplicialComplex, VerifyReport,
                        algebroid_from_frames, cech_cohomology, gauge_fix,
                        holonomy, hom_space, path_compare, path_compare_values,
                        scalar_unit_algebroid, verify_algebroid)

__all__ = [
    "CONVENTIONS", "__version__",
    "Poly", "HSeries", "poly_mul", "poly_partial",
    "Bivector", "PolyVector", "JacobiReport", "jacobi_check", "schouten",
    "schouten_square", "transform_bivector",
    "BiDiffOp", "TriDiffOp", "apply_bidiffop", "compose_first", "compose_second",
    "AnsatzSpec", "AnsatzTooSmallError", "Obstruction", "StarProduct",
    "assoc_residual", "hkr_class", "moyal", "star_multiply", "star_solve",
    "TruncNum",
    "ContainmentReport", "QuadraticData", "cubic_relations", "dehomogenize",
    "dequant_first_order", "homogenize", "quad_relations", "quant_map",
    "FilteredPresentation", "FiltrationReport", "ReesPresentation", "ReesReport",
    "filtration_compat_check", "rees_from_filtration", "verify_rees",
    "weyl_presentation",
    "DivisorTangencyReport", "TangencyReport", "divisor_tangency_check",
    "pn_tangency_check",
    "AlgebroidData", "GaugeObstruction", "HomCalculus", "HomSpace", "SCAlgebra",
    "SimplicialComplex", "VerifyReport", "algebroid_from_frames",
    "cech_cohomology", "gauge_fix", "holonomy", "hom_space", "path_compare",
    "path_compare_values", "scalar_unit_algebroid", "verify_algebroid",
]
