"""Exact arithmetic for invariant pseudo-harmonic cochains on the
Bruhat-Tits tree of PGL2 over F_q((1/T)), their Eisenstein eigencochains,
the Hecke / Atkin-Lehner operator calculus, and cuspidal divisor lattices,
with a verification CLI covering every desk-checkable identity."""

from .cochain import (
    DepthError,
    FourierData,
    OperatorTag,
    apply_b,
    apply_k,
    apply_t,
    apply_u,
    apply_w_pointwise,
    forward_const,
    forward_star,
    level_lower,
    w_matrix,
)
from .cusps import (
    CuspSet,
    cusp_classify,
    cusp_group,
    cusp_matrix_witness,
    cusp_orbit_bfs,
    cusp_w_action,
    exponent_check,
    relation_lattice,
    rho_exponent,
)
from .cyclo import Cyc, CycloRing, eta, eta_of_coeff
from .eisenstein import (
    EisCombo,
    EpsVector,
    build_e_eps,
    eisenstein_order,
    etilde_closed,
    etilde_fourier,
)
from .fq import Fq, Poly, crt, is_irreducible, poly_from_str, poly_to_str, sigma, xgcd
from .laurent import RatF
from .snf import smith_normal_form
from .tree import (
    Mat2,
    TreeEdge,
    act,
    bar,
    edge_from_str,
    edge_to_str,
    incoming_neighbors,
    make_edge,
    normal_form,
    reduce_gl2a,
    reduce_to_positive,
)

__version__ = "0.1.0"
