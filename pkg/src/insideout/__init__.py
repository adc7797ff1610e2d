"""Exact lattice-point counting in dilated inside-out polytopes."""

from .arrangement import (
    Hyperplane,
    InsideOutPolytope,
    Region,
    enumerate_regions,
    iter_regions,
    reduce_iop,
)
from .ehrhart import (
    count_lattice_points,
    counting_quasipolynomial,
    ehrhart_quasipolynomial,
    iop_count_moebius,
    iop_count_regions,
    open_quasipolynomial,
)
from .errors import (
    DegenerateArrangement,
    EmptyPolyhedron,
    InsideOutError,
    NoLatticeCompatibleOrigin,
    ParseError,
    SymmetryViolation,
    UnboundedPolyhedron,
    VerificationFailure,
)
from .gfun import Quasipolynomial, RationalGF, gf_series, qp_to_gf
from .magic import MagicSpec, brute_force_count, count_magic, run_magic
from .polytope import HPolyhedron, parse_hrep

__version__ = "0.1.0"

__all__ = [
    "DegenerateArrangement",
    "EmptyPolyhedron",
    "HPolyhedron",
    "Hyperplane",
    "InsideOutError",
    "InsideOutPolytope",
    "MagicSpec",
    "NoLatticeCompatibleOrigin",
    "ParseError",
    "Quasipolynomial",
    "RationalGF",
    "Region",
    "SymmetryViolation",
    "UnboundedPolyhedron",
    "VerificationFailure",
    "brute_force_count",
    "count_lattice_points",
    "count_magic",
    "counting_quasipolynomial",
    "ehrhart_quasipolynomial",
    "enumerate_regions",
    "gf_series",
    "iop_count_moebius",
    "iop_count_regions",
    "iter_regions",
    "open_quasipolynomial",
    "parse_hrep",
    "qp_to_gf",
    "reduce_iop",
    "run_magic",
]
