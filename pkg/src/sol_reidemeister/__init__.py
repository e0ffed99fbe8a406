"""Exact arithmetic, automorphisms and Reidemeister numbers for the
crystallographic groups of Sol."""

from __future__ import annotations

__version__ = "0.1.0"

from .automorphisms import (
    AutomorphismSpec,
    LatticeDatum,
    apply,
    characteristic_subgroup,
    classify_type,
    compose,
    enumerate_automorphisms,
    restrict_to_lattice,
    validate_automorphism,
)
from .errors import SolError
from .groups import (
    Family,
    GroupElement,
    GroupSpec,
    discover,
    group_of,
    is_bieberbach,
    make_spec,
    parameter_space,
    validate_spec,
)
from .lattice import IntMat2, lattice_quotient, smith_normal_form
from .oracle import check_infinity_certificate, finite_quotient_count, window_class_count
from .reidemeister import INFINITY, Verdict, averaging, pi1_decision, reidemeister, reidemeister_lattice
