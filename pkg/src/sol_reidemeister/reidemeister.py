"""Reidemeister numbers: closed forms on the lattice, the averaging formula
over the characteristic lattice, the Pi1 parity decision and R-infinity sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .automorphisms import (
    AutomorphismSpec,
    LatticeDatum,
    characteristic_subgroup,
    enumerate_automorphisms,
    restrict_to_lattice,
    validate_automorphism,
)
from .errors import CaseMismatch, CounterexampleFound, InvalidDatum
from .groups import Family, GroupElement, GroupSpec, group_of, is_bieberbach
from .lattice import IDENTITY, ZERO, IntMat2, image_generators, lattice_quotient, lattice_membership

INFINITY = "infinity"


@dataclass
class Verdict:
    count: Optional[int]  # None means infinite
    rule: str
    class_reps: list = field(default_factory=list)
    certificate: dict = field(default_factory=dict)
    breakdown: list = field(default_factory=list)
    lower_bound_only: bool = False
    type_tag: Optional[str] = None
    det_F: Optional[int] = None

    @property
    def is_finite(self) -> bool:
        return self.count is not None

    @property
    def det_phi(self) -> Optional[int]:
        """Determinant of phi on the lattice coordinates (a1, a2, s): det F times eps."""
        if self.det_F is None or self.type_tag not in ("I", "II"):
            return None
        return self.det_F * (1 if self.type_tag == "I" else -1)

    def to_json(self) -> dict:
        out = {
            "R": self.count if self.is_finite else INFINITY,
            "class_reps": [g.to_json() for g in self.class_reps],
            "certificate": self.certificate,
            "breakdown": self.breakdown,
            "theorem": self.rule,
        }
        if self.lower_bound_only:
            out["lower_bound_only"] = True
        if self.type_tag is not None:
            out["type"] = self.type_tag
            out["det_F"] = self.det_F
            out["det_phi"] = self.det_phi
        return out


def _first_outside(gens) -> tuple:
    return next(v for v in sorted([(0, 0), (0, 1), (1, 0), (1, 1)]) if not lattice_membership(v, gens))


def reidemeister_lattice(F: IntMat2, p, eps: int, A: IntMat2) -> Verdict:
    """R for the endomorphism a_i -> a^(F e_i), t -> a^p t^eps of Gamma_A.

    Class representatives are in lattice coordinates, t standing for the
    lattice generator.
    """
    p = tuple(p)
    datum = LatticeDatum(F, p, eps, A)
    lat = datum.to_json()
    if eps in (1, -1):
        if F @ A != (A if eps == 1 else A.inverse()) @ F:
            raise InvalidDatum(f"F A must equal A^{eps} F")
    if eps == 1:
        return Verdict(
            None,
            "t-exponent",
            certificate={"kind": "t_exponent_surjection", "lattice": lat},
            type_tag="I",
            det_F=F.det(),
        )
    if eps == -1:
        if not F.is_unimodular():
            raise InvalidDatum("type II data needs a unimodular F")
        if F.det() == -1:
            return Verdict(
                None,
                "type-II-singular",
                certificate={"kind": "singular", "witness_j": 0, "determinant": (IDENTITY - F).det(), "lattice": lat},
                type_tag="II",
                det_F=-1,
            )
        x0 = _first_outside(image_generators(IDENTITY - F))
        x1 = _first_outside(image_generators(IDENTITY - A @ F))
        reps = [GroupElement((0, 0)), GroupElement((0, 0), 1), GroupElement(x0), GroupElement(x1, 1)]
        return Verdict(4, "type-II-closed-form", reps, {"kind": "finite", "lattice": lat}, type_tag="II", det_F=1)
    # type III: phi kills <a1, a2> and the t-exponent classes are Z / (1 - eps)
    if F != ZERO:
        raise InvalidDatum("only trivial lattice images are supported when eps is not +-1")
    m = abs(1 - eps)
    reps = [GroupElement((0, 0), z) for z in range(m)]
    return Verdict(m, "type-III", reps, {"kind": "t_exponent_classes", "modulus": m, "lattice": lat}, type_tag="III", det_F=0)


def _validated(spec, aut):
    return aut if aut.lattice_part is not None else validate_automorphism(spec, aut)


def averaging(spec: GroupSpec, aut: AutomorphismSpec) -> Verdict:
    """R(phi) from the values on the characteristic lattice twisted by each coset."""
    aut = _validated(spec, aut)
    info = characteristic_subgroup(spec)
    breakdown, total, inf_at = [], 0, None
    for alpha in info.coset_reps:
        datum = restrict_to_lattice(spec, aut, alpha)
        v = reidemeister_lattice(datum.F, datum.p, datum.eps, datum.A)
        breakdown.append({
            "coset_rep": alpha.to_json(),
            "lattice": datum.to_json(),
            "type": datum.type_tag,
            "R": v.count if v.is_finite else INFINITY,
        })
        if not v.is_finite and inf_at is None:
            inf_at = (alpha, v)
        if v.is_finite:
            total += v.count
    lp = aut.lattice_part
    tag, detF = lp.type_tag, lp.F.det()
    if inf_at is not None:
        alpha, v = inf_at
        cert = {"kind": "coset_twist", "coset_rep": alpha.to_json(), "inner": v.certificate}
        return Verdict(None, "averaging", certificate=cert, breakdown=breakdown, type_tag=tag, det_F=detF)
    avg = Fraction(total, info.index)
    if is_bieberbach(spec):
        if avg.denominator != 1:
            raise InvalidDatum(f"average {avg} over a torsion-free group is not an integer")
        return Verdict(int(avg), "averaging", breakdown=breakdown, type_tag=tag, det_F=detF,
                       certificate={"kind": "average", "sum": total, "index": info.index})
    return Verdict(math.ceil(avg), "averaging-lower-bound", breakdown=breakdown, lower_bound_only=True,
                   type_tag=tag, det_F=detF, certificate={"kind": "average", "sum": total, "index": info.index})


def pi1_decision(spec: GroupSpec, aut: AutomorphismSpec) -> Verdict:
    """R(phi) on Pi1: infinite unless type II with det F = 1; then 8 when
    (I - F) x is even (phi(beta) = a^x beta) and 4 otherwise."""
    if spec.family != Family.PI1:
        raise CaseMismatch("pi1_decision needs a Pi1 spec")
    aut = _validated(spec, aut)
    lp = aut.lattice_part
    avg = averaging(spec, aut)
    if not avg.is_finite:
        return Verdict(None, "pi1-parity", certificate=avg.certificate, breakdown=avg.breakdown,
                       type_tag=lp.type_tag, det_F=lp.F.det())
    F, A = lp.F, spec.A
    beta = aut.image("beta")
    if beta.z or beta.w != 1:
        raise CaseMismatch("expected beta -> a^x beta")
    x = beta.x
    I = IDENTITY
    v = (I - F) @ x
    even = v[0] % 2 == 0 and v[1] % 2 == 0
    cert = {"kind": "parity", "x": list(x), "(I-F)x": list(v), "even": even}
    if not even:
        reps = [GroupElement((0, 0)), GroupElement((0, 0), 1), GroupElement((0, 0), 0, 0, 1), GroupElement((0, 0), 1, 0, 1)]
        return Verdict(4, "pi1-parity", reps, cert, avg.breakdown, type_tag="II", det_F=1)
    reps = []
    for z, w, mat in ((0, 0, I - F), (1, 0, I - A @ F), (0, 1, I + F), (1, 1, I + A @ F)):
        for q in lattice_quotient(image_generators(mat)).coset_reps:
            reps.append(GroupElement(q, z, 0, w))
    return Verdict(8, "pi1-parity", reps, cert, avg.breakdown, type_tag="II", det_F=1)


def reidemeister(spec: GroupSpec, aut: AutomorphismSpec) -> Verdict:
    aut = _validated(spec, aut)
    if spec.family == Family.GAMMA_A:
        lp = aut.lattice_part
        return reidemeister_lattice(lp.F, lp.p, lp.eps, lp.A)
    if spec.family == Family.PI1:
        return pi1_decision(spec, aut)
    return averaging(spec, aut)


# --- parity classification over Pi1(k) -------------------------------------------------


@dataclass(frozen=True)
class ParityCase:
    case: int
    allowed_k: tuple
    unconditional_eight: bool


def parity_classification(A: IntMat2, k=(0, 0)) -> ParityCase:
    """Which parity pattern A has, and the k values it allows.

    Patterns of (l11, l12, l21, l22) mod 2: odd trace (case 1), l11 and l22
    even (case 2), only l12 even (case 3), only l21 even (case 4), both
    off-diagonal entries even (case 5). Only case 5 can give R = 4.
    """
    o = lambda n: n % 2 == 1
    e1, e2 = (1, 0), (0, 1)
    if o(A.trace()):
        case = ParityCase(1, ((0, 0),), True)
    elif not o(A.a) and not o(A.d):
        case = ParityCase(2, ((0, 0), e1), True)
    elif not o(A.b) and o(A.c):
        case = ParityCase(3, ((0, 0), e1), True)
    elif o(A.b) and not o(A.c):
        case = ParityCase(4, ((0, 0), e2), True)
    else:
        case = ParityCase(5, ((0, 0), e1, e2, (1, 1)), False)
    if tuple(k) not in case.allowed_k:
        raise CaseMismatch(f"k = {tuple(k)} is not a parameter for parity case {case.case}")
    return case


def parity_predicate(A: IntMat2, k, F: IntMat2, x) -> bool:
    """True when the parity table predicts R = 8 for phi with lattice part F and
    phi(beta) = a^x beta (type II, det F = 1)."""
    case = parity_classification(A, k)
    if case.unconditional_eight:
        return True
    o = lambda n: n % 2 == 1
    k = tuple(k)
    diag_case = o(F.a) and not o(F.b) and not o(F.c)
    if k == (0, 0):
        return lattice_membership(x, image_generators(IDENTITY - F))
    if k == (1, 0):
        return o(F.a) and not o(F.c) and (not o(F.b) or not o(x[1]))
    if k == (0, 1):
        return o(F.a) and not o(F.b) and (not o(F.c) or not o(x[0]))
    return diag_case or (not o(F.a) and o(F.b) and o(F.c) and x[0] % 2 == x[1] % 2)


# --- R-infinity sweeps ---------------------------------------------------------------------


def r_infinity_report(spec: GroupSpec, entry_bound: int = 3, translation_bound: int = 3) -> dict:
    """Enumerate automorphisms within bounds and certify R = infinity for each."""
    from .oracle import check_infinity_certificate

    rows = []
    by_type = {}
    for aut in enumerate_automorphisms(spec, entry_bound, translation_bound):
        v = reidemeister(spec, aut)
        if v.is_finite:
            raise CounterexampleFound(f"finite Reidemeister number {v.count} for {aut.to_json()}")
        check_infinity_certificate(v.certificate, spec, aut)
        by_type[aut.type_tag] = by_type.get(aut.type_tag, 0) + 1
        rows.append({"automorphism": aut.to_json(), "type": aut.type_tag, "certificate": v.certificate})
    return {
        "family": spec.family.value,
        "entry_bound": entry_bound,
        "translation_bound": translation_bound,
        "automorphisms": len(rows),
        "by_type": dict(sorted(by_type.items())),
        "all_infinite": True,
        "entries": rows,
    }
