"""The ten lattice families of Sol^3 x K: presentations, normal forms and
an exact composition law.

Every element is stored in the normal form a^x T^z F1^v F2^w, where T is the
infinite-order generator of the family (t, beta or alpha) and F1, F2 are the
finite-order generators that occur. Composition goes through a faithful
rational affine model: each group embeds in Aff(Q^2) x Isom(Z), with a^x
acting as translation by x, the other generators acting linearly through
their conjugation matrices, and the Isom(Z) factor recording the exponent
of T. Translation parts of the finite generators are solved for once per
group from the defining relations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Optional

from .errors import (
    BoundExhausted,
    InconsistentAux,
    InvalidHyperbolic,
    InvalidInput,
    MissingReverser,
    MissingRoot,
    ParamOutOfSpace,
)
from .lattice import (
    IDENTITY,
    AffineSolution,
    FiniteAbelianQuotient,
    IntMat2,
    as_vec,
    image_generators,
    involution_class,
    integral_square_roots,
    kernel_quotient,
    lattice_quotient,
    solve_integer,
    solve_matrix_equation,
    vadd,
    vneg,
    vsub,
)


class Family(str, Enum):
    GAMMA_A = "GammaA"
    PI1 = "Pi1"
    PI2_PLUS = "Pi2Plus"
    PI2_MINUS = "Pi2Minus"
    PI3 = "Pi3"
    PI4 = "Pi4"
    PI5 = "Pi5"
    PI6 = "Pi6"
    PI7 = "Pi7"
    PI8 = "Pi8"


@dataclass(frozen=True)
class FamilyInfo:
    infinite: str
    f1: Optional[str]
    f2: Optional[str]
    root_det: Optional[int]
    reverser_det: Optional[int]
    params: tuple
    f1_order: int = 1
    f1_flip: int = 1
    f2_flip: int = 1
    # the characteristic lattice is <a1, a2, T^lattice_power>
    lattice_power: int = 1


FAMILY_INFO = {
    Family.GAMMA_A: FamilyInfo("t", None, None, None, None, ()),
    Family.PI1: FamilyInfo("t", None, "beta", None, None, ("k",)),
    Family.PI2_PLUS: FamilyInfo("beta", None, None, 1, None, (), lattice_power=2),
    Family.PI2_MINUS: FamilyInfo("beta", None, None, -1, None, (), lattice_power=2),
    Family.PI3: FamilyInfo("t", None, "beta", None, -1, ("k", "kp"), f2_flip=-1),
    Family.PI4: FamilyInfo("beta", "alpha", None, -1, None, ("k",), f1_order=2, lattice_power=2),
    Family.PI5: FamilyInfo("t", "alpha", "beta", None, -1, ("m", "k", "kp", "n"), f1_order=2, f2_flip=-1, lattice_power=2),
    Family.PI6: FamilyInfo("alpha", None, "beta", 1, -1, ("k", "kp"), f2_flip=-1, lattice_power=2),
    Family.PI7: FamilyInfo("t", "alpha", None, None, 1, ("k",), f1_order=4, f1_flip=-1),
    Family.PI8: FamilyInfo("beta", "alpha", None, -1, 1, ("k", "m"), f1_order=4, f1_flip=-1, lattice_power=2),
}

PARAM_ALIASES = {"k'": "kp", "k_prime": "kp"}
NEG_I = IntMat2(-1, 0, 0, -1)
E1, E2 = (1, 0), (0, 1)


def family_of(name) -> Family:
    try:
        return Family(name)
    except ValueError:
        raise InvalidInput(f"unknown family {name!r}; expected one of {[f.value for f in Family]}") from None


def generator_names(family: Family) -> list:
    info = FAMILY_INFO[family]
    return ["a1", "a2", info.infinite] + [g for g in (info.f1, info.f2) if g]


# --- hyperbolic matrices ---------------------------------------------------------


def check_hyperbolic(a: IntMat2) -> IntMat2:
    if a.det() != 1:
        raise InvalidHyperbolic(f"det A = {a.det()}, expected 1")
    if a.trace() <= 2:
        raise InvalidHyperbolic(f"tr A = {a.trace()}, expected > 2")
    if a.b == 0 or a.c == 0:
        raise InvalidHyperbolic("off-diagonal entries of A must be nonzero")
    return a


# --- specs -------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupSpec:
    family: Family
    A: IntMat2
    N: Optional[IntMat2] = None
    M: Optional[IntMat2] = None
    params: tuple = ()  # sorted ((name, vec), ...)
    eta: Optional[int] = None

    def param(self, name: str):
        return dict(self.params).get(name, (0, 0))

    @property
    def info(self) -> FamilyInfo:
        return FAMILY_INFO[self.family]

    def to_json(self) -> dict:
        out = {"family": self.family.value, "A": self.A.to_list()}
        if self.N is not None:
            out["N"] = self.N.to_list()
        if self.M is not None:
            out["M"] = self.M.to_list()
        out["params"] = {k: list(v) for k, v in self.params}
        if self.eta is not None:
            out["eta"] = self.eta
        return out

    @classmethod
    def from_json(cls, data) -> "GroupSpec":
        if not isinstance(data, dict):
            raise InvalidInput("group spec must be a JSON object")
        unknown = set(data) - {"family", "A", "N", "M", "params", "eta"}
        if unknown:
            raise InvalidInput(f"unknown group spec fields: {sorted(unknown)}")
        if "family" not in data or "A" not in data:
            raise InvalidInput("group spec needs 'family' and 'A'")
        family = family_of(data["family"])
        try:
            a = IntMat2.from_list(data["A"])
            n = IntMat2.from_list(data["N"]) if data.get("N") is not None else None
            m = IntMat2.from_list(data["M"]) if data.get("M") is not None else None
            raw = data.get("params") or {}
            if not isinstance(raw, dict):
                raise ValueError("params must be an object")
            params = tuple(sorted((PARAM_ALIASES.get(k, k), as_vec(v)) for k, v in raw.items()))
        except (ValueError, TypeError) as exc:
            raise InvalidInput(str(exc)) from None
        eta = data.get("eta")
        if eta is not None and eta not in (1, 2):
            raise InvalidInput("eta must be 1 or 2")
        return cls(family, a, n, m, params, eta)


def make_spec(family, A, N=None, M=None, eta=None, **params) -> GroupSpec:
    """Convenience constructor taking plain lists/tuples; validates the result."""
    fam = family_of(family) if not isinstance(family, Family) else family
    mat = lambda x: None if x is None else (x if isinstance(x, IntMat2) else IntMat2.from_list(list(x)))
    ps = tuple(sorted((PARAM_ALIASES.get(k, k), tuple(v)) for k, v in params.items()))
    return validate_spec(GroupSpec(fam, mat(A), mat(N), mat(M), ps, eta))


# --- parameter spaces ----------------------------------------------------------


def _full(*mats, two=False) -> FiniteAbelianQuotient:
    return lattice_quotient(image_generators(*mats), IntMat2.scalar(2) if two else None)


def _combos(spec: GroupSpec):
    """(label, quotient, value, rebuild-order) for each parameter coordinate."""
    f, A, N, M = spec.family, spec.A, spec.N, spec.M
    I = IDENTITY
    p = spec.param
    if f == Family.PI1:
        return [("k", _full(I - A, two=True), p("k"))]
    if f == Family.PI3:
        return [
            ("k", kernel_quotient(I - M, I + M), p("k")),
            ("kp-k", kernel_quotient(A - M, A.inverse() + M), vsub(p("kp"), p("k"))),
        ]
    if f == Family.PI4:
        return [("k", _full(I - N, two=True), p("k"))]
    if f == Family.PI5:
        Ai = A.inverse()
        k, kp, m, n = p("k"), p("kp"), p("m"), p("n")
        d = vsub(kp, k)
        return [
            ("k", kernel_quotient(I - M, I + M), k),
            ("n+k", kernel_quotient(I + M, I - M), vadd(n, k)),
            ("kp-k", kernel_quotient(I - Ai @ M, (I + M @ A).scale(spec.eta or 1)), d),
            ("m-n+M(kp-k)", kernel_quotient(Ai + M, A - M), vadd(vsub(m, n), M @ d)),
        ]
    if f == Family.PI6:
        return [
            ("k", kernel_quotient(I - M, I + M), p("k")),
            ("kp-k", kernel_quotient(N - M, N.inverse() + M), vsub(p("kp"), p("k"))),
        ]
    if f == Family.PI7:
        Ai = A.inverse()
        return [("k", _full(M + Ai, I - Ai), p("k"))]
    if f == Family.PI8:
        Ai = A.inverse()
        return [
            ("k", _full(I - Ai, (M + Ai) @ (I + N)), p("k")),
            ("m", kernel_quotient(M + N.inverse(), M + N), p("m")),
        ]
    return []


def parameter_space(spec: GroupSpec) -> dict:
    """Quotient groups parametrising the family, keyed by the parameter combination."""
    try:
        return {label: q for label, q, _ in _combos(spec)}
    except ValueError as exc:
        raise InconsistentAux(str(exc)) from None


def _canonical_params(spec: GroupSpec) -> tuple:
    try:
        combos = _combos(spec)
    except ValueError as exc:
        raise InconsistentAux(str(exc)) from None
    canon = {}
    for label, q, value in combos:
        try:
            canon[label] = q.reduce(value)
        except ValueError:
            raise ParamOutOfSpace(f"{label} = {value} is outside its parameter space") from None
    f = spec.family
    out = {}
    if f in (Family.PI1, Family.PI4, Family.PI7):
        out["k"] = canon["k"]
    elif f in (Family.PI3, Family.PI6):
        out["k"] = canon["k"]
        out["kp"] = vadd(canon["kp-k"], canon["k"])
    elif f == Family.PI5:
        k = canon["k"]
        n = vsub(canon["n+k"], k)
        d = canon["kp-k"]
        out.update(k=k, n=n, kp=vadd(d, k), m=vsub(vadd(canon["m-n+M(kp-k)"], n), spec.M @ d))
    elif f == Family.PI8:
        out.update(k=canon["k"], m=canon["m"])
    return tuple(sorted(out.items()))


# --- validation ----------------------------------------------------------------------


def _default_root(a: IntMat2, det: int) -> IntMat2:
    roots = [n for n, d in integral_square_roots(a) if d == det]
    if not roots:
        which = "tr A + 2" if det == 1 else "tr A - 2"
        raise MissingRoot(f"A has no integral square root of determinant {det} ({which} is not a square)")
    return roots[0]  # -(A + det I)/s


M_NORMAL = IntMat2(-1, 1, 0, 1)


def eta_test(a: IntMat2, m: IntMat2, bound: int = 10):
    """Return 1 or 2, or None when no normalising conjugator is found within bound.

    eta = 2 exactly when some P with P m P^-1 = [[-1, 1], [0, 1]] also makes
    both l21/gcd(l22 - 1, l21) and l21/gcd(l22 + 1, l21) even, l = P a P^-1.
    Such P form a coset of a centraliser of order 4, so one hit suffices.
    """
    if involution_class(m) == 0:
        return 1
    found = solve_matrix_equation(m, M_NORMAL, bound)
    if not found:
        return None
    p0 = found[0]
    for c in solve_matrix_equation(M_NORMAL, M_NORMAL, 1):
        p = c @ p0
        l = p @ a @ p.inverse()
        l21, l22 = l.c, l.d
        if (l21 // gcd(l22 - 1, l21)) % 2 == 0 and (l21 // gcd(l22 + 1, l21)) % 2 == 0:
            return 2
    return 1


def validate_spec(spec: GroupSpec) -> GroupSpec:
    """Check a spec and return it with canonical parameters and explicit auxiliaries.

    Idempotent. A missing N is filled with the root -(A +- I)/s; a missing M
    is an error since reversing matrices are never unique.
    """
    info = FAMILY_INFO[spec.family]
    A = check_hyperbolic(spec.A)
    N, M = spec.N, spec.M
    if info.root_det is None:
        if N is not None:
            raise InconsistentAux(f"{spec.family.value} takes no root N")
    elif N is None:
        N = _default_root(A, info.root_det)
    elif N @ N != A or N.det() != info.root_det:
        raise InconsistentAux(f"N must satisfy N^2 = A with det N = {info.root_det}")
    if info.reverser_det is None:
        if M is not None:
            raise InconsistentAux(f"{spec.family.value} takes no reversing matrix M")
    else:
        if M is None:
            raise MissingReverser(
                f"{spec.family.value} needs a traceless M with det {info.reverser_det} and M A M^-1 = A^-1"
            )
        if M.trace() != 0 or M.det() != info.reverser_det or M @ A != A.inverse() @ M:
            raise InconsistentAux(
                f"M must be traceless with det {info.reverser_det} and M A M^-1 = A^-1"
            )
    unknown = {k for k, _ in spec.params} - set(info.params)
    if unknown:
        raise ParamOutOfSpace(f"{spec.family.value} has no parameters {sorted(unknown)}")
    eta = spec.eta
    if spec.family == Family.PI5:
        if eta is None:
            eta = eta_test(A, M)
            if eta is None:
                raise BoundExhausted("could not decide eta within the search bound; pass eta explicitly")
    elif eta is not None:
        raise InvalidInput("eta only applies to Pi5")
    full = tuple(sorted((name, spec.param(name)) for name in info.params))
    draft = GroupSpec(spec.family, A, N, M, full, eta)
    out = GroupSpec(spec.family, A, N, M, _canonical_params(draft), eta)
    group_of(out)  # raises when the relations are inconsistent
    return out


# --- elements --------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class GroupElement:
    """a^x T^z F1^v F2^w."""

    x: tuple
    z: int = 0
    v: int = 0
    w: int = 0

    @classmethod
    def of(cls, x=(0, 0), z=0, v=0, w=0) -> "GroupElement":
        return cls(tuple(x), z, v, w)

    def to_json(self) -> dict:
        return {"x": list(self.x), "z": self.z, "v": self.v, "w": self.w}

    @classmethod
    def from_json(cls, data) -> "GroupElement":
        if not isinstance(data, dict):
            raise InvalidInput(f"group element must be an object, got {data!r}")
        try:
            x = as_vec(data.get("x", [0, 0]))
        except ValueError as exc:
            raise InvalidInput(str(exc)) from None
        vals = [data.get(k, 0) for k in ("z", "v", "w")]
        if any(isinstance(v, bool) or not isinstance(v, int) for v in vals):
            raise InvalidInput(f"z, v, w must be integers in {data!r}")
        return cls(x, vals[0], vals[1], vals[2])

    def __repr__(self):
        return f"GroupElement(x={self.x}, z={self.z}, v={self.v}, w={self.w})"


# --- symbolic affine maps ------------------------------------------------------------


class Affine:
    """Element of Aff(Q^2) x Isom(Z) whose translation may be linear in unknowns.

    ``b`` holds two rows [const, c_0, ..., c_{n-1}] of Fractions.
    """

    __slots__ = ("L", "b", "z", "eps")

    def __init__(self, L, b, z, eps):
        self.L, self.b, self.z, self.eps = L, b, z, eps

    @classmethod
    def const(cls, L, t, z, eps, n=0):
        return cls(L, ([Fraction(t[0])] + [Fraction(0)] * n, [Fraction(t[1])] + [Fraction(0)] * n), z, eps)

    @classmethod
    def unknown(cls, L, t, z, eps, n, index):
        """Translation t + (u_index, u_index+1)."""
        out = cls.const(L, t, z, eps, n)
        out.b[0][1 + index] += 1
        out.b[1][1 + 1 + index] += 1
        return out

    @staticmethod
    def _apply(L, b):
        r0 = [L.a * x + L.b * y for x, y in zip(*b)]
        r1 = [L.c * x + L.d * y for x, y in zip(*b)]
        return r0, r1

    def __mul__(self, o: "Affine") -> "Affine":
        r0, r1 = self._apply(self.L, o.b)
        b = ([x + y for x, y in zip(self.b[0], r0)], [x + y for x, y in zip(self.b[1], r1)])
        return Affine(self.L @ o.L, b, self.z + self.eps * o.z, self.eps * o.eps)

    def inverse(self) -> "Affine":
        Li = self.L.inverse()
        r0, r1 = self._apply(Li, self.b)
        return Affine(Li, ([-x for x in r0], [-x for x in r1]), -self.eps * self.z, self.eps)

    def __pow__(self, k: int) -> "Affine":
        base = self if k >= 0 else self.inverse()
        out = Affine.const(IDENTITY, (0, 0), 0, 1, len(self.b[0]) - 1)
        for _ in range(abs(k)):
            out = out * base
        return out

    def shape(self):
        return (self.L, self.z, self.eps)

    def equations_against(self, o: "Affine"):
        """Linear equations (rows, rhs) expressing equal translations."""
        rows, rhs = [], []
        for i in range(2):
            diff = [x - y for x, y in zip(self.b[i], o.b[i])]
            rows.append(diff[1:])
            rhs.append(-diff[0])
        return rows, rhs


def evaluate_word(word, images: dict, n: int) -> Affine:
    """Evaluate tokens ('a', vec) or (name, exponent) using affine images of generators."""
    out = Affine.const(IDENTITY, (0, 0), 0, 1, n)
    for name, e in word:
        if name == "a":
            out = out * Affine.const(IDENTITY, e, 0, 1, n)
        else:
            out = out * (images[name] ** e)
    return out


def relations(spec: GroupSpec) -> list:
    """Defining relations as (label, lhs, rhs) token words."""
    f, A, N, M = spec.family, spec.A, spec.N, spec.M
    info = spec.info
    p = spec.param
    rho = _linear_parts(spec)
    rels = []
    for g in generator_names(f)[2:]:
        for i, e in ((1, E1), (2, E2)):
            rels.append((f"{g} a{i} {g}^-1", [(g, 1), ("a", e), (g, -1)], [("a", rho[g] @ e)]))
    a = lambda v: ("a", v)
    if f == Family.PI1:
        rels += [
            ("beta^2", [("beta", 2)], []),
            ("beta t beta^-1", [("beta", 1), ("t", 1), ("beta", -1)], [a(p("k")), ("t", 1)]),
        ]
    elif f == Family.PI3:
        rels += [
            ("beta^2", [("beta", 2)], [a(p("k"))]),
            ("beta t beta^-1", [("beta", 1), ("t", 1), ("beta", -1)], [a(p("kp")), ("t", -1)]),
        ]
    elif f == Family.PI4:
        rels += [
            ("alpha^2", [("alpha", 2)], []),
            ("alpha beta alpha^-1", [("alpha", 1), ("beta", 1), ("alpha", -1)], [a(p("k")), ("beta", 1)]),
        ]
    elif f == Family.PI5:
        rels += [
            ("alpha^2", [("alpha", 2)], []),
            ("beta^2", [("beta", 2)], [a(p("k"))]),
            ("[alpha, beta]", [("alpha", 1), ("beta", 1), ("alpha", -1), ("beta", -1)], [a(p("n"))]),
            ("alpha t alpha^-1", [("alpha", 1), ("t", 1), ("alpha", -1)], [a(p("m")), ("t", 1)]),
            ("beta t beta^-1", [("beta", 1), ("t", 1), ("beta", -1)], [a(p("kp")), ("t", -1)]),
        ]
    elif f == Family.PI6:
        rels += [
            ("beta^2", [("beta", 2)], [a(p("k"))]),
            ("beta alpha beta^-1", [("beta", 1), ("alpha", 1), ("beta", -1)], [a(p("kp")), ("alpha", -1)]),
        ]
    elif f == Family.PI7:
        rels += [
            ("alpha^4", [("alpha", 4)], []),
            ("alpha t alpha^-1", [("alpha", 1), ("t", 1), ("alpha", -1)], [a(p("k")), ("t", -1)]),
        ]
    elif f == Family.PI8:
        rels += [
            ("alpha^4", [("alpha", 4)], []),
            ("alpha beta^2 alpha^-1", [("alpha", 1), ("beta", 2), ("alpha", -1)], [a(p("k")), ("beta", -2)]),
            ("alpha beta^-1", [("alpha", 1), ("beta", -1)], [a(p("m")), ("beta", 1), ("alpha", -1)]),
        ]
    return rels


def _linear_parts(spec: GroupSpec) -> dict:
    info = spec.info
    f = spec.family
    out = {info.infinite: spec.N if info.root_det is not None else spec.A}
    if f in (Family.PI1,):
        out["beta"] = NEG_I
    elif f in (Family.PI3, Family.PI6):
        out["beta"] = spec.M
    elif f == Family.PI4:
        out["alpha"] = NEG_I
    elif f == Family.PI5:
        out["alpha"] = NEG_I
        out["beta"] = spec.M
    elif f in (Family.PI7, Family.PI8):
        out["alpha"] = spec.M
    return out


# --- the group model ---------------------------------------------------------------------


class Group:
    """Exact multiplication for a validated spec."""

    def __init__(self, spec: GroupSpec):
        self.spec = spec
        info = self.info = spec.info
        self.gens = generator_names(spec.family)
        rho = self.rho = _linear_parts(spec)
        self.T = rho[info.infinite]
        finite = [g for g in (info.f1, info.f2) if g]
        flips = {info.f1: info.f1_flip, info.f2: info.f2_flip}
        nunk = 2 * len(finite)
        sym = {info.infinite: Affine.const(self.T, (0, 0), 1, 1, nunk)}
        for i, g in enumerate(finite):
            sym[g] = Affine.unknown(rho[g], (0, 0), 0, flips[g], nunk, 2 * i)
        rows, rhs = [], []
        for label, lhs, rhs_w in relations(spec):
            left, right = evaluate_word(lhs, sym, nunk), evaluate_word(rhs_w, sym, nunk)
            if left.shape() != right.shape():
                raise InconsistentAux(f"relation {label} fails on linear parts; check N and M")
            r, b = left.equations_against(right)
            rows += r
            rhs += b
        sol = AffineSolution(rows, rhs, nunk)
        if not sol.consistent:
            raise ParamOutOfSpace("parameters are inconsistent with the defining relations")
        u = sol.particular()
        self.D = lcm(1, *(q.denominator for q in u))
        self.f1_order = info.f1_order if info.f1 else 1
        self.f2_order = 2 if info.f2 else 1
        # concrete generators: (L, D * translation, z, eps)
        self._gen = {info.infinite: (self.T, (0, 0), 1, 1)}
        for i, g in enumerate(finite):
            t = (int(u[2 * i] * self.D), int(u[2 * i + 1] * self.D))
            self._gen[g] = (rho[g], t, 0, flips[g])
        self.holonomy = {}
        self._decode = {}
        one = (IDENTITY, (0, 0), 0, 1)
        for v in range(self.f1_order):
            for w in range(self.f2_order):
                h = one
                for _ in range(v):
                    h = self._compose(h, self._gen[info.f1])
                for _ in range(w):
                    h = self._compose(h, self._gen[info.f2])
                if h[0] in self._decode:
                    raise InconsistentAux("holonomy is not faithful")
                self.holonomy[(v, w)] = h
                self._decode[h[0]] = (v, w)
        self._tpow = {0: IDENTITY}

    # affine arithmetic on (L, bD, z, eps)
    @staticmethod
    def _compose(g, h):
        L1, b1, z1, e1 = g
        L2, b2, z2, e2 = h
        return (L1 @ L2, vadd(b1, L1 @ b2), z1 + e1 * z2, e1 * e2)

    def tpow(self, z: int) -> IntMat2:
        m = self._tpow.get(z)
        if m is None:
            m = self._tpow[z] = self.T ** z
        return m

    def to_affine(self, g: GroupElement):
        L, b, _, eps = self.holonomy[(g.v % self.f1_order, g.w % self.f2_order)]
        tz = self.tpow(g.z)
        bb = tz @ b
        return (tz @ L, (self.D * g.x[0] + bb[0], self.D * g.x[1] + bb[1]), g.z, eps)

    def from_affine(self, aff) -> GroupElement:
        L, b, z, eps = aff
        tz = self.tpow(z)
        vw = self._decode.get(self.tpow(-z) @ L)
        if vw is None:
            raise ValueError("affine map is not in the group")
        hb = tz @ self.holonomy[vw][1]
        dx, dy = b[0] - hb[0], b[1] - hb[1]
        if dx % self.D or dy % self.D or self.holonomy[vw][3] != eps:
            raise ValueError("affine map is not in the group")
        return GroupElement((dx // self.D, dy // self.D), z, vw[0], vw[1])

    # group operations
    def element(self, x=(0, 0), z=0, v=0, w=0) -> GroupElement:
        return GroupElement(tuple(x), z, v % self.f1_order, w % self.f2_order)

    def normalize(self, g: GroupElement) -> GroupElement:
        return GroupElement(tuple(g.x), g.z, g.v % self.f1_order, g.w % self.f2_order)

    def identity(self) -> GroupElement:
        return GroupElement((0, 0))

    def generator(self, name: str) -> GroupElement:
        if name == "a1":
            return GroupElement((1, 0))
        if name == "a2":
            return GroupElement((0, 1))
        if name == self.info.infinite:
            return GroupElement((0, 0), 1)
        if name == self.info.f1:
            return GroupElement((0, 0), 0, 1, 0)
        if name == self.info.f2:
            return GroupElement((0, 0), 0, 0, 1)
        raise InvalidInput(f"{self.spec.family.value} has no generator {name!r}")

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        return self.from_affine(self._compose(self.to_affine(g), self.to_affine(h)))

    def invert(self, g: GroupElement) -> GroupElement:
        L, b, z, eps = self.to_affine(g)
        Li = L.inverse()
        bi = Li @ b
        return self.from_affine((Li, (-bi[0], -bi[1]), -eps * z, eps))

    def power(self, g: GroupElement, k: int) -> GroupElement:
        base = g if k >= 0 else self.invert(g)
        k = abs(k)
        out = self.identity()
        while k:
            if k & 1:
                out = self.multiply(out, base)
            base = self.multiply(base, base)
            k >>= 1
        return out

    def product(self, *elems) -> GroupElement:
        out = self.identity()
        for e in elems:
            out = self.multiply(out, e)
        return out

    def conjugate(self, g: GroupElement, h: GroupElement) -> GroupElement:
        """g h g^-1."""
        return self.product(g, h, self.invert(g))

    def word(self, tokens) -> GroupElement:
        out = self.identity()
        for name, e in tokens:
            if name == "a":
                out = self.multiply(out, GroupElement(tuple(e)))
            else:
                out = self.multiply(out, self.power(self.generator(name), e))
        return out

    def linear_part(self, g: GroupElement) -> IntMat2:
        """Matrix by which g acts on <a1, a2> under conjugation."""
        return self.to_affine(g)[0]

    def flips(self, g: GroupElement) -> bool:
        """True when conjugation by g inverts the T-exponent."""
        return self.holonomy[(g.v % self.f1_order, g.w % self.f2_order)][3] == -1

    def is_translation(self, g: GroupElement) -> bool:
        return g.z == 0 and g.v % self.f1_order == 0 and g.w % self.f2_order == 0

    # characteristic lattice <a1, a2, s>, s = T^d
    @property
    def lattice_power(self) -> int:
        return self.info.lattice_power

    @property
    def lattice_matrix(self) -> IntMat2:
        return self.tpow(self.lattice_power)

    def in_lattice(self, g: GroupElement) -> bool:
        return g.v % self.f1_order == 0 and g.w % self.f2_order == 0 and g.z % self.lattice_power == 0

    def coset_reps(self) -> list:
        """Representatives of the cosets of the characteristic lattice."""
        return [
            GroupElement((0, 0), z, v, w)
            for z in range(self.lattice_power)
            for v in range(self.f1_order)
            for w in range(self.f2_order)
        ]


@lru_cache(maxsize=256)
def group_of(spec: GroupSpec) -> Group:
    return Group(spec)


def multiply(spec, g, h):
    return group_of(spec).multiply(g, h)


def invert(spec, g):
    return group_of(spec).invert(g)


def power(spec, g, k):
    return group_of(spec).power(g, k)


def check_relations(spec: GroupSpec) -> list:
    """Labels of defining relations that fail in the model (empty when all hold)."""
    G = group_of(spec)
    return [label for label, lhs, rhs in relations(spec) if G.word(lhs) != G.word(rhs)]


# --- torsion -----------------------------------------------------------------------------


def torsion_element(spec: GroupSpec) -> Optional[GroupElement]:
    """A nontrivial element of finite order, or None if the group is torsion-free.

    Only elements outside the lattice can have finite order. Those whose
    holonomy preserves the T-exponent must have z = 0; those that invert it
    can be conjugated by powers of T to z in {0, 1}. For each candidate
    quotient element h of order n, a^x h has finite order iff
    (1 + L + ... + L^(n-1)) x = -c where h^n = a^c.
    """
    G = group_of(spec)
    for (v, w), (L, _, _, eps) in sorted(G.holonomy.items()):
        zs = (0, 1) if eps == -1 else ((0,) if (v, w) != (0, 0) else ())
        for z in zs:
            h = GroupElement((0, 0), z, v, w)
            acc, n = h, 1
            while not G.is_translation(acc):
                acc = G.multiply(acc, h)
                n += 1
            Lh = G.linear_part(h)
            S, P = IDENTITY.scale(0), IDENTITY
            for _ in range(n):
                S, P = S + P, P @ Lh
            x = solve_integer(S, vneg(acc.x))
            if x is not None:
                return G.multiply(GroupElement(x), h)
    return None


def bieberbach_rule(spec: GroupSpec) -> Optional[bool]:
    """Closed-form torsion-freeness rule when it applies, else None.

    Gamma_A and both Pi2 are torsion-free; Pi1, Pi4, Pi5, Pi7, Pi8 contain
    torsion; Pi3 and Pi6 with M = [[-1, m], [0, 1]] are torsion-free exactly
    when m = 0, k = e2 and kp - k is nonzero in its parameter space.
    """
    f = spec.family
    if f in (Family.GAMMA_A, Family.PI2_PLUS, Family.PI2_MINUS):
        return True
    if f in (Family.PI1, Family.PI4, Family.PI5, Family.PI7, Family.PI8):
        return False
    M = spec.M
    if M.b not in (0, 1) or (M.a, M.c, M.d) != (-1, 0, 1):
        return None
    return M.b == 0 and spec.param("k") == E2 and vsub(spec.param("kp"), spec.param("k")) != (0, 0)


def is_bieberbach(spec: GroupSpec) -> bool:
    return torsion_element(spec) is None


# --- discovery ------------------------------------------------------------------------------


def discover(a: IntMat2, bound: int = 3) -> dict:
    """Square roots, reversing matrices and the families constructible over A."""
    from .lattice import reversing_matrices

    A = check_hyperbolic(a)
    roots = integral_square_roots(A)
    rev = {d: reversing_matrices(A, d, bound) for d in (1, -1)}
    families = []
    for fam in Family:
        info = FAMILY_INFO[fam]
        Ns = [None] if info.root_det is None else [n for n, d in roots if d == info.root_det]
        Ms = [None] if info.reverser_det is None else rev[info.reverser_det]
        for N, M in ((N, M) for N in Ns for M in Ms):
            try:
                spec = validate_spec(GroupSpec(fam, A, N, M))
            except (InconsistentAux, ParamOutOfSpace, BoundExhausted):
                continue
            entry = {"family": fam.value, "spec": spec.to_json()}
            if M is not None and info.reverser_det == -1:
                entry["reflection_class"] = involution_class(M)
            families.append(entry)
            break
    return {
        "A": A.to_list(),
        "square_roots": [{"N": n.to_list(), "det": d} for n, d in roots],
        "reversing": {str(d): [m.to_list() for m in ms] for d, ms in sorted(rev.items())},
        "constructible": families,
        "bound": bound,
    }
