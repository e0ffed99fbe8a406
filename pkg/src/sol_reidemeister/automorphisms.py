"""Automorphisms of the lattice families: validation, restriction to the
characteristic lattice, twisting by inner automorphisms and bounded
enumeration."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

from .errors import InconsistentParity, InvalidInput, NotBijective, RelationViolated
from .groups import (
    Affine,
    Family,
    GroupElement,
    GroupSpec,
    generator_names,
    group_of,
    relations,
)
from .lattice import IDENTITY, AffineSolution, IntMat2, solve_intertwiner, vadd, vscale


@dataclass(frozen=True)
class LatticeDatum:
    """Restriction to the characteristic lattice <a1, a2, s>, s acting by A:
    a_i -> a^(F e_i), s -> a^p s^eps."""

    F: IntMat2
    p: tuple
    eps: int
    A: IntMat2

    @property
    def type_tag(self) -> str:
        return {1: "I", -1: "II"}.get(self.eps, "III")

    def to_json(self) -> dict:
        return {"F": self.F.to_list(), "p": list(self.p), "epsilon": self.eps, "A": self.A.to_list()}

    @classmethod
    def from_json(cls, data) -> "LatticeDatum":
        return cls(IntMat2.from_list(data["F"]), tuple(data["p"]), data["epsilon"], IntMat2.from_list(data["A"]))


@dataclass(frozen=True)
class AutomorphismSpec:
    images: tuple  # ((generator name, GroupElement), ...)
    lattice_part: Optional[LatticeDatum] = None

    def image(self, name: str) -> GroupElement:
        return dict(self.images)[name]

    @property
    def F(self) -> IntMat2:
        return IntMat2.from_columns(self.image("a1").x, self.image("a2").x)

    @property
    def type_tag(self) -> Optional[str]:
        return None if self.lattice_part is None else self.lattice_part.type_tag

    def to_json(self) -> dict:
        return {"images": {k: g.to_json() for k, g in self.images}}

    @classmethod
    def from_json(cls, data) -> "AutomorphismSpec":
        if not isinstance(data, dict) or not isinstance(data.get("images"), dict):
            raise InvalidInput("automorphism must be an object with an 'images' map")
        return cls(tuple((k, GroupElement.from_json(v)) for k, v in data["images"].items()))


def from_images(spec: GroupSpec, **images) -> AutomorphismSpec:
    """Build and validate from keyword images, e.g. a1=GroupElement.of((0, -1)), ..."""
    return validate_automorphism(spec, AutomorphismSpec(tuple(images.items())))


@dataclass(frozen=True)
class CharacteristicSubgroupInfo:
    generators: tuple  # ((name, element), ...)
    index: int
    lattice_matrix: IntMat2
    coset_reps: tuple
    is_fully_invariant: bool
    intermediate: Optional[tuple] = None  # (generators, index) of a finer step, if any


def characteristic_subgroup(spec: GroupSpec) -> CharacteristicSubgroupInfo:
    """The lattice <a1, a2, T^d> on which Reidemeister numbers are averaged."""
    G = group_of(spec)
    d = G.lattice_power
    gens = (("a1", G.generator("a1")), ("a2", G.generator("a2")), ("s", G.power(G.generator(spec.info.infinite), d)))
    reps = tuple(G.coset_reps())
    fully = spec.family in (Family.GAMMA_A, Family.PI2_PLUS, Family.PI2_MINUS, Family.PI3)
    inter = None
    if spec.family == Family.PI7:
        inter = (gens[:2] + (("t", G.generator("t")), ("alpha^2", G.power(G.generator("alpha"), 2))), 2)
    return CharacteristicSubgroupInfo(gens, len(reps), G.lattice_matrix, reps, fully, inter)


# --- evaluation ------------------------------------------------------------------------


def apply(spec: GroupSpec, aut: AutomorphismSpec, g: GroupElement) -> GroupElement:
    """phi(g) for g in normal form."""
    G = group_of(spec)
    info = spec.info
    img = dict(aut.images)
    out = GroupElement(aut.F @ g.x)
    out = G.multiply(out, G.power(img[info.infinite], g.z))
    if info.f1:
        out = G.multiply(out, G.power(img[info.f1], g.v))
    if info.f2:
        out = G.multiply(out, G.power(img[info.f2], g.w))
    return out


def _apply_word(spec, aut, tokens):
    G = group_of(spec)
    img = dict(aut.images)
    out = G.identity()
    for name, e in tokens:
        if name == "a":
            out = G.multiply(out, GroupElement(aut.F @ tuple(e)))
        else:
            out = G.multiply(out, G.power(img[name], e))
    return out


def _restrict(spec, aut, alpha=None) -> LatticeDatum:
    G = group_of(spec)
    d = G.lattice_power
    s = G.power(G.generator(spec.info.infinite), d)
    F = aut.F
    img = apply(spec, aut, s)
    if alpha is not None:
        F = G.linear_part(alpha) @ F
        img = G.conjugate(alpha, img)
    if not G.in_lattice(img):
        raise NotBijective("image of the characteristic lattice leaves it")
    return LatticeDatum(F, img.x, img.z // d, G.lattice_matrix)


def restrict_to_lattice(spec: GroupSpec, aut: AutomorphismSpec, alpha: Optional[GroupElement] = None) -> LatticeDatum:
    """Lattice data of tau_alpha o phi on the characteristic lattice."""
    return _restrict(spec, aut, alpha)


def classify_type(aut: AutomorphismSpec) -> str:
    if aut.lattice_part is None:
        raise ValueError("classify a validated automorphism")
    return aut.lattice_part.type_tag


# --- validation ------------------------------------------------------------------------


def _pi1_parity(spec, aut):
    """The t- and beta-relations of Pi1 force 2p to equal a vector built from x and k."""
    t, beta = aut.image("t"), aut.image("beta")
    if t.v or t.w or t.z not in (1, -1) or beta.z or beta.w != 1:
        return
    A, F, k, x = spec.A, aut.F, spec.param("k"), beta.x
    I = IDENTITY
    if t.z == 1:
        rhs = vadd((I - A) @ x, (I - F) @ k)
    else:
        Ai = A.inverse()
        rhs = vadd((I - Ai) @ x, vscale(-1, (Ai + F) @ k))
    if rhs[0] % 2 or rhs[1] % 2:
        raise InconsistentParity(f"2p must equal {rhs}, which is not divisible by 2")
    if vscale(2, t.x) != rhs:
        raise RelationViolated("beta t beta^-1", f"p must be {vscale(Fraction(1, 2), rhs)}")


def _preimage_search(spec, aut):
    G = group_of(spec)
    F = aut.F
    if not F.is_unimodular():
        raise NotBijective(f"lattice part {F.to_list()} is not unimodular")
    Finv = F.inverse()
    zmax = 1 + max(abs(g.z) for _, g in aut.images)
    targets = {g: G.generator(g) for g in generator_names(spec.family)[2:]}
    cands = [
        GroupElement((0, 0), z, v, w)
        for z in range(-zmax, zmax + 1)
        for v in range(G.f1_order)
        for w in range(G.f2_order)
    ]
    images = {h: apply(spec, aut, h) for h in cands}
    pre = {}
    for name, g in targets.items():
        for h, ph in images.items():
            if (ph.z, ph.v, ph.w) == (g.z, g.v, g.w):
                y = Finv @ ph.x
                pre[name] = G.multiply(GroupElement((-y[0], -y[1])), h)
                break
        else:
            raise NotBijective(f"no preimage of {name} found")
    return pre


def validate_automorphism(spec: GroupSpec, aut: AutomorphismSpec) -> AutomorphismSpec:
    """Check relations and bijectivity; return the automorphism with normalised
    images and its lattice data attached."""
    G = group_of(spec)
    names = generator_names(spec.family)
    given = dict(aut.images)
    missing = [n for n in names if n not in given]
    extra = [n for n in given if n not in names]
    if missing or extra:
        raise InvalidInput(f"images needed for {names}; missing {missing}, unexpected {extra}")
    aut = AutomorphismSpec(tuple((n, G.normalize(given[n])) for n in names))
    for n in ("a1", "a2"):
        if not G.is_translation(aut.image(n)):
            raise NotBijective(f"image of {n} must lie in <a1, a2>")
    if spec.family == Family.PI1:
        _pi1_parity(spec, aut)
    for label, lhs, rhs in relations(spec):
        if _apply_word(spec, aut, lhs) != _apply_word(spec, aut, rhs):
            raise RelationViolated(label)
    _preimage_search(spec, aut)
    return replace(aut, lattice_part=_restrict(spec, aut))


def preimages(spec: GroupSpec, aut: AutomorphismSpec) -> dict:
    """Elements mapped onto each non-lattice generator; witnesses surjectivity."""
    return _preimage_search(spec, aut)


# --- algebra of automorphisms ------------------------------------------------------------


def compose(spec: GroupSpec, phi: AutomorphismSpec, psi: AutomorphismSpec) -> AutomorphismSpec:
    """phi o psi."""
    imgs = tuple((n, apply(spec, phi, g)) for n, g in psi.images)
    return validate_automorphism(spec, AutomorphismSpec(imgs))


def conjugate_twist(spec: GroupSpec, aut: AutomorphismSpec, alpha: GroupElement) -> AutomorphismSpec:
    """tau_alpha o phi, where tau_alpha(g) = alpha g alpha^-1."""
    G = group_of(spec)
    imgs = tuple((n, G.conjugate(alpha, g)) for n, g in aut.images)
    return validate_automorphism(spec, AutomorphismSpec(imgs))


def inner(spec: GroupSpec, alpha: GroupElement) -> AutomorphismSpec:
    G = group_of(spec)
    imgs = tuple((n, G.conjugate(alpha, G.generator(n))) for n in generator_names(spec.family))
    return validate_automorphism(spec, AutomorphismSpec(imgs))


def identity_automorphism(spec: GroupSpec) -> AutomorphismSpec:
    return inner(spec, group_of(spec).identity())


# --- enumeration ---------------------------------------------------------------------------


def _quotient_form(G, L: IntMat2, zmax: int):
    for z in sorted(range(-zmax, zmax + 1), key=abs):
        vw = G._decode.get(G.tpow(-z) @ L)
        if vw is not None:
            return GroupElement((0, 0), z, vw[0], vw[1])
    return None


def enumerate_automorphisms(spec: GroupSpec, entry_bound: int, translation_bound: int) -> list:
    """All automorphisms whose lattice matrix has entries at most ``entry_bound``
    and whose translation vectors and auxiliary exponents are at most
    ``translation_bound`` in absolute value.

    The lattice matrix F must conjugate A to A^(+-1). Given F, each remaining
    generator g must go to a^u h with h the unique quotient element whose
    matrix is F rho(g) F^-1, so only the vectors u are unknown; the relations
    are linear in them and are solved exactly.
    """
    G = group_of(spec)
    names = generator_names(spec.family)[2:]
    n = 2 * len(names)
    F_cands = solve_intertwiner(spec.A, 1, entry_bound) + solve_intertwiner(spec.A, -1, entry_bound)
    out = []
    for F in F_cands:
        Finv = F.inverse()
        forms = {}
        for g in names:
            L = F @ G.rho[g] @ Finv
            h = _quotient_form(G, L, max(1, translation_bound))
            if h is None:
                break
            forms[g] = h
        else:
            sym = {}
            for i, g in enumerate(names):
                L, bD, z, eps = G.to_affine(forms[g])
                t = (Fraction(bD[0], G.D), Fraction(bD[1], G.D))
                sym[g] = Affine.unknown(L, t, z, eps, n, 2 * i)
            rows, rhs = [], []
            ok = True
            for label, lhs, rw in relations(spec):
                left = _sym_word(lhs, sym, F, n)
                right = _sym_word(rw, sym, F, n)
                if left.shape() != right.shape():
                    ok = False
                    break
                r, b = left.equations_against(right)
                rows += r
                rhs += b
            if not ok:
                continue
            for u in AffineSolution(rows, rhs, n).integer_points(translation_bound):
                imgs = [("a1", GroupElement(F.col(0))), ("a2", GroupElement(F.col(1)))]
                for i, g in enumerate(names):
                    h = forms[g]
                    imgs.append((g, GroupElement((u[2 * i], u[2 * i + 1]), h.z, h.v, h.w)))
                try:
                    out.append(validate_automorphism(spec, AutomorphismSpec(tuple(imgs))))
                except NotBijective:
                    continue
    return out


def _sym_word(tokens, sym, F, n):
    out = Affine.const(IDENTITY, (0, 0), 0, 1, n)
    for name, e in tokens:
        if name == "a":
            out = out * Affine.const(IDENTITY, F @ tuple(e), 0, 1, n)
        else:
            out = out * (sym[name] ** e)
    return out
