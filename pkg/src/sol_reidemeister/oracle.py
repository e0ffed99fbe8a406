"""Independent checks on Reidemeister numbers: twisted classes in finite
quotients, union-find over bounded windows, and infinity certificates."""

from __future__ import annotations

from dataclasses import dataclass, field

from .automorphisms import AutomorphismSpec, apply, restrict_to_lattice, validate_automorphism
from .errors import CertificateRejected, InvalidInput
from .groups import Family, GroupElement, GroupSpec, generator_names, group_of
from .lattice import IDENTITY, IntMat2


class UnionFind:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            if ry < rx:
                rx, ry = ry, rx
            self.parent[ry] = rx


def _validated(spec, aut):
    return aut if aut.lattice_part is not None else validate_automorphism(spec, aut)


def _twist_moves(spec, aut):
    """Pairs (g, phi(g)^-1) for generators and their inverses."""
    G = group_of(spec)
    moves = []
    for name in generator_names(spec.family):
        g = G.generator(name)
        for h in (g, G.invert(g)):
            moves.append((h, G.invert(apply(spec, aut, h))))
    return moves


# --- finite quotients ---------------------------------------------------------------------


def quotient_period(A: IntMat2, n: int) -> int:
    """Least even P with A^P = I and I + A + ... + A^(P-1) = 0 mod n.

    Evenness keeps the parity of the t-exponent, which type II twisting
    preserves; the sum condition makes the kernel normal and phi-invariant.
    """
    P, power, total = 0, IDENTITY, IDENTITY.scale(0)
    while True:
        total = (total + power).mod(n)
        power = (power @ A).mod(n)
        P += 1
        if P % 2 == 0 and power == IDENTITY.mod(n) and total == IDENTITY.scale(0):
            return P


class FiniteQuotient:
    """Pi / K with K = {a^x T^z : x in nZ^2, z in PZ}, for Gamma_A and Pi1."""

    def __init__(self, spec: GroupSpec, n: int):
        if spec.family not in (Family.GAMMA_A, Family.PI1):
            raise InvalidInput("finite quotients are built for Gamma_A and Pi1 only")
        if n < 1:
            raise InvalidInput("n must be positive")
        self.spec, self.n = spec, n
        self.G = G = group_of(spec)
        self.P = quotient_period(spec.A, n)
        self.elements = [
            GroupElement((x1, x2), z, 0, w)
            for x1 in range(n)
            for x2 in range(n)
            for z in range(self.P)
            for w in range(G.f2_order)
        ]
        for k in self.kernel_gens():
            for name in generator_names(spec.family):
                g = G.generator(name)
                if not self.in_kernel(G.conjugate(g, k)):
                    raise ValueError("kernel is not normal")

    def kernel_gens(self):
        return [GroupElement((self.n, 0)), GroupElement((0, self.n)), GroupElement((0, 0), self.P)]

    def in_kernel(self, g) -> bool:
        return g.v == 0 and g.w == 0 and g.z % self.P == 0 and g.x[0] % self.n == 0 and g.x[1] % self.n == 0

    def reduce(self, g: GroupElement) -> GroupElement:
        return GroupElement((g.x[0] % self.n, g.x[1] % self.n), g.z % self.P, g.v, g.w)

    def multiply(self, g, h):
        return self.reduce(self.G.multiply(g, h))

    def twisted_class_count(self, aut: AutomorphismSpec) -> int:
        labels = self.twisted_classes(aut)
        return len(set(labels.values()))

    def twisted_classes(self, aut: AutomorphismSpec) -> dict:
        """Map from each quotient element to a label of its twisted class."""
        for k in self.kernel_gens():
            if not self.in_kernel(apply(self.spec, aut, k)):
                raise ValueError("automorphism does not preserve the kernel")
        moves = [(self.reduce(g), self.reduce(h)) for g, h in _twist_moves(self.spec, aut)]
        uf = UnionFind()
        for e in self.elements:
            uf.add(e)
        for e in self.elements:
            for g, h in moves:
                uf.union(e, self.multiply(self.multiply(g, e), h))
        return {e: uf.find(e) for e in self.elements}

    def separates(self, aut: AutomorphismSpec, reps) -> bool:
        """True when the images of ``reps`` lie in pairwise different twisted classes."""
        labels = self.twisted_classes(aut)
        found = [labels[self.reduce(self.G.normalize(g))] for g in reps]
        return len(set(found)) == len(found)

    def conjugacy_class_count(self) -> int:
        """Ordinary conjugacy classes, by a direct pass over all pairs."""
        seen, classes = set(), 0
        inv = {g: self.reduce(self.G.invert(g)) for g in self.elements}
        for h in self.elements:
            if h in seen:
                continue
            classes += 1
            for g in self.elements:
                seen.add(self.multiply(self.multiply(g, h), inv[g]))
        return classes


def finite_quotient_count(spec: GroupSpec, aut: AutomorphismSpec, n: int) -> int:
    """Twisted classes of phi in Pi / <a^(nZ^2), t^P>; a lower bound for R(phi)."""
    return FiniteQuotient(spec, n).twisted_class_count(_validated(spec, aut))


# --- bounded windows ---------------------------------------------------------------------------


@dataclass
class WindowReport:
    history: list  # (radius, classes meeting the core)
    stabilized: bool
    count: int
    representative_map: dict = field(default_factory=dict)
    find: object = None

    def same_class(self, g, h) -> bool:
        return self.find(g) == self.find(h)

    def to_json(self) -> dict:
        return {
            "history": [{"radius": r, "classes": c} for r, c in self.history],
            "stabilized": self.stabilized,
            "count": self.count,
        }


def window_class_count(spec: GroupSpec, aut: AutomorphismSpec, x_bound: int, z_bound: int) -> WindowReport:
    """Union-find over normal forms with |x| <= radius and |z| <= z_bound.

    Edges join e and g e phi(g)^-1 for generators g, kept only when both ends
    lie in the window. For each radius the report counts the classes that
    meet the core |x| <= 1, so the counts can only go down as the radius grows.
    """
    aut = _validated(spec, aut)
    G = group_of(spec)
    rad = lambda e: max(abs(e.x[0]), abs(e.x[1]), 1)
    window = {
        GroupElement((x1, x2), z, v, w)
        for x1 in range(-x_bound, x_bound + 1)
        for x2 in range(-x_bound, x_bound + 1)
        for z in range(-z_bound, z_bound + 1)
        for v in range(G.f1_order)
        for w in range(G.f2_order)
    }
    core = sorted(e for e in window if rad(e) == 1)
    moves = _twist_moves(spec, aut)
    levels = {}
    for e in window:
        for g, h in moves:
            f = G.multiply(G.multiply(g, e), h)
            if f in window:
                levels.setdefault(max(rad(e), rad(f)), []).append((e, f))
    uf = UnionFind()
    for e in window:
        uf.add(e)
    history = []
    for r in range(1, x_bound + 1):
        for e, f in levels.get(r, ()):
            uf.union(e, f)
        history.append((r, len({uf.find(e) for e in core})))
    reps = {}
    for e in core:
        reps.setdefault(uf.find(e), e)
    rep_map = {e: reps[uf.find(e)] for e in core}
    stable = len(history) >= 2 and history[-1][1] == history[-2][1]
    return WindowReport(history, stable, history[-1][1], rep_map, uf.find)


# --- certificates ---------------------------------------------------------------------------------


def _reject(msg):
    raise CertificateRejected(msg)


def _check_lattice_cert(cert, datum):
    claimed = cert.get("lattice")
    if claimed is not None and claimed != datum.to_json():
        _reject(f"certificate lattice data {claimed} does not match {datum.to_json()}")
    kind = cert.get("kind")
    if kind == "t_exponent_surjection":
        if datum.eps != 1:
            _reject("the induced map on the t-exponent is not the identity")
        return True
    if kind == "singular":
        j = cert.get("witness_j")
        if not isinstance(j, int) or datum.eps != -1:
            _reject("singular certificate needs a type II restriction and an integer witness")
        if (IDENTITY - (datum.A ** j) @ datum.F).det() != 0:
            _reject(f"det(I - A^{j} F) is not zero")
        return True
    _reject(f"unknown or non-infinite certificate kind {kind!r}")


def check_infinity_certificate(cert: dict, spec: GroupSpec, aut: AutomorphismSpec) -> bool:
    """Re-verify an R = infinity certificate from scratch; raises CertificateRejected."""
    aut = _validated(spec, aut)
    if not isinstance(cert, dict):
        _reject("certificate must be an object")
    if cert.get("kind") == "coset_twist":
        try:
            alpha = group_of(spec).normalize(GroupElement.from_json(cert.get("coset_rep")))
        except Exception as exc:
            _reject(f"bad coset representative: {exc}")
        datum = restrict_to_lattice(spec, aut, alpha)
        return _check_lattice_cert(cert.get("inner") or {}, datum)
    return _check_lattice_cert(cert, restrict_to_lattice(spec, aut))
