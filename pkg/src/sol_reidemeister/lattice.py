"""Exact integer algebra on Z^2: 2x2 matrices, Smith forms, sublattice quotients,
intertwiners and square roots."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd, isqrt
from typing import NamedTuple, Optional, Sequence

Vec2 = tuple


class IntMat2(NamedTuple):
    """Row-major integer 2x2 matrix [[a, b], [c, d]]."""

    a: int
    b: int
    c: int
    d: int

    @classmethod
    def from_rows(cls, rows) -> "IntMat2":
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))

    @classmethod
    def from_list(cls, xs) -> "IntMat2":
        """Four entries row by row, flat or as [[a, b], [c, d]]."""
        if not isinstance(xs, (list, tuple)):
            raise ValueError(f"expected a matrix, got {xs!r}")
        if len(xs) == 2 and all(isinstance(r, (list, tuple)) and len(r) == 2 for r in xs):
            xs = [*xs[0], *xs[1]]
        if len(xs) != 4:
            raise ValueError(f"expected 4 entries, got {len(xs)}")
        for x in xs:
            if isinstance(x, bool) or not isinstance(x, int):
                raise ValueError(f"matrix entries must be integers, got {x!r}")
        return cls(*xs)

    @classmethod
    def from_columns(cls, u, v) -> "IntMat2":
        return cls(u[0], v[0], u[1], v[1])

    @classmethod
    def scalar(cls, k: int) -> "IntMat2":
        return cls(k, 0, 0, k)

    def to_list(self) -> list:
        return [self.a, self.b, self.c, self.d]

    def rows(self):
        return ((self.a, self.b), (self.c, self.d))

    def col(self, j: int) -> Vec2:
        return (self.a, self.c) if j == 0 else (self.b, self.d)

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def trace(self) -> int:
        return self.a + self.d

    def is_unimodular(self) -> bool:
        return abs(self.det()) == 1

    def adjugate(self) -> "IntMat2":
        return IntMat2(self.d, -self.b, -self.c, self.a)

    def inverse(self) -> "IntMat2":
        dt = self.det()
        if dt not in (1, -1):
            raise ValueError(f"matrix {self.to_list()} is not unimodular")
        return IntMat2(self.d * dt, -self.b * dt, -self.c * dt, self.a * dt)

    def transpose(self) -> "IntMat2":
        return IntMat2(self.a, self.c, self.b, self.d)

    def __matmul__(self, o):
        if isinstance(o, IntMat2):
            return IntMat2(
                self.a * o.a + self.b * o.c,
                self.a * o.b + self.b * o.d,
                self.c * o.a + self.d * o.c,
                self.c * o.b + self.d * o.d,
            )
        x, y = o
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def __add__(self, o):
        return IntMat2(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    def __sub__(self, o):
        return IntMat2(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __neg__(self):
        return IntMat2(-self.a, -self.b, -self.c, -self.d)

    def scale(self, k: int) -> "IntMat2":
        return IntMat2(k * self.a, k * self.b, k * self.c, k * self.d)

    def __pow__(self, n: int) -> "IntMat2":
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        out = IDENTITY
        while n:
            if n & 1:
                out = out @ base
            base = base @ base
            n >>= 1
        return out

    def mod(self, n: int) -> "IntMat2":
        return IntMat2(self.a % n, self.b % n, self.c % n, self.d % n)

    def __repr__(self):
        return f"IntMat2([[{self.a}, {self.b}], [{self.c}, {self.d}]])"


IDENTITY = IntMat2(1, 0, 0, 1)
ZERO = IntMat2(0, 0, 0, 0)


def vadd(u, v) -> Vec2:
    return (u[0] + v[0], u[1] + v[1])


def vsub(u, v) -> Vec2:
    return (u[0] - v[0], u[1] - v[1])


def vneg(u) -> Vec2:
    return (-u[0], -u[1])


def vscale(k, u) -> Vec2:
    return (k * u[0], k * u[1])


def as_vec(xs) -> Vec2:
    if len(xs) != 2:
        raise ValueError(f"expected a vector of length 2, got {xs!r}")
    for x in xs:
        if isinstance(x, bool) or not isinstance(x, int):
            raise ValueError(f"vector entries must be integers, got {x!r}")
    return (xs[0], xs[1])


# --- Smith normal form -------------------------------------------------------


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_form(m: Sequence[Sequence[int]]):
    """Return (P, D, Q) with P*m*Q = D diagonal, P and Q unimodular.

    Works for any small rectangular integer matrix given as a list of rows.
    Diagonal entries are non-negative and each divides the next.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    D = [list(map(int, r)) for r in m]
    P = _identity(rows)
    Q = _identity(cols)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        P[i], P[j] = P[j], P[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in Q:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, k):  # row dst += k * row src
        D[dst] = [x + k * y for x, y in zip(D[dst], D[src])]
        P[dst] = [x + k * y for x, y in zip(P[dst], P[src])]

    def add_col(src, dst, k):
        for r in D:
            r[dst] += k * r[src]
        for r in Q:
            r[dst] += k * r[src]

    for t in range(min(rows, cols)):
        while True:
            nz = [(abs(D[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if D[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            p = D[t][t]
            done = True
            for i in range(t + 1, rows):
                q = D[i][t] // p
                add_row(t, i, -q)
                if D[i][t]:
                    done = False
            for j in range(t + 1, cols):
                q = D[t][j] // p
                add_col(t, j, -q)
                if D[t][j]:
                    done = False
            if not done:
                continue
            # enforce divisibility of the remaining block
            bad = [(i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if D[i][j] % p]
            if bad:
                add_row(bad[0][0], t, 1)
                continue
            break
        if t < rows and t < cols and D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            P[t] = [-x for x in P[t]]
    return P, D, Q


def smith_normal_form(m: IntMat2):
    """Return (u, s, v) with u @ s @ v == m, u and v unimodular, s diagonal,
    s11 >= 0 and s11 | s22."""
    P, D, Q = smith_form(m.rows())
    p = IntMat2.from_rows(P)
    q = IntMat2.from_rows(Q)
    s = IntMat2(D[0][0], 0, 0, D[1][1])
    return p.inverse(), s, q.inverse()


# --- quotients of sublattices ------------------------------------------------


def _order_key(v):
    return (v[0] + v[1], v[1], v[0])


def _canon_direction(g):
    if g[0] < 0 or (g[0] == 0 and g[1] < 0):
        return vneg(g)
    return g


@dataclass(frozen=True)
class FiniteAbelianQuotient:
    """Quotient S / L of a sublattice S of Z^2 (S = Z^2 by default) by a
    sublattice L inside it.

    Coordinates of S are taken in ``basis``; ``invariant_factors`` omits 1s.
    For finite quotients every coset has a canonical representative: the
    smallest non-negative combination of the basis under the order
    (sum, second, first), so the standard vectors e1, e2, e1+e2 win ties.
    """

    invariant_factors: tuple
    rank_deficiency: int
    coset_reps: tuple
    basis: tuple = ((1, 0), (0, 1))
    _P: tuple = field(default=(), repr=False, compare=False)
    _diag: tuple = field(default=(), repr=False, compare=False)
    _lookup: dict = field(default=None, repr=False, compare=False, hash=False)

    @property
    def order(self) -> Optional[int]:
        if self.rank_deficiency:
            return None
        n = 1
        for d in self.invariant_factors:
            n *= d
        return n

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    def coordinates(self, v) -> tuple:
        """Coordinates of v in ``basis``; raises ValueError if v is outside S."""
        r = len(self.basis)
        if r == 0:
            if tuple(v) != (0, 0):
                raise ValueError(f"{tuple(v)} is not in the zero sublattice")
            return ()
        if r == 1:
            g = self.basis[0]
            i = 0 if g[0] else 1
            c, rem = divmod(v[i], g[i])
            if rem or vscale(c, g) != tuple(v):
                raise ValueError(f"{tuple(v)} is not in the sublattice spanned by {g}")
            return (c,)
        b = IntMat2.from_columns(*self.basis)
        return b.inverse() @ tuple(v)

    def _residue(self, v):
        c = self.coordinates(v)
        img = [sum(p * x for p, x in zip(row, c)) for row in self._P]
        return tuple(x % d if d else x for x, d in zip(img, self._diag))

    def contains(self, v) -> bool:
        """True when v lies in the sublattice being divided out."""
        try:
            return all(x == 0 for x in self._residue(v))
        except ValueError:
            return False

    def same_coset(self, u, v) -> bool:
        return self.contains(vsub(u, v))

    def reduce(self, v) -> Vec2:
        """Canonical representative of the coset of v."""
        if self.rank_deficiency:
            raise ValueError("canonical representatives need a finite quotient")
        return self._lookup[self._residue(v)]


def _candidates(e, r):
    """Coefficient vectors in [0, e)^r, increasing in the order used for coset reps."""
    if r == 1:
        yield from ((c,) for c in range(e))
        return
    for total in range(2 * e - 1):
        for y in range(max(0, total - e + 1), min(total, e - 1) + 1):
            yield (total - y, y)


def _quotient_in_basis(basis, coords):
    r = len(basis)
    if r == 0:
        return FiniteAbelianQuotient((), 0, ((0, 0),), (), (), (), {(): (0, 0)})
    cols = [c for c in coords if any(c)]
    mat = [[c[i] for c in cols] for i in range(r)] if cols else [[0] for _ in range(r)]
    P, D, _ = smith_form(mat)
    diag = tuple(D[i][i] if i < len(D[0]) else 0 for i in range(r))
    invariant = tuple(d for d in diag if d > 1)
    deficiency = sum(1 for d in diag if d == 0)
    P = tuple(tuple(row) for row in P)

    def embed(c):
        out = (0, 0)
        for k, g in zip(c, basis):
            out = vadd(out, vscale(k, g))
        return out

    if deficiency:
        return FiniteAbelianQuotient(invariant, deficiency, (), tuple(basis), P, diag, {})
    e = max(diag) if diag else 1
    order = 1
    for d in diag:
        order *= d
    lookup = {}
    for c in _candidates(e, r):
        img = [sum(p * x for p, x in zip(row, c)) for row in P]
        res = tuple(x % d for x, d in zip(img, diag))
        if res not in lookup:
            lookup[res] = embed(c)
            if len(lookup) == order:
                break
    reps = tuple(lookup.values())  # in candidate order
    return FiniteAbelianQuotient(invariant, 0, reps, tuple(basis), P, diag, lookup)


def lattice_quotient(generators, ambient_scale: Optional[IntMat2] = None) -> FiniteAbelianQuotient:
    """Z^2 modulo the span of ``generators`` (plus the columns of ``ambient_scale``)."""
    gens = [tuple(g) for g in generators]
    if ambient_scale is not None:
        gens += [ambient_scale.col(0), ambient_scale.col(1)]
    return _quotient_in_basis(((1, 0), (0, 1)), gens)


def image_generators(*mats: IntMat2) -> list:
    return [m.col(j) for m in mats for j in (0, 1)]


def kernel_basis(x: IntMat2) -> tuple:
    """A Z-basis of ker(x) in Z^2 (0, 1 or 2 vectors)."""
    if x == ZERO:
        return ((1, 0), (0, 1))
    if x.det() != 0:
        return ()
    row = (x.a, x.b) if (x.a, x.b) != (0, 0) else (x.c, x.d)
    g = gcd(*row)
    return (_canon_direction((-row[1] // g, row[0] // g)),)


def kernel_quotient(x: IntMat2, y: IntMat2) -> FiniteAbelianQuotient:
    """ker(x) / im(y). Raises ValueError when im(y) is not inside ker(x)."""
    if x @ y != ZERO:
        raise ValueError(f"image of {y.to_list()} is not inside the kernel of {x.to_list()}")
    basis = kernel_basis(x)
    q = _quotient_in_basis(basis, [])
    coords = [q.coordinates(g) for g in image_generators(y)]
    return _quotient_in_basis(basis, coords)


def lattice_membership(x, generators) -> bool:
    return lattice_quotient(generators).contains(tuple(x))


# --- exact rational linear algebra ---------------------------------------------


def rref(rows, ncols):
    """Reduced row echelon form over Q. Returns (rows, pivot_columns)."""
    m = [[Fraction(v) for v in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


class AffineSolution:
    """Solution set of a rational linear system, with integer points in a box."""

    def __init__(self, rows, rhs, nvars):
        aug = [list(r) + [b] for r, b in zip(rows, rhs)]
        red, piv = rref(aug, nvars + 1) if aug else ([], [])
        self.nvars = nvars
        self.consistent = nvars not in piv
        self.pivots = [p for p in piv if p < nvars]
        self.free = [j for j in range(nvars) if j not in self.pivots]
        self._red = red

    def particular(self) -> list:
        out = [Fraction(0)] * self.nvars
        for i, p in enumerate(self.pivots):
            out[p] = self._red[i][self.nvars]
        return out

    def integer_points(self, bound: int):
        """All integer solutions with every coordinate in [-bound, bound]."""
        if not self.consistent:
            return
        n = self.nvars
        for fv in product(range(-bound, bound + 1), repeat=len(self.free)):
            sol = [0] * n
            for j, val in zip(self.free, fv):
                sol[j] = val
            ok = True
            for i, p in enumerate(self.pivots):
                row = self._red[i]
                val = row[n] - sum(row[j] * sol[j] for j in self.free)
                if val.denominator != 1 or abs(val) > bound:
                    ok = False
                    break
                sol[p] = int(val)
            if ok:
                yield tuple(sol)


# --- intertwiners, roots, reversing matrices --------------------------------------


def solve_matrix_equation(left: IntMat2, right: IntMat2, bound: int, unimodular: bool = True) -> list:
    """Integer X with X @ left == right @ X and entries bounded by ``bound``.

    The solution set is a sublattice of Z^4 of rank at most 2 when ``left``
    is hyperbolic, so only the free coordinates of that sublattice are
    enumerated.
    """
    # unknowns X = (p, q, r, s); entries of X@left - right@X
    a, b, c, d = left
    e, f, g, h = right
    rows = [
        [a - e, c, -f, 0],
        [b, d - e, 0, -f],
        [-g, 0, a - h, c],
        [0, -g, b, d - h],
    ]
    sol = AffineSolution(rows, [0, 0, 0, 0], 4)
    out = []
    for xs in sol.integer_points(bound):
        x = IntMat2(*xs)
        if unimodular and not x.is_unimodular():
            continue
        if not unimodular and x == ZERO:
            continue
        out.append(x)
    return sorted(out, key=lambda m: (max(map(abs, m)), m))


def solve_intertwiner(a: IntMat2, sign: int, bound: int) -> list:
    """Unimodular X with X @ a == a**sign @ X, entries at most ``bound`` in size."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if not a.is_unimodular():
        raise ValueError("intertwiner search needs a unimodular matrix")
    return solve_matrix_equation(a, a if sign == 1 else a.inverse(), bound)


def integral_square_roots(a: IntMat2) -> list:
    """All integer N with N @ N == a, as (N, det N) pairs.

    By Cayley-Hamilton N = (a + d I) / tr N with (tr N)^2 = tr a + 2d, so
    there are at most two roots for each determinant d = +1, -1.
    """
    out = []
    for d in (1, -1):
        sq = a.trace() + 2 * d
        if sq <= 0:
            continue
        s = isqrt(sq)
        if s * s != sq:
            continue
        base = a + IntMat2.scalar(d)
        if any(x % s for x in base):
            continue
        root = IntMat2(*(x // s for x in base))
        for n in (-root, root):
            if n @ n == a and n.det() == d:
                out.append((n, d))
    return out


def reversing_matrices(a: IntMat2, want_det: int, bound: int) -> list:
    """Traceless M with M a M^-1 = a^-1 and det M = want_det."""
    return [m for m in solve_intertwiner(a, -1, bound) if m.det() == want_det]


def involution_class(m: IntMat2) -> int:
    """For an integral involution M != +-I: 0 if M ~ diag(-1, 1), 1 if M ~ [[-1, 1], [0, 1]]."""
    if m @ m != IDENTITY or m.trace() != 0:
        raise ValueError(f"{m.to_list()} is not a reflection")
    (plus,) = kernel_basis(IDENTITY - m)
    (minus,) = kernel_basis(IDENTITY + m)
    return 0 if abs(IntMat2.from_columns(minus, plus).det()) == 1 else 1


def solve_integer(m: IntMat2, rhs) -> Optional[Vec2]:
    """Some integer x with m @ x == rhs, or None."""
    P, D, Q = smith_form(m.rows())
    y = [P[i][0] * rhs[0] + P[i][1] * rhs[1] for i in range(2)]
    sol = []
    for i in range(2):
        d = D[i][i]
        if d == 0:
            if y[i]:
                return None
            sol.append(0)
        elif y[i] % d:
            return None
        else:
            sol.append(y[i] // d)
    return IntMat2.from_rows(Q) @ tuple(sol)
