"""Homogeneous multivariate polynomials in the differential variables w1..wg.

Coefficients live either in a cyclotomic field (CycRing) or in a radical
tower (RadRing).  Supports linear substitution, content normalization of
twisted generators, and graded ideal-membership tests by exact elimination.
"""

from fractions import Fraction
from functools import lru_cache

from .cyclotomic import CycNum
from .radicals import MPoly, RatFunc, RadNum
from .errors import StructureError
from . import linalg


class CycRing:
    """Coefficient ring tag for cyclotomic scalars."""

    name = "cyc"

    def zero(self):
        return CycNum.from_rational(0)

    def one(self):
        return CycNum.from_rational(1)

    def coerce(self, x):
        if isinstance(x, CycNum):
            return x
        return CycNum.from_rational(x)

    def __eq__(self, other):
        return isinstance(other, CycRing)

    def __hash__(self):
        return hash("cyc")


class RadRing:
    """Coefficient ring tag for radical-tower scalars."""

    name = "rad"

    def __init__(self, spec):
        self.spec = spec

    def zero(self):
        return RadNum(self.spec, {})

    def one(self):
        return RadNum.from_rational(self.spec, 1)

    def coerce(self, x):
        if isinstance(x, RadNum):
            if x.spec != self.spec:
                raise StructureError("radical field spec mismatch")
            return x
        if isinstance(x, RatFunc):
            return RadNum.from_ratfunc(self.spec, x)
        if isinstance(x, CycNum):
            return RadNum.from_cyc(self.spec, x.lift(self.spec.conductor))
        return RadNum.from_rational(self.spec, x)

    def __eq__(self, other):
        return isinstance(other, RadRing) and self.spec == other.spec

    def __hash__(self):
        return hash(("rad", self.spec))


CYC = CycRing()


@lru_cache(maxsize=None)
def monomials_of_degree(nvars, degree):
    """All exponent tuples of the given total degree, grlex-descending."""
    if nvars == 1:
        return ((degree,),)
    out = []
    for first in range(degree, -1, -1):
        for rest in monomials_of_degree(nvars - 1, degree - first):
            out.append((first,) + rest)
    return tuple(out)


class HomPoly:
    """A homogeneous polynomial; terms map exponent tuples to ring coefficients."""

    __slots__ = ("ring", "nvars", "degree", "terms")

    def __init__(self, ring, nvars, degree, terms):
        self.ring = ring
        self.nvars = nvars
        self.degree = degree
        self.terms = terms

    @staticmethod
    def make(ring, nvars, items, degree=None):
        terms = {}
        for exps, c in items:
            exps = tuple(exps)
            if len(exps) != nvars:
                raise StructureError("exponent tuple has wrong length")
            c = ring.coerce(c)
            if not c:
                continue
            d = sum(exps)
            if degree is None:
                degree = d
            elif d != degree:
                raise StructureError(
                    f"inhomogeneous term w^{exps}: degree {d}, expected {degree}")
            if exps in terms:
                s = terms[exps] + c
                if s:
                    terms[exps] = s
                else:
                    del terms[exps]
            else:
                terms[exps] = c
        return HomPoly(ring, nvars, degree, terms)

    @staticmethod
    def zero(ring, nvars, degree=None):
        return HomPoly(ring, nvars, degree, {})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        if other.degree is not None and self.degree is not None \
                and other.degree != self.degree and self.terms and other.terms:
            raise StructureError("cannot add homogeneous polynomials of different degrees")
        degree = self.degree if self.degree is not None else other.degree
        return HomPoly.make(self.ring, self.nvars,
                            list(self.terms.items()) + list(other.terms.items()),
                            degree=degree if (self.terms or other.terms) else None)

    def __neg__(self):
        return HomPoly(self.ring, self.nvars, self.degree,
                       {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        items = []
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                items.append((tuple(a + b for a, b in zip(e1, e2)), c1 * c2))
        degree = None
        if self.degree is not None and other.degree is not None:
            degree = self.degree + other.degree
        return HomPoly.make(self.ring, self.nvars, items, degree=degree)

    def scale(self, c):
        c = self.ring.coerce(c)
        if not c:
            return HomPoly.zero(self.ring, self.nvars, self.degree)
        return HomPoly(self.ring, self.nvars, self.degree,
                       {e: v * c for e, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, HomPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def leading_monomial(self):
        if not self.terms:
            raise StructureError("zero polynomial has no leading monomial")
        return max(self.terms)

    def map_coefficients(self, fn, ring=None):
        ring = ring or self.ring
        return HomPoly.make(ring, self.nvars,
                            [(e, fn(c)) for e, c in self.terms.items()],
                            degree=self.degree)

    def to_ring(self, ring):
        return self.map_coefficients(lambda c: ring.coerce(c), ring)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: t[0], reverse=True)

    def __repr__(self):
        return f"HomPoly({self.to_str()})"

    def to_str(self, names=None):
        if not self.terms:
            return "0"
        names = names or [f"w{i+1}" for i in range(self.nvars)]
        parts = []
        for exps, c in self.sorted_terms():
            mon = "*".join(
                f"{names[i]}^{k}" if k > 1 else names[i]
                for i, k in enumerate(exps) if k)
            cs = c.to_str()
            sign = "+"
            if cs.startswith("-") and " " not in cs:
                sign, cs = "-", cs[1:]
            if mon:
                if cs == "1":
                    body = mon
                elif " " in cs or "/" in cs and not _is_simple_fraction(cs):
                    body = f"({cs})*{mon}"
                else:
                    body = f"{cs}*{mon}"
            else:
                body = f"({cs})" if " " in cs else cs
            parts.append((sign, body))
        sign, body = parts[0]
        text = body if sign == "+" else f"-{body}"
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


def _is_simple_fraction(s):
    # "2/3" or "m^(2/3)" style chunks that don't need extra parentheses
    return all(ch.isalnum() or ch in "/^()*_" for ch in s)


# ---------------------------------------------------------------------------
# substitution


def substitute(p, matrix, ring=None):
    """Apply the linear substitution w_i -> sum_j matrix[i][j] * w_j.

    The matrix entries must live in `ring` (defaults to p.ring); cyclotomic
    polynomials are lifted automatically when the matrix is over a tower.
    """
    if ring is None:
        ring = p.ring
    g = p.nvars
    if len(matrix) != g or any(len(row) != g for row in matrix):
        raise StructureError("substitution matrix has wrong shape")
    images = [HomPoly.make(ring, g, [((_unit(g, j)), ring.coerce(matrix[i][j]))
                                     for j in range(g)], degree=1)
              for i in range(g)]
    powers = [{0: HomPoly.make(ring, g, [((0,) * g, 1)], degree=0)} for _ in range(g)]

    def power(i, k):
        if k not in powers[i]:
            powers[i][k] = power(i, k - 1) * images[i]
        return powers[i][k]

    total = HomPoly.zero(ring, g, p.degree)
    for exps, c in p.terms.items():
        term = HomPoly.make(ring, g, [((0,) * g, ring.coerce(c))], degree=0)
        for i, k in enumerate(exps):
            if k:
                term = term * power(i, k)
        total = total + term
    return total


def _unit(n, j):
    e = [0] * n
    e[j] = 1
    return tuple(e)


# ---------------------------------------------------------------------------
# normalization of twisted generators


def normalize_generator(p):
    """Divide a tower-coefficient generator by its common radical-monomial and
    rational-function content; the surviving parameter exponents must be
    nonnegative integers.  The coefficient of the graded-lex greatest
    parameter-free term (when one exists) is scaled to 1."""
    if p.is_zero():
        raise StructureError("cannot normalize the zero polynomial")
    ring = p.ring
    if not isinstance(ring, RadRing):
        raise StructureError("normalize_generator expects tower coefficients")
    spec = ring.spec
    nv = spec.nvars
    qs = spec.exponents

    # clear all denominators at once
    denom = MPoly.const(nv, 1)
    for coeff in p.terms.values():
        for rf in coeff.terms.values():
            if not rf.is_poly():
                from .radicals import mp_lcm
                denom = mp_lcm(denom, rf.den)
    if not denom.is_const():
        clear = RadNum.from_ratfunc(spec, RatFunc.from_poly(denom))
        p = p.scale(clear)

    # flatten into atoms with fractional parameter exponents
    atoms = []  # (w-exps, tuple of Fraction exponents, CycNum)
    for wexps, coeff in p.terms.items():
        for rexps, rf in coeff.terms.items():
            if not rf.is_poly():
                raise StructureError("denominator survived clearing; bad content")
            for mexps, c in rf.num.terms.items():
                vec = tuple(Fraction(mexps[t]) + Fraction(rexps[t], qs[t])
                            for t in range(nv))
                atoms.append((wexps, vec, c))

    content = [min(a[1][t] for a in atoms) for t in range(nv)] if nv else []
    rebuilt = {}
    for wexps, vec, c in atoms:
        shifted = [v - content[t] for t, v in enumerate(vec)]
        for s in shifted:
            if s.denominator != 1:
                raise StructureError(
                    "residual fractional parameter exponent after content removal; "
                    "the twisted basis is inconsistent")
        mono = tuple(int(s) for s in shifted)
        rebuilt.setdefault(wexps, []).append((mono, c))

    polys = {w: MPoly.make(nv, items) for w, items in rebuilt.items()}
    polys = {w: q for w, q in polys.items() if not q.is_zero()}
    if not polys:
        raise StructureError("generator collapsed to zero during normalization")

    # divide out the common polynomial content
    from .radicals import mp_gcd, mp_divexact
    g = None
    for q in polys.values():
        g = q if g is None else mp_gcd(g, q)
        if g.is_const():
            break
    if not g.is_const():
        polys = {w: mp_divexact(q, g) for w, q in polys.items()}

    # unit normalization
    zero_mono = (0,) * nv
    param_free = [w for w, q in polys.items() if zero_mono in q.terms]
    if param_free:
        anchor = max(param_free)
        unit = polys[anchor].terms[zero_mono]
    else:
        anchor = max(polys)
        unit = polys[anchor].terms[polys[anchor].lex_max()]
    inv = unit.inverse()
    items = [(w, RadNum.from_ratfunc(spec, RatFunc.from_poly(q.scale(inv))))
             for w, q in polys.items()]
    return HomPoly.make(ring, p.nvars, items, degree=p.degree)


# ---------------------------------------------------------------------------
# canonical ideals and graded membership


class CanonicalIdeal:
    """A homogeneous ideal given by generators over a cyclotomic field, with
    cached graded pieces for exact membership tests."""

    def __init__(self, nvars, generators):
        if not generators:
            raise StructureError("generator list must be nonempty")
        gens = []
        for g in generators:
            if g.is_zero():
                raise StructureError("zero ideal generator")
            if g.nvars != nvars:
                raise StructureError("generator variable count mismatch")
            gens.append(g)
        self.nvars = nvars
        self.generators = gens
        self._pieces = {}

    def degrees(self):
        return [g.degree for g in self.generators]

    def _piece(self, d):
        if d in self._pieces:
            return self._pieces[d]
        monos = monomials_of_degree(self.nvars, d)
        index = {m: i for i, m in enumerate(monos)}
        zero = CYC.zero()
        one = CYC.one()
        rows = []
        for g in self.generators:
            if g.degree > d:
                continue
            for mu in monomials_of_degree(self.nvars, d - g.degree):
                row = [zero] * len(monos)
                for e, c in g.terms.items():
                    te = tuple(a + b for a, b in zip(e, mu))
                    row[index[te]] = row[index[te]] + c
                rows.append(row)
        reduced, pivots = linalg.rref(rows, zero, one)
        self._pieces[d] = (monos, index, reduced, pivots)
        return self._pieces[d]

    def contains(self, p):
        """True iff p lies in the degree-d graded piece of the ideal."""
        if p.is_zero():
            return True
        if p.degree < min(self.degrees()):
            return False
        monos, index, reduced, pivots = self._piece(p.degree)
        vec = [CYC.zero()] * len(monos)
        for e, c in p.terms.items():
            vec[index[e]] = c
        residue = linalg.reduce_against(vec, reduced, pivots)
        return not any(residue)

    def preserved_by(self, matrix):
        """Check that substitution by the matrix maps every generator into the
        ideal; returns the index of the first violated generator or None."""
        for i, g in enumerate(self.generators):
            if not self.contains(substitute(g, matrix)):
                return i
        return None
