"""Arithmetic in radical towers K(m_1,...,m_s)[x_t]/(x_t^{q_t} - m_t) over K = Q(zeta_N).

The Kummer parameters m_t are formal transcendental symbols.  Coefficients of
tower elements are rational functions in the m_t with cyclotomic coefficients,
kept in a canonical reduced form so equality is decidable structurally.
"""

from fractions import Fraction

from .cyclotomic import CycNum, zeta
from .errors import StructureError
from . import linalg

# ---------------------------------------------------------------------------
# multivariate polynomials over CycNum

_CYC_ZERO = CycNum.from_rational(0)
_CYC_ONE = CycNum.from_rational(1)


class MPoly:
    """Multivariate polynomial in the Kummer symbols with CycNum coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms):
        self.nvars = nvars
        self.terms = terms  # dict exponent-tuple -> nonzero CycNum

    @staticmethod
    def make(nvars, items):
        terms = {}
        for exps, c in items:
            if not isinstance(c, CycNum):
                c = CycNum.from_rational(c)
            if not c:
                continue
            exps = tuple(exps)
            if exps in terms:
                c = terms[exps] + c
                if c:
                    terms[exps] = c
                else:
                    del terms[exps]
            else:
                terms[exps] = c
        return MPoly(nvars, terms)

    @staticmethod
    def const(nvars, c):
        return MPoly.make(nvars, [((0,) * nvars, c)])

    @staticmethod
    def var(nvars, i, exp=1, coeff=1):
        e = [0] * nvars
        e[i] = exp
        return MPoly.make(nvars, [(tuple(e), coeff)])

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_const(self):
        return not self.terms or set(self.terms) == {(0,) * self.nvars}

    def const_value(self):
        return self.terms.get((0,) * self.nvars, _CYC_ZERO)

    def __add__(self, other):
        return MPoly.make(self.nvars,
                          list(self.terms.items()) + list(other.terms.items()))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return MPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        items = []
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                items.append((tuple(a + b for a, b in zip(e1, e2)), c1 * c2))
        return MPoly.make(self.nvars, items)

    def scale(self, c):
        if not isinstance(c, CycNum):
            c = CycNum.from_rational(c)
        if not c:
            return MPoly(self.nvars, {})
        return MPoly(self.nvars, {e: v * c for e, v in self.terms.items()})

    def __pow__(self, k):
        result = MPoly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        return isinstance(other, MPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset((e, c.key()) for e, c in self.terms.items()))

    def degree(self, var):
        return max((e[var] for e in self.terms), default=0)

    def lex_max(self):
        return max(self.terms)

    def lex_min(self):
        return min(self.terms)

    def shift(self, var, amount):
        """Multiply by var^amount."""
        out = {}
        for e, c in self.terms.items():
            e2 = list(e)
            e2[var] += amount
            out[tuple(e2)] = c
        return MPoly(self.nvars, out)

    def evaluate(self, values):
        """Full evaluation; values is a sequence of CycNum/Fraction per variable."""
        total = _CYC_ZERO
        vals = [v if isinstance(v, CycNum) else CycNum.from_rational(v) for v in values]
        for e, c in self.terms.items():
            term = c
            for i, exp in enumerate(e):
                for _ in range(exp):
                    term = term * vals[i]
            total = total + term
        return total

    def __repr__(self):
        return f"MPoly({poly_to_str(self)})"


def poly_to_str(p, names=None):
    if p.is_zero():
        return "0"
    names = names or [f"m{i+1}" for i in range(p.nvars)]
    parts = []
    for e in sorted(p.terms, reverse=True):
        c = p.terms[e]
        mon = "*".join(
            f"{names[i]}^{k}" if k > 1 else names[i] for i, k in enumerate(e) if k)
        cs = c.to_str()
        neg = cs.startswith("-") and "+" not in cs and cs.count("-") == 1
        if mon:
            if cs == "1":
                body, sign = mon, "+"
            elif cs == "-1":
                body, sign = mon, "-"
            elif neg and ("+" not in cs and " - " not in cs):
                body, sign = f"{cs[1:]}*{mon}" if "*" not in cs[1:] and " " not in cs[1:] else f"({cs})*{mon}", "-"
            elif " " in cs:
                body, sign = f"({cs})*{mon}", "+"
            else:
                body, sign = f"{cs}*{mon}", "+"
        else:
            if neg:
                body, sign = cs[1:], "-"
            elif " " in cs:
                body, sign = f"({cs})", "+"
            else:
                body, sign = cs, "+"
        parts.append((sign, body))
    sign, body = parts[0]
    text = body if sign == "+" else f"-{body}"
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


# -- gcd machinery -----------------------------------------------------------


def _vars_present(a, b):
    out = []
    for v in range(a.nvars):
        if a.degree(v) > 0 or b.degree(v) > 0:
            out.append(v)
    return out


def _uni(p, v):
    """View p as a univariate polynomial in variable v: dict deg -> MPoly."""
    coeffs = {}
    for e, c in p.terms.items():
        d = e[v]
        e2 = list(e)
        e2[v] = 0
        coeffs.setdefault(d, []).append((tuple(e2), c))
    return {d: MPoly.make(p.nvars, items) for d, items in coeffs.items()}


def _from_uni(coeffs, v):
    items = []
    for d, poly in coeffs.items():
        for e, c in poly.terms.items():
            e2 = list(e)
            e2[v] = d
            items.append((tuple(e2), c))
    if items:
        nv = len(items[0][0])
        return MPoly.make(nv, items)
    return None


def _normalize_monic(p):
    if p.is_zero():
        return p
    lead = p.terms[p.lex_max()]
    return p.scale(lead.inverse())


def mp_divexact(a, b):
    """Exact division a / b; raises StructureError when not exact."""
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    if a.is_zero():
        return a
    if b.is_const():
        return a.scale(b.const_value().inverse())
    v = max(v for v in range(b.nvars) if b.degree(v) > 0)
    ua = _uni(a, v)
    ub = _uni(b, v)
    db = max(ub)
    lead_b = ub[db]
    q = {}
    guard = 0
    while ua:
        da = max(ua)
        if da < db:
            raise StructureError("inexact polynomial division")
        qc = mp_divexact(ua[da], lead_b)
        q[da - db] = qc
        for d, c in ub.items():
            nd = da - db + d
            cur = ua.get(nd, MPoly(a.nvars, {}))
            cur = cur - qc * c
            if cur.is_zero():
                ua.pop(nd, None)
            else:
                ua[nd] = cur
        guard += 1
        if guard > 10000:
            raise StructureError("polynomial division does not terminate")
    out = _from_uni(q, v)
    return out if out is not None else MPoly(a.nvars, {})


def _prem(f, g, v):
    """Pseudo-remainder of f by g with respect to variable v."""
    uf = _uni(f, v)
    ug = _uni(g, v)
    dg = max(ug)
    lg = ug[dg]
    r = f
    while r:
        ur = _uni(r, v)
        dr = max(ur)
        if dr < dg:
            break
        lr = ur[dr]
        r = r * lg - (g.shift(v, dr - dg)) * lr
    return r


def _content(p, v):
    coeffs = list(_uni(p, v).values())
    g = coeffs[0]
    for c in coeffs[1:]:
        g = mp_gcd(g, c)
        if g.is_const():
            break
    return g


def mp_gcd(a, b):
    """Monic gcd over Q(zeta); uses Euclid in one variable and a primitive
    pseudo-remainder sequence for several."""
    if a.is_zero():
        return _normalize_monic(b)
    if b.is_zero():
        return _normalize_monic(a)
    pres = _vars_present(a, b)
    if not pres:
        return MPoly.const(a.nvars, 1)
    v = pres[-1]
    if len(pres) == 1:
        f, g = a, b
        while g:
            uf, ug = _uni(f, v), _uni(g, v)
            if max(uf) < max(ug):
                f, g = g, f
                continue
            f, g = g, _prem(f, g, v)
        return _normalize_monic(f)
    ca, cb = _content(a, v), _content(b, v)
    pa, pb = mp_divexact(a, ca), mp_divexact(b, cb)
    cont = mp_gcd(ca, cb)
    f, g = pa, pb
    while g:
        r = _prem(f, g, v)
        if r:
            r = mp_divexact(r, _content(r, v))
        f, g = g, r
    f = mp_divexact(f, _content(f, v))
    return _normalize_monic(f * cont)


def mp_lcm(a, b):
    if a.is_zero() or b.is_zero():
        return MPoly(a.nvars, {})
    return _normalize_monic(mp_divexact(a * b, mp_gcd(a, b)))


# ---------------------------------------------------------------------------
# rational functions


class RatFunc:
    """Quotient of MPolys in canonical reduced form: gcd(num, den) = 1 and the
    denominator's lexicographically least monomial has coefficient 1."""

    __slots__ = ("num", "den")

    def __init__(self, num, den, reduced=False):
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            self.num = num
            self.den = MPoly.const(num.nvars, 1)
            return
        if not reduced:
            g = mp_gcd(num, den)
            if not g.is_const():
                num = mp_divexact(num, g)
                den = mp_divexact(den, g)
            unit = den.terms[den.lex_min()].inverse()
            num = num.scale(unit)
            den = den.scale(unit)
        self.num = num
        self.den = den

    @staticmethod
    def from_cyc(c, nvars):
        return RatFunc(MPoly.const(nvars, c), MPoly.const(nvars, 1), reduced=True)

    @staticmethod
    def from_poly(p):
        return RatFunc(p, MPoly.const(p.nvars, 1))

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return bool(self.num)

    def is_poly(self):
        return self.den.is_const()

    def __add__(self, other):
        return RatFunc(self.num * other.den + other.num * self.den,
                       self.den * other.den)

    def __sub__(self, other):
        return RatFunc(self.num * other.den - other.num * self.den,
                       self.den * other.den)

    def __neg__(self):
        return RatFunc(-self.num, self.den, reduced=True)

    def __mul__(self, other):
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc(self.den, self.num)

    def scale_cyc(self, c):
        return RatFunc(self.num.scale(c), self.den)

    def map_coefficients(self, fn):
        num = MPoly(self.num.nvars, {e: fn(c) for e, c in self.num.terms.items()})
        den = MPoly(self.den.nvars, {e: fn(c) for e, c in self.den.terms.items()})
        return RatFunc(num, den)

    def evaluate(self, values):
        d = self.den.evaluate(values)
        if not d:
            raise ZeroDivisionError("denominator vanishes at evaluation point")
        return self.num.evaluate(values) / d

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RatFunc({self.to_str()})"

    def to_str(self, names=None):
        if self.is_poly():
            return poly_to_str(self.num, names)
        return f"({poly_to_str(self.num, names)})/({poly_to_str(self.den, names)})"


# ---------------------------------------------------------------------------
# radical towers


class RadFieldSpec:
    """Shape of a radical tower over Q(zeta_N): one slot per adjoined
    q_t-th root of the formal parameter named m_t."""

    __slots__ = ("conductor", "slots")

    def __init__(self, conductor, slots):
        slots = tuple((str(name), int(q)) for name, q in slots)
        names = [name for name, _ in slots]
        if len(set(names)) != len(names):
            raise StructureError("duplicate Kummer parameter names")
        for name, q in slots:
            if q < 2:
                raise StructureError(f"radical exponent {q} for {name} must be >= 2")
            if conductor % q != 0:
                raise StructureError(
                    f"zeta_{q} not available: {q} does not divide conductor {conductor}")
        self.conductor = conductor
        self.slots = slots

    @property
    def nvars(self):
        return len(self.slots)

    @property
    def names(self):
        return [name for name, _ in self.slots]

    @property
    def exponents(self):
        return [q for _, q in self.slots]

    def root_of_unity(self, t, power=1):
        q = self.slots[t][1]
        return zeta(self.conductor, (self.conductor // q) * power)

    def zero_exps(self):
        return (0,) * len(self.slots)

    def __eq__(self, other):
        return (isinstance(other, RadFieldSpec)
                and self.conductor == other.conductor and self.slots == other.slots)

    def __hash__(self):
        return hash((self.conductor, self.slots))

    def __repr__(self):
        inner = ", ".join(f"{name}^(1/{q})" for name, q in self.slots)
        return f"RadFieldSpec(Q(zeta_{self.conductor})[{inner}])"


class RadNum:
    """Element of the radical tower: finite sum of rational-function
    coefficients times radical monomials x^a with 0 <= a_t < q_t."""

    __slots__ = ("spec", "terms")

    def __init__(self, spec, terms):
        self.spec = spec
        self.terms = terms  # dict radical-exponent-tuple -> nonzero RatFunc

    @staticmethod
    def make(spec, items):
        terms = {}
        nv = spec.nvars
        qs = spec.exponents
        for exps, coeff in items:
            if not coeff:
                continue
            exps = list(exps)
            # absorb carries through x_t^{q_t} = m_t
            for t in range(nv):
                carry, exps[t] = divmod(exps[t], qs[t])
                if carry:
                    coeff = coeff * RatFunc.from_poly(
                        MPoly.var(nv, t, carry) if carry > 0 else MPoly.const(nv, 1))
                    if carry < 0:
                        coeff = coeff / RatFunc.from_poly(MPoly.var(nv, t, -carry))
            exps = tuple(exps)
            if exps in terms:
                s = terms[exps] + coeff
                if s:
                    terms[exps] = s
                else:
                    del terms[exps]
            else:
                terms[exps] = coeff
        return RadNum(spec, terms)

    @staticmethod
    def from_ratfunc(spec, f):
        return RadNum.make(spec, [(spec.zero_exps(), f)])

    @staticmethod
    def from_cyc(spec, c):
        return RadNum.from_ratfunc(spec, RatFunc.from_cyc(c, spec.nvars))

    @staticmethod
    def from_rational(spec, x):
        return RadNum.from_cyc(spec, CycNum.from_rational(x))

    @staticmethod
    def radical(spec, t, power=1):
        """The monomial x_t^power (power may exceed q_t; carries absorbed)."""
        e = [0] * spec.nvars
        e[t] = power
        return RadNum.make(spec, [(tuple(e), RatFunc.from_cyc(_CYC_ONE, spec.nvars))])

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _coerce(self, other):
        if isinstance(other, RadNum):
            if other.spec != self.spec:
                raise StructureError("radical field spec mismatch")
            return other
        if isinstance(other, RatFunc):
            return RadNum.from_ratfunc(self.spec, other)
        if isinstance(other, CycNum):
            return RadNum.from_cyc(self.spec, other)
        return RadNum.from_rational(self.spec, other)

    def __add__(self, other):
        other = self._coerce(other)
        return RadNum.make(self.spec,
                           list(self.terms.items()) + list(other.terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return RadNum(self.spec, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        items = []
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                items.append((tuple(a + b for a, b in zip(e1, e2)), c1 * c2))
        return RadNum.make(self.spec, items)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero tower element")
        nv = self.spec.nvars
        if len(self.terms) == 1:
            # monomial fast path: x^a has inverse x^{q-a} / m
            (exps, coeff), = self.terms.items()
            inv_exps = []
            denom = RatFunc.from_cyc(_CYC_ONE, nv)
            for t, a in enumerate(exps):
                q = self.spec.exponents[t]
                if a == 0:
                    inv_exps.append(0)
                else:
                    inv_exps.append(q - a)
                    denom = denom * RatFunc.from_poly(MPoly.var(nv, t, 1))
            return RadNum.make(self.spec, [(tuple(inv_exps), coeff.inverse() / denom)])
        # dense path: solve (mult-by-self) w = 1 in the regular representation
        basis = _all_exponents(self.spec)
        index = {e: i for i, e in enumerate(basis)}
        zero = RatFunc.from_cyc(_CYC_ZERO, nv)
        one = RatFunc.from_cyc(_CYC_ONE, nv)
        rows = [[zero] * len(basis) for _ in basis]
        for j, e in enumerate(basis):
            prod = self * RadNum.make(self.spec, [(e, one)])
            for pe, pc in prod.terms.items():
                rows[index[pe]][j] = pc
        rhs = [zero] * len(basis)
        rhs[index[self.spec.zero_exps()]] = one
        aug = [row + [r] for row, r in zip(rows, rhs)]
        reduced, pivots = linalg.rref(aug, zero, one)
        sol = [zero] * len(basis)
        for r, pc in enumerate(pivots):
            if pc == len(basis):
                raise ZeroDivisionError("tower element is a zero divisor (bad spec)")
            sol[pc] = reduced[r][len(basis)]
        return RadNum.make(self.spec, list(zip(basis, sol)))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        result = RadNum.from_rational(self.spec, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def galois(self, aut):
        """Apply a tower automorphism (Galois unit + root-of-unity shifts)."""
        if aut.spec != self.spec:
            raise StructureError("automorphism spec mismatch")
        items = []
        for exps, coeff in self.terms.items():
            c = coeff.map_coefficients(lambda x: x.lift(self.spec.conductor).galois(aut.unit))
            mult = _CYC_ONE
            for t, a in enumerate(exps):
                s = aut.shifts[t] * a
                if s % self.spec.exponents[t]:
                    mult = mult * self.spec.root_of_unity(t, s)
            if mult != _CYC_ONE:
                c = c.scale_cyc(mult)
            items.append((exps, c))
        return RadNum.make(self.spec, items)

    def evaluate(self, values):
        """Substitute numeric values for the parameters; radical monomials are
        only allowed when the corresponding value is 1."""
        vals = []
        for name, _ in self.spec.slots:
            if name not in values:
                raise StructureError(f"no value supplied for parameter {name}")
            vals.append(values[name])
        total = _CYC_ZERO
        for exps, coeff in self.terms.items():
            for t, a in enumerate(exps):
                if a and vals[t] != 1:
                    raise StructureError(
                        f"cannot evaluate fractional power of {self.spec.names[t]}")
            total = total + coeff.evaluate(vals)
        return total

    def as_ratfunc(self):
        if not self.terms:
            return RatFunc.from_cyc(_CYC_ZERO, self.spec.nvars)
        if set(self.terms) != {self.spec.zero_exps()}:
            raise StructureError("tower element has a nontrivial radical part")
        return self.terms[self.spec.zero_exps()]

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, CycNum, RatFunc)):
            other = self._coerce(other)
        if not isinstance(other, RadNum):
            return NotImplemented
        return self.spec == other.spec and self.terms == other.terms

    def __hash__(self):
        return hash((self.spec, frozenset(self.terms.items())))

    def __repr__(self):
        return f"RadNum({self.to_str()})"

    def to_str(self):
        if self.is_zero():
            return "0"
        names = self.spec.names
        qs = self.spec.exponents
        parts = []
        for exps in sorted(self.terms):
            coeff = self.terms[exps]
            rad = []
            merged = None
            # merge a monomial coefficient with the radical part for readability
            if len(coeff.num.terms) == 1 and len(coeff.den.terms) == 1:
                (pe, pc), = coeff.num.terms.items()
                (de, dc), = coeff.den.terms.items()
                merged = (tuple(p - d for p, d in zip(pe, de)), pc / dc)
            if merged is not None:
                pe, pc = merged
                for t, a in enumerate(exps):
                    num = pe[t] * qs[t] + a
                    if num:
                        rad.append(_pow_str(names[t], num, qs[t]))
                head = pc.to_str()
            else:
                for t, a in enumerate(exps):
                    if a:
                        rad.append(_pow_str(names[t], a, qs[t]))
                head = f"({coeff.to_str(names)})"
            body = "*".join(rad) if rad else None
            if head == "1" and body:
                text = body
            elif head == "-1" and body:
                text = f"-{body}"
            elif body:
                text = f"{head}*{body}" if " " not in head else f"({head})*{body}"
            else:
                text = head
            parts.append(text)
        out = parts[0]
        for p in parts[1:]:
            if p.startswith("-"):
                out += f" - {p[1:]}"
            else:
                out += f" + {p}"
        return out


def _pow_str(name, num, q):
    from math import gcd as _g
    g = _g(num, q)
    num //= g
    qq = q // g
    if qq == 1:
        return name if num == 1 else f"{name}^{num}"
    return f"{name}^({num}/{qq})"


def _all_exponents(spec):
    out = [()]
    for _, q in spec.slots:
        out = [e + (a,) for e in out for a in range(q)]
    return out


class TowerAut:
    """Field automorphism of the radical tower fixing the parameters m_t:
    acts on Q(zeta_N) by zeta -> zeta^b and on each radical by
    x_t -> zeta_{q_t}^{shifts[t]} * x_t."""

    __slots__ = ("spec", "unit", "shifts")

    def __init__(self, spec, unit, shifts):
        from math import gcd as _g
        if _g(unit, spec.conductor) != 1:
            raise StructureError(f"{unit} is not a unit modulo {spec.conductor}")
        self.spec = spec
        self.unit = unit % spec.conductor if spec.conductor > 1 else 1
        if self.unit == 0:
            self.unit = 1
        self.shifts = tuple(s % q for s, (_, q) in zip(shifts, spec.slots))

    def __mul__(self, other):
        # composition: self applied after other
        shifts = tuple((c1 + self.unit * c2) % q
                       for c1, c2, (_, q) in zip(self.shifts, other.shifts, self.spec.slots))
        return TowerAut(self.spec, self.unit * other.unit, shifts)

    def apply(self, x):
        if isinstance(x, RadNum):
            return x.galois(self)
        if isinstance(x, CycNum):
            return x.lift(self.spec.conductor).galois(self.unit)
        return x

    def __eq__(self, other):
        return (isinstance(other, TowerAut) and self.spec == other.spec
                and self.unit == other.unit and self.shifts == other.shifts)

    def __hash__(self):
        return hash((self.spec, self.unit, self.shifts))

    def __repr__(self):
        return f"TowerAut(b={self.unit}, shifts={self.shifts})"
